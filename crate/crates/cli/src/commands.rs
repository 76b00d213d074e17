//! Subcommand implementations; each returns the files it produced.

use std::fmt::Write as _;

use hybridosc_core::analysis::{
    char_maxima_on_circle, operator_principal_variances, table_b1, table_csv, DetectionModel,
    MetricsReport, TableConfig,
};
use hybridosc_core::evolution::NoiseSpec;
use hybridosc_core::sequence::{
    execute, sample_heralds, ExecOptions, Herald, NamedCircuit, RunResult, Sequence,
};
use hybridosc_core::tomography::{char_grid_exact, reconstruct_wigner, sample_char_grid};
use hybridosc_core::C64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Format, Source, Tie};
use crate::error::CliError;

pub const RUN_HEADER: &str = "measurement,instruction,herald,probability,observed_probability";
pub const FOCK_HEADER: &str = "n,population";
pub const SWEEP_HEADER: &str = "value,dark_probability,bright_probability,herald_probability,purity,mean_phonon,var_minor,var_major,chi_maxima";

/// Radius and angular resolution of the `|χ|` maxima count.
const MAXIMA_RADIUS: f64 = 1.0;
const MAXIMA_SAMPLES: usize = 360;

/// A named output file; the first one of a command is its primary output.
#[derive(Clone, Debug, PartialEq)]
pub struct OutFile {
    pub name: String,
    pub contents: String,
}

impl OutFile {
    fn new(name: &str, contents: String) -> Self {
        Self {
            name: name.to_string(),
            contents,
        }
    }
}

fn csv_with_config(cfg: &ExperimentConfig, body: &str) -> String {
    format!("# config: {}\n{body}", cfg.to_json_value())
}

fn json_with_config(cfg: &ExperimentConfig, mut fields: serde_json::Map<String, Value>) -> String {
    fields.insert("config".into(), cfg.to_json_value());
    serde_json::to_string_pretty(&Value::Object(fields)).expect("output serializes") + "\n"
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("value serializes")
}

pub fn exec_options(cfg: &ExperimentConfig, seq: &Sequence) -> ExecOptions {
    ExecOptions {
        noisy: cfg.noise || cfg.noise_spec.is_some(),
        noise_override: cfg.noise_spec,
        detection: cfg.detection,
        readout_heating: true,
        policy: cfg.policy(seq),
    }
}

fn simulate(cfg: &ExperimentConfig) -> Result<RunResult, CliError> {
    let seq = cfg.sequence()?;
    Ok(execute(&seq, &exec_options(cfg, &seq))?)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<OutFile>, CliError> {
    let res = simulate(cfg)?;
    let counts = cfg
        .shots
        .map(|s| sample_heralds(&res, s, cfg.seed))
        .transpose()?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut fields = serde_json::Map::new();
            let result: Value = serde_json::from_str(&res.to_json()).expect("run json parses");
            fields.insert("result".into(), result);
            if let Some(c) = &counts {
                fields.insert("herald_counts".into(), to_value(c));
            }
            Ok(vec![OutFile::new(
                "run.json",
                json_with_config(cfg, fields),
            )])
        }
        Format::Csv => {
            let mut run = format!("{RUN_HEADER}\n");
            for (i, m) in res.measurements.iter().enumerate() {
                let herald = match m.herald {
                    Herald::Dark => "dark",
                    Herald::Bright => "bright",
                };
                let _ = writeln!(
                    run,
                    "{i},{},{herald},{:.12},{:.12}",
                    m.instruction, m.probability, m.observed_probability
                );
            }
            let mut fock = format!("{FOCK_HEADER}\n");
            for (n, p) in res.state.fock_populations().iter().enumerate() {
                let _ = writeln!(fock, "{n},{p:.12e}");
            }
            let mut files = vec![
                OutFile::new("run.csv", csv_with_config(cfg, &run)),
                OutFile::new("fock.csv", csv_with_config(cfg, &fock)),
            ];
            if let Some(c) = &counts {
                let mut text = String::from("measurement,attempts,survivors\n");
                for (i, s) in c.survivors.iter().enumerate() {
                    let _ = writeln!(text, "{i},{},{s}", c.attempts);
                }
                files.push(OutFile::new("heralds.csv", csv_with_config(cfg, &text)));
            }
            Ok(files)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    /// Ideal probability of a dark final readout.
    pub dark_probability: f64,
    pub bright_probability: f64,
    pub herald_probability: f64,
    pub purity: f64,
    pub mean_phonon: f64,
    pub var_minor: f64,
    pub var_major: f64,
    /// Only when `chi_maxima = on`.
    pub chi_maxima: Option<usize>,
}

/// Circuit and tie with the swept parameter set to `value`.
pub fn sweep_point(
    circuit: &NamedCircuit,
    tie: Option<Tie>,
    param: &str,
    value: f64,
) -> Result<(NamedCircuit, Option<Tie>), CliError> {
    let mut c = *circuit;
    let mut tie = tie;
    let unsupported = || {
        Err(CliError::config(
            Some("sweep_param"),
            format!("'{param}' cannot be swept on {}", circuit.name()),
        ))
    };
    match (&mut c, param) {
        (NamedCircuit::EqualSuperposition { zeta, .. }, "zeta_abs")
        | (NamedCircuit::ArbitraryTwoConstituent { zeta, .. }, "zeta_abs")
        | (NamedCircuit::SqueezedCat { zeta2: zeta, .. }, "zeta_abs") => {
            *zeta = C64::from_polar(value, zeta.arg());
        }
        (
            NamedCircuit::EqualSuperposition { duration, .. }
            | NamedCircuit::ArbitraryTwoConstituent { duration, .. }
            | NamedCircuit::SqueezedCat { duration, .. },
            "duration",
        ) => *duration = value,
        (NamedCircuit::EqualSuperposition { echo_gamma, .. }, "gamma") => *echo_gamma = value,
        (NamedCircuit::ArbitraryTwoConstituent { gamma, .. }, "gamma") => *gamma = value,
        (NamedCircuit::ArbitraryTwoConstituent { .. }, "phi") => tie = Some(Tie::Phi(value)),
        (NamedCircuit::ArbitraryTwoConstituent { .. }, "c") => tie = Some(Tie::Scale(value)),
        _ => return unsupported(),
    }
    if value < 0.0 && matches!(param, "zeta_abs" | "duration") {
        return Err(CliError::config(
            Some("sweep_values"),
            format!("'{param}' must be non-negative, got {value}"),
        ));
    }
    Ok((c, tie))
}

fn sweep_row(
    cfg: &ExperimentConfig,
    circuit: NamedCircuit,
    value: f64,
) -> Result<SweepRow, CliError> {
    let n_max = cfg
        .n_max
        .unwrap_or_else(|| crate::config::default_n_max(&circuit));
    let seq = circuit.build(n_max)?;
    let res = execute(&seq, &exec_options(cfg, &seq))?;
    let last = res
        .measurements
        .last()
        .ok_or_else(|| CliError::config(Some("circuit"), "circuit has no measurement"))?;
    let dark = match last.herald {
        Herald::Dark => last.probability,
        Herald::Bright => 1.0 - last.probability,
    };
    let osc = res.oscillator();
    let (var_minor, var_major) = operator_principal_variances(&osc)?;
    Ok(SweepRow {
        value,
        dark_probability: dark,
        bright_probability: 1.0 - dark,
        herald_probability: res.herald_probability,
        purity: res.state.purity(),
        mean_phonon: osc.mean_phonon(),
        var_minor,
        var_major,
        chi_maxima: if cfg.chi_maxima {
            Some(char_maxima_on_circle(&osc, MAXIMA_RADIUS, MAXIMA_SAMPLES)?)
        } else {
            None
        },
    })
}

/// Evaluates every sweep value in parallel; rows come back sorted by value.
pub fn sweep_rows(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, CliError> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config(Some("sweep_param"), "no sweep configured"))?;
    let Source::Circuit { circuit, tie } = &cfg.source else {
        return Err(CliError::config(
            Some("sequence"),
            "sweeps need a named circuit, not a sequence file",
        ));
    };
    let points = spec
        .values
        .iter()
        .map(|&v| sweep_point(circuit, *tie, &spec.param, v).map(|p| (v, p)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = points
        .into_par_iter()
        .map(|(v, (c, t))| sweep_row(cfg, ExperimentConfig::circuit(&c, t), v))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{}",
            r.value,
            r.dark_probability,
            r.bright_probability,
            r.herald_probability,
            r.purity,
            r.mean_phonon,
            r.var_minor,
            r.var_major,
            r.chi_maxima.map(|m| m.to_string()).unwrap_or_default()
        );
    }
    out
}

pub fn sweep(cfg: &ExperimentConfig) -> Result<Vec<OutFile>, CliError> {
    let rows = sweep_rows(cfg)?;
    Ok(vec![match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => OutFile::new("sweep.csv", csv_with_config(cfg, &sweep_csv(&rows))),
        Format::Json => {
            let mut fields = serde_json::Map::new();
            fields.insert("rows".into(), to_value(&rows));
            OutFile::new("sweep.json", json_with_config(cfg, fields))
        }
    }])
}

pub fn wigner(cfg: &ExperimentConfig) -> Result<Vec<OutFile>, CliError> {
    let res = simulate(cfg)?;
    let osc = res.oscillator();
    let exact = char_grid_exact(&osc, cfg.axis())?;
    let grid = match cfg.shots {
        None => exact,
        Some(shots) => {
            let errors = DetectionModel::standard().error_probs();
            let readout = cfg.detection.then_some(&errors);
            sample_char_grid(&exact, shots, cfg.seed, readout)?.grid
        }
    };
    let w = reconstruct_wigner(&grid)?;
    let metrics = MetricsReport::compute(&osc, &w, res.herald_probability)?;
    Ok(match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut fields = serde_json::Map::new();
            fields.insert("metrics".into(), to_value(&metrics));
            vec![
                OutFile::new("wigner.csv", csv_with_config(cfg, &w.to_csv())),
                OutFile::new("char.csv", csv_with_config(cfg, &grid.to_csv())),
                OutFile::new("metrics.json", json_with_config(cfg, fields)),
            ]
        }
        Format::Json => {
            let mut fields = serde_json::Map::new();
            let parse =
                |s: String| -> Value { serde_json::from_str(&s).expect("grid json parses") };
            fields.insert("metrics".into(), to_value(&metrics));
            fields.insert("wigner".into(), parse(w.to_json()));
            fields.insert("char".into(), parse(grid.to_json()));
            vec![OutFile::new("wigner.json", json_with_config(cfg, fields))]
        }
    })
}

pub const TABLES: [&str; 1] = ["wln"];

pub fn table(cfg: &ExperimentConfig, name: &str) -> Result<Vec<OutFile>, CliError> {
    if !TABLES.contains(&name) {
        return Err(CliError::usage(format!(
            "unknown table '{name}' (expected one of {})",
            TABLES.join(", ")
        )));
    }
    let defaults = TableConfig::default();
    let tc = TableConfig {
        n_max: cfg.n_max.unwrap_or(defaults.n_max),
        axis: cfg.axis(),
        noise: cfg.noise_spec.unwrap_or_else(NoiseSpec::experimental),
        ..defaults
    };
    let rows = table_b1(&tc)?;
    Ok(vec![match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => OutFile::new("table.csv", csv_with_config(cfg, &table_csv(&rows))),
        Format::Json => {
            let mut fields = serde_json::Map::new();
            fields.insert("table".into(), json!(name));
            fields.insert("rows".into(), to_value(&rows));
            OutFile::new("table.json", json_with_config(cfg, fields))
        }
    }])
}
