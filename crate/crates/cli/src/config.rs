//! `key = value` experiment configuration, presets and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use hybridosc_core::evolution::NoiseSpec;
use hybridosc_core::sequence::tokens::{parse_nonneg, parse_real, parse_uint};
use hybridosc_core::sequence::{parse_sequence, NamedCircuit, Sequence};
use hybridosc_core::tomography::{Axis, DEFAULT_BETA_MAX, DEFAULT_BETA_POINTS};
use hybridosc_core::{TruncationPolicy, C64};
use serde::Serialize;

use crate::error::CliError;

/// Keys accepted outside the circuit parameters.
const GENERAL_KEYS: [&str; 18] = [
    "preset",
    "sequence",
    "circuit",
    "noise",
    "nbar0",
    "ndot",
    "detection",
    "nmax",
    "leakage_tol",
    "beta_max",
    "points",
    "shots",
    "seed",
    "out",
    "format",
    "sweep_param",
    "sweep_values",
    "chi_maxima",
];

/// Circuit parameters, validated against the selected circuit.
const CIRCUIT_KEYS: [&str; 13] = [
    "k",
    "zeta",
    "parity",
    "variant",
    "gamma",
    "duration",
    "k2",
    "zeta2",
    "theta",
    "phi",
    "c",
    "alpha",
    "sdf_duration",
];

pub const PRESETS: [(&str, &str); 11] = [
    ("herald_curve", include_str!("../presets/herald_curve.conf")),
    ("even_k2", include_str!("../presets/even_k2.conf")),
    ("odd_k2", include_str!("../presets/odd_k2.conf")),
    ("even_k3", include_str!("../presets/even_k3.conf")),
    ("odd_k3", include_str!("../presets/odd_k3.conf")),
    ("even_k4", include_str!("../presets/even_k4.conf")),
    ("odd_k4", include_str!("../presets/odd_k4.conf")),
    ("phase_tie", include_str!("../presets/phase_tie.conf")),
    ("scale_tie", include_str!("../presets/scale_tie.conf")),
    ("mixed_order", include_str!("../presets/mixed_order.conf")),
    ("squeezed_cat", include_str!("../presets/squeezed_cat.conf")),
];

pub const SWEEP_PARAMS: [&str; 5] = ["zeta_abs", "duration", "gamma", "phi", "c"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Second constituent tied to the first: `ζ′ = e^{2iφ}ζ` or `ζ′ = cζ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tie {
    Phi(f64),
    Scale(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Circuit {
        circuit: NamedCircuit,
        tie: Option<Tie>,
    },
    Sequence {
        path: PathBuf,
        #[serde(skip)]
        sequence: Sequence,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub param: String,
    pub values: Vec<f64>,
}

/// Fully resolved configuration; serialized into every output file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub source: Source,
    pub noise: bool,
    /// Explicit heating model; `None` defers to the sequence or the defaults.
    pub noise_spec: Option<NoiseSpec>,
    pub detection: bool,
    pub n_max: Option<usize>,
    pub leakage_tol: Option<f64>,
    pub beta_max: f64,
    pub points: usize,
    pub shots: Option<u64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub sweep: Option<SweepSpec>,
    /// Count `|χ|` maxima on the unit circle in sweeps.
    pub chi_maxima: bool,
}

/// Ordered `key = value` pairs with the line each came from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
    base_dir: Option<PathBuf>,
}

impl RawConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(
                    None,
                    format!("{origin}:{}: expected 'key = value'", i + 1),
                ));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(CliError::config(
                    Some(&key),
                    format!("{origin}:{}: empty key or value", i + 1),
                ));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(CliError::config(
                    Some(&key),
                    format!("{origin}:{}: duplicate key '{key}'", i + 1),
                ));
            }
        }
        Ok(Self {
            entries,
            base_dir: None,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(None, format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut raw = Self::parse(&text, &path.display().to_string())?;
        raw.base_dir = path.parent().map(Path::to_path_buf);
        Ok(raw)
    }

    pub fn preset(name: &str) -> Result<Self, CliError> {
        let text = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| {
                let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
                CliError::config(
                    Some("preset"),
                    format!(
                        "unknown preset '{name}' (expected one of {})",
                        names.join(", ")
                    ),
                )
            })?;
        Self::parse(text, name)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    /// Entries of `over` replace those of `self`.
    pub fn overlay(mut self, over: RawConfig) -> Self {
        self.entries.extend(over.entries);
        if over.base_dir.is_some() {
            self.base_dir = over.base_dir;
        }
        self
    }

    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        for key in self.entries.keys() {
            if !GENERAL_KEYS.contains(&key.as_str()) && !CIRCUIT_KEYS.contains(&key.as_str()) {
                return Err(CliError::config(Some(key), format!("unknown key '{key}'")));
            }
        }
        let source = self.source()?;
        let noise = match self.get("noise") {
            None => false,
            Some(v) => flag("noise", v)?,
        };
        let nbar0 = self.opt("nbar0", parse_nonneg)?;
        let ndot = self.opt("ndot", parse_nonneg)?;
        let noise_spec = if nbar0.is_some() || ndot.is_some() {
            let d = NoiseSpec::experimental();
            Some(
                NoiseSpec::new(nbar0.unwrap_or(d.nbar0), ndot.unwrap_or(d.ndot))
                    .map_err(|e| CliError::config(Some("ndot"), e.to_string()))?,
            )
        } else {
            None
        };
        let detection = match self.get("detection") {
            None => false,
            Some(v) => flag("detection", v)?,
        };
        let leakage_tol = self.opt("leakage_tol", parse_nonneg)?;
        if leakage_tol == Some(0.0) {
            return Err(CliError::config(Some("leakage_tol"), "must be positive"));
        }
        let beta_max = self
            .opt("beta_max", parse_nonneg)?
            .unwrap_or(DEFAULT_BETA_MAX);
        let points = self
            .opt("points", parse_uint)?
            .unwrap_or(DEFAULT_BETA_POINTS);
        Axis::new(beta_max, points).map_err(|e| CliError::config(Some("points"), e.to_string()))?;
        let shots = self.opt("shots", parse_uint)?.map(|s| s as u64);
        if shots == Some(0) {
            return Err(CliError::config(Some("shots"), "must be positive"));
        }
        let seed = self
            .opt("seed", |v| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| format!("expected an unsigned integer, got '{v}'"))
            })?
            .unwrap_or(0);
        let format = match self.get("format") {
            None => None,
            Some("csv") => Some(Format::Csv),
            Some("json") => Some(Format::Json),
            Some(v) => {
                return Err(CliError::config(
                    Some("format"),
                    format!("expected 'csv' or 'json', got '{v}'"),
                ))
            }
        };
        let sweep = match (self.get("sweep_param"), self.get("sweep_values")) {
            (None, None) => None,
            (Some(p), Some(v)) => {
                if !SWEEP_PARAMS.contains(&p) {
                    return Err(CliError::config(
                        Some("sweep_param"),
                        format!(
                            "unknown sweep parameter '{p}' (expected one of {})",
                            SWEEP_PARAMS.join(", ")
                        ),
                    ));
                }
                Some(SweepSpec {
                    param: p.to_string(),
                    values: parse_values(v)
                        .map_err(|e| CliError::config(Some("sweep_values"), e))?,
                })
            }
            (Some(_), None) => {
                return Err(CliError::config(
                    Some("sweep_values"),
                    "missing sweep values",
                ))
            }
            (None, Some(_)) => {
                return Err(CliError::config(
                    Some("sweep_param"),
                    "missing sweep parameter",
                ))
            }
        };
        Ok(ExperimentConfig {
            preset: self.get("preset").map(str::to_string),
            source,
            noise,
            noise_spec,
            detection,
            n_max: self.opt("nmax", parse_uint)?,
            leakage_tol,
            beta_max,
            points,
            shots,
            seed,
            out: self.get("out").map(PathBuf::from),
            format,
            sweep,
            chi_maxima: match self.get("chi_maxima") {
                None => false,
                Some(v) => flag("chi_maxima", v)?,
            },
        })
    }

    fn opt<T>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, CliError> {
        self.get(key)
            .map(|v| parse(v).map_err(|e| CliError::config(Some(key), format!("{key}: {e}"))))
            .transpose()
    }

    fn source(&self) -> Result<Source, CliError> {
        let circuit_keys: Vec<&String> = self
            .entries
            .keys()
            .filter(|k| CIRCUIT_KEYS.contains(&k.as_str()))
            .collect();
        match (self.get("sequence"), self.get("circuit")) {
            (Some(_), Some(_)) => Err(CliError::config(
                Some("sequence"),
                "set either 'sequence' or 'circuit', not both",
            )),
            (Some(path), None) => {
                if let Some(k) = circuit_keys.first() {
                    return Err(CliError::config(
                        Some(k),
                        format!("'{k}' is a circuit parameter but the source is a sequence file"),
                    ));
                }
                let path = match &self.base_dir {
                    Some(dir) if Path::new(path).is_relative() => dir.join(path),
                    _ => PathBuf::from(path),
                };
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    CliError::config(
                        Some("sequence"),
                        format!("cannot read {}: {e}", path.display()),
                    )
                })?;
                let sequence = parse_sequence(&text).map_err(|e| {
                    CliError::config(Some("sequence"), format!("{}: {e}", path.display()))
                })?;
                Ok(Source::Sequence { path, sequence })
            }
            (None, name) => {
                let name = name.unwrap_or("equal_superposition");
                let mut circuit = NamedCircuit::defaults(name)
                    .map_err(|e| CliError::config(Some("circuit"), e.to_string()))?;
                let mut tie = None;
                for key in circuit_keys {
                    let value = &self.entries[key];
                    let is_qutrit = matches!(circuit, NamedCircuit::ArbitraryTwoConstituent { .. });
                    match key.as_str() {
                        "phi" | "c" if !is_qutrit => {
                            return Err(CliError::config(
                                Some(key),
                                format!("unknown parameter '{key}' for {name}"),
                            ))
                        }
                        "phi" | "c" if tie.is_some() => {
                            return Err(CliError::config(
                                Some(key),
                                "set either 'phi' or 'c', not both",
                            ))
                        }
                        "phi" => {
                            tie = Some(Tie::Phi(
                                parse_real(value).map_err(|e| CliError::config(Some(key), e))?,
                            ))
                        }
                        "c" => {
                            tie = Some(Tie::Scale(
                                parse_real(value).map_err(|e| CliError::config(Some(key), e))?,
                            ))
                        }
                        _ => circuit
                            .set(key, value)
                            .map_err(|e| CliError::config(Some(key), format!("{key}: {e}")))?,
                    }
                }
                if tie.is_some() && self.get("zeta2").is_some() {
                    return Err(CliError::config(
                        Some("zeta2"),
                        "'zeta2' cannot be combined with 'phi' or 'c'",
                    ));
                }
                Ok(Source::Circuit { circuit, tie })
            }
        }
    }
}

fn flag(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        v => Err(CliError::config(
            Some(key),
            format!("expected 'on' or 'off', got '{v}'"),
        )),
    }
}

/// `start:stop:count` (inclusive) or a comma-separated list.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (parse_real(start)?, parse_real(stop)?);
            let n = parse_uint(count)?;
            if n < 2 {
                return Err("a range needs at least 2 points".into());
            }
            Ok((0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect())
        }
        [_] => text.split(',').map(parse_real).collect(),
        _ => Err(format!(
            "expected 'start:stop:count' or a list, got '{text}'"
        )),
    }
}

impl ExperimentConfig {
    /// Circuit with `tie` applied to its second constituent.
    pub fn circuit(circuit: &NamedCircuit, tie: Option<Tie>) -> NamedCircuit {
        let mut c = *circuit;
        if let (NamedCircuit::ArbitraryTwoConstituent { zeta, zeta2, .. }, Some(t)) = (&mut c, tie)
        {
            *zeta2 = match t {
                Tie::Phi(phi) => *zeta * C64::from_polar(1.0, 2.0 * phi),
                Tie::Scale(s) => *zeta * s,
            };
        }
        c
    }

    /// Sequence for this configuration, `nmax` applied.
    pub fn sequence(&self) -> Result<Sequence, CliError> {
        match &self.source {
            Source::Circuit { circuit, tie } => {
                Ok(Self::circuit(circuit, *tie)
                    .build(self.n_max.unwrap_or(default_n_max(circuit)))?)
            }
            Source::Sequence { sequence, .. } => Ok(match self.n_max {
                Some(n) => sequence.clone().with_n_max(n),
                None => sequence.clone(),
            }),
        }
    }

    pub fn policy(&self, seq: &Sequence) -> TruncationPolicy {
        self.leakage_tol
            .map(TruncationPolicy::with_tolerance)
            .unwrap_or_else(|| TruncationPolicy::for_order(seq.max_order()))
    }

    pub fn axis(&self) -> Axis {
        Axis::new(self.beta_max, self.points).expect("validated at resolve time")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Truncation used when the configuration sets none.
pub fn default_n_max(circuit: &NamedCircuit) -> usize {
    let zeta = match circuit {
        NamedCircuit::EqualSuperposition { zeta, .. } => zeta.norm(),
        NamedCircuit::ArbitraryTwoConstituent { zeta, zeta2, .. } => zeta.norm().max(zeta2.norm()),
        NamedCircuit::SqueezedCat { zeta2, alpha, .. } => zeta2.norm() + alpha.norm() / 2.0,
    };
    if zeta <= 1.2 {
        200
    } else {
        400
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn every_preset_resolves() {
        for (name, _) in PRESETS {
            let raw = RawConfig::preset(name).unwrap();
            let cfg = raw.resolve().unwrap();
            assert!(cfg.sequence().is_ok(), "{name}");
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let raw = RawConfig::parse("zeta = 1.0\nbogus_key = 3\n", "test").unwrap();
        let err = raw.resolve().unwrap_err();
        assert_eq!(err.key(), Some("bogus_key"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn circuit_key_checked_against_circuit() {
        let raw = RawConfig::parse("circuit = equal_superposition\nalpha = 1\n", "t").unwrap();
        assert_eq!(raw.resolve().unwrap_err().key(), Some("alpha"));
        let raw = RawConfig::parse("phi = pi/2\n", "t").unwrap();
        assert_eq!(raw.resolve().unwrap_err().key(), Some("phi"));
    }

    #[test]
    fn syntax_errors() {
        assert!(RawConfig::parse("zeta 1.0\n", "t").is_err());
        assert!(RawConfig::parse("zeta = 1\nzeta = 2\n", "t").is_err());
        let raw = RawConfig::parse("zeta = one\n", "t").unwrap();
        assert_eq!(raw.resolve().unwrap_err().key(), Some("zeta"));
    }

    #[test]
    fn overlay_order() {
        let base = RawConfig::parse("zeta = 1\nseed = 3\n", "a").unwrap();
        let over = RawConfig::parse("zeta = 2\n", "b").unwrap();
        let merged = base.overlay(over);
        assert_eq!(merged.get("zeta"), Some("2"));
        assert_eq!(merged.get("seed"), Some("3"));
    }

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_values("0.1, pi").unwrap(), vec![0.1, PI]);
        assert!(parse_values("0:1:1").is_err());
        assert!(parse_values("0:1").is_err());
    }

    #[test]
    fn tie_sets_second_constituent() {
        let raw = RawConfig::parse("circuit = arbitrary_two_constituent\nc = 0.5\n", "t").unwrap();
        let cfg = raw.resolve().unwrap();
        let Source::Circuit { circuit, tie } = &cfg.source else {
            unreachable!()
        };
        let NamedCircuit::ArbitraryTwoConstituent { zeta, zeta2, .. } =
            ExperimentConfig::circuit(circuit, *tie)
        else {
            unreachable!()
        };
        assert!((zeta2 - zeta * 0.5).norm() < 1e-15);
    }

    #[test]
    fn noise_values() {
        let raw = RawConfig::parse("noise = on\nndot = 100\n", "t").unwrap();
        let cfg = raw.resolve().unwrap();
        assert!(cfg.noise);
        let spec = cfg.noise_spec.unwrap();
        assert_eq!((spec.nbar0, spec.ndot), (0.1, 100.0));
        let raw = RawConfig::parse("noise = maybe\n", "t").unwrap();
        assert_eq!(raw.resolve().unwrap_err().key(), Some("noise"));
    }
}
