//! WLN and min(W) rows for the even and odd squeezed superpositions.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::metrics::{min_wigner, wln, wln_windowed, WINDOW_FRACTION};
use crate::error::Result;
use crate::evolution::NoiseSpec;
use crate::sequence::{execute, EqualVariant, ExecOptions, NamedCircuit, Parity};
use crate::tomography::{
    char_grid_exact, reconstruct_wigner, Axis, DEFAULT_BETA_MAX, DEFAULT_BETA_POINTS,
};

pub const TABLE_HEADER: &str =
    "superposition,mode,zeta,duration,wln,wln_unwindowed,min_w,herald_probability";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub n_max: usize,
    pub axis: Axis,
    pub even_zeta: f64,
    pub odd_zeta: f64,
    /// Echo durations (both arms).
    pub even_duration: f64,
    pub odd_duration: f64,
    /// Heating model of the realistic rows.
    pub noise: NoiseSpec,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            n_max: 400,
            axis: Axis::new(DEFAULT_BETA_MAX, DEFAULT_BETA_POINTS).expect("valid default axis"),
            even_zeta: 1.12,
            odd_zeta: 1.67,
            even_duration: 400e-6,
            odd_duration: 600e-6,
            noise: NoiseSpec::experimental(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub superposition: Parity,
    /// `"realistic"` or `"ideal"`.
    pub mode: String,
    pub zeta: f64,
    pub duration: f64,
    /// On the 0.95-mass window.
    pub wln: f64,
    pub wln_unwindowed: f64,
    pub min_w: f64,
    pub herald_probability: f64,
}

/// One row: executes the echo circuit, reconstructs `W` from the exact `χ` grid.
pub fn table_row(
    parity: Parity,
    zeta: f64,
    duration: f64,
    realistic: bool,
    cfg: &TableConfig,
) -> Result<TableRow> {
    let circuit = NamedCircuit::EqualSuperposition {
        k: 2,
        zeta: C64::new(zeta, 0.0),
        parity,
        variant: EqualVariant::Echo,
        echo_gamma: 0.0,
        duration,
    };
    let opts = if realistic {
        ExecOptions {
            noise_override: Some(cfg.noise),
            ..ExecOptions::realistic()
        }
    } else {
        ExecOptions::noiseless()
    };
    let run = execute(&circuit.build(cfg.n_max)?, &opts)?;
    let w = reconstruct_wigner(&char_grid_exact(&run.oscillator(), cfg.axis)?)?;
    let (wl, _) = wln_windowed(&w, WINDOW_FRACTION)?;
    Ok(TableRow {
        superposition: parity,
        mode: if realistic { "realistic" } else { "ideal" }.into(),
        zeta,
        duration,
        wln: wl,
        wln_unwindowed: wln(&w)?,
        min_w: min_wigner(&w),
        herald_probability: run.herald_probability,
    })
}

/// Realistic and ideal rows for the even then the odd superposition.
pub fn table_b1(cfg: &TableConfig) -> Result<Vec<TableRow>> {
    let mut rows = Vec::with_capacity(4);
    for (parity, zeta, duration) in [
        (Parity::Even, cfg.even_zeta, cfg.even_duration),
        (Parity::Odd, cfg.odd_zeta, cfg.odd_duration),
    ] {
        for realistic in [true, false] {
            rows.push(table_row(parity, zeta, duration, realistic, cfg)?);
        }
    }
    Ok(rows)
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in rows {
        let parity = match r.superposition {
            Parity::Even => "even",
            Parity::Odd => "odd",
        };
        let _ = writeln!(
            out,
            "{parity},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            r.mode, r.zeta, r.duration, r.wln, r.wln_unwindowed, r.min_w, r.herald_probability
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let row = TableRow {
            superposition: Parity::Odd,
            mode: "ideal".into(),
            zeta: 1.67,
            duration: 6e-4,
            wln: 1.0,
            wln_unwindowed: 1.1,
            min_w: -0.1,
            herald_probability: 0.4,
        };
        let csv = table_csv(&[row]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(TABLE_HEADER));
        assert_eq!(
            lines.next(),
            Some("odd,ideal,1.67,0.0006,1.000000,1.100000,-0.100000,0.400000")
        );
    }

    #[test]
    fn ideal_row_is_pure_and_negative() {
        let cfg = TableConfig {
            n_max: 200,
            axis: Axis::new(6.0, 121).unwrap(),
            ..Default::default()
        };
        let r = table_row(Parity::Even, 1.12, 4e-4, false, &cfg).unwrap();
        assert!(r.min_w < 0.0 && r.wln > 0.0 && r.wln <= r.wln_unwindowed + 1e-12);
    }
}
