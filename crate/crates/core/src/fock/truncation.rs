use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_LEAKAGE_TOL: f64 = 1e-8;
/// Band tolerance for `k ≥ 3` interactions, whose truncated evolution keeps a
/// population of order `1e-3` near the cutoff at every `n_max`.
pub const RELAXED_LEAKAGE_TOL: f64 = 1e-2;

/// Guard against silent truncation error: the population in the top
/// `⌈0.1·n_max⌉` Fock levels must stay below `leakage_tol`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub leakage_tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            leakage_tol: DEFAULT_LEAKAGE_TOL,
        }
    }
}

impl TruncationPolicy {
    pub fn with_tolerance(leakage_tol: f64) -> Self {
        Self { leakage_tol }
    }

    pub fn relaxed() -> Self {
        Self {
            leakage_tol: RELAXED_LEAKAGE_TOL,
        }
    }

    /// `relaxed` for `k ≥ 3`, default otherwise.
    pub fn for_order(k: usize) -> Self {
        if k >= 3 {
            Self::relaxed()
        } else {
            Self::default()
        }
    }

    /// Disables the guard; used by code paths that measure leakage themselves.
    pub fn unchecked() -> Self {
        Self {
            leakage_tol: f64::INFINITY,
        }
    }

    /// First Fock level of the guarded band.
    pub fn band_start(n_max: usize) -> usize {
        let width = ((0.1 * n_max as f64).ceil() as usize).max(1);
        n_max + 1 - width.min(n_max + 1)
    }

    /// `populations[n]` is the population of Fock level `n`.
    pub fn band_population(populations: impl IntoIterator<Item = f64>, n_max: usize) -> f64 {
        let start = Self::band_start(n_max);
        populations.into_iter().skip(start).sum()
    }

    pub fn check(&self, populations: impl IntoIterator<Item = f64>, n_max: usize) -> Result<()> {
        let pop = Self::band_population(populations, n_max);
        if pop.is_nan() || pop >= self.leakage_tol {
            return Err(Error::Leakage {
                population: pop,
                band_start: Self::band_start(n_max),
                tolerance: self.leakage_tol,
            });
        }
        Ok(())
    }
}
