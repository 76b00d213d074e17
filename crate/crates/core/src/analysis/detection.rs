//! Fluorescence readout with Poisson photon counts.
//!
//! A shot is classified dark when its count is at most `threshold`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{DiscreteCDF, Poisson};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionModel {
    /// Mean counts of a dark ion.
    pub dark_mean: f64,
    /// Mean counts of a bright ion.
    pub bright_mean: f64,
    /// Counts at or below the threshold read as dark.
    pub threshold: u64,
    /// Dark-state lifetime, s.
    pub dark_lifetime: f64,
    /// Readout window, s.
    pub readout_duration: f64,
}

/// Misclassification probabilities of one readout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutErrors {
    pub p_dark_given_bright: f64,
    pub p_bright_given_dark: f64,
    pub p_lifetime_flip: f64,
}

impl ReadoutErrors {
    pub fn perfect() -> Self {
        Self {
            p_dark_given_bright: 0.0,
            p_bright_given_dark: 0.0,
            p_lifetime_flip: 0.0,
        }
    }

    /// Probability that a dark ion reads dark.
    pub fn p_dark_given_dark(&self) -> f64 {
        1.0 - self.p_bright_given_dark - self.p_lifetime_flip
    }

    pub fn p_bright_given_bright(&self) -> f64 {
        1.0 - self.p_dark_given_bright
    }
}

impl Default for DetectionModel {
    fn default() -> Self {
        Self::standard()
    }
}

impl DetectionModel {
    /// Calibrated model: 11.24 / 54.82 mean counts, threshold 28, 0.4 s dark
    /// lifetime and a 200 µs window.
    pub fn standard() -> Self {
        Self {
            dark_mean: 11.24,
            bright_mean: 54.82,
            threshold: 28,
            dark_lifetime: 0.4,
            readout_duration: 200e-6,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "standard" | "default" => Ok(Self::standard()),
            other => Err(Error::domain(format!("unknown detection model '{other}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.threshold as f64;
        let positive = [
            self.dark_mean,
            self.bright_mean,
            self.dark_lifetime,
            self.readout_duration,
        ]
        .iter()
        .all(|x| *x > 0.0 && x.is_finite());
        if !positive || !(self.dark_mean < t && t < self.bright_mean) {
            return Err(Error::domain("detection model requires 0 < dark_mean < threshold < bright_mean and positive times"));
        }
        Ok(())
    }

    /// Poisson tails at the threshold plus the dark-state decay during readout.
    /// Does not call [`Self::validate`], so degenerate thresholds can be probed.
    pub fn error_probs(&self) -> ReadoutErrors {
        let bright = Poisson::new(self.bright_mean).expect("positive bright mean");
        let dark = Poisson::new(self.dark_mean).expect("positive dark mean");
        ReadoutErrors {
            p_dark_given_bright: bright.cdf(self.threshold),
            p_bright_given_dark: dark.sf(self.threshold),
            p_lifetime_flip: self.readout_duration / self.dark_lifetime,
        }
    }
}

/// `(P(dark|bright), P(bright|dark), P(lifetime flip))`.
pub fn detection_error_probs(model: &DetectionModel) -> (f64, f64, f64) {
    let e = model.error_probs();
    (
        e.p_dark_given_bright,
        e.p_bright_given_dark,
        e.p_lifetime_flip,
    )
}

/// Dark-state SPAM fidelity `(1 - ε_prep)(1 - P(bright|dark) - P(flip))`.
pub fn spam_dark_probability(model: &DetectionModel, prep_error: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&prep_error) {
        return Err(Error::domain("preparation error must lie in [0, 1]"));
    }
    Ok((1.0 - prep_error) * model.error_probs().p_dark_given_dark())
}
