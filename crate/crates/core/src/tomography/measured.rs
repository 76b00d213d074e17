//! Shot-sampled characteristic function via a σ_y-conditioned displacement.
//!
//! The spin starts in `|0_s⟩` (followed by `R_y(π/2)` for the imaginary
//! part), the oscillator is displaced by `D(σ_y β/2)`, and the spin is read
//! out. In both cases `P(|0_s⟩) = (1 + Re/Im χ(β))/2`.

use std::f64::consts::FRAC_PI_2;

use ndarray::s;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::charfn::state_top_level;
use crate::analysis::detection::ReadoutErrors;
use crate::error::{Error, Result};
use crate::evolution::branch::conditioned_ket;
use crate::evolution::spin_rotation_ket;
use crate::fock::action::{displace_ket_in, padded_dim};
use crate::fock::{HybridKet, OscState, Pauli};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredValue {
    pub estimate: f64,
    pub stderr: f64,
    /// Exact probability of reading the bright outcome, readout errors included.
    pub p_bright: f64,
    /// Expectation of `estimate`.
    pub expected: f64,
}

/// Exact `P(|0_s⟩)` after the protocol, before readout errors.
pub fn protocol_probability(state: &OscState, beta: C64, part: Part) -> Result<f64> {
    let half = beta * 0.5;
    let dim = padded_dim(state_top_level(state), half.norm()).max(state.dim());
    let mut p = 0.0;
    for (w, psi) in state.components() {
        let mut osc = ndarray::Array1::zeros(dim);
        osc.slice_mut(s![..psi.len()]).assign(&psi);
        let mut ket = HybridKet::product(2, 0, &osc)?;
        if part == Part::Im {
            ket = spin_rotation_ket(&ket, (0, 1), FRAC_PI_2, FRAC_PI_2)?;
        }
        let out = conditioned_ket(&ket, Pauli::Y, |sgn, v| {
            displace_ket_in(v, half * sgn, dim).expect("padded dimension fits")
        })?;
        p += w * out.spin_probs()[0];
    }
    Ok(p.clamp(0.0, 1.0))
}

/// One shot-noise-limited estimate of `Re χ(β)` or `Im χ(β)`.
///
/// Readout errors, when given, are folded into the bright probability and
/// inverted in the estimator so that it stays unbiased.
pub fn char_fn_measured(
    state: &OscState,
    beta: C64,
    part: Part,
    shots: u64,
    seed: u64,
    readout: Option<&ReadoutErrors>,
) -> Result<MeasuredValue> {
    let p0 = protocol_probability(state, beta, part)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_estimate(p0, shots, readout, &mut rng)
}

/// Draws the binomial outcome for a known protocol probability `p0`.
pub fn sample_estimate(
    p0: f64,
    shots: u64,
    readout: Option<&ReadoutErrors>,
    rng: &mut ChaCha8Rng,
) -> Result<MeasuredValue> {
    if shots == 0 {
        return Err(Error::domain("shots must be positive"));
    }
    let e = readout.copied().unwrap_or_else(ReadoutErrors::perfect);
    let false_bright = e.p_bright_given_dark + e.p_lifetime_flip;
    let contrast = e.p_bright_given_bright() - false_bright;
    if contrast <= 0.0 {
        return Err(Error::domain("readout cannot distinguish bright from dark"));
    }
    let p_bright = (p0 * e.p_bright_given_bright() + (1.0 - p0) * false_bright).clamp(0.0, 1.0);
    let k = Binomial::new(shots, p_bright)
        .map_err(|err| Error::domain(err.to_string()))?
        .sample(rng);
    let f = k as f64 / shots as f64;
    // add-one frequency keeps the error bar finite at k = 0 or k = shots
    let f_adj = (k as f64 + 1.0) / (shots as f64 + 2.0);
    let scale = 2.0 / contrast;
    Ok(MeasuredValue {
        estimate: scale * (f - false_bright) - 1.0,
        stderr: scale * (f_adj * (1.0 - f_adj) / shots as f64).sqrt(),
        p_bright,
        expected: 2.0 * p0 - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::detection::DetectionModel;
    use crate::fock::{constituent_state, TruncationPolicy};
    use crate::tomography::charfn::char_fn_exact;

    fn test_state() -> OscState {
        let mut psi =
            constituent_state(2, C64::new(0.6, 0.2), 60, TruncationPolicy::default()).unwrap();
        psi[1] += C64::new(0.0, 0.4);
        OscState::from_ket(psi).unwrap()
    }

    #[test]
    fn analytic_mode_matches_exact() {
        let st = test_state();
        for beta in [C64::new(0.0, 0.0), C64::new(0.7, -0.3), C64::new(-1.5, 1.1)] {
            let chi = char_fn_exact(&st, beta).unwrap();
            let re = 2.0 * protocol_probability(&st, beta, Part::Re).unwrap() - 1.0;
            let im = 2.0 * protocol_probability(&st, beta, Part::Im).unwrap() - 1.0;
            assert!((re - chi.re).abs() < 1e-12, "{beta}: {re} vs {}", chi.re);
            assert!((im - chi.im).abs() < 1e-12, "{beta}: {im} vs {}", chi.im);
        }
    }

    #[test]
    fn zero_shots_rejected() {
        let st = OscState::vacuum(5);
        assert!(char_fn_measured(&st, C64::new(0.1, 0.0), Part::Re, 0, 1, None).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let st = test_state();
        let e = DetectionModel::standard().error_probs();
        let a = char_fn_measured(&st, C64::new(0.4, 0.4), Part::Im, 300, 7, Some(&e)).unwrap();
        let b = char_fn_measured(&st, C64::new(0.4, 0.4), Part::Im, 300, 7, Some(&e)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stderr_matches_spread() {
        // χ = 0.5 ⇒ p = 0.75; binomial std of the estimate is 2√(p(1-p)/n).
        let shots = 300;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<MeasuredValue> = (0..1000)
            .map(|_| sample_estimate(0.75, shots, None, &mut rng).unwrap())
            .collect();
        let mean = samples.iter().map(|m| m.estimate).sum::<f64>() / 1000.0;
        let var = samples
            .iter()
            .map(|m| (m.estimate - mean).powi(2))
            .sum::<f64>()
            / 999.0;
        let predicted = 2.0 * (0.75f64 * 0.25 / shots as f64).sqrt();
        let mean_stderr = samples.iter().map(|m| m.stderr).sum::<f64>() / 1000.0;
        assert!((var.sqrt() / predicted - 1.0).abs() < 0.1);
        assert!((mean_stderr / predicted - 1.0).abs() < 0.1);
        assert!((mean - 0.5).abs() < 4.0 * predicted / (1000f64).sqrt());
    }

    #[test]
    fn stderr_stays_positive_at_certain_outcome() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = sample_estimate(1.0, 300, None, &mut rng).unwrap();
        assert_eq!(m.estimate, 1.0);
        assert!(m.stderr > 0.0 && m.stderr < 0.02);
    }
}
