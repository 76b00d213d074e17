//! Characteristic-function tomography: exact and shot-sampled `χ(β)`,
//! Fourier reconstruction of `W(x, p)`, a parity oracle, windowing and rotation.

pub mod charfn;
pub mod grid;
pub mod measured;
pub mod oracle;
pub mod reconstruct;
pub mod window;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use charfn::{
    char_fn_exact, char_fn_exact_with, char_grid_exact, char_grid_exact_with, hermite_functions,
};
pub use grid::{Axis, CharGrid, WignerGrid, DEFAULT_BETA_MAX, DEFAULT_BETA_POINTS};
pub use measured::{char_fn_measured, protocol_probability, sample_estimate, MeasuredValue, Part};
pub use oracle::{wigner_parity_oracle, wigner_parity_oracle_xp};
pub use reconstruct::{
    alias_limit, dual_axis, reconstruct_complex, reconstruct_wigner, reconstruct_wigner_on,
};
pub use window::{rotate_wigner, window_wigner, window_wigner_shaped, WindowShape, Windowed};

use crate::analysis::detection::ReadoutErrors;
use crate::error::Result;

/// Shot-sampled characteristic grid with per-point standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCharGrid {
    pub grid: CharGrid,
    pub stderr_re: Array2<f64>,
    pub stderr_im: Array2<f64>,
}

/// Samples every point of an exact grid with `shots` shots per part.
///
/// Each point draws from its own ChaCha8 stream (`seed`, stream = point
/// index), so results do not depend on thread count or evaluation order.
pub fn sample_char_grid(
    exact: &CharGrid,
    shots: u64,
    seed: u64,
    readout: Option<&ReadoutErrors>,
) -> Result<SampledCharGrid> {
    let n = exact.axis.points;
    let draws: Vec<Result<(MeasuredValue, MeasuredValue)>> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let chi = exact.values[[idx / n, idx % n]];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64);
            let re = sample_estimate(
                ((1.0 + chi.re) / 2.0).clamp(0.0, 1.0),
                shots,
                readout,
                &mut rng,
            )?;
            let im = sample_estimate(
                ((1.0 + chi.im) / 2.0).clamp(0.0, 1.0),
                shots,
                readout,
                &mut rng,
            )?;
            Ok((re, im))
        })
        .collect();
    let mut values = Array2::zeros((n, n));
    let mut stderr_re = Array2::zeros((n, n));
    let mut stderr_im = Array2::zeros((n, n));
    for (idx, d) in draws.into_iter().enumerate() {
        let (re, im) = d?;
        let (a, b) = (idx / n, idx % n);
        values[[a, b]] = C64::new(re.estimate, im.estimate);
        stderr_re[[a, b]] = re.stderr;
        stderr_im[[a, b]] = im.stderr;
    }
    Ok(SampledCharGrid {
        grid: CharGrid::new(exact.axis, values)?,
        stderr_re,
        stderr_im,
    })
}
