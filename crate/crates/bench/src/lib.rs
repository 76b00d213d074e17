//! Fixtures shared by the benchmarks.

use hybridosc_core::sequence::{EqualVariant, NamedCircuit, Parity, Sequence};
use hybridosc_core::tomography::Axis;
use hybridosc_core::{OscState, C64};

/// Even echo circuit with `|ζ| = zeta`, `k = 2`.
pub fn echo_sequence(zeta: f64, n_max: usize) -> Sequence {
    NamedCircuit::EqualSuperposition {
        k: 2,
        zeta: C64::new(zeta, 0.0),
        parity: Parity::Even,
        variant: EqualVariant::Echo,
        echo_gamma: 0.0,
        duration: 400e-6,
    }
    .build(n_max)
    .expect("echo circuit builds")
}

/// Oscillator state heralded by [`echo_sequence`].
pub fn echo_state(zeta: f64, n_max: usize) -> OscState {
    let seq = echo_sequence(zeta, n_max);
    hybridosc_core::sequence::execute(&seq, &Default::default())
        .expect("echo circuit runs")
        .oscillator()
}

pub fn axis(extent: f64, points: usize) -> Axis {
    Axis::new(extent, points).expect("valid axis")
}
