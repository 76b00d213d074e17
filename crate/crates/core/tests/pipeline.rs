//! End-to-end runs through the sequence layer.

use hybridosc_core::analysis::{normalization_coeff_closed, MetricsReport};
use hybridosc_core::evolution::{apply_heating, apply_heating_with, default_steps, NoiseSpec};
use hybridosc_core::fock::{constituent_state, HybridState, OscState, TruncationPolicy};
use hybridosc_core::sequence::{
    execute, parse_sequence, sample_heralds, EqualVariant, ExecOptions, NamedCircuit, Parity,
};
use hybridosc_core::tomography::{char_grid_exact, reconstruct_wigner, Axis};
use hybridosc_core::C64;

const ECHO_SEQUENCE: &str = "\
init nbar=0 nmax=400 spin=2 level=0
rot pair=01 axis=y theta=pi/2
nl k=2 zeta=ZETA phi=0 cond=z echo=x dur=400e-6
rot pair=01 axis=y theta=pi/2
measure herald=HERALD
";

fn echo_sequence(zeta: f64, herald: &str, n_max: usize) -> String {
    ECHO_SEQUENCE
        .replace("ZETA", &zeta.to_string())
        .replace("HERALD", herald)
        .replace("nmax=400", &format!("nmax={n_max}"))
}

#[test]
fn herald_curve_matches_closed_form() {
    for i in 1..=20 {
        let z = i as f64 * 0.1;
        let (n_max, policy) = if z <= 1.7 {
            (400, TruncationPolicy::default())
        } else {
            (800, TruncationPolicy::with_tolerance(1e-4))
        };
        let opts = ExecOptions::noiseless().with_policy(policy);
        let (np, nm) = normalization_coeff_closed(z).unwrap();
        let even = execute(&parse_sequence(&echo_sequence(z, "dark", n_max)).unwrap(), &opts).unwrap();
        let odd = execute(&parse_sequence(&echo_sequence(z, "bright", n_max)).unwrap(), &opts).unwrap();
        assert!((even.herald_probability - np).abs() < 1e-6, "zeta {z}");
        assert!((odd.herald_probability - nm).abs() < 1e-6, "zeta {z}");
        let m = &even.measurements[0];
        assert!((m.probability + odd.measurements[0].probability - 1.0).abs() < 1e-9);
    }
}

#[test]
fn dsl_and_named_circuit_agree() {
    let text = execute(
        &parse_sequence(&echo_sequence(1.12, "dark", 160)).unwrap(),
        &ExecOptions::noiseless(),
    )
    .unwrap();
    let named = NamedCircuit::EqualSuperposition {
        k: 2,
        zeta: C64::new(1.12, 0.0),
        parity: Parity::Even,
        variant: EqualVariant::Echo,
        echo_gamma: 0.0,
        duration: 4e-4,
    };
    let built = execute(&named.build(160).unwrap(), &ExecOptions::noiseless()).unwrap();
    assert_eq!(text.state, built.state);
}

#[test]
fn wait_with_noise_is_apply_heating() {
    let seq = parse_sequence("init nbar=0.3 nmax=30 spin=2 level=0\nwait dur=1e-3\n").unwrap();
    let opts = ExecOptions {
        noisy: true,
        noise_override: Some(NoiseSpec::new(0.0, 300.0).unwrap()),
        ..ExecOptions::noiseless()
    };
    let run = execute(&seq, &opts).unwrap();
    let start =
        HybridState::product(2, 0, &hybridosc_core::fock::thermal_state(0.3, 30).unwrap()).unwrap();
    let direct = apply_heating_with(
        &start,
        300.0,
        1e-3,
        default_steps(1e-3),
        TruncationPolicy::default(),
    )
    .unwrap();
    assert_eq!(run.state.density(), direct);
}

#[test]
fn noise_directive_sets_the_heating_model() {
    let text = "noise nbar0=0 ndot=300\ninit nbar=0 nmax=30 spin=2 level=0\nwait dur=1e-3\n";
    let seq = parse_sequence(text).unwrap();
    let noisy = ExecOptions {
        noisy: true,
        ..ExecOptions::noiseless()
    };
    let run = execute(&seq, &noisy).unwrap();
    let growth = run.oscillator().mean_phonon();
    assert!((growth - 0.3).abs() < 1e-3);
    let quiet = execute(&seq, &ExecOptions::noiseless()).unwrap();
    assert_eq!(quiet.oscillator().mean_phonon(), 0.0);
}

#[test]
fn heating_rate_on_vacuum_and_squeezed_vacuum() {
    let n_max = 120;
    let sq = constituent_state(2, C64::new(1.12, 0.0), n_max, TruncationPolicy::default()).unwrap();
    for osc in [OscState::vacuum(n_max), OscState::from_ket(sq).unwrap()] {
        let st = HybridState::product(2, 0, &osc).unwrap();
        let n0 = osc.mean_phonon();
        for t in [2e-4, 1e-3] {
            let out = apply_heating(&st, 300.0, t, default_steps(t)).unwrap();
            let rate = (out.reduced_oscillator().mean_phonon() - n0) / t;
            assert!((rate / 300.0 - 1.0).abs() < 0.01, "rate {rate} at t {t}");
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let c = NamedCircuit::defaults("equal_superposition").unwrap();
    let seq = c.build(140).unwrap();
    let opts = ExecOptions::realistic();
    let a = execute(&seq, &opts).unwrap();
    let b = execute(&seq, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(
        sample_heralds(&a, 1000, 9).unwrap(),
        sample_heralds(&b, 1000, 9).unwrap()
    );
    assert_ne!(
        sample_heralds(&a, 1000, 9).unwrap(),
        sample_heralds(&a, 1000, 10).unwrap()
    );
}

#[test]
fn realistic_run_is_mixed_and_normalized() {
    let c = NamedCircuit::defaults("equal_superposition").unwrap();
    let run = execute(&c.build(140).unwrap(), &ExecOptions::realistic()).unwrap();
    let rho = run.state.density();
    assert!((rho.trace().re - 1.0).abs() < 1e-10);
    assert!(run.state.purity() < 0.99);
    assert!(run.elapsed > 4e-4);
    let w = reconstruct_wigner(
        &char_grid_exact(&run.oscillator(), Axis::new(6.0, 121).unwrap()).unwrap(),
    )
    .unwrap();
    let report = MetricsReport::compute(&run.oscillator(), &w, run.herald_probability).unwrap();
    assert!(report.to_json().contains("wln"));
}
