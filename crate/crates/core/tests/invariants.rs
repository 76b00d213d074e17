//! Property tests over the operator, evolution, tomography and metric layers.

use std::f64::consts::PI;

use hybridosc_core::analysis::{
    normalization_coeff_closed, off_lattice_mass, operator_principal_variances, wln, DetectionModel,
};
use hybridosc_core::evolution::{
    apply_conditioned_nonlinear, effective_spin_basis, spin_rotation, NonlinearSpec, SqueezeCache,
};
use hybridosc_core::fock::{
    constituent_state, fock_ket, make_annihilation, make_generalized_squeeze_with, make_momentum,
    make_number, make_parity, make_position, HybridKet, HybridState, OscState, Pauli,
    TruncationPolicy,
};
use hybridosc_core::sequence::{
    execute, herald_probability, EqualVariant, ExecOptions, Herald, NamedCircuit, Parity,
};
use hybridosc_core::tomography::{char_grid_exact, reconstruct_wigner, rotate_wigner, Axis};
use hybridosc_core::C64;
use ndarray::{Array1, Array2};
use proptest::prelude::*;

fn inner(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hermitian_operators(n_max in 1usize..60) {
        let a = make_annihilation(n_max).unwrap();
        let adag_a = a.dagger().dot(&a);
        for op in [
            make_position(n_max).unwrap(),
            make_momentum(n_max).unwrap(),
            make_number(n_max),
            make_parity(n_max),
            adag_a,
        ] {
            prop_assert!(op.hermiticity_defect() < 1e-12 * op.norm().max(1.0));
        }
    }

    #[test]
    fn squeeze_unitary_on_interior(k in 2usize..=4, r in 0.0f64..0.3, phase in 0.0..2.0 * PI) {
        let n_max = 80;
        // unitarity only; truncation leakage of k >= 3 is not under test here
        let g = make_generalized_squeeze_with(k, C64::from_polar(r, phase), n_max, TruncationPolicy::unchecked())
            .unwrap();
        let m = g.matrix();
        let prod = dagger(m).dot(m);
        let interior = n_max + 1 - TruncationPolicy::band_start(n_max).min(n_max + 1);
        let keep = n_max + 1 - interior;
        let mut worst: f64 = 0.0;
        for i in 0..keep {
            for j in 0..keep {
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[[i, j]] - C64::new(id, 0.0)).norm());
            }
        }
        prop_assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn squeezed_vacuum_on_multiples_of_k(k in 2usize..=4, r in 0.0f64..0.5, phase in 0.0..2.0 * PI) {
        let policy = TruncationPolicy::for_order(k);
        let v = constituent_state(k, C64::from_polar(r, phase), 200, policy).unwrap();
        let pops: Vec<f64> = v.iter().map(|c| c.norm_sqr()).collect();
        prop_assert!(off_lattice_mass(&pops, k, 0) < 1e-12);
    }

    #[test]
    fn noiseless_evolution_keeps_purity(
        r in 0.0f64..1.0,
        phase in 0.0..2.0 * PI,
        theta in 0.0..PI,
        gamma in 0.0..2.0 * PI,
        cond in pauli(),
    ) {
        let n_max = 90;
        let st = HybridState::product(2, 0, &OscState::vacuum(n_max)).unwrap();
        let st = spin_rotation(&st, (0, 1), gamma, theta).unwrap();
        let spec = NonlinearSpec::new(2, C64::from_polar(r, phase), cond).unwrap();
        let out = apply_conditioned_nonlinear(&st, &spec, &SqueezeCache::new(), TruncationPolicy::default())
            .unwrap();
        prop_assert!((out.purity() - 1.0).abs() < 1e-9);
        let out = spin_rotation(&out, (0, 1), gamma + 0.3, theta * 0.5).unwrap();
        prop_assert!((out.purity() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn complementary_heralds_sum_to_one(
        theta in 0.0..PI,
        gamma in 0.0..2.0 * PI,
        r in 0.0f64..1.0,
    ) {
        let n_max = 90;
        let st = HybridState::product(2, 0, &OscState::vacuum(n_max)).unwrap();
        let st = spin_rotation(&st, (0, 1), gamma, theta).unwrap();
        let spec = NonlinearSpec::new(2, C64::new(r, 0.0), Pauli::Z).unwrap();
        let st = apply_conditioned_nonlinear(&st, &spec, &SqueezeCache::new(), TruncationPolicy::default())
            .unwrap();
        let st = spin_rotation(&st, (0, 1), 0.5 * PI, 0.5 * PI).unwrap();
        let total = herald_probability(&st, Herald::Dark) + herald_probability(&st, Herald::Bright);
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn heralded_states_sit_on_the_parity_lattice(r in 0.05f64..1.2, odd in any::<bool>()) {
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let c = NamedCircuit::EqualSuperposition {
            k: 2,
            zeta: C64::new(r, 0.0),
            parity,
            variant: EqualVariant::Echo,
            echo_gamma: 0.0,
            duration: 4e-4,
        };
        let run = execute(&c.build(160).unwrap(), &ExecOptions::noiseless()).unwrap();
        let offset = if odd { 2 } else { 0 };
        prop_assert!(off_lattice_mass(&run.state.fock_populations(), 4, offset) < 1e-10);
    }

    #[test]
    fn closed_norms_match_inner_products(r in 0.0f64..1.7) {
        let p = TruncationPolicy::default();
        let z = constituent_state(2, C64::new(r, 0.0), 400, p).unwrap();
        let mz = constituent_state(2, C64::new(-r, 0.0), 400, p).unwrap();
        let plus = &z + &mz;
        let minus = &z - &mz;
        let (np, nm) = normalization_coeff_closed(r).unwrap();
        prop_assert!((inner(&plus, &plus).re / 4.0 - np).abs() < 1e-8);
        prop_assert!((inner(&minus, &minus).re / 4.0 - nm).abs() < 1e-8);
    }

    #[test]
    fn char_grid_hermitian_symmetry(n in 0usize..6, r in 0.0f64..0.8) {
        let mut ket = fock_ket(n, 60);
        ket[0] += C64::new(r, 0.0);
        let st = OscState::from_ket(ket).unwrap();
        let chi = char_grid_exact(&st, Axis::new(4.0, 41).unwrap()).unwrap();
        prop_assert!(chi.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn reconstruction_is_linear(w in 0.0f64..1.0, n in 1usize..4) {
        let axis = Axis::new(6.0, 81).unwrap();
        let a = OscState::vacuum(30);
        let b = OscState::fock(n, 30);
        let mix = OscState::Mixed(a.rho() * C64::new(w, 0.0) + b.rho() * C64::new(1.0 - w, 0.0));
        let wa = reconstruct_wigner(&char_grid_exact(&a, axis).unwrap()).unwrap();
        let wb = reconstruct_wigner(&char_grid_exact(&b, axis).unwrap()).unwrap();
        let wm = reconstruct_wigner(&char_grid_exact(&mix, axis).unwrap()).unwrap();
        let expect = &wa.values * w + &wb.values * (1.0 - w);
        let worst = (&wm.values - &expect).iter().map(|v| v.abs()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-10);
    }

    #[test]
    fn false_dark_rate_grows_with_threshold(t in 12u64..50) {
        let mut m = DetectionModel::standard();
        m.threshold = t;
        let lo = m.error_probs().p_dark_given_bright;
        m.threshold = t + 1;
        prop_assert!(m.error_probs().p_dark_given_bright > lo);
    }

    #[test]
    fn basis_rule(a in pauli(), b in pauli(), k in 2usize..=4) {
        prop_assume!(a != b);
        let beta = effective_spin_basis(k, a, b).unwrap();
        if k % 2 == 0 {
            for s in [a, b] {
                let anti = beta.matrix().dot(&s.matrix()) + s.matrix().dot(&beta.matrix());
                prop_assert!(max_abs(&anti) < 1e-15);
            }
        } else {
            prop_assert_eq!(beta, b);
        }
    }

    #[test]
    fn moment_variances_match_dense_operators(
        amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12),
    ) {
        let n_max = 40;
        let mut ket = Array1::zeros(n_max + 1);
        for (n, (re, im)) in amps.iter().enumerate() {
            ket[n] = C64::new(*re, *im);
        }
        prop_assume!(ket.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3);
        let st = OscState::from_ket(ket).unwrap();
        let x = make_position(n_max).unwrap();
        let p = make_momentum(n_max).unwrap();
        let mean = |op: &hybridosc_core::Operator| st.expectation(op).re;
        let (mx, mp) = (mean(&x), mean(&p));
        let vx = mean(&x.dot(&x)) - mx * mx;
        let vp = mean(&p.dot(&p)) - mp * mp;
        let c = 0.5 * (mean(&x.dot(&p)) + mean(&p.dot(&x))) - mx * mp;
        let tr = vx + vp;
        let det = vx * vp - c * c;
        let (lo, hi) = operator_principal_variances(&st).unwrap();
        // support far below n_max: truncated matrices are exact here
        prop_assert!((lo + hi - tr).abs() < 1e-10);
        prop_assert!((lo * hi - det).abs() < 1e-10 * det.abs().max(1.0));
        prop_assert!(lo <= hi && lo * hi >= 0.25 - 1e-9);
    }
}

#[test]
fn gaussian_states_have_zero_wln() {
    let axis = Axis::new(8.0, 201).unwrap();
    let thermal = hybridosc_core::fock::thermal_state(0.4, 60).unwrap();
    let mix = OscState::Mixed(
        OscState::vacuum(60).rho() * C64::new(0.5, 0.0) + thermal.rho() * C64::new(0.5, 0.0),
    );
    for st in [OscState::vacuum(60), thermal, mix] {
        let w = reconstruct_wigner(&char_grid_exact(&st, axis).unwrap()).unwrap();
        assert!(wln(&w).unwrap().abs() < 1e-6);
    }
}

#[test]
fn wln_survives_rotation() {
    let n_max = 120;
    let c = NamedCircuit::EqualSuperposition {
        k: 2,
        zeta: C64::new(1.12, 0.0),
        parity: Parity::Even,
        variant: EqualVariant::Echo,
        echo_gamma: 0.0,
        duration: 4e-4,
    };
    let run = execute(&c.build(n_max).unwrap(), &ExecOptions::noiseless()).unwrap();
    let w = reconstruct_wigner(
        &char_grid_exact(&run.oscillator(), Axis::new(6.0, 201).unwrap()).unwrap(),
    )
    .unwrap();
    let base = wln(&w).unwrap();
    // interpolation tolerance: WLN shift of a rotate-and-return round trip
    let tol = (wln(&rotate_wigner(&rotate_wigner(&w, 0.6), -0.6)).unwrap() - base).abs();
    for angle in [0.3, 0.6, 1.1, PI / 2.0] {
        let d = (wln(&rotate_wigner(&w, angle)).unwrap() - base).abs();
        assert!(d <= 2.0 * tol.max(1e-12), "angle {angle}: {d} vs {tol}");
    }
}

#[test]
fn hidden_level_shields_the_oscillator() {
    let n_max = 60;
    let mut osc = fock_ket(0, n_max + 1);
    osc[2] = C64::new(0.5, 0.0);
    let ket = HybridKet::product(3, 2, &(osc.clone() / C64::new(1.25f64.sqrt(), 0.0))).unwrap();
    let st = ket.to_density();
    for cond in [Pauli::X, Pauli::Y, Pauli::Z] {
        let spec = NonlinearSpec::new(2, C64::new(0.8, 0.3), cond).unwrap();
        let out = apply_conditioned_nonlinear(
            &st,
            &spec,
            &SqueezeCache::new(),
            TruncationPolicy::default(),
        )
        .unwrap();
        let d = &out.reduced_oscillator().rho() - &st.reduced_oscillator().rho();
        assert!(max_abs(&d) < 1e-12);
    }
}
