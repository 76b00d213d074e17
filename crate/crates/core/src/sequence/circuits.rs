//! Named circuits for the equal, arbitrary and cat superpositions.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::ir::{Herald, Instruction, Sequence};
use super::tokens::{parse_complex, parse_nonneg, parse_real, parse_uint};
use crate::error::{Error, Result};
use crate::evolution::{NoiseSpec, NonlinearSpec};
use crate::fock::Pauli;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// How the equal superposition is generated and heralded.
///
/// | variant | even | odd |
/// |---|---|---|
/// | `Echo` | x echo, dark | y echo, dark |
/// | `Plain` | dark | bright |
/// | `SigmaX` | start in level 1, dark | start in level 0, dark |
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualVariant {
    Echo,
    Plain,
    SigmaX,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "circuit", rename_all = "snake_case")]
pub enum NamedCircuit {
    /// `|ζ⟩ ± |−ζ⟩`.
    EqualSuperposition {
        k: usize,
        zeta: C64,
        parity: Parity,
        variant: EqualVariant,
        /// Extra phase of the echo π pulse axis (Echo variant only).
        echo_gamma: f64,
        duration: f64,
    },
    /// `|ζ⟩ − tan(θ/2)e^{−2iγ}|ζ′⟩` on a qutrit, `ζ′` of order `k2`.
    ArbitraryTwoConstituent {
        k: usize,
        zeta: C64,
        k2: usize,
        zeta2: C64,
        theta: f64,
        gamma: f64,
        duration: f64,
    },
    /// `(D(α) + D(−α))(|ζ₂⟩ + |−ζ₂⟩)`.
    SqueezedCat {
        zeta2: C64,
        alpha: C64,
        duration: f64,
        sdf_duration: f64,
    },
}

pub const CIRCUIT_NAMES: [&str; 3] = [
    "equal_superposition",
    "arbitrary_two_constituent",
    "squeezed_cat",
];

impl NamedCircuit {
    pub fn name(&self) -> &'static str {
        match self {
            NamedCircuit::EqualSuperposition { .. } => CIRCUIT_NAMES[0],
            NamedCircuit::ArbitraryTwoConstituent { .. } => CIRCUIT_NAMES[1],
            NamedCircuit::SqueezedCat { .. } => CIRCUIT_NAMES[2],
        }
    }

    /// Defaults for `name`: ζ = 1.12 (k = 2, 2×200 µs echo); the qutrit circuit
    /// defaults to `ζ′ = −ζ`, θ = γ = π/2; the cat uses ζ₂ = 1.25, α = 1.62e^{iπ/4}.
    pub fn defaults(name: &str) -> Result<Self> {
        let zeta = C64::new(1.12, 0.0);
        Ok(match name {
            "equal_superposition" => NamedCircuit::EqualSuperposition {
                k: 2,
                zeta,
                parity: Parity::Even,
                variant: EqualVariant::Echo,
                echo_gamma: 0.0,
                duration: 400e-6,
            },
            "arbitrary_two_constituent" => NamedCircuit::ArbitraryTwoConstituent {
                k: 2,
                zeta,
                k2: 2,
                zeta2: -zeta,
                theta: FRAC_PI_2,
                gamma: FRAC_PI_2,
                duration: 200e-6,
            },
            "squeezed_cat" => NamedCircuit::SqueezedCat {
                zeta2: C64::new(1.25, 0.0),
                alpha: C64::from_polar(1.62, PI / 4.0),
                duration: 200e-6,
                sdf_duration: 108.6e-6,
            },
            other => {
                return Err(Error::domain(format!(
                    "unknown circuit '{other}' (expected one of {})",
                    CIRCUIT_NAMES.join(", ")
                )))
            }
        })
    }

    /// Defaults for `name` overridden by `params`; unknown keys are rejected.
    pub fn from_params(name: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        let mut c = Self::defaults(name)?;
        for (key, value) in params {
            c.set(key, value)
                .map_err(|e| Error::domain(format!("{name}: {key}: {e}")))?;
        }
        Ok(c)
    }

    /// Sets one parameter from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let name = self.name();
        let unknown = || Err(format!("unknown parameter for {name}"));
        match self {
            NamedCircuit::EqualSuperposition {
                k,
                zeta,
                parity,
                variant,
                echo_gamma,
                duration,
            } => match key {
                "k" => *k = parse_uint(value)?,
                "zeta" => *zeta = parse_complex(value)?,
                "duration" => *duration = parse_nonneg(value)?,
                "gamma" => *echo_gamma = parse_real(value)?,
                "parity" => {
                    *parity = match value.trim() {
                        "even" => Parity::Even,
                        "odd" => Parity::Odd,
                        v => return Err(format!("expected 'even' or 'odd', got '{v}'")),
                    }
                }
                "variant" => {
                    *variant = match value.trim() {
                        "echo" => EqualVariant::Echo,
                        "plain" => EqualVariant::Plain,
                        "sigma_x" => EqualVariant::SigmaX,
                        v => {
                            return Err(format!("expected 'echo', 'plain' or 'sigma_x', got '{v}'"))
                        }
                    }
                }
                _ => return unknown(),
            },
            NamedCircuit::ArbitraryTwoConstituent {
                k,
                zeta,
                k2,
                zeta2,
                theta,
                gamma,
                duration,
            } => match key {
                "k" => *k = parse_uint(value)?,
                "zeta" => *zeta = parse_complex(value)?,
                "k2" => *k2 = parse_uint(value)?,
                "zeta2" => *zeta2 = parse_complex(value)?,
                "theta" => *theta = parse_real(value)?,
                "gamma" => *gamma = parse_real(value)?,
                "duration" => *duration = parse_nonneg(value)?,
                _ => return unknown(),
            },
            NamedCircuit::SqueezedCat {
                zeta2,
                alpha,
                duration,
                sdf_duration,
            } => match key {
                "zeta" | "zeta2" => *zeta2 = parse_complex(value)?,
                "alpha" => *alpha = parse_complex(value)?,
                "duration" => *duration = parse_nonneg(value)?,
                "sdf_duration" => *sdf_duration = parse_nonneg(value)?,
                _ => return unknown(),
            },
        }
        Ok(())
    }

    pub fn build(&self, n_max: usize) -> Result<Sequence> {
        let init = |spin_dim, level| Instruction::Init {
            nbar: 0.0,
            n_max,
            spin_dim,
            level,
        };
        let rot = |pair, gamma, theta| Instruction::Rot { pair, gamma, theta };
        let dark = Instruction::Measure {
            herald: Herald::Dark,
            model: None,
        };
        let ins = match *self {
            NamedCircuit::EqualSuperposition {
                k,
                zeta,
                parity,
                variant,
                echo_gamma,
                duration,
            } => match variant {
                EqualVariant::Echo => {
                    let gamma = echo_gamma
                        + if parity == Parity::Even {
                            0.0
                        } else {
                            FRAC_PI_2
                        };
                    let spec = NonlinearSpec::new(k, zeta, Pauli::Z)?.with_echo(gamma);
                    equal_block(n_max, spec, duration)
                        .into_iter()
                        .chain([dark])
                        .collect()
                }
                EqualVariant::Plain => {
                    let spec = NonlinearSpec::new(k, zeta, Pauli::Z)?;
                    let herald = if parity == Parity::Even {
                        Herald::Dark
                    } else {
                        Herald::Bright
                    };
                    let mut v = equal_block(n_max, spec, duration);
                    v.push(Instruction::Measure {
                        herald,
                        model: None,
                    });
                    v
                }
                EqualVariant::SigmaX => {
                    let level = if parity == Parity::Even { 1 } else { 0 };
                    let spec = NonlinearSpec::new(k, zeta, Pauli::X)?;
                    vec![
                        init(2, level),
                        Instruction::Nonlinear { spec, duration },
                        dark,
                    ]
                }
            },
            NamedCircuit::ArbitraryTwoConstituent {
                k,
                zeta,
                k2,
                zeta2,
                theta,
                gamma,
                duration,
            } => {
                let first = NonlinearSpec::new(k, zeta, Pauli::Z)?;
                let second = NonlinearSpec::new(k2, zeta2, Pauli::Z)?;
                vec![
                    init(3, 0),
                    rot((0, 2), FRAC_PI_2, theta),
                    Instruction::Nonlinear {
                        spec: first,
                        duration,
                    },
                    rot((0, 2), gamma, PI),
                    Instruction::Nonlinear {
                        spec: second,
                        duration,
                    },
                    rot((0, 2), FRAC_PI_2, FRAC_PI_2),
                    rot((0, 1), FRAC_PI_2, PI),
                    dark,
                ]
            }
            NamedCircuit::SqueezedCat {
                zeta2,
                alpha,
                duration,
                sdf_duration,
            } => {
                let spec = NonlinearSpec::new(2, zeta2, Pauli::Z)?.with_echo(0.0);
                let mut v = equal_block(n_max, spec, duration);
                v.push(dark.clone());
                v.push(Instruction::SdfDisplace {
                    axis: Pauli::X,
                    alpha,
                    duration: sdf_duration,
                });
                v.push(dark);
                v
            }
        };
        Sequence::new(ins, NoiseSpec::off())
    }
}

/// `init; R_y(π/2); nl; R_y(π/2)` on a qubit.
fn equal_block(n_max: usize, spec: NonlinearSpec, duration: f64) -> Vec<Instruction> {
    vec![
        Instruction::Init {
            nbar: 0.0,
            n_max,
            spin_dim: 2,
            level: 0,
        },
        Instruction::Rot {
            pair: (0, 1),
            gamma: FRAC_PI_2,
            theta: FRAC_PI_2,
        },
        Instruction::Nonlinear { spec, duration },
        Instruction::Rot {
            pair: (0, 1),
            gamma: FRAC_PI_2,
            theta: FRAC_PI_2,
        },
    ]
}

/// Builds the named circuit with `params` overriding its defaults.
pub fn build_named_circuit(
    name: &str,
    params: &BTreeMap<String, String>,
    n_max: usize,
) -> Result<Sequence> {
    NamedCircuit::from_params(name, params)?.build(n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{normalization_coeff_closed, off_lattice_mass};
    use crate::fock::linalg::inner;
    use crate::fock::{constituent_state, make_displacement, TruncationPolicy};
    use crate::sequence::{execute, ExecOptions};
    use ndarray::Array1;

    fn osc_ket(c: &NamedCircuit, n_max: usize) -> (Array1<C64>, f64) {
        let r = execute(&c.build(n_max).unwrap(), &ExecOptions::noiseless()).unwrap();
        let ket = r.state.ket().expect("noiseless runs stay pure").clone();
        let d = ket.osc_dim();
        let s = ket.spin_probs().iter().position(|p| *p > 0.5).unwrap();
        (
            ket.amps().slice(ndarray::s![s * d..(s + 1) * d]).to_owned(),
            r.herald_probability,
        )
    }

    fn superpose(a: &Array1<C64>, b: &Array1<C64>, cb: C64) -> Array1<C64> {
        let v = a + &(b * cb);
        let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v / C64::new(n, 0.0)
    }

    fn fid(a: &Array1<C64>, b: &Array1<C64>) -> f64 {
        inner(a, b).norm_sqr()
    }

    fn equal(parity: Parity, variant: EqualVariant) -> NamedCircuit {
        NamedCircuit::EqualSuperposition {
            k: 2,
            zeta: C64::new(1.12, 0.0),
            parity,
            variant,
            echo_gamma: 0.0,
            duration: 4e-4,
        }
    }

    #[test]
    fn herald_convention_table() {
        let n_max = 120;
        let p = TruncationPolicy::default();
        let z = constituent_state(2, C64::new(1.12, 0.0), n_max, p).unwrap();
        let mz = constituent_state(2, C64::new(-1.12, 0.0), n_max, p).unwrap();
        let even = superpose(&z, &mz, C64::new(1.0, 0.0));
        let odd = superpose(&z, &mz, C64::new(-1.0, 0.0));
        let (np, nm) = normalization_coeff_closed(1.12).unwrap();
        for variant in [
            EqualVariant::Echo,
            EqualVariant::Plain,
            EqualVariant::SigmaX,
        ] {
            let (e, pe) = osc_ket(&equal(Parity::Even, variant), n_max);
            let (o, po) = osc_ket(&equal(Parity::Odd, variant), n_max);
            assert!(fid(&e, &even) > 1.0 - 1e-10, "{variant:?} even");
            assert!(fid(&o, &odd) > 1.0 - 1e-10, "{variant:?} odd");
            assert!(
                (pe - np).abs() < 1e-9 && (po - nm).abs() < 1e-9,
                "{variant:?}"
            );
        }
    }

    #[test]
    fn qutrit_amplitude_and_phase() {
        let n_max = 120;
        let p = TruncationPolicy::default();
        let zeta = C64::new(1.12, 0.0);
        let z = constituent_state(2, zeta, n_max, p).unwrap();
        let mz = constituent_state(2, -zeta, n_max, p).unwrap();
        let arb = |theta, gamma| NamedCircuit::ArbitraryTwoConstituent {
            k: 2,
            zeta,
            k2: 2,
            zeta2: -zeta,
            theta,
            gamma,
            duration: 2e-4,
        };
        let (even, _) = osc_ket(&arb(FRAC_PI_2, FRAC_PI_2), n_max);
        assert!(fid(&even, &superpose(&z, &mz, C64::new(1.0, 0.0))) > 1.0 - 1e-9);
        let (odd, _) = osc_ket(&arb(FRAC_PI_2, 0.0), n_max);
        assert!(fid(&odd, &superpose(&z, &mz, C64::new(-1.0, 0.0))) > 1.0 - 1e-9);
        // a|ζ⟩ + b|−ζ⟩ with a/b = cot(π/8)
        let (skew, _) = osc_ket(&arb(PI / 4.0, FRAC_PI_2), n_max);
        let b = (PI / 8.0).tan();
        assert!(fid(&skew, &superpose(&z, &mz, C64::new(b, 0.0))) > 1.0 - 1e-9);
    }

    #[test]
    fn cat_is_displaced_superposition() {
        let n_max = 160;
        let p = TruncationPolicy::default();
        let c = NamedCircuit::defaults("squeezed_cat").unwrap();
        let NamedCircuit::SqueezedCat { zeta2, alpha, .. } = c else {
            unreachable!()
        };
        let z = constituent_state(2, zeta2, n_max, p).unwrap();
        let mz = constituent_state(2, -zeta2, n_max, p).unwrap();
        let even = superpose(&z, &mz, C64::new(1.0, 0.0));
        let dp = make_displacement(alpha, n_max).unwrap().apply(even.view());
        let dm = make_displacement(-alpha, n_max).unwrap().apply(even.view());
        let (cat, _) = osc_ket(&c, n_max);
        assert!(fid(&cat, &superpose(&dp, &dm, C64::new(1.0, 0.0))) > 1.0 - 1e-9);
    }

    #[test]
    fn sigma_x_trisqueezed_lattice() {
        let c = NamedCircuit::EqualSuperposition {
            k: 3,
            zeta: C64::new(0.74, 0.0),
            parity: Parity::Odd,
            variant: EqualVariant::SigmaX,
            echo_gamma: 0.0,
            duration: 5e-4,
        };
        let opts = ExecOptions::noiseless().with_policy(TruncationPolicy::for_order(3));
        let r = execute(&c.build(200).unwrap(), &opts).unwrap();
        assert!(off_lattice_mass(&r.state.fock_populations(), 6, 3) < 1e-10);
    }

    #[test]
    fn echo_phase_swaps_parity() {
        let n_max = 120;
        let (np, nm) = normalization_coeff_closed(1.12).unwrap();
        let mut c = equal(Parity::Even, EqualVariant::Echo);
        c.set("gamma", "pi/2").unwrap();
        let (swapped, p) = osc_ket(&c, n_max);
        let (odd, _) = osc_ket(&equal(Parity::Odd, EqualVariant::Echo), n_max);
        assert!(fid(&swapped, &odd) > 1.0 - 1e-10);
        assert!((p - nm).abs() < 1e-9);
        c.set("gamma", "pi/4").unwrap();
        let (_, mid) = osc_ket(&c, n_max);
        assert!((mid - 0.5 * (np + nm)).abs() < 1e-9);
    }

    #[test]
    fn names_and_params() {
        assert!(matches!(
            NamedCircuit::defaults("nope"),
            Err(Error::Domain(_))
        ));
        let mut params = BTreeMap::new();
        params.insert("zeta".to_string(), "1.67".to_string());
        params.insert("parity".to_string(), "odd".to_string());
        let c = NamedCircuit::from_params("equal_superposition", &params).unwrap();
        assert!(matches!(
            c,
            NamedCircuit::EqualSuperposition {
                parity: Parity::Odd,
                ..
            }
        ));
        params.insert("bogus".to_string(), "1".to_string());
        assert!(NamedCircuit::from_params("equal_superposition", &params).is_err());
    }
}
