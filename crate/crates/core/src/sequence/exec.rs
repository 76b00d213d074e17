//! Instruction-by-instruction execution with analytic heralding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::herald::{herald_mixture, herald_probability, project_ket, project_state, HERALD_FLOOR};
use super::ir::{Herald, Instruction, Sequence};
use crate::analysis::{DetectionModel, ReadoutErrors};
use crate::error::{Error, Result};
use crate::evolution::{
    apply_conditioned_nonlinear, apply_conditioned_nonlinear_ket,
    apply_conditioned_nonlinear_noisy, apply_heating_with, default_steps,
    spin_dependent_displacement, spin_dependent_displacement_ket, spin_rotation, spin_rotation_ket,
    NoiseSpec, SqueezeCache,
};
use crate::fock::{thermal_state, HybridKet, HybridState, OscState, TruncationPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecOptions {
    /// Apply the initial thermal occupation and heating.
    pub noisy: bool,
    /// Replaces the sequence's own noise directive in noisy mode.
    pub noise_override: Option<NoiseSpec>,
    /// Herald through the detection model instead of a perfect projection.
    pub detection: bool,
    /// Heat during the readout window of each measurement (noisy mode only).
    pub readout_heating: bool,
    pub policy: TruncationPolicy,
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl ExecOptions {
    pub fn noiseless() -> Self {
        Self {
            noisy: false,
            noise_override: None,
            detection: false,
            readout_heating: true,
            policy: TruncationPolicy::default(),
        }
    }

    /// Heating plus imperfect readout.
    pub fn realistic() -> Self {
        Self {
            noisy: true,
            detection: true,
            ..Self::noiseless()
        }
    }

    pub fn with_policy(mut self, policy: TruncationPolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Noise actually applied to `seq`: the override, else the sequence directive,
    /// else the experimental defaults.
    pub fn resolve_noise(&self, seq: &Sequence) -> Option<NoiseSpec> {
        if !self.noisy {
            return None;
        }
        Some(self.noise_override.unwrap_or(if seq.noise.enabled {
            seq.noise
        } else {
            NoiseSpec::experimental()
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    /// Index of the instruction.
    pub instruction: usize,
    pub herald: Herald,
    /// `Tr(P ρ)` of the pre-measurement state.
    pub probability: f64,
    /// Probability of the observed outcome, readout errors included.
    pub observed_probability: f64,
}

/// Final state of a run; pure when no mixing step occurred.
#[derive(Clone, Debug, PartialEq)]
pub enum FinalState {
    Pure(HybridKet),
    Mixed(HybridState),
}

impl FinalState {
    pub fn density(&self) -> HybridState {
        match self {
            FinalState::Pure(k) => k.to_density(),
            FinalState::Mixed(s) => s.clone(),
        }
    }

    pub fn oscillator(&self) -> OscState {
        match self {
            FinalState::Pure(k) => k.reduced_oscillator(),
            FinalState::Mixed(s) => s.reduced_oscillator(),
        }
    }

    pub fn spin_probs(&self) -> Vec<f64> {
        match self {
            FinalState::Pure(k) => k.spin_probs(),
            FinalState::Mixed(s) => s.spin_probs(),
        }
    }

    pub fn fock_populations(&self) -> Vec<f64> {
        match self {
            FinalState::Pure(k) => k.fock_populations(),
            FinalState::Mixed(s) => s.fock_populations(),
        }
    }

    pub fn purity(&self) -> f64 {
        match self {
            FinalState::Pure(_) => 1.0,
            FinalState::Mixed(s) => s.purity(),
        }
    }

    pub fn ket(&self) -> Option<&HybridKet> {
        match self {
            FinalState::Pure(k) => Some(k),
            FinalState::Mixed(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub state: FinalState,
    /// Product of the observed probabilities of every measurement.
    pub herald_probability: f64,
    pub measurements: Vec<MeasurementRecord>,
    /// Model time in seconds, readout windows included.
    pub elapsed: f64,
    pub options: ExecOptions,
}

#[derive(Serialize)]
struct RunJson<'a> {
    herald_probability: f64,
    spin_probs: Vec<f64>,
    fock_populations: Vec<f64>,
    purity: f64,
    elapsed: f64,
    options: &'a ExecOptions,
    measurements: &'a [MeasurementRecord],
}

impl RunResult {
    pub fn oscillator(&self) -> OscState {
        self.state.oscillator()
    }

    /// Fock populations are cut after the last level above `1e-12`.
    pub fn to_json(&self) -> String {
        let pops = self.state.fock_populations();
        let cut = pops.iter().rposition(|p| *p > 1e-12).unwrap_or(0);
        serde_json::to_string_pretty(&RunJson {
            herald_probability: self.herald_probability,
            spin_probs: self.state.spin_probs(),
            fock_populations: pops[..=cut].to_vec(),
            purity: self.state.purity(),
            elapsed: self.elapsed,
            options: &self.options,
            measurements: &self.measurements,
        })
        .expect("run result serializes")
    }
}

enum Work {
    Ket(HybridKet),
    Rho(HybridState),
}

impl Work {
    fn into_rho(self) -> HybridState {
        match self {
            Work::Ket(k) => k.to_density(),
            Work::Rho(r) => r,
        }
    }
}

struct Executor<'a> {
    options: &'a ExecOptions,
    ndot: f64,
    cache: SqueezeCache,
    measurements: Vec<MeasurementRecord>,
    elapsed: f64,
}

impl Executor<'_> {
    fn heat(&self, work: Work, t: f64) -> Result<Work> {
        if self.ndot == 0.0 || t == 0.0 {
            return Ok(work);
        }
        let rho = work.into_rho();
        Ok(Work::Rho(apply_heating_with(
            &rho,
            self.ndot,
            t,
            default_steps(t),
            self.options.policy,
        )?))
    }

    fn step(&mut self, index: usize, ins: &Instruction, work: Work) -> Result<Work> {
        let policy = self.options.policy;
        self.elapsed += ins.duration();
        Ok(match ins {
            Instruction::Init { .. } => work,
            Instruction::Rot { pair, gamma, theta } => match work {
                Work::Ket(k) => Work::Ket(spin_rotation_ket(&k, *pair, *gamma, *theta)?),
                Work::Rho(r) => Work::Rho(spin_rotation(&r, *pair, *gamma, *theta)?),
            },
            Instruction::Nonlinear { spec, duration } => {
                if self.ndot > 0.0 && *duration > 0.0 {
                    let rho = work.into_rho();
                    Work::Rho(apply_conditioned_nonlinear_noisy(
                        &rho,
                        spec,
                        *duration,
                        self.ndot,
                        &self.cache,
                        policy,
                    )?)
                } else {
                    match work {
                        Work::Ket(k) => Work::Ket(apply_conditioned_nonlinear_ket(
                            &k,
                            spec,
                            &self.cache,
                            policy,
                        )?),
                        Work::Rho(r) => {
                            Work::Rho(apply_conditioned_nonlinear(&r, spec, &self.cache, policy)?)
                        }
                    }
                }
            }
            Instruction::SdfDisplace {
                axis,
                alpha,
                duration,
            } => match work {
                Work::Ket(k) if self.ndot == 0.0 || *duration == 0.0 => Work::Ket(
                    spin_dependent_displacement_ket(&k, *axis, *alpha, &self.cache, policy)?,
                ),
                w => {
                    let rho = w.into_rho();
                    let ndot = self.ndot;
                    Work::Rho(spin_dependent_displacement(
                        &rho,
                        *axis,
                        *alpha,
                        *duration,
                        ndot,
                        &self.cache,
                        policy,
                    )?)
                }
            },
            Instruction::Wait { duration } => self.heat(work, *duration)?,
            Instruction::Measure { herald, model } => {
                let model = model.unwrap_or_else(DetectionModel::standard);
                let work = if self.options.detection {
                    self.measure_with(index, *herald, &model.error_probs(), work.into_rho())?
                } else {
                    self.measure_perfect(index, *herald, work)?
                };
                self.elapsed += model.readout_duration;
                if self.options.readout_heating {
                    self.heat(work, model.readout_duration)?
                } else {
                    work
                }
            }
        })
    }

    fn measure_perfect(&mut self, index: usize, herald: Herald, work: Work) -> Result<Work> {
        let (out, p) = match work {
            Work::Ket(k) => {
                let (k, p) = project_ket(&k, herald)?;
                (Work::Ket(k), p)
            }
            Work::Rho(r) => {
                let p = herald_probability(&r, herald);
                if p < HERALD_FLOOR {
                    return Err(Error::HeraldImpossible { probability: p });
                }
                let mut projected = project_state(&r, herald);
                projected.normalize();
                (Work::Rho(projected), p)
            }
        };
        self.measurements.push(MeasurementRecord {
            instruction: index,
            herald,
            probability: p,
            observed_probability: p,
        });
        Ok(out)
    }

    fn measure_with(
        &mut self,
        index: usize,
        herald: Herald,
        errors: &ReadoutErrors,
        rho: HybridState,
    ) -> Result<Work> {
        let h = herald_mixture(&rho, herald, errors)?;
        self.measurements.push(MeasurementRecord {
            instruction: index,
            herald,
            probability: h.probability,
            observed_probability: h.observed_probability,
        });
        Ok(Work::Rho(h.state))
    }
}

/// Runs `seq`; every `Measure` keeps its heralded branch.
pub fn execute(seq: &Sequence, options: &ExecOptions) -> Result<RunResult> {
    let (nbar, n_max, spin_dim, level) = seq.init();
    let noise = options.resolve_noise(seq);
    let nbar = noise.map_or(nbar, |n| nbar.max(n.nbar0));
    let mut work = if nbar == 0.0 && noise.is_none() {
        Work::Ket(HybridKet::product(
            spin_dim,
            level,
            &crate::fock::fock_ket(0, n_max + 1),
        )?)
    } else {
        Work::Rho(HybridState::product(
            spin_dim,
            level,
            &thermal_state(nbar, n_max)?,
        )?)
    };
    let mut ex = Executor {
        options,
        ndot: noise.map_or(0.0, |n| n.heating_rate()),
        cache: SqueezeCache::new(),
        measurements: Vec::new(),
        elapsed: 0.0,
    };
    for (i, ins) in seq.instructions().iter().enumerate() {
        work = ex.step(i, ins, work)?;
    }
    let herald_probability = ex
        .measurements
        .iter()
        .map(|m| m.observed_probability)
        .product();
    let state = match work {
        Work::Ket(k) => FinalState::Pure(k),
        Work::Rho(r) => FinalState::Mixed(r),
    };
    Ok(RunResult {
        state,
        herald_probability,
        measurements: ex.measurements,
        elapsed: ex.elapsed,
        options: *options,
    })
}

/// Shot counts surviving each successive measurement of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeraldCounts {
    pub attempts: u64,
    pub survivors: Vec<u64>,
}

/// Monte-Carlo herald outcomes for `shots` repetitions of the run that produced `result`.
pub fn sample_heralds(result: &RunResult, shots: u64, seed: u64) -> Result<HeraldCounts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alive = shots;
    let mut survivors = Vec::with_capacity(result.measurements.len());
    for m in &result.measurements {
        let p = m.observed_probability.clamp(0.0, 1.0);
        let dist = Binomial::new(alive, p).map_err(|e| Error::domain(e.to_string()))?;
        alive = dist.sample(&mut rng);
        survivors.push(alive);
    }
    Ok(HeraldCounts {
        attempts: shots,
        survivors,
    })
}
