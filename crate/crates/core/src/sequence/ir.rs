use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::analysis::DetectionModel;
use crate::error::{Error, Result};
use crate::evolution::{NoiseSpec, NonlinearSpec};
use crate::fock::Pauli;

/// Which readout outcome is kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Herald {
    /// Spin level 1.
    Dark,
    /// Any other level.
    Bright,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Instruction {
    Init {
        nbar: f64,
        n_max: usize,
        spin_dim: usize,
        level: usize,
    },
    /// `exp(-iθσ_γ/2)` on `pair`.
    Rot {
        pair: (usize, usize),
        gamma: f64,
        theta: f64,
    },
    Nonlinear {
        spec: NonlinearSpec,
        duration: f64,
    },
    /// The `axis` eigenvalue-`s` branch receives `D(s·α)`.
    SdfDisplace {
        axis: Pauli,
        alpha: C64,
        duration: f64,
    },
    Wait {
        duration: f64,
    },
    Measure {
        herald: Herald,
        model: Option<DetectionModel>,
    },
}

impl Instruction {
    pub fn duration(&self) -> f64 {
        match self {
            Instruction::Nonlinear { duration, .. }
            | Instruction::SdfDisplace { duration, .. }
            | Instruction::Wait { duration } => *duration,
            _ => 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Instruction::Init { .. } => "init",
            Instruction::Rot { .. } => "rot",
            Instruction::Nonlinear { .. } => "nl",
            Instruction::SdfDisplace { .. } => "sdf",
            Instruction::Wait { .. } => "wait",
            Instruction::Measure { .. } => "measure",
        }
    }
}

/// 1-based source position of an instruction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sequence {
    instructions: Vec<Instruction>,
    spans: Vec<Span>,
    pub noise: NoiseSpec,
}

impl Sequence {
    /// Validates that the first instruction is `Init` and every duration is non-negative.
    pub fn new(instructions: Vec<Instruction>, noise: NoiseSpec) -> Result<Self> {
        let spans = vec![Span::default(); instructions.len()];
        Self::with_spans(instructions, spans, noise)
    }

    pub fn with_spans(
        instructions: Vec<Instruction>,
        spans: Vec<Span>,
        noise: NoiseSpec,
    ) -> Result<Self> {
        if spans.len() != instructions.len() {
            return Err(Error::domain("one span per instruction required"));
        }
        match instructions.first() {
            Some(Instruction::Init { .. }) => {}
            _ => return Err(Error::domain("sequence must begin with init")),
        }
        for (i, ins) in instructions.iter().enumerate() {
            if i > 0 && matches!(ins, Instruction::Init { .. }) {
                return Err(Error::domain("init may only appear once, at the start"));
            }
            let d = ins.duration();
            if d < 0.0 || !d.is_finite() {
                return Err(Error::domain(format!(
                    "instruction {i} ({}) has invalid duration {d}",
                    ins.name()
                )));
            }
        }
        Ok(Self {
            instructions,
            spans,
            noise,
        })
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// `(nbar, n_max, spin_dim, level)` of the leading `Init`.
    pub fn init(&self) -> (f64, usize, usize, usize) {
        match self.instructions[0] {
            Instruction::Init {
                nbar,
                n_max,
                spin_dim,
                level,
            } => (nbar, n_max, spin_dim, level),
            _ => unreachable!("validated at construction"),
        }
    }

    /// Replaces the truncation of the leading `Init`.
    pub fn with_n_max(mut self, n_max: usize) -> Self {
        if let Instruction::Init { n_max: n, .. } = &mut self.instructions[0] {
            *n = n_max;
        }
        self
    }

    /// Sum of instruction durations, excluding readout windows.
    pub fn total_duration(&self) -> f64 {
        self.instructions.iter().map(Instruction::duration).sum()
    }

    /// Highest interaction order present, 0 without nonlinear instructions.
    pub fn max_order(&self) -> usize {
        self.instructions
            .iter()
            .map(|i| match i {
                Instruction::Nonlinear { spec, .. } => spec.k,
                Instruction::SdfDisplace { .. } => 1,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn measurement_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Measure { .. }))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn init() -> Instruction {
        Instruction::Init {
            nbar: 0.0,
            n_max: 10,
            spin_dim: 2,
            level: 0,
        }
    }

    #[test]
    fn must_start_with_init() {
        let err =
            Sequence::new(vec![Instruction::Wait { duration: 1.0 }], NoiseSpec::off()).unwrap_err();
        assert!(err.to_string().contains("sequence must begin with init"));
        assert!(Sequence::new(vec![], NoiseSpec::off()).is_err());
        assert!(Sequence::new(vec![init(), init()], NoiseSpec::off()).is_err());
    }

    #[test]
    fn durations_non_negative() {
        let bad = vec![init(), Instruction::Wait { duration: -1.0 }];
        assert!(Sequence::new(bad, NoiseSpec::off()).is_err());
        let ok = Sequence::new(
            vec![init(), Instruction::Wait { duration: 2e-4 }],
            NoiseSpec::off(),
        )
        .unwrap();
        assert_eq!(ok.total_duration(), 2e-4);
        assert_eq!(ok.clone().with_n_max(30).init().1, 30);
    }
}
