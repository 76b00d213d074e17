//! Pulse sequences: instruction set, text format, named circuits and execution.

pub mod circuits;
pub mod exec;
pub mod herald;
pub mod ir;
pub mod parser;
pub mod tokens;

pub use circuits::{build_named_circuit, EqualVariant, NamedCircuit, Parity, CIRCUIT_NAMES};
pub use exec::{
    execute, sample_heralds, ExecOptions, FinalState, HeraldCounts, MeasurementRecord, RunResult,
};
pub use herald::{herald_mixture, herald_probability, mixture_ratio, HeraldedState};
pub use ir::{Herald, Instruction, Sequence, Span};
pub use parser::{format_sequence, parse_sequence};
