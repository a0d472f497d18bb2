//! Quantum models over correlation scenarios.

pub mod constructions;
pub mod matrix;
pub mod model;

pub use crate::bell::chsh_value;
pub use model::{
    separable_to_classical, QuantumError, QuantumModel, SeparableDecomposition,
    DEFAULT_DIMENSION_BUDGET,
};
