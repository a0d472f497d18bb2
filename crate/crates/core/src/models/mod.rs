//! Classical hidden-variable models.

pub mod classical;
pub mod fit;
pub mod random;
pub mod support;

use thiserror::Error;

use crate::dist::DistError;

pub use classical::{determinize, interpolate, star_model_construct, ClassicalModel, ExactModel};
pub use fit::{fit_probabilities, FitOptions, FitOutcome};
pub use support::{support_realizable, SearchOptions, SupportOutcome, SupportPattern};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not normalized: {0}")]
    NotNormalized(String),
    #[error("models live on different scenarios")]
    ScenarioMismatch,
    #[error("kernel entries are not given as rationals")]
    IrrationalKernel,
    #[error("scenario is not a star forest")]
    NotStarForest,
    #[error("distribution is not a correlation in the scenario")]
    NotACorrelation,
    #[error("distribution variables do not match the scenario")]
    VariableMismatch,
    #[error("invalid support pattern: {0}")]
    InvalidSupport(String),
    #[error(transparent)]
    Dist(DistError),
}
