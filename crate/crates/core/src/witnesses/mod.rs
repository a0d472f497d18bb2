//! Witnesses of non-classicality. Each reports a verdict, the amount by which
//! a necessary condition for classicality fails and, for support arguments,
//! the deduction chain. `Consistent` never proves classicality.

pub mod ancestor;
pub mod entropic;
pub mod hardy;
pub mod monogamy;

use serde::Serialize;
use thiserror::Error;

use crate::bell::BellError;
use crate::dist::DistError;
use crate::models::ModelError;

pub use ancestor::{ancestor_witness, AncestorOptions};
pub use entropic::{
    entropic_triangle_witness, perfect_correlation, EntropicValues, COMMON_ANCESTOR, ENTROPIC_TOL,
};
pub use hardy::{hardy_c4_witness, hardy_chain, replay_hardy_chain, HardyChain, HardyStep};
pub use monogamy::{monogamy_chsh_witness, BitProjections, CHSH_TOL, PERFECT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    NonClassical,
    Consistent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `I(a:b) + I(a:c) ≤ H(a)`.
    MutualInformation,
    /// `H(a) + H(b) + H(c) ≤ H(ab) + H(ac)`.
    JointEntropy,
    /// `H(a) + H(b) + H(c) ≤ 2 H(abc)`.
    SteudelAy,
    MonogamyChsh,
    HardyC4,
    Ancestor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub kind: WitnessKind,
    pub verdict: Verdict,
    /// Largest violation found (negative when the condition holds with room).
    pub slack: f64,
    /// Deduction chain for support arguments, one step per line.
    pub chain: Vec<String>,
    pub notes: Vec<String>,
}

impl WitnessReport {
    pub fn is_nonclassical(&self) -> bool {
        self.verdict == Verdict::NonClassical
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no pair of bit projections gives perfect agreement with c")]
    MissingDecomposition,
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
