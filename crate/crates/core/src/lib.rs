//! Correlation scenarios, classical and quantum models, and non-classicality
//! witnesses.

pub mod bell;
pub mod cli;
pub mod correlation;
pub mod dist;
pub mod io;
pub mod models;
pub mod quantum;
pub mod scalar;
pub mod scenario;
pub mod witnesses;
