//! Factorization constraints that make a distribution a correlation in a
//! scenario.

use serde::Serialize;
use thiserror::Error;

use crate::dist::{DistError, Distribution};
use crate::scalar::Scalar;
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("distribution variables {found:?} do not match scenario measurements {expected:?}")]
    VariableMismatch {
        expected: Vec<(String, usize)>,
        found: Vec<(String, usize)>,
    },
    #[error(transparent)]
    Dist(#[from] DistError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairViolation {
    pub u: Vec<String>,
    pub w: Vec<String>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub is_correlation: bool,
    pub violations: Vec<PairViolation>,
    pub checks_performed: usize,
}

/// Maximal pairs `(U, W)` of vertex masks with no source touching both.
///
/// Each candidate is `W = V \ (U ∪ N(U))`; unordered duplicates and pairs
/// dominated componentwise by another pair are removed. The orientation puts
/// the lowest-indexed vertex of `U ∪ W` into `U`, and the list is sorted
/// lexicographically on the index lists of `U` then `W`.
pub fn unconnected_maximal_pairs(s: &Scenario) -> Vec<(u64, u64)> {
    let n = s.num_measurements();
    let all = s.all_mask();
    let nbr = s.neighbor_masks();
    let mut pairs = Vec::new();
    for u in 1..=all {
        let closed = (0..n)
            .filter(|&v| u >> v & 1 == 1)
            .fold(u, |acc, v| acc | nbr[v]);
        let w = all & !closed;
        if w == 0 {
            continue;
        }
        pairs.push(orient(u, w));
        if u == all {
            break;
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let dominated = |&(u, w): &(u64, u64)| {
        pairs.iter().any(|&(u2, w2)| {
            (u2, w2) != (u, w) && ((u & !u2 == 0 && w & !w2 == 0) || (u & !w2 == 0 && w & !u2 == 0))
        })
    };
    let mut out: Vec<(u64, u64)> = pairs.iter().copied().filter(|p| !dominated(p)).collect();
    out.sort_by_key(|&(u, w)| (bits(u), bits(w)));
    out
}

fn orient(u: u64, w: u64) -> (u64, u64) {
    if (u | w).trailing_zeros() == u.trailing_zeros() {
        (u, w)
    } else {
        (w, u)
    }
}

fn bits(mask: u64) -> Vec<u32> {
    let mut m = mask;
    let mut out = Vec::new();
    while m != 0 {
        out.push(m.trailing_zeros());
        m &= m - 1;
    }
    out
}

/// Maximal pairs as measurement names.
pub fn unconnected_maximal_pairs_named(s: &Scenario) -> Vec<(Vec<String>, Vec<String>)> {
    unconnected_maximal_pairs(s)
        .into_iter()
        .map(|(u, w)| (s.names_of_mask(u), s.names_of_mask(w)))
        .collect()
}

/// Reorders `p` into the scenario's measurement order, checking names and
/// cardinalities.
pub fn align_to_scenario<T: Scalar>(
    s: &Scenario,
    p: &Distribution<T>,
) -> Result<Distribution<T>, CorrelationError> {
    let expected: Vec<(String, usize)> = s
        .measurements()
        .iter()
        .map(|m| (m.name.clone(), m.outcomes))
        .collect();
    let found: Vec<(String, usize)> = p
        .variables()
        .iter()
        .map(|v| (v.name.clone(), v.cardinality))
        .collect();
    let mismatch = || CorrelationError::VariableMismatch {
        expected: expected.clone(),
        found: found.clone(),
    };
    if expected.len() != found.len() {
        return Err(mismatch());
    }
    for (name, d) in &expected {
        if !found.iter().any(|(n, c)| n == name && c == d) {
            return Err(mismatch());
        }
    }
    let order = s.measurement_names();
    Ok(p.reorder(&order)?)
}

/// Checks every maximal unconnected pair for factorization within `p.eps()`.
pub fn is_correlation<T: Scalar>(
    s: &Scenario,
    p: &Distribution<T>,
) -> Result<CorrelationReport, CorrelationError> {
    let p = align_to_scenario(s, p)?;
    let pairs = unconnected_maximal_pairs(s);
    let mut violations = Vec::new();
    for &(u, w) in &pairs {
        let un = s.names_of_mask(u);
        let wn = s.names_of_mask(w);
        let dev = p.product_deviation(&un, &wn)?;
        if !dev.is_negligible(p.eps()) {
            violations.push(PairViolation {
                u: un,
                w: wn,
                max_deviation: dev.as_f64(),
            });
        }
    }
    Ok(CorrelationReport {
        is_correlation: violations.is_empty(),
        violations,
        checks_performed: pairs.len(),
    })
}
