//! Entropic inequalities satisfied by every classical triangle correlation.

use serde::Serialize;

use crate::dist::{Distribution, ExactDistribution, Variable};
use crate::scalar::{Rational, Scalar};

use super::{Verdict, WitnessError, WitnessKind, WitnessReport};

/// Violations above this count as non-classical.
pub const ENTROPIC_TOL: f64 = 1e-7;

pub const COMMON_ANCESTOR: &str = "common ancestor required";

/// Entropies of a three-variable distribution, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropicValues {
    /// `H(v)` for each variable.
    pub single: [f64; 3],
    /// `H(v w)` for the pairs (0,1), (0,2), (1,2).
    pub pairs: [f64; 3],
    pub joint: f64,
}

impl EntropicValues {
    pub fn of<T: Scalar>(p: &Distribution<T>) -> Result<Self, WitnessError> {
        if p.variables().len() != 3 {
            return Err(WitnessError::ShapeMismatch(
                "entropic witnesses need exactly three variables".into(),
            ));
        }
        let n: Vec<String> = p.names().iter().map(|s| s.to_string()).collect();
        let h = |vars: &[&String]| p.entropy(vars);
        Ok(EntropicValues {
            single: [h(&[&n[0]])?, h(&[&n[1]])?, h(&[&n[2]])?],
            pairs: [
                h(&[&n[0], &n[1]])?,
                h(&[&n[0], &n[2]])?,
                h(&[&n[1], &n[2]])?,
            ],
            joint: h(&[&n[0], &n[1], &n[2]])?,
        })
    }

    fn pair(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 1) => self.pairs[0],
            (0, 2) => self.pairs[1],
            _ => self.pairs[2],
        }
    }

    fn mutual_information(&self, i: usize, j: usize) -> f64 {
        self.single[i] + self.single[j] - self.pair(i, j)
    }

    /// `I(v:w) + I(v:u) − H(v)` with pivot `v`.
    pub fn mutual_information_slack(&self, pivot: usize) -> f64 {
        let (j, k) = others(pivot);
        self.mutual_information(pivot, j) + self.mutual_information(pivot, k) - self.single[pivot]
    }

    /// `H(v) + H(w) + H(u) − H(vw) − H(vu)` with pivot `v`.
    pub fn joint_entropy_slack(&self, pivot: usize) -> f64 {
        let (j, k) = others(pivot);
        self.single.iter().sum::<f64>() - self.pair(pivot, j) - self.pair(pivot, k)
    }

    /// `H(a) + H(b) + H(c) − 2 H(abc)`.
    pub fn steudel_ay_slack(&self) -> f64 {
        self.single.iter().sum::<f64>() - 2.0 * self.joint
    }
}

/// Three perfectly correlated uniform bits `a = b = c`.
pub fn perfect_correlation() -> ExactDistribution {
    let vars = ["a", "b", "c"].map(|n| Variable::new(n, 2)).to_vec();
    let half = Rational::from_ratio(1, 2);
    Distribution::from_fn(vars, |t| {
        if t[0] == t[1] && t[1] == t[2] {
            half.clone()
        } else {
            Rational::from_ratio(0, 1)
        }
    })
    .expect("valid table")
}

fn others(pivot: usize) -> (usize, usize) {
    match pivot {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn report(kind: WitnessKind, slack: f64, pivot: Option<&str>, ancestor: bool) -> WitnessReport {
    let verdict = if slack > ENTROPIC_TOL {
        Verdict::NonClassical
    } else {
        Verdict::Consistent
    };
    let mut notes = Vec::new();
    if let Some(v) = pivot {
        notes.push(format!("largest violation with pivot {v}"));
    }
    if ancestor && verdict == Verdict::NonClassical {
        notes.push(COMMON_ANCESTOR.to_string());
    }
    WitnessReport {
        kind,
        verdict,
        slack,
        chain: Vec::new(),
        notes,
    }
}

/// Evaluates the mutual-information inequality and its joint-entropy form
/// for every pivot, and the Steudel–Ay inequality.
pub fn entropic_triangle_witness<T: Scalar>(
    p: &Distribution<T>,
) -> Result<[WitnessReport; 3], WitnessError> {
    let e = EntropicValues::of(p)?;
    let names = p.names();
    let best = |f: &dyn Fn(usize) -> f64| -> (f64, usize) {
        (0..3).map(|v| (f(v), v)).fold(
            (f64::NEG_INFINITY, 0),
            |acc, x| if x.0 > acc.0 { x } else { acc },
        )
    };
    let (mi, mi_pivot) = best(&|v| e.mutual_information_slack(v));
    let (je, je_pivot) = best(&|v| e.joint_entropy_slack(v));
    Ok([
        report(
            WitnessKind::MutualInformation,
            mi,
            Some(names[mi_pivot]),
            true,
        ),
        report(WitnessKind::JointEntropy, je, Some(names[je_pivot]), true),
        report(WitnessKind::SteudelAy, e.steudel_ay_slack(), None, false),
    ])
}
