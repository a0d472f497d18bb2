//! Bell boxes, local-polytope membership and the correspondences between
//! path-shaped scenarios and Bell experiments.

pub mod embed;
pub mod local;
pub mod lp;
pub mod reverse;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{flat_index, DistError, JointDistribution, TupleIter, Variable};

pub use embed::{
    embed_bell_to_ak, embed_bell_to_p4, embed_bgp_to_p5, BgpClassical, BgpModel, BgpQuantum,
};
pub use local::{
    decide_ak, decide_p4, local_polytope_membership, local_polytope_membership_with_budget,
    BellDecision, BellInequality, LocalVerdict, DEFAULT_STRATEGY_BUDGET,
};
pub use reverse::{find_signaling_time_reversal, time_reverse_model, time_reverse_relabel};

/// Tolerance for normalization and no-signaling checks on boxes.
pub const BOX_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BellError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("setting tuple {0:?} has zero probability")]
    EmptySettingSupport(Vec<usize>),
    #[error("box is signaling")]
    SignalingBox,
    #[error("{strategies} deterministic strategies exceed the budget {budget}")]
    StrategyBudgetExceeded { strategies: usize, budget: usize },
    #[error("distribution is not a correlation in the scenario")]
    NotACorrelation,
    #[error("malformed bilocal input: {0}")]
    MalformedBgpInput(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error(transparent)]
    Dist(#[from] DistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Party {
    pub settings: usize,
    pub outcomes: usize,
}

/// Conditional distribution `p(a₁…a_k | x₁…x_k)`.
///
/// The table is row-major over `(x₁, …, x_k, a₁, …, a_k)`: settings-major,
/// then outcomes, the last party fastest within each block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalBox {
    parties: Vec<Party>,
    table: Vec<f64>,
}

impl ConditionalBox {
    pub fn new(parties: Vec<Party>, table: Vec<f64>) -> Result<Self, BellError> {
        let b = ConditionalBox { parties, table };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), BellError> {
        if self.parties.is_empty()
            || self
                .parties
                .iter()
                .any(|p| p.settings == 0 || p.outcomes == 0)
        {
            return Err(BellError::ShapeMismatch(
                "every party needs settings and outcomes".into(),
            ));
        }
        if self.table.len() != self.num_setting_tuples() * self.num_outcome_tuples() {
            return Err(BellError::ShapeMismatch(format!(
                "table has {} entries, expected {}",
                self.table.len(),
                self.num_setting_tuples() * self.num_outcome_tuples()
            )));
        }
        if self.table.iter().any(|p| !p.is_finite() || *p < -BOX_EPS) {
            return Err(BellError::ShapeMismatch(
                "entries must be nonnegative".into(),
            ));
        }
        let o = self.num_outcome_tuples();
        for (s, block) in self.table.chunks(o).enumerate() {
            let total: f64 = block.iter().sum();
            if (total - 1.0).abs() > BOX_EPS {
                return Err(BellError::ShapeMismatch(format!(
                    "slice for setting tuple {s} sums to {total}"
                )));
            }
        }
        Ok(())
    }

    /// Builds a box from a function of `(settings, outcomes)`.
    pub fn from_fn(
        parties: Vec<Party>,
        mut f: impl FnMut(&[usize], &[usize]) -> f64,
    ) -> Result<Self, BellError> {
        let sc: Vec<usize> = parties.iter().map(|p| p.settings).collect();
        let oc: Vec<usize> = parties.iter().map(|p| p.outcomes).collect();
        let mut table = Vec::new();
        for x in TupleIter::new(&sc) {
            for a in TupleIter::new(&oc) {
                table.push(f(&x, &a));
            }
        }
        ConditionalBox::new(parties, table)
    }

    pub fn parties(&self) -> &[Party] {
        &self.parties
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn setting_cards(&self) -> Vec<usize> {
        self.parties.iter().map(|p| p.settings).collect()
    }

    pub fn outcome_cards(&self) -> Vec<usize> {
        self.parties.iter().map(|p| p.outcomes).collect()
    }

    pub fn num_setting_tuples(&self) -> usize {
        self.parties.iter().map(|p| p.settings).product()
    }

    pub fn num_outcome_tuples(&self) -> usize {
        self.parties.iter().map(|p| p.outcomes).product()
    }

    pub fn entry_index(&self, settings: &[usize], outcomes: &[usize]) -> usize {
        flat_index(&self.setting_cards(), settings) * self.num_outcome_tuples()
            + flat_index(&self.outcome_cards(), outcomes)
    }

    pub fn get(&self, settings: &[usize], outcomes: &[usize]) -> f64 {
        self.table[self.entry_index(settings, outcomes)]
    }

    pub fn is_deterministic(&self) -> bool {
        self.table
            .iter()
            .all(|&p| p.abs() <= BOX_EPS || (p - 1.0).abs() <= BOX_EPS)
    }

    /// Joint distribution `p(x) p(a|x)` for a distribution over setting
    /// tuples, with variables `x₁…x_k, a₁…a_k`.
    pub fn joint_with_settings(
        &self,
        settings: &[f64],
        names: &[(String, String)],
    ) -> Result<JointDistribution, BellError> {
        if settings.len() != self.num_setting_tuples() || names.len() != self.parties.len() {
            return Err(BellError::ShapeMismatch(
                "setting distribution has the wrong size".into(),
            ));
        }
        let mut vars = Vec::new();
        for (p, (x, _)) in self.parties.iter().zip(names) {
            vars.push(Variable::new(x.clone(), p.settings));
        }
        for (p, (_, a)) in self.parties.iter().zip(names) {
            vars.push(Variable::new(a.clone(), p.outcomes));
        }
        let o = self.num_outcome_tuples();
        let probs = self
            .table
            .chunks(o)
            .zip(settings)
            .flat_map(|(block, &w)| block.iter().map(move |&q| w * q))
            .collect();
        Ok(JointDistribution::with_eps(vars, probs, 1e-9)?)
    }
}

/// The Popescu–Rohrlich box `a ⊕ b = xy`.
pub fn pr_box() -> ConditionalBox {
    ConditionalBox::from_fn(
        vec![
            Party {
                settings: 2,
                outcomes: 2
            };
            2
        ],
        |x, a| {
            if a[0] ^ a[1] == x[0] & x[1] {
                0.5
            } else {
                0.0
            }
        },
    )
    .expect("PR box is valid")
}

/// The square correlation `a ⊕ b = x·y` with uniform `x`, `y`, in the
/// variable order (a, b, x, y).
pub fn pr_square() -> JointDistribution {
    let vars = crate::scenario::standard::c4(2).variables();
    JointDistribution::from_fn(vars, |t| {
        if t[0] ^ t[1] == t[2] & t[3] {
            0.125
        } else {
            0.0
        }
    })
    .expect("valid table")
}

/// Deterministic box in which party `i` outputs `f[i][x_i]`.
pub fn deterministic_box(
    parties: Vec<Party>,
    f: &[Vec<usize>],
) -> Result<ConditionalBox, BellError> {
    if f.len() != parties.len()
        || f.iter()
            .zip(&parties)
            .any(|(g, p)| g.len() != p.settings || g.iter().any(|&o| o >= p.outcomes))
    {
        return Err(BellError::ShapeMismatch(
            "response functions do not match the parties".into(),
        ));
    }
    ConditionalBox::from_fn(parties, |x, a| {
        if (0..a.len()).all(|i| a[i] == f[i][x[i]]) {
            1.0
        } else {
            0.0
        }
    })
}

/// A box together with the distribution of its setting tuples and the
/// original value of every kept setting.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedBox {
    pub conditional: ConditionalBox,
    /// Distribution over kept setting tuples, row-major.
    pub setting_distribution: Vec<f64>,
    /// For each party, the original values of its kept settings.
    pub setting_values: Vec<Vec<usize>>,
}

/// Conditions `p` on the setting variables of every `(setting, outcome)`
/// pair. Setting values of zero marginal probability are dropped.
pub fn box_from_correlation<S: AsRef<str>>(
    p: &JointDistribution,
    parties: &[(S, S)],
) -> Result<ExtractedBox, BellError> {
    let mut order: Vec<&str> = parties.iter().map(|(x, _)| x.as_ref()).collect();
    order.extend(parties.iter().map(|(_, a)| a.as_ref()));
    if order.len() != p.variables().len() {
        return Err(BellError::ShapeMismatch(format!(
            "expected exactly the variables {order:?}"
        )));
    }
    let q = p.reorder(&order)?;
    let k = parties.len();
    let cards = q.cardinalities();
    let setting_values: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            let m = q.marginalize(&[order[i]]).expect("variable exists");
            (0..cards[i])
                .filter(|&v| m.probabilities()[v] > q.eps())
                .collect()
        })
        .collect();
    let party_shapes: Vec<Party> = (0..k)
        .map(|i| Party {
            settings: setting_values[i].len(),
            outcomes: cards[k + i],
        })
        .collect();
    let sc: Vec<usize> = party_shapes.iter().map(|p| p.settings).collect();
    let oc: Vec<usize> = party_shapes.iter().map(|p| p.outcomes).collect();
    let mut table = Vec::new();
    let mut setting_distribution = Vec::new();
    for xs in TupleIter::new(&sc) {
        let orig: Vec<usize> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| setting_values[i][x])
            .collect();
        let mut block = Vec::new();
        for a in TupleIter::new(&oc) {
            let mut full = orig.clone();
            full.extend_from_slice(&a);
            block.push(*q.get(&full));
        }
        let w: f64 = block.iter().sum();
        if w <= q.eps() {
            return Err(BellError::EmptySettingSupport(orig));
        }
        table.extend(block.iter().map(|&v| v / w));
        setting_distribution.push(w);
    }
    Ok(ExtractedBox {
        conditional: ConditionalBox::new(party_shapes, table)?,
        setting_distribution,
        setting_values,
    })
}

/// Largest dependence of any party subset's marginal on the settings of the
/// other parties.
pub fn signaling_deviation(b: &ConditionalBox) -> f64 {
    let k = b.parties.len();
    let sc = b.setting_cards();
    let oc = b.outcome_cards();
    let mut worst: f64 = 0.0;
    for j in 0..k {
        // Marginal with party j's outcome summed out, for every setting tuple.
        let mut rest_o = oc.clone();
        rest_o.remove(j);
        for xs in TupleIter::new(&sc) {
            if xs[j] == 0 {
                continue;
            }
            let mut base = xs.clone();
            base[j] = 0;
            for ar in TupleIter::new(&rest_o) {
                let marg = |x: &[usize]| -> f64 {
                    (0..oc[j])
                        .map(|aj| {
                            let mut a = ar.clone();
                            a.insert(j, aj);
                            b.get(x, &a)
                        })
                        .sum()
                };
                worst = worst.max((marg(&xs) - marg(&base)).abs());
            }
        }
    }
    worst
}

pub fn is_no_signaling(b: &ConditionalBox) -> bool {
    signaling_deviation(b) <= BOX_EPS
}

/// `E(0,0) + E(0,1) + E(1,0) − E(1,1)` with `E(x,y) = Σ (−1)^{a⊕b} p(a,b|x,y)`.
pub fn chsh_value(b: &ConditionalBox) -> Result<f64, BellError> {
    if b.parties
        != [Party {
            settings: 2,
            outcomes: 2,
        }; 2]
    {
        return Err(BellError::ShapeMismatch(
            "CHSH needs two parties with two settings and two outcomes".into(),
        ));
    }
    let e = |x: usize, y: usize| -> f64 {
        let mut s = 0.0;
        for a in 0..2 {
            for bb in 0..2 {
                let sign = if a ^ bb == 0 { 1.0 } else { -1.0 };
                s += sign * b.get(&[x, y], &[a, bb]);
            }
        }
        s
    };
    Ok(e(0, 0) + e(0, 1) + e(1, 0) - e(1, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pr_box_chsh_and_no_signaling() {
        let b = pr_box();
        assert_eq!(chsh_value(&b).unwrap(), 4.0);
        assert!(is_no_signaling(&b));
    }

    #[test]
    fn uniform_box_has_zero_chsh() {
        let b = ConditionalBox::from_fn(
            vec![
                Party {
                    settings: 2,
                    outcomes: 2
                };
                2
            ],
            |_, _| 0.25,
        )
        .unwrap();
        assert_eq!(chsh_value(&b).unwrap(), 0.0);
        assert!(is_no_signaling(&b));
    }

    #[test]
    fn signaling_box_is_detected() {
        // a copies y.
        let b = ConditionalBox::from_fn(
            vec![
                Party {
                    settings: 2,
                    outcomes: 2
                };
                2
            ],
            |x, a| {
                if a[0] == x[1] && a[1] == 0 {
                    1.0
                } else {
                    0.0
                }
            },
        )
        .unwrap();
        assert!(!is_no_signaling(&b));
        assert!((signaling_deviation(&b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chsh_rejects_other_shapes() {
        let b = ConditionalBox::from_fn(
            vec![
                Party {
                    settings: 3,
                    outcomes: 2
                };
                2
            ],
            |_, _| 0.25,
        )
        .unwrap();
        assert!(matches!(chsh_value(&b), Err(BellError::ShapeMismatch(_))));
    }

    #[test]
    fn extraction_drops_unused_settings() {
        let vars = vec![
            Variable::new("x", 3),
            Variable::new("y", 2),
            Variable::new("a", 2),
            Variable::new("b", 2),
        ];
        let p = JointDistribution::from_fn(vars, |t| {
            if t[0] == 1 {
                0.0
            } else {
                0.5 * 0.5 * if t[2] == t[0] / 2 { 1.0 } else { 0.0 } * 0.5
            }
        })
        .unwrap();
        let e = box_from_correlation(&p, &[("x", "a"), ("y", "b")]).unwrap();
        assert_eq!(e.setting_values, vec![vec![0, 2], vec![0, 1]]);
        assert_eq!(e.conditional.get(&[1, 0], &[1, 0]), 0.5);
    }
}
