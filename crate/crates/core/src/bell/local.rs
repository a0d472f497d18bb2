//! Membership in the local (Bell) polytope and the resulting decisions for
//! path and multi-arm star scenarios.

use serde::Serialize;

use crate::correlation::is_correlation;
use crate::dist::{JointDistribution, TupleIter};
use crate::models::ClassicalModel;
use crate::scalar::{Rational, Scalar};
use crate::scenario::standard::{multiarm, p4};
use crate::scenario::Scenario;

use super::lp::{solve, LpProblem, LpResult};
use super::{box_from_correlation, BellError, ConditionalBox, ExtractedBox};

pub const DEFAULT_STRATEGY_BUDGET: usize = 10_000;

const LP_TOL: f64 = 1e-11;
const RECONSTRUCTION_TOL: f64 = 1e-9;
const GAP_TOL: f64 = 1e-9;

/// A linear functional `Σ_r c_r p_r` on box entries together with its maximum
/// over deterministic strategies and its value on the tested box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellInequality {
    pub coefficients: Vec<f64>,
    pub classical_bound: f64,
    pub box_value: f64,
    /// `box_value − classical_bound`, evaluated in exact arithmetic.
    pub gap: f64,
}

impl BellInequality {
    /// Re-evaluates the functional exactly: the largest value over all
    /// deterministic strategies and the value on `b`.
    pub fn exact_evaluation(&self, b: &ConditionalBox) -> (Rational, Rational) {
        let coeffs: Vec<Rational> = self
            .coefficients
            .iter()
            .map(|&c| Rational::from_real(c))
            .collect();
        let bound = strategies(b)
            .map(|f| strategy_value(b, &coeffs, &f))
            .max()
            .expect("at least one strategy");
        let value = b
            .table()
            .iter()
            .zip(&coeffs)
            .fold(Rational::from_usize(0), |acc, (p, c)| {
                acc + Rational::from_real(*p) * c
            });
        (bound, value)
    }

    fn from_coefficients(b: &ConditionalBox, coefficients: Vec<f64>) -> BellInequality {
        let mut ineq = BellInequality {
            coefficients,
            classical_bound: 0.0,
            box_value: 0.0,
            gap: 0.0,
        };
        let (bound, value) = ineq.exact_evaluation(b);
        ineq.classical_bound = bound.as_f64();
        ineq.box_value = value.as_f64();
        ineq.gap = (value - bound).as_f64();
        ineq
    }
}

/// A deterministic strategy: the response of every party to every setting.
pub type Strategy = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LocalVerdict {
    Local { weights: Vec<(Strategy, f64)> },
    NonLocal(BellInequality),
}

fn strategy_count(b: &ConditionalBox) -> usize {
    b.parties()
        .iter()
        .map(|p| p.outcomes.saturating_pow(p.settings as u32))
        .fold(1usize, |acc, n| acc.saturating_mul(n))
}

fn strategies(b: &ConditionalBox) -> impl Iterator<Item = Strategy> + '_ {
    let mut cards = Vec::new();
    for p in b.parties() {
        cards.extend(std::iter::repeat_n(p.outcomes, p.settings));
    }
    TupleIter::new(&cards).map(move |flat| {
        let mut out = Vec::new();
        let mut rest = &flat[..];
        for p in b.parties() {
            out.push(rest[..p.settings].to_vec());
            rest = &rest[p.settings..];
        }
        out
    })
}

/// Box entry index selected by `f` in every setting block.
fn strategy_entries(b: &ConditionalBox, f: &Strategy) -> Vec<usize> {
    TupleIter::new(&b.setting_cards())
        .map(|xs| {
            let a: Vec<usize> = xs.iter().enumerate().map(|(i, &x)| f[i][x]).collect();
            b.entry_index(&xs, &a)
        })
        .collect()
}

fn strategy_value<T: Scalar>(b: &ConditionalBox, coeffs: &[T], f: &Strategy) -> T {
    strategy_entries(b, f)
        .into_iter()
        .fold(T::zero(), |acc, r| acc + coeffs[r].clone())
}

/// Decides whether `b` is a mixture of deterministic local strategies.
pub fn local_polytope_membership(b: &ConditionalBox) -> Result<LocalVerdict, BellError> {
    local_polytope_membership_with_budget(b, DEFAULT_STRATEGY_BUDGET)
}

pub fn local_polytope_membership_with_budget(
    b: &ConditionalBox,
    budget: usize,
) -> Result<LocalVerdict, BellError> {
    b.validate()?;
    let count = strategy_count(b);
    if count > budget {
        return Err(BellError::StrategyBudgetExceeded {
            strategies: count,
            budget,
        });
    }
    let strats: Vec<Strategy> = strategies(b).collect();
    let entries: Vec<Vec<usize>> = strats.iter().map(|f| strategy_entries(b, f)).collect();

    match feasibility::<f64>(b, &strats, &entries, |p| p)? {
        Feasibility::Local(weights) => {
            if reconstruction_error(b, &weights) <= RECONSTRUCTION_TOL {
                return Ok(LocalVerdict::Local { weights });
            }
        }
        Feasibility::Infeasible(farkas) => {
            if let Some(ineq) = visibility_certificate(b, &entries)? {
                if ineq.gap > GAP_TOL {
                    return Ok(LocalVerdict::NonLocal(ineq));
                }
            }
            let ineq = farkas_certificate(b, &farkas);
            if ineq.gap > GAP_TOL {
                return Ok(LocalVerdict::NonLocal(ineq));
            }
        }
    }

    // The float pass was not conclusive: repeat it exactly on the box entries.
    match feasibility::<Rational>(b, &strats, &entries, Rational::from_real)? {
        Feasibility::Local(weights) => Ok(LocalVerdict::Local { weights }),
        Feasibility::Infeasible(farkas) => {
            Ok(LocalVerdict::NonLocal(farkas_certificate(b, &farkas)))
        }
    }
}

enum Feasibility {
    Local(Vec<(Strategy, f64)>),
    Infeasible(Vec<f64>),
}

fn feasibility<T: Scalar>(
    b: &ConditionalBox,
    strats: &[Strategy],
    entries: &[Vec<usize>],
    conv: impl Fn(f64) -> T,
) -> Result<Feasibility, BellError> {
    let rows = b.table().len();
    let n = strats.len();
    let mut a = vec![vec![T::zero(); n]; rows + 1];
    for (j, e) in entries.iter().enumerate() {
        for &r in e {
            a[r][j] = T::one();
        }
        a[rows][j] = T::one();
    }
    let mut rhs: Vec<T> = b.table().iter().map(|&p| conv(p.max(0.0))).collect();
    rhs.push(T::one());
    let problem = LpProblem {
        a,
        b: rhs,
        c: vec![T::zero(); n],
    };
    match solve(&problem, LP_TOL).map_err(BellError::Lp)? {
        LpResult::Optimal { x, .. } => Ok(Feasibility::Local(
            strats
                .iter()
                .zip(&x)
                .filter(|(_, w)| w.is_positive_beyond(1e-15))
                .map(|(f, w)| (f.clone(), w.as_f64()))
                .collect(),
        )),
        LpResult::Infeasible { farkas } => Ok(Feasibility::Infeasible(
            farkas.iter().map(|v| v.as_f64()).collect(),
        )),
        LpResult::Unbounded => Err(BellError::Lp(
            "feasibility problem reported unbounded".into(),
        )),
    }
}

fn reconstruction_error(b: &ConditionalBox, weights: &[(Strategy, f64)]) -> f64 {
    let mut table = vec![0.0; b.table().len()];
    for (f, w) in weights {
        for r in strategy_entries(b, f) {
            table[r] += w;
        }
    }
    table
        .iter()
        .zip(b.table())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Turns a Farkas vector `(y_R, y_0)` with `y_R·D + y_0 ≤ 0` on strategies into
/// coefficients on the box, absorbing `y_0` through per-block normalization.
fn farkas_certificate<T: Scalar>(b: &ConditionalBox, farkas: &[T]) -> BellInequality {
    let rows = b.table().len();
    let s = b.num_setting_tuples() as f64;
    let y0 = farkas[rows].as_f64();
    let coeffs = farkas[..rows].iter().map(|v| v.as_f64() + y0 / s).collect();
    BellInequality::from_coefficients(b, coeffs)
}

/// Largest `t` with `t·p + (1 − t)·u` local, `u` the uniform box. The dual is
/// rescaled so that the inequality vanishes on `u` and has local bound 2; its
/// value on `p` is then `2/t*`.
fn visibility_certificate(
    b: &ConditionalBox,
    entries: &[Vec<usize>],
) -> Result<Option<BellInequality>, BellError> {
    let rows = b.table().len();
    let n = entries.len();
    let u = 1.0 / b.num_outcome_tuples() as f64;
    let mut a = vec![vec![0.0; n + 1]; rows + 1];
    for (j, e) in entries.iter().enumerate() {
        for &r in e {
            a[r][j] = 1.0;
        }
        a[rows][j] = 1.0;
    }
    for (r, &p) in b.table().iter().enumerate() {
        a[r][n] = u - p;
    }
    let mut rhs = vec![u; rows];
    rhs.push(1.0);
    let mut c = vec![0.0; n + 1];
    c[n] = -1.0;
    let problem = LpProblem { a, b: rhs, c };
    match solve(&problem, LP_TOL).map_err(BellError::Lp)? {
        LpResult::Optimal { y, value, .. } => {
            let t = -value;
            if t <= 1e-9 || t >= 1.0 {
                return Ok(None);
            }
            let scale = 2.0 / t;
            let kappa = scale * (y[rows] + t);
            let s = b.num_setting_tuples() as f64;
            let coeffs = y[..rows].iter().map(|v| scale * v + kappa / s).collect();
            Ok(Some(BellInequality::from_coefficients(b, coeffs)))
        }
        _ => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BellDecision {
    /// A classical model on the scenario reproducing the input.
    Classical {
        model: ClassicalModel<f64>,
    },
    NonClassical {
        certificate: BellInequality,
    },
}

impl BellDecision {
    pub fn is_classical(&self) -> bool {
        matches!(self, BellDecision::Classical { .. })
    }
}

/// Per party: the scenario measurements for its setting and outcome, and the
/// scenario sources carrying its setting and the shared strategy.
struct Layout {
    setting: Vec<usize>,
    outcome: Vec<usize>,
    setting_source: Vec<usize>,
    shared_sources: Vec<usize>,
}

fn decide_bell_shaped(
    s: &Scenario,
    p: &JointDistribution,
    parties: &[(String, String)],
    layout: Layout,
) -> Result<BellDecision, BellError> {
    let report = is_correlation(s, p).map_err(|_| BellError::NotACorrelation)?;
    if !report.is_correlation {
        return Err(BellError::NotACorrelation);
    }
    let extracted = box_from_correlation(p, parties)?;
    match local_polytope_membership(&extracted.conditional)? {
        LocalVerdict::NonLocal(certificate) => Ok(BellDecision::NonClassical { certificate }),
        LocalVerdict::Local { weights } => Ok(BellDecision::Classical {
            model: reconstruct(s, &extracted, &weights, &layout)?,
        }),
    }
}

/// Classical model with one source per setting carrying the (kept) setting
/// value and shared sources carrying the index of a deterministic strategy.
fn reconstruct(
    s: &Scenario,
    e: &ExtractedBox,
    weights: &[(Strategy, f64)],
    layout: &Layout,
) -> Result<ClassicalModel<f64>, BellError> {
    let k = e.setting_values.len();
    let sc = e.conditional.setting_cards();
    // Marginal of every party's kept settings.
    let mut marginals: Vec<Vec<f64>> = sc.iter().map(|&n| vec![0.0; n]).collect();
    for (xs, w) in TupleIter::new(&sc).zip(&e.setting_distribution) {
        for i in 0..k {
            marginals[i][xs[i]] += w;
        }
    }
    let total: f64 = weights.iter().map(|w| w.1).sum();
    let mut dists: Vec<Vec<f64>> = vec![vec![1.0]; s.num_sources()];
    for i in 0..k {
        dists[layout.setting_source[i]] = marginals[i].clone();
    }
    for &src in &layout.shared_sources {
        dists[src] = vec![1.0];
    }
    let strategy_source = layout.shared_sources[0];
    dists[strategy_source] = weights.iter().map(|w| w.1 / total).collect();

    let model = ClassicalModel::from_fn(s.clone(), dists, |v, hidden| {
        let srcs = s.sources_of(v);
        let value_of = |src: usize| hidden[srcs.iter().position(|&x| x == src).expect("connected")];
        let d = s.measurements()[v].outcomes;
        let mut row = vec![0.0; d];
        if let Some(i) = layout.setting.iter().position(|&m| m == v) {
            row[e.setting_values[i][value_of(layout.setting_source[i])]] = 1.0;
        } else if let Some(i) = layout.outcome.iter().position(|&m| m == v) {
            let x = value_of(layout.setting_source[i]);
            let lambda = value_of(strategy_source);
            row[weights[lambda].0[i][x]] = 1.0;
        } else {
            row[0] = 1.0;
        }
        row
    })
    .map_err(|err| BellError::ShapeMismatch(err.to_string()))?;
    Ok(model)
}

fn scenario_for(base: Scenario, p: &JointDistribution) -> Result<Scenario, BellError> {
    let cards: Vec<usize> = base
        .measurement_names()
        .iter()
        .map(|n| {
            p.index_of(n)
                .map(|i| p.variables()[i].cardinality)
                .ok_or(BellError::NotACorrelation)
        })
        .collect::<Result<_, _>>()?;
    if cards.len() != p.variables().len() {
        return Err(BellError::NotACorrelation);
    }
    Ok(base.with_outcomes(&cards))
}

/// Decides classicality of a correlation on the path `x – a – b – y`.
pub fn decide_p4(p: &JointDistribution) -> Result<BellDecision, BellError> {
    let s = scenario_for(p4(2), p)?;
    let idx = |n: &str| s.measurement_index(n).expect("standard name");
    let src = |n: &str| s.source_index(n).expect("standard name");
    let layout = Layout {
        setting: vec![idx("x"), idx("y")],
        outcome: vec![idx("a"), idx("b")],
        setting_source: vec![src("XA"), src("BY")],
        shared_sources: vec![src("AB")],
    };
    let parties = vec![
        ("x".to_string(), "a".to_string()),
        ("y".to_string(), "b".to_string()),
    ];
    decide_bell_shaped(&s, p, &parties, layout)
}

/// Decides classicality of a correlation on the `k`-arm star with settings
/// `x1…xk` and outcomes `a1…ak`.
pub fn decide_ak(p: &JointDistribution, k: usize) -> Result<BellDecision, BellError> {
    let s = scenario_for(multiarm(k, 2), p)?;
    let idx = |n: String| s.measurement_index(&n).expect("standard name");
    let src = |n: String| s.source_index(&n).expect("standard name");
    let layout = Layout {
        setting: (1..=k).map(|i| idx(format!("x{i}"))).collect(),
        outcome: (1..=k).map(|i| idx(format!("a{i}"))).collect(),
        setting_source: (1..=k).map(|i| src(format!("XA{i}"))).collect(),
        shared_sources: vec![src("A".to_string())],
    };
    let parties: Vec<(String, String)> = (1..=k)
        .map(|i| (format!("x{i}"), format!("a{i}")))
        .collect();
    decide_bell_shaped(&s, p, &parties, layout)
}

#[cfg(test)]
mod tests {
    use super::super::{chsh_value, deterministic_box, pr_box, Party};
    use super::*;

    #[test]
    fn pr_box_is_nonlocal_with_chsh_like_certificate() {
        let b = pr_box();
        match local_polytope_membership(&b).unwrap() {
            LocalVerdict::NonLocal(ineq) => {
                assert!((ineq.classical_bound - 2.0).abs() < 1e-9, "{ineq:?}");
                assert!((ineq.box_value - 4.0).abs() < 1e-9, "{ineq:?}");
                let (bound, value) = ineq.exact_evaluation(&b);
                assert!(value > bound);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deterministic_boxes_are_vertices() {
        let parties = vec![
            Party {
                settings: 2,
                outcomes: 2
            };
            2
        ];
        for code in 0..16usize {
            let f = vec![
                vec![code & 1, code >> 1 & 1],
                vec![code >> 2 & 1, code >> 3 & 1],
            ];
            let b = deterministic_box(parties.clone(), &f).unwrap();
            match local_polytope_membership(&b).unwrap() {
                LocalVerdict::Local { weights } => {
                    assert_eq!(weights.len(), 1);
                    assert_eq!(weights[0].0, f);
                    assert!((weights[0].1 - 1.0).abs() < 1e-12);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn noisy_pr_box_threshold() {
        // t·PR + (1 − t)·uniform has CHSH 4t and is local iff t ≤ 1/2.
        for (t, local) in [(0.45, true), (0.5, true), (0.55, false)] {
            let pr = pr_box();
            let b = ConditionalBox::new(
                pr.parties().to_vec(),
                pr.table()
                    .iter()
                    .map(|p| t * p + (1.0 - t) * 0.25)
                    .collect(),
            )
            .unwrap();
            assert!((chsh_value(&b).unwrap() - 4.0 * t).abs() < 1e-12);
            let verdict = local_polytope_membership(&b).unwrap();
            assert_eq!(
                matches!(verdict, LocalVerdict::Local { .. }),
                local,
                "{t}: {verdict:?}"
            );
        }
    }

    #[test]
    fn budget_is_enforced() {
        let b = ConditionalBox::from_fn(
            vec![
                Party {
                    settings: 4,
                    outcomes: 3
                };
                3
            ],
            |_, _| 1.0 / 27.0,
        )
        .unwrap();
        assert!(matches!(
            local_polytope_membership(&b),
            Err(BellError::StrategyBudgetExceeded { .. })
        ));
    }
}
