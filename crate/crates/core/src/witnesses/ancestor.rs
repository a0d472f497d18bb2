//! Common-ancestor inference: is `p` compatible with a network in which no
//! `k + 1` of its variables share a common ancestor? That holds exactly when
//! `p` is classical in the scenario with one source per `k`-tuple.

use crate::dist::{Distribution, DEFAULT_EPS};
use crate::models::support::search_support;
use crate::models::{SearchOptions, SupportOutcome, SupportPattern};
use crate::scalar::Scalar;
use crate::scenario::{build_ancestor_scenario, combinations};

use super::entropic::EntropicValues;
use super::{Verdict, WitnessError, WitnessKind, WitnessReport, ENTROPIC_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AncestorOptions {
    pub k: usize,
    pub search: SearchOptions,
}

impl Default for AncestorOptions {
    fn default() -> Self {
        AncestorOptions {
            k: 2,
            search: SearchOptions::default(),
        }
    }
}

/// Tests the null hypothesis "at most every `k`-tuple has a common ancestor".
///
/// For `k = 1` the hypothesis is full independence, which is decided
/// exactly. Otherwise two necessary conditions are checked: for `k = 2` the
/// entropic triangle inequalities on every three-variable marginal, and for
/// every `k` the realizability of the support, which is decided completely
/// by the support search.
pub fn ancestor_witness<T: Scalar>(
    p: &Distribution<T>,
    opts: AncestorOptions,
) -> Result<WitnessReport, WitnessError> {
    let n = p.variables().len();
    let k = opts.k;
    if n < 2 || k < 1 || k >= n {
        return Err(WitnessError::ShapeMismatch(format!(
            "need 1 ≤ k < n, got k = {k}, n = {n}"
        )));
    }
    let names: Vec<String> = p.names().iter().map(|s| s.to_string()).collect();
    let report = |verdict, slack, notes: Vec<String>| WitnessReport {
        kind: WitnessKind::Ancestor,
        verdict,
        slack,
        chain: Vec::new(),
        notes,
    };

    if k == 1 {
        let singles: Vec<Distribution<T>> = names
            .iter()
            .map(|v| p.marginalize(&[v]))
            .collect::<Result<_, _>>()?;
        let mut dev = 0.0f64;
        for (t, v) in p.iter() {
            let prod = singles
                .iter()
                .zip(&t)
                .fold(T::one(), |acc, (m, &x)| acc * m.probabilities()[x].clone());
            dev = dev.max((v.clone() - prod).abs().as_f64());
        }
        let tol = if T::EXACT {
            0.0
        } else {
            p.eps().max(DEFAULT_EPS)
        };
        let verdict = if dev > tol {
            Verdict::NonClassical
        } else {
            Verdict::Consistent
        };
        return Ok(report(
            verdict,
            dev,
            vec!["largest deviation from the product of marginals".into()],
        ));
    }

    let mut notes = Vec::new();
    let mut slack = f64::NEG_INFINITY;
    if k == 2 {
        for triple in combinations(n, 3) {
            let keep: Vec<&String> = triple.iter().map(|&i| &names[i]).collect();
            let e = EntropicValues::of(&p.marginalize(&keep)?)?;
            let worst = (0..3)
                .map(|v| e.mutual_information_slack(v))
                .chain(std::iter::once(e.steudel_ay_slack()))
                .fold(f64::NEG_INFINITY, f64::max);
            if worst > slack {
                slack = worst;
            }
            if worst > ENTROPIC_TOL {
                notes.push(format!(
                    "entropic violation {worst:.6} on ({})",
                    keep.iter()
                        .map(|s| s.as_str())
                        .collect::<Vec<_>>()
                        .join(",")
                ));
                return Ok(report(Verdict::NonClassical, worst, notes));
            }
        }
    }

    let cards = p.cardinalities();
    let s = build_ancestor_scenario(n, k, 2)
        .map_err(|e| WitnessError::ShapeMismatch(e.to_string()))?
        .with_outcomes(&cards);
    let mapping: Vec<(String, String)> = names
        .iter()
        .cloned()
        .zip(s.measurement_names().iter().map(|s| s.to_string()))
        .collect();
    let q = p.rename(&mapping)?;
    let sp = SupportPattern::from_distribution(&q);
    let (outcome, nodes) = search_support(&s, &sp, sp.len(), opts.search)?;
    let slack = if slack.is_finite() { slack } else { 0.0 };
    match outcome {
        SupportOutcome::NotRealizableUpTo(_) => {
            let mut r = report(Verdict::NonClassical, slack, notes);
            r.chain.push(format!(
                "no deterministic model with one source per {k}-tuple and at most {} values per source has this support ({nodes} search nodes)",
                sp.len()
            ));
            r.chain.push(format!(
                "{} values per source suffice for any realizable support of size {}",
                sp.len(),
                sp.len()
            ));
            Ok(r)
        }
        SupportOutcome::Realizable(_) => {
            notes.push("support is realizable".into());
            Ok(report(Verdict::Consistent, slack, notes))
        }
        SupportOutcome::Inconclusive { nodes } => {
            notes.push(format!("support search exhausted after {nodes} nodes"));
            Ok(report(Verdict::Inconclusive, slack, notes))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{JointDistribution, Variable};

    fn vars(n: usize) -> Vec<Variable> {
        (0..n).map(|i| Variable::new(format!("v{i}"), 2)).collect()
    }

    fn ghz(n: usize) -> JointDistribution {
        JointDistribution::from_fn(vars(n), |t| {
            if t.iter().all(|&x| x == t[0]) {
                0.5
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn independence_for_unary_sources() {
        let p = JointDistribution::from_fn(vars(3), |_| 0.125).unwrap();
        let opts = AncestorOptions {
            k: 1,
            ..Default::default()
        };
        assert_eq!(
            ancestor_witness(&p, opts).unwrap().verdict,
            Verdict::Consistent
        );
        assert_eq!(
            ancestor_witness(&ghz(3), opts).unwrap().verdict,
            Verdict::NonClassical
        );
    }

    #[test]
    fn ghz_needs_a_common_ancestor_of_all() {
        let r = ancestor_witness(&ghz(3), AncestorOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NonClassical);
        for k in 2..4 {
            let r = ancestor_witness(
                &ghz(4),
                AncestorOptions {
                    k,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(r.verdict, Verdict::NonClassical, "k = {k}");
        }
    }

    #[test]
    fn pairwise_correlation_is_consistent() {
        // v0 = v1 from a shared coin, v2 independent.
        let p =
            JointDistribution::from_fn(vars(3), |t| if t[0] == t[1] { 0.25 } else { 0.0 }).unwrap();
        let r = ancestor_witness(&p, AncestorOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent);
    }
}
