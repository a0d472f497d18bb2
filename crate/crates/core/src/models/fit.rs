//! Heuristic fitting of classical models to a target correlation.
//!
//! Expectation-maximization over the hidden variables with random restarts.
//! A returned model is re-evaluated from scratch, in floats and in exact
//! rationals, before it is reported; failure to fit proves nothing.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::correlation::{align_to_scenario, is_correlation};
use crate::dist::{Distribution, JointDistribution, TupleIter};
use crate::scalar::Rational;
use crate::scenario::Scenario;

use super::random::random_simplex;
use super::{ClassicalModel, ModelError};

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Hidden cardinality of every source; `cards` overrides it per source.
    pub k: usize,
    pub cards: Option<Vec<usize>>,
    pub restarts: usize,
    pub max_iters: usize,
    pub eps_fit: f64,
    pub seed: u64,
    /// Wall-clock limit; reaching it ends the fit as inconclusive.
    pub deadline: Option<Instant>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            k: 2,
            cards: None,
            restarts: 8,
            max_iters: 4000,
            eps_fit: 1e-6,
            seed: 0,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitOutcome {
    Model {
        model: ClassicalModel<f64>,
        residual: f64,
    },
    Inconclusive {
        best_residual: f64,
    },
}

/// Tries to find a classical model reproducing `p` within `eps_fit` in the
/// max norm.
pub fn fit_probabilities(
    s: &Scenario,
    p: &JointDistribution,
    opts: &FitOptions,
) -> Result<FitOutcome, ModelError> {
    let report = is_correlation(s, p).map_err(|_| ModelError::VariableMismatch)?;
    if !report.is_correlation {
        return Err(ModelError::NotACorrelation);
    }
    let target = align_to_scenario(s, p).map_err(|_| ModelError::VariableMismatch)?;
    let cards = match &opts.cards {
        Some(c) if c.len() == s.num_sources() && c.iter().all(|&x| x > 0) => c.clone(),
        Some(_) => return Err(ModelError::Shape("bad per-source cardinalities".into())),
        None => vec![opts.k.max(1); s.num_sources()],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = f64::INFINITY;
    let late = || opts.deadline.is_some_and(|d| Instant::now() >= d);
    for _ in 0..opts.restarts.max(1) {
        if late() {
            break;
        }
        let dists: Vec<Vec<f64>> = cards.iter().map(|&k| random_simplex(&mut rng, k)).collect();
        let init = ClassicalModel::from_fn(s.clone(), dists, |v, _| {
            random_simplex(&mut rng, s.measurements()[v].outcomes)
        })?;
        let mut em = Em::new(init);
        let mut residual = f64::INFINITY;
        for iter in 0..opts.max_iters {
            let r = em.step(target.probabilities());
            residual = r;
            if r <= opts.eps_fit * 0.5 || (iter % 64 == 63 && late()) {
                break;
            }
            if iter == opts.max_iters / 2 {
                em.snap(1e-9);
            }
        }
        let model = em.into_model()?;
        let verified = verify(&model, &target);
        best = best.min(verified.min(residual));
        if verified <= opts.eps_fit {
            return Ok(FitOutcome::Model {
                model,
                residual: verified,
            });
        }
    }
    Ok(FitOutcome::Inconclusive {
        best_residual: best,
    })
}

/// Max-norm residual of a fresh evaluation, taking the worse of float and
/// exact-rational evaluation of the same model.
fn verify(model: &ClassicalModel<f64>, target: &JointDistribution) -> f64 {
    let float = model
        .evaluate()
        .max_abs_diff(target)
        .unwrap_or(f64::INFINITY);
    let exact_target: Distribution<Rational> = target.to_exact();
    let exact = model
        .to_exact()
        .evaluate()
        .max_abs_diff(&exact_target)
        .unwrap_or(f64::INFINITY);
    float.max(exact)
}

struct Em {
    scenario: Scenario,
    dists: Vec<Vec<f64>>,
    kernels: Vec<Vec<f64>>,
    cards: Vec<usize>,
    outcomes: Vec<usize>,
    /// Kernel row offset of every measurement for every hidden assignment.
    rows: Vec<Vec<usize>>,
}

impl Em {
    fn new(m: ClassicalModel<f64>) -> Em {
        let cards = m.source_cardinalities();
        let s = m.scenario().clone();
        let outcomes = s.outcomes();
        let rows = TupleIter::new(&cards)
            .map(|g| {
                (0..s.num_measurements())
                    .map(|v| {
                        let local = s
                            .sources_of(v)
                            .iter()
                            .fold(0, |acc, &e| acc * cards[e] + g[e]);
                        local * outcomes[v]
                    })
                    .collect()
            })
            .collect();
        Em {
            dists: m.source_dists().to_vec(),
            kernels: m.kernels().to_vec(),
            scenario: s,
            cards,
            outcomes,
            rows,
        }
    }

    fn joint_for(&self, gi: usize, weight: f64, buf: &mut Vec<f64>, tmp: &mut Vec<f64>) {
        buf.clear();
        buf.push(weight);
        for (v, &d) in self.outcomes.iter().enumerate() {
            let off = self.rows[gi][v];
            let row = &self.kernels[v][off..off + d];
            tmp.clear();
            for &p in buf.iter() {
                for &q in row {
                    tmp.push(p * q);
                }
            }
            std::mem::swap(buf, tmp);
        }
    }

    /// One EM update; returns the max-norm residual before the update.
    fn step(&mut self, target: &[f64]) -> f64 {
        let size = target.len();
        let assignments: Vec<Vec<usize>> = TupleIter::new(&self.cards).collect();
        let weights: Vec<f64> = assignments
            .iter()
            .map(|g| {
                g.iter()
                    .enumerate()
                    .map(|(e, &l)| self.dists[e][l])
                    .product()
            })
            .collect();
        let mut model = vec![0.0; size];
        let mut buf = Vec::with_capacity(size);
        let mut tmp = Vec::with_capacity(size);
        for (gi, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            self.joint_for(gi, w, &mut buf, &mut tmp);
            for (m, q) in model.iter_mut().zip(&buf) {
                *m += q;
            }
        }
        let residual = model
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let ratio: Vec<f64> = target
            .iter()
            .zip(&model)
            .map(|(&t, &m)| if t > 0.0 && m > 0.0 { t / m } else { 0.0 })
            .collect();

        let mut dist_counts: Vec<Vec<f64>> = self.cards.iter().map(|&k| vec![0.0; k]).collect();
        let mut kernel_counts: Vec<Vec<f64>> =
            self.kernels.iter().map(|k| vec![0.0; k.len()]).collect();
        let cards_out = self.outcomes.clone();
        for (gi, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            self.joint_for(gi, w, &mut buf, &mut tmp);
            let mut mass = 0.0;
            for (t, (&q, &r)) in buf.iter().zip(&ratio).enumerate() {
                let c = q * r;
                if c == 0.0 {
                    continue;
                }
                mass += c;
                let mut rest = t;
                for v in (0..cards_out.len()).rev() {
                    let o = rest % cards_out[v];
                    rest /= cards_out[v];
                    kernel_counts[v][self.rows[gi][v] + o] += c;
                }
            }
            for (e, &l) in assignments[gi].iter().enumerate() {
                dist_counts[e][l] += mass;
            }
        }
        for (d, c) in self.dists.iter_mut().zip(&dist_counts) {
            normalize_into(d, c);
        }
        for (v, (k, c)) in self.kernels.iter_mut().zip(&kernel_counts).enumerate() {
            let d = cards_out[v];
            for (row, crow) in k.chunks_mut(d).zip(c.chunks(d)) {
                normalize_into(row, crow);
            }
        }
        residual
    }

    /// Zeroes negligible entries so the remaining iterations can converge onto
    /// faces of the simplex.
    fn snap(&mut self, tol: f64) {
        for d in &mut self.dists {
            snap_vec(d, tol);
        }
        for (v, k) in self.kernels.iter_mut().enumerate() {
            for row in k.chunks_mut(self.outcomes[v]) {
                snap_vec(row, tol);
            }
        }
    }

    fn into_model(self) -> Result<ClassicalModel<f64>, ModelError> {
        let mut dists = self.dists;
        for d in &mut dists {
            renormalize(d);
        }
        let mut kernels = self.kernels;
        for (v, k) in kernels.iter_mut().enumerate() {
            for row in k.chunks_mut(self.outcomes[v]) {
                renormalize(row);
            }
        }
        ClassicalModel::new(self.scenario, dists, kernels)
    }
}

fn normalize_into(out: &mut [f64], counts: &[f64]) {
    let total: f64 = counts.iter().sum();
    if total > 0.0 {
        for (o, &c) in out.iter_mut().zip(counts) {
            *o = c / total;
        }
    }
}

fn snap_vec(v: &mut [f64], tol: f64) {
    let kept: f64 = v.iter().filter(|&&x| x > tol).sum();
    if kept > 0.0 {
        for x in v.iter_mut() {
            *x = if *x > tol { *x / kept } else { 0.0 };
        }
    }
}

fn renormalize(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        for x in v.iter_mut() {
            *x /= total;
        }
    } else {
        let n = v.len() as f64;
        for x in v.iter_mut() {
            *x = 1.0 / n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Variable;
    use crate::scenario::standard::*;

    #[test]
    fn product_distribution_on_c3_fits() {
        let s = c3(2);
        let p = Distribution::from_fn(s.variables(), |t| {
            [0.3, 0.7][t[0]] * [0.5, 0.5][t[1]] * [0.9, 0.1][t[2]]
        })
        .unwrap();
        let out = fit_probabilities(&s, &p, &FitOptions::default()).unwrap();
        match out {
            FitOutcome::Model { residual, .. } => assert!(residual <= 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pr_box_on_c4_never_fits() {
        let s = c4(2);
        let vars: Vec<Variable> = s.variables();
        let p = Distribution::from_fn(vars, |t| {
            if t[0] ^ t[1] == t[2] & t[3] {
                0.125
            } else {
                0.0
            }
        })
        .unwrap();
        let opts = FitOptions {
            k: 4,
            restarts: 2,
            max_iters: 500,
            ..FitOptions::default()
        };
        assert!(matches!(
            fit_probabilities(&s, &p, &opts).unwrap(),
            FitOutcome::Inconclusive { .. }
        ));
    }

    #[test]
    fn rejects_non_correlations() {
        let s = p4(2);
        let p = Distribution::from_fn(s.variables(), |t| {
            if t.iter().all(|&x| x == t[0]) {
                0.5
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(matches!(
            fit_probabilities(&s, &p, &FitOptions::default()),
            Err(ModelError::NotACorrelation)
        ));
    }
}
