//! Random model generators for property tests and searches.

use rand::Rng;

use crate::scalar::{Rational, Scalar};
use crate::scenario::Scenario;

use super::ClassicalModel;

/// Random point of the probability simplex (flat Dirichlet).
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Random rational probability vector with integer weights in `0..=max_weight`,
/// not all zero.
pub fn random_rational_simplex<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_weight: i64,
) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=max_weight)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.iter().map(|&x| Rational::from_ratio(x, total)).collect();
        }
    }
}

fn point<T: Scalar>(d: usize, o: usize) -> Vec<T> {
    let mut row = vec![T::zero(); d];
    row[o] = T::one();
    row
}

/// Random float model with hidden cardinalities in `1..=k_max`. Each kernel
/// row is deterministic with probability `deterministic`.
pub fn random_model<R: Rng + ?Sized>(
    rng: &mut R,
    s: &Scenario,
    k_max: usize,
    deterministic: f64,
) -> ClassicalModel<f64> {
    let dists: Vec<Vec<f64>> = (0..s.num_sources())
        .map(|_| {
            let k = rng.gen_range(1..=k_max);
            random_simplex(rng, k)
        })
        .collect();
    ClassicalModel::from_fn(s.clone(), dists, |v, _| {
        let d = s.measurements()[v].outcomes;
        if rng.gen_bool(deterministic) {
            point(d, rng.gen_range(0..d))
        } else {
            random_simplex(rng, d)
        }
    })
    .expect("random model is valid")
}

/// Random model with rational entries, hidden cardinalities in `1..=k_max`.
pub fn random_rational_model<R: Rng + ?Sized>(
    rng: &mut R,
    s: &Scenario,
    k_max: usize,
    max_weight: i64,
    deterministic: f64,
) -> ClassicalModel<Rational> {
    let dists: Vec<Vec<Rational>> = (0..s.num_sources())
        .map(|_| {
            let k = rng.gen_range(1..=k_max);
            random_rational_simplex(rng, k, max_weight)
        })
        .collect();
    ClassicalModel::from_fn(s.clone(), dists, |v, _| {
        let d = s.measurements()[v].outcomes;
        if rng.gen_bool(deterministic) {
            point(d, rng.gen_range(0..d))
        } else {
            random_rational_simplex(rng, d, max_weight)
        }
    })
    .expect("random model is valid")
}

/// Random model with 0/1 kernels and uniform sources of the given sizes.
pub fn random_deterministic_model<R: Rng + ?Sized>(
    rng: &mut R,
    s: &Scenario,
    cards: &[usize],
) -> ClassicalModel<f64> {
    let dists = cards.iter().map(|&k| vec![1.0 / k as f64; k]).collect();
    ClassicalModel::from_fn(s.clone(), dists, |v, _| {
        let d = s.measurements()[v].outcomes;
        point(d, rng.gen_range(0..d))
    })
    .expect("random model is valid")
}
