//! Dense joint distributions over named finite variables.
//!
//! Storage is row-major with the last variable varying fastest. Entropies are
//! in bits.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Rational, Scalar};

/// Default tolerance for probability identities.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Tolerance for comparisons between entropic quantities.
pub const ENTROPY_EPS: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub cardinality: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, cardinality: usize) -> Self {
        Variable {
            name: name.into(),
            cardinality,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("expected {expected} probabilities, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("variable `{0}` has zero cardinality")]
    ZeroCardinality(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("probability at index {index} is negative ({value})")]
    NegativeProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("conditioning event has probability {0}")]
    ZeroProbabilityCondition(f64),
    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),
    #[error("variable set must be nonempty")]
    EmptySubset,
    #[error("value {value} out of range for variable `{name}`")]
    ValueOutOfRange { name: String, value: usize },
}

/// A finite joint distribution with entries of type `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    variables: Vec<Variable>,
    probabilities: Vec<T>,
    eps: f64,
}

pub type JointDistribution = Distribution<f64>;
pub type ExactDistribution = Distribution<Rational>;

fn table_len(variables: &[Variable]) -> usize {
    variables.iter().map(|v| v.cardinality).product()
}

impl<T: Scalar> Distribution<T> {
    /// Builds a distribution with the default tolerance.
    pub fn new(variables: Vec<Variable>, probabilities: Vec<T>) -> Result<Self, DistError> {
        Self::with_eps(variables, probabilities, DEFAULT_EPS)
    }

    /// Builds a distribution; float entries in `[-eps, 0)` are clamped to zero.
    pub fn with_eps(
        variables: Vec<Variable>,
        mut probabilities: Vec<T>,
        eps: f64,
    ) -> Result<Self, DistError> {
        let mut seen = BTreeSet::new();
        for v in &variables {
            if v.cardinality == 0 {
                return Err(DistError::ZeroCardinality(v.name.clone()));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(DistError::DuplicateVariable(v.name.clone()));
            }
        }
        let expected = table_len(&variables);
        if probabilities.len() != expected {
            return Err(DistError::LengthMismatch {
                expected,
                actual: probabilities.len(),
            });
        }
        for (index, p) in probabilities.iter_mut().enumerate() {
            if p.is_negative() {
                if p.is_negligible(eps) {
                    *p = T::zero();
                } else {
                    return Err(DistError::NegativeProbability {
                        index,
                        value: p.as_f64(),
                    });
                }
            }
        }
        let total = crate::scalar::sum(&probabilities);
        if !total.approx_eq(&T::one(), eps) {
            return Err(DistError::NotNormalized {
                sum: total.as_f64(),
            });
        }
        Ok(Distribution {
            variables,
            probabilities,
            eps,
        })
    }

    /// Wraps a table without checking normalization. Callers guarantee the
    /// shape and nonnegativity; the sum may be off by rounding (or, for exact
    /// tables built from float data, by a few ulps).
    pub fn from_raw_unchecked(variables: Vec<Variable>, probabilities: Vec<T>, eps: f64) -> Self {
        debug_assert_eq!(table_len(&variables), probabilities.len());
        Distribution {
            variables,
            probabilities,
            eps,
        }
    }

    /// Tabulates `f` over all outcome tuples.
    pub fn from_fn(
        variables: Vec<Variable>,
        f: impl FnMut(&[usize]) -> T,
    ) -> Result<Self, DistError> {
        let mut f = f;
        let cards: Vec<usize> = variables.iter().map(|v| v.cardinality).collect();
        let probabilities = TupleIter::new(&cards).map(|t| f(&t)).collect();
        Self::new(variables, probabilities)
    }

    pub fn point_mass(variables: Vec<Variable>, values: &[usize]) -> Result<Self, DistError> {
        for (v, &x) in variables.iter().zip(values) {
            if x >= v.cardinality {
                return Err(DistError::ValueOutOfRange {
                    name: v.name.clone(),
                    value: x,
                });
            }
        }
        Self::from_fn(
            variables,
            |t| if t == values { T::one() } else { T::zero() },
        )
    }

    /// Product distribution of two distributions on disjoint variables.
    pub fn product(&self, other: &Self) -> Result<Self, DistError> {
        for v in &other.variables {
            if self.index_of(&v.name).is_some() {
                return Err(DistError::OverlappingSets(v.name.clone()));
            }
        }
        let mut variables = self.variables.clone();
        variables.extend(other.variables.iter().cloned());
        let mut probabilities = Vec::with_capacity(self.len() * other.len());
        for p in &self.probabilities {
            for q in &other.probabilities {
                probabilities.push(p.clone() * q.clone());
            }
        }
        Self::with_eps(variables, probabilities, self.eps.max(other.eps))
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn names(&self) -> Vec<&str> {
        self.variables.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.cardinality).collect()
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn set_eps(&mut self, eps: f64) {
        self.eps = eps;
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, DistError> {
        names
            .iter()
            .map(|n| {
                self.index_of(n.as_ref())
                    .ok_or_else(|| DistError::UnknownVariable(n.as_ref().to_string()))
            })
            .collect()
    }

    /// Flat index of an outcome tuple given in variable order.
    pub fn flat_index(&self, values: &[usize]) -> usize {
        flat_index(&self.cardinalities(), values)
    }

    pub fn get(&self, values: &[usize]) -> &T {
        &self.probabilities[self.flat_index(values)]
    }

    /// Iterates `(tuple, probability)` over the full table.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &T)> + '_ {
        TupleIter::new(&self.cardinalities()).zip(self.probabilities.iter())
    }

    /// Outcome tuples with probability above `eps` (nonzero in exact mode).
    pub fn support(&self) -> Vec<Vec<usize>> {
        self.iter()
            .filter(|(_, p)| p.is_positive_beyond(self.eps))
            .map(|(t, _)| t)
            .collect()
    }

    /// Sums out every variable not in `keep`; order follows the original.
    pub fn marginalize<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self, DistError> {
        if keep.is_empty() {
            return Err(DistError::EmptySubset);
        }
        let mut positions = self.indices_of(keep)?;
        positions.sort_unstable();
        positions.dedup();
        let variables: Vec<Variable> = positions
            .iter()
            .map(|&i| self.variables[i].clone())
            .collect();
        let out_cards: Vec<usize> = variables.iter().map(|v| v.cardinality).collect();
        let mut out = vec![T::zero(); table_len(&variables)];
        let mut sub = vec![0; positions.len()];
        for (tuple, p) in self.iter() {
            if p.is_zero() {
                continue;
            }
            for (slot, &i) in sub.iter_mut().zip(&positions) {
                *slot = tuple[i];
            }
            let idx = flat_index(&out_cards, &sub);
            out[idx] = out[idx].clone() + p.clone();
        }
        Ok(Distribution {
            variables,
            probabilities: out,
            eps: self.eps,
        })
    }

    /// Reorders the variables; `order` must be a permutation of all names.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self, DistError> {
        let positions = self.indices_of(order)?;
        let distinct: BTreeSet<usize> = positions.iter().copied().collect();
        if distinct.len() != positions.len() || positions.len() != self.variables.len() {
            let missing = self
                .variables
                .iter()
                .find(|v| !order.iter().any(|o| o.as_ref() == v.name))
                .map(|v| v.name.clone())
                .unwrap_or_default();
            return Err(DistError::UnknownVariable(missing));
        }
        let variables: Vec<Variable> = positions
            .iter()
            .map(|&i| self.variables[i].clone())
            .collect();
        let new_cards: Vec<usize> = variables.iter().map(|v| v.cardinality).collect();
        let mut out = vec![T::zero(); self.len()];
        let mut permuted = vec![0; positions.len()];
        for (tuple, p) in self.iter() {
            for (slot, &i) in permuted.iter_mut().zip(&positions) {
                *slot = tuple[i];
            }
            out[flat_index(&new_cards, &permuted)] = p.clone();
        }
        Ok(Distribution {
            variables,
            probabilities: out,
            eps: self.eps,
        })
    }

    /// Renames variables simultaneously according to `(from, to)` pairs.
    pub fn rename<S: AsRef<str>>(&self, mapping: &[(S, S)]) -> Result<Self, DistError> {
        let mut variables = self.variables.clone();
        for (from, to) in mapping {
            let i = self
                .index_of(from.as_ref())
                .ok_or_else(|| DistError::UnknownVariable(from.as_ref().to_string()))?;
            variables[i].name = to.as_ref().to_string();
        }
        let mut seen = BTreeSet::new();
        for v in &variables {
            if !seen.insert(v.name.clone()) {
                return Err(DistError::DuplicateVariable(v.name.clone()));
            }
        }
        Ok(Distribution {
            variables,
            probabilities: self.probabilities.clone(),
            eps: self.eps,
        })
    }

    /// Conditions on the given assignment and returns the normalized
    /// distribution over the remaining variables.
    pub fn condition<S: AsRef<str>>(&self, given: &[(S, usize)]) -> Result<Self, DistError> {
        if given.is_empty() {
            return Ok(self.clone());
        }
        let mut fixed = vec![None; self.variables.len()];
        for (name, value) in given {
            let i = self
                .index_of(name.as_ref())
                .ok_or_else(|| DistError::UnknownVariable(name.as_ref().to_string()))?;
            if *value >= self.variables[i].cardinality {
                return Err(DistError::ValueOutOfRange {
                    name: name.as_ref().to_string(),
                    value: *value,
                });
            }
            fixed[i] = Some(*value);
        }
        let free: Vec<usize> = (0..self.variables.len())
            .filter(|&i| fixed[i].is_none())
            .collect();
        if free.is_empty() {
            return Err(DistError::EmptySubset);
        }
        let variables: Vec<Variable> = free.iter().map(|&i| self.variables[i].clone()).collect();
        let out_cards: Vec<usize> = variables.iter().map(|v| v.cardinality).collect();
        let mut out = vec![T::zero(); table_len(&variables)];
        let mut mass = T::zero();
        let mut sub = vec![0; free.len()];
        for (tuple, p) in self.iter() {
            let matches = fixed
                .iter()
                .zip(&tuple)
                .all(|(f, &x)| f.is_none_or(|v| v == x));
            if !matches {
                continue;
            }
            for (slot, &i) in sub.iter_mut().zip(&free) {
                *slot = tuple[i];
            }
            let idx = flat_index(&out_cards, &sub);
            out[idx] = out[idx].clone() + p.clone();
            mass = mass + p.clone();
        }
        if !mass.is_positive_beyond(self.eps) {
            return Err(DistError::ZeroProbabilityCondition(mass.as_f64()));
        }
        for p in &mut out {
            *p = p.clone() / mass.clone();
        }
        Ok(Distribution {
            variables,
            probabilities: out,
            eps: self.eps,
        })
    }

    /// Shannon entropy (bits) of the marginal on `subset`.
    pub fn entropy<S: AsRef<str>>(&self, subset: &[S]) -> Result<f64, DistError> {
        let marginal = self.marginalize(subset)?;
        Ok(shannon_entropy(
            marginal.probabilities.iter().map(|p| p.as_f64()),
        ))
    }

    /// `H(A) + H(B) - H(AB)` in bits, clamped at zero.
    pub fn mutual_information<S: AsRef<str>>(&self, a: &[S], b: &[S]) -> Result<f64, DistError> {
        self.check_disjoint(a, b)?;
        let union = union_names(a, b);
        let mi = self.entropy(a)? + self.entropy(b)? - self.entropy(&union)?;
        Ok(mi.max(0.0))
    }

    fn check_disjoint<S: AsRef<str>>(&self, a: &[S], b: &[S]) -> Result<(), DistError> {
        if a.is_empty() || b.is_empty() {
            return Err(DistError::EmptySubset);
        }
        self.indices_of(a)?;
        self.indices_of(b)?;
        if let Some(shared) = a
            .iter()
            .find(|x| b.iter().any(|y| y.as_ref() == x.as_ref()))
        {
            return Err(DistError::OverlappingSets(shared.as_ref().to_string()));
        }
        Ok(())
    }

    /// Max-norm distance between the marginal on `A ∪ B` and the product of
    /// the marginals on `A` and `B`.
    pub fn product_deviation<S: AsRef<str>>(&self, a: &[S], b: &[S]) -> Result<T, DistError> {
        self.check_disjoint(a, b)?;
        let union = union_names(a, b);
        let joint = self.marginalize(&union)?;
        let pa = self.marginalize(a)?;
        let pb = self.marginalize(b)?;
        let a_pos: Vec<usize> = pa
            .variables
            .iter()
            .map(|v| joint.index_of(&v.name).expect("marginal variable"))
            .collect();
        let b_pos: Vec<usize> = pb
            .variables
            .iter()
            .map(|v| joint.index_of(&v.name).expect("marginal variable"))
            .collect();
        let mut worst = T::zero();
        let mut ta = vec![0; a_pos.len()];
        let mut tb = vec![0; b_pos.len()];
        for (tuple, p) in joint.iter() {
            for (slot, &i) in ta.iter_mut().zip(&a_pos) {
                *slot = tuple[i];
            }
            for (slot, &i) in tb.iter_mut().zip(&b_pos) {
                *slot = tuple[i];
            }
            let expected = pa.get(&ta).clone() * pb.get(&tb).clone();
            let dev = (p.clone() - expected).abs();
            if dev > worst {
                worst = dev;
            }
        }
        Ok(worst)
    }

    /// Whether the marginal on `A ∪ B` factorizes as `p(A) p(B)` within `eps`.
    pub fn is_product<S: AsRef<str>>(&self, a: &[S], b: &[S]) -> Result<bool, DistError> {
        let dev = self.product_deviation(a, b)?;
        Ok(dev.is_negligible(self.eps))
    }

    /// Lossy conversion to floats.
    pub fn to_f64(&self) -> JointDistribution {
        Distribution {
            variables: self.variables.clone(),
            probabilities: self.probabilities.iter().map(|p| p.as_f64()).collect(),
            eps: self.eps,
        }
    }

    /// Max-norm distance to another distribution over the same variables in
    /// the same order.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.variables != other.variables {
            return None;
        }
        Some(
            self.probabilities
                .iter()
                .zip(&other.probabilities)
                .map(|(p, q)| (p.clone() - q.clone()).abs().as_f64())
                .fold(0.0, f64::max),
        )
    }

    /// Outcome-wise map that keeps the variables; used to build variants.
    pub fn map_values(&self, f: impl Fn(&T) -> T) -> Result<Self, DistError> {
        Self::with_eps(
            self.variables.clone(),
            self.probabilities.iter().map(f).collect(),
            self.eps,
        )
    }
}

impl JointDistribution {
    /// Exact conversion of every float entry (each `f64` is a dyadic rational).
    pub fn to_exact(&self) -> ExactDistribution {
        Distribution {
            variables: self.variables.clone(),
            probabilities: self
                .probabilities
                .iter()
                .map(|&p| Rational::from_real(p))
                .collect(),
            eps: self.eps,
        }
    }
}

fn union_names<S: AsRef<str>>(a: &[S], b: &[S]) -> Vec<String> {
    a.iter()
        .chain(b.iter())
        .map(|s| s.as_ref().to_string())
        .collect()
}

/// Entropy in bits of a probability vector, with `0 log 0 = 0`.
pub fn shannon_entropy(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = probabilities
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// Row-major flat index with the last coordinate fastest.
pub fn flat_index(cards: &[usize], values: &[usize]) -> usize {
    cards
        .iter()
        .zip(values)
        .fold(0, |acc, (&c, &v)| acc * c + v)
}

/// Inverse of [`flat_index`].
pub fn tuple_of(cards: &[usize], mut index: usize) -> Vec<usize> {
    let mut out = vec![0; cards.len()];
    for (slot, &c) in out.iter_mut().zip(cards).rev() {
        *slot = index % c;
        index /= c;
    }
    out
}

/// Odometer over all tuples of a mixed-radix space, last coordinate fastest.
#[derive(Debug, Clone)]
pub struct TupleIter {
    cards: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl TupleIter {
    pub fn new(cards: &[usize]) -> Self {
        let current = if cards.contains(&0) {
            None
        } else {
            Some(vec![0; cards.len()])
        };
        TupleIter {
            cards: cards.to_vec(),
            current,
        }
    }
}

impl Iterator for TupleIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < self.cards[i] {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::new(*n, 2)).collect()
    }

    fn perfect() -> JointDistribution {
        Distribution::from_fn(bits(&["a", "b", "c"]), |t| {
            if t == [0, 0, 0] || t == [1, 1, 1] {
                0.5
            } else {
                0.0
            }
        })
        .unwrap()
    }

    /// PR box in (x, a, b, y) order.
    fn pr_p4() -> JointDistribution {
        Distribution::from_fn(bits(&["x", "a", "b", "y"]), |t| {
            let (x, a, b, y) = (t[0], t[1], t[2], t[3]);
            if a ^ b == x & y {
                0.125
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn tuple_iteration_is_row_major() {
        let tuples: Vec<_> = TupleIter::new(&[2, 3]).collect();
        assert_eq!(tuples.len(), 6);
        assert_eq!(tuples[1], vec![0, 1]);
        assert_eq!(tuples[3], vec![1, 0]);
        for (i, t) in tuples.iter().enumerate() {
            assert_eq!(flat_index(&[2, 3], t), i);
            assert_eq!(&tuple_of(&[2, 3], i), t);
        }
        assert_eq!(TupleIter::new(&[]).count(), 1);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(matches!(
            JointDistribution::new(bits(&["a"]), vec![0.5]),
            Err(DistError::LengthMismatch { .. })
        ));
        assert!(matches!(
            JointDistribution::new(bits(&["a"]), vec![0.7, 0.7]),
            Err(DistError::NotNormalized { .. })
        ));
        assert!(matches!(
            JointDistribution::new(bits(&["a"]), vec![1.5, -0.5]),
            Err(DistError::NegativeProbability { .. })
        ));
        assert!(matches!(
            JointDistribution::new(bits(&["a", "a"]), vec![0.25; 4]),
            Err(DistError::DuplicateVariable(_))
        ));
        let clamped = JointDistribution::new(bits(&["a"]), vec![1.0 + 1e-12, -1e-12]).unwrap();
        assert_eq!(clamped.probabilities()[1], 0.0);
    }

    #[test]
    fn marginalize_pr_box_to_setting_is_uniform() {
        let m = pr_p4().marginalize(&["x"]).unwrap();
        assert_eq!(m.probabilities(), &[0.5, 0.5]);
    }

    #[test]
    fn marginalize_to_everything_is_identity() {
        let p = pr_p4();
        assert_eq!(p.marginalize(&["y", "x", "b", "a"]).unwrap(), p);
    }

    #[test]
    fn marginalize_perfect_correlation_to_pair() {
        let m = perfect().marginalize(&["a", "b"]).unwrap();
        assert_eq!(m.probabilities(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn marginalize_unknown_variable_fails() {
        assert_eq!(
            perfect().marginalize(&["z"]),
            Err(DistError::UnknownVariable("z".into()))
        );
    }

    #[test]
    fn condition_pr_box_on_settings() {
        let c = pr_p4().condition(&[("x", 0), ("y", 0)]).unwrap();
        assert_eq!(c.names(), vec!["a", "b"]);
        assert_eq!(c.probabilities(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn condition_on_nothing_is_noop() {
        let p = pr_p4();
        let empty: [(&str, usize); 0] = [];
        assert_eq!(p.condition(&empty).unwrap(), p);
    }

    #[test]
    fn condition_perfect_on_c() {
        let c = perfect().condition(&[("c", 0)]).unwrap();
        assert_eq!(c.probabilities(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn condition_on_null_event_fails() {
        let p = JointDistribution::point_mass(bits(&["a", "b"]), &[0, 0]).unwrap();
        assert!(matches!(
            p.condition(&[("a", 1)]),
            Err(DistError::ZeroProbabilityCondition(_))
        ));
    }

    #[test]
    fn entropies_of_named_examples() {
        let p = perfect();
        assert_eq!(p.entropy(&["a"]).unwrap(), 1.0);
        assert_eq!(p.entropy(&["a", "b", "c"]).unwrap(), 1.0);
        assert_eq!(pr_p4().entropy(&["x", "a"]).unwrap(), 2.0);
    }

    #[test]
    fn mutual_information_examples() {
        assert_eq!(perfect().mutual_information(&["a"], &["b"]).unwrap(), 1.0);
        let prod = JointDistribution::new(bits(&["a"]), vec![0.3, 0.7])
            .unwrap()
            .product(&JointDistribution::new(bits(&["b"]), vec![0.6, 0.4]).unwrap())
            .unwrap();
        assert!(prod.mutual_information(&["a"], &["b"]).unwrap() < 1e-12);
        assert!(pr_p4().mutual_information(&["x"], &["y"]).unwrap() < 1e-12);
        assert_eq!(
            perfect().mutual_information(&["a", "b"], &["b"]),
            Err(DistError::OverlappingSets("b".into()))
        );
    }

    #[test]
    fn product_tests() {
        assert!(pr_p4().is_product(&["x"], &["y"]).unwrap());
        assert!(!perfect().is_product(&["a"], &["b"]).unwrap());
        let prod = JointDistribution::new(bits(&["a"]), vec![0.25, 0.75])
            .unwrap()
            .product(&JointDistribution::new(bits(&["b"]), vec![0.5, 0.5]).unwrap())
            .unwrap();
        assert!(prod.is_product(&["a"], &["b"]).unwrap());
        assert!(matches!(
            prod.is_product(&["a"], &["a"]),
            Err(DistError::OverlappingSets(_))
        ));
    }

    #[test]
    fn exact_mode_is_exact() {
        let third = Rational::from_ratio(1, 3);
        let p = ExactDistribution::new(
            bits(&["a"]),
            vec![third.clone(), Rational::from_ratio(2, 3)],
        )
        .unwrap();
        assert_eq!(p.marginalize(&["a"]).unwrap().probabilities()[0], third);
        assert!(ExactDistribution::new(bits(&["a"]), vec![third.clone(), third]).is_err());
    }

    #[test]
    fn reorder_and_rename_round_trip() {
        let p = pr_p4();
        let q = p.reorder(&["a", "b", "x", "y"]).unwrap();
        assert_eq!(q.get(&[1, 0, 1, 1]), p.get(&[1, 1, 0, 1]));
        assert_eq!(q.reorder(&["x", "a", "b", "y"]).unwrap(), p);
        let r = p.rename(&[("a", "x"), ("x", "a")]).unwrap();
        assert_eq!(r.names(), vec!["a", "x", "b", "y"]);
        assert!(p.rename(&[("a", "x")]).is_err());
    }
}
