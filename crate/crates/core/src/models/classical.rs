//! Finite hidden-variable models and the constructions on them.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::correlation::{align_to_scenario, is_correlation, CorrelationError};
use crate::dist::{flat_index, tuple_of, DistError, Distribution, TupleIter};
use crate::scalar::{Rational, Scalar};
use crate::scenario::{classify_graph_scenario, gaifman_graph, Classification, Scenario};

use super::ModelError;

/// Independent finite hidden variable per source and a response kernel per
/// measurement.
///
/// The kernel of measurement `v` is a flat table indexed by the hidden values
/// of `v`'s sources (ascending source index, row-major) with the outcome as
/// the fastest coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalModel<T> {
    scenario: Scenario,
    source_dists: Vec<Vec<T>>,
    kernels: Vec<Vec<T>>,
    eps: f64,
}

pub type ExactModel = ClassicalModel<Rational>;

impl<T: Scalar> ClassicalModel<T> {
    pub fn new(
        scenario: Scenario,
        source_dists: Vec<Vec<T>>,
        kernels: Vec<Vec<T>>,
    ) -> Result<Self, ModelError> {
        let m = ClassicalModel {
            scenario,
            source_dists,
            kernels,
            eps: crate::dist::DEFAULT_EPS,
        };
        m.validate()?;
        Ok(m)
    }

    /// Tabulates kernels from `response(v, hidden)`, which returns the
    /// outcome distribution of `v` given its sources' hidden values.
    pub fn from_fn(
        scenario: Scenario,
        source_dists: Vec<Vec<T>>,
        mut response: impl FnMut(usize, &[usize]) -> Vec<T>,
    ) -> Result<Self, ModelError> {
        let cards: Vec<usize> = source_dists.iter().map(|d| d.len()).collect();
        if cards.len() != scenario.num_sources() {
            return Err(ModelError::Shape(format!(
                "expected {} source distributions, got {}",
                scenario.num_sources(),
                cards.len()
            )));
        }
        let mut kernels = Vec::with_capacity(scenario.num_measurements());
        for v in 0..scenario.num_measurements() {
            let local: Vec<usize> = scenario.sources_of(v).iter().map(|&e| cards[e]).collect();
            let mut table = Vec::new();
            for hidden in TupleIter::new(&local) {
                table.extend(response(v, &hidden));
            }
            kernels.push(table);
        }
        Self::new(scenario, source_dists, kernels)
    }

    fn validate(&self) -> Result<(), ModelError> {
        let s = &self.scenario;
        if self.source_dists.len() != s.num_sources() || self.kernels.len() != s.num_measurements()
        {
            return Err(ModelError::Shape(
                "wrong number of source distributions or kernels".into(),
            ));
        }
        for (e, d) in self.source_dists.iter().enumerate() {
            let name = &s.sources()[e].name;
            if d.is_empty() {
                return Err(ModelError::Shape(format!(
                    "source `{name}` has no hidden values"
                )));
            }
            check_probability_vector(d, self.eps, || format!("source `{name}`"))?;
        }
        let cards = self.source_cardinalities();
        for (v, kernel) in self.kernels.iter().enumerate() {
            let d = s.measurements()[v].outcomes;
            let rows: usize = s.sources_of(v).iter().map(|&e| cards[e]).product();
            let name = &s.measurements()[v].name;
            if kernel.len() != rows * d {
                return Err(ModelError::Shape(format!(
                    "kernel of `{name}` has {} entries, expected {}",
                    kernel.len(),
                    rows * d
                )));
            }
            for (r, row) in kernel.chunks(d).enumerate() {
                check_probability_vector(row, self.eps, || format!("kernel of `{name}`, row {r}"))?;
            }
        }
        Ok(())
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn source_dists(&self) -> &[Vec<T>] {
        &self.source_dists
    }

    pub fn kernels(&self) -> &[Vec<T>] {
        &self.kernels
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn source_cardinalities(&self) -> Vec<usize> {
        self.source_dists.iter().map(|d| d.len()).collect()
    }

    /// Cardinalities of the sources feeding measurement `v`.
    pub fn local_cardinalities(&self, v: usize) -> Vec<usize> {
        let cards = self.source_cardinalities();
        self.scenario
            .sources_of(v)
            .iter()
            .map(|&e| cards[e])
            .collect()
    }

    /// Outcome distribution of `v` given its sources' hidden values.
    pub fn kernel_row(&self, v: usize, hidden: &[usize]) -> &[T] {
        let d = self.scenario.measurements()[v].outcomes;
        let row = flat_index(&self.local_cardinalities(v), hidden);
        &self.kernels[v][row * d..(row + 1) * d]
    }

    /// Kernel row of `v` for a full assignment of all sources.
    pub fn kernel_row_global(&self, v: usize, global: &[usize]) -> &[T] {
        let local: Vec<usize> = self
            .scenario
            .sources_of(v)
            .iter()
            .map(|&e| global[e])
            .collect();
        self.kernel_row(v, &local)
    }

    /// Joint outcome distribution: the sum over all hidden assignments of
    /// `∏_e p(λ_e) ∏_v p(v | Λ_v)`.
    pub fn evaluate(&self) -> Distribution<T> {
        let s = &self.scenario;
        let outcomes = s.outcomes();
        let size: usize = outcomes.iter().product();
        let mut table = vec![T::zero(); size];
        let cards = self.source_cardinalities();
        let mut partial: Vec<T> = Vec::with_capacity(size);
        let mut next: Vec<T> = Vec::with_capacity(size);
        for global in TupleIter::new(&cards) {
            let mut weight = T::one();
            for (e, &l) in global.iter().enumerate() {
                weight = weight * self.source_dists[e][l].clone();
                if weight.is_zero() {
                    break;
                }
            }
            if weight.is_zero() {
                continue;
            }
            partial.clear();
            partial.push(weight);
            for v in 0..s.num_measurements() {
                let row = self.kernel_row_global(v, &global);
                next.clear();
                for p in &partial {
                    for q in row {
                        next.push(if p.is_zero() || q.is_zero() {
                            T::zero()
                        } else {
                            p.clone() * q.clone()
                        });
                    }
                }
                std::mem::swap(&mut partial, &mut next);
            }
            for (t, p) in table.iter_mut().zip(&partial) {
                if !p.is_zero() {
                    *t = t.clone() + p.clone();
                }
            }
        }
        Distribution::from_raw_unchecked(s.variables(), table, crate::dist::DEFAULT_EPS)
    }

    /// Lossy conversion to floats.
    pub fn to_f64(&self) -> ClassicalModel<f64> {
        ClassicalModel {
            scenario: self.scenario.clone(),
            source_dists: convert(&self.source_dists, |x| x.as_f64()),
            kernels: convert(&self.kernels, |x| x.as_f64()),
            eps: self.eps,
        }
    }

    /// Whether every kernel entry is 0 or 1.
    pub fn is_deterministic(&self) -> bool {
        self.kernels
            .iter()
            .flatten()
            .all(|x| x.is_zero() || x.is_one())
    }
}

impl ClassicalModel<f64> {
    /// Exact conversion of every float entry.
    pub fn to_exact(&self) -> ExactModel {
        ClassicalModel {
            scenario: self.scenario.clone(),
            source_dists: convert(&self.source_dists, |&x| Rational::from_real(x)),
            kernels: convert(&self.kernels, |&x| Rational::from_real(x)),
            eps: self.eps,
        }
    }
}

fn convert<T, U>(v: &[Vec<T>], f: impl Fn(&T) -> U) -> Vec<Vec<U>> {
    v.iter().map(|row| row.iter().map(&f).collect()).collect()
}

fn check_probability_vector<T: Scalar>(
    v: &[T],
    eps: f64,
    what: impl Fn() -> String,
) -> Result<(), ModelError> {
    if v.iter().any(|x| x.is_negative() && !x.is_negligible(eps)) {
        return Err(ModelError::NotNormalized(format!(
            "{} has a negative entry",
            what()
        )));
    }
    let total = crate::scalar::sum(v);
    if !total.approx_eq(&T::one(), eps) {
        return Err(ModelError::NotNormalized(format!(
            "{} sums to {}",
            what(),
            total.as_f64()
        )));
    }
    Ok(())
}

/// Replaces every stochastic response by a deterministic one reading an
/// auxiliary uniform random number bundled into one adjacent source.
///
/// For each measurement `v` with non-0/1 kernel entries, let `L` be the least
/// common denominator of its kernel. The first source adjacent to `v` is
/// extended by a uniform `r ∈ {0..L-1}`, and `v` outputs `o` exactly when
/// `F(o-1)·L ≤ r < F(o)·L` for the cumulative row `F`. Other measurements
/// ignore `r`, so the joint law is unchanged.
pub fn determinize(m: &ExactModel) -> ExactModel {
    let s = m.scenario();
    let n = s.num_measurements();
    let mut lcd = vec![1usize; n];
    for v in 0..n {
        let mut l = num_bigint::BigInt::one();
        for x in &m.kernels[v] {
            l = l.lcm(x.denom());
        }
        lcd[v] = usize::try_from(l).expect("denominator fits in usize");
    }
    // Auxiliary radices attached to each source, in measurement order.
    let mut attached: Vec<Vec<usize>> = vec![Vec::new(); s.num_sources()];
    for v in 0..n {
        if lcd[v] > 1 {
            attached[s.sources_of(v)[0]].push(v);
        }
    }
    let radix: Vec<Vec<usize>> = attached
        .iter()
        .map(|vs| vs.iter().map(|&v| lcd[v]).collect())
        .collect();
    let aux_size: Vec<usize> = radix.iter().map(|r| r.iter().product()).collect();

    let source_dists: Vec<Vec<Rational>> = m
        .source_dists
        .iter()
        .enumerate()
        .map(|(e, d)| {
            let share = Rational::from_usize(aux_size[e]);
            d.iter()
                .flat_map(|p| {
                    let q = p.clone() / share.clone();
                    std::iter::repeat_n(q, aux_size[e])
                })
                .collect()
        })
        .collect();

    let split = |e: usize, value: usize| -> (usize, Vec<usize>) {
        (
            value / aux_size[e],
            tuple_of(&radix[e], value % aux_size[e]),
        )
    };

    ClassicalModel::from_fn(s.clone(), source_dists, |v, hidden| {
        let sources = s.sources_of(v);
        let base: Vec<usize> = sources
            .iter()
            .zip(hidden)
            .map(|(&e, &h)| split(e, h).0)
            .collect();
        let row = m.kernel_row(v, &base);
        let d = row.len();
        if lcd[v] == 1 {
            return row.to_vec();
        }
        let e = sources[0];
        let slot = attached[e].iter().position(|&w| w == v).expect("attached");
        let r = split(e, hidden[0]).1[slot];
        let l = Rational::from_usize(lcd[v]);
        let r = Rational::from_usize(r);
        let mut cumulative = Rational::zero();
        let mut out = vec![Rational::zero(); d];
        for (o, p) in row.iter().enumerate() {
            let lo = cumulative.clone() * l.clone();
            cumulative += p.clone();
            let hi = cumulative.clone() * l.clone();
            if lo <= r && r < hi {
                out[o] = Rational::one();
            }
        }
        out
    })
    .expect("determinized model is valid")
}

/// Convex deformation between two models on the same scenario.
///
/// Each source carries the pair `(λ⁰, λ¹)` with product distribution and each
/// kernel is `(1-t)·p₀(v|Λ⁰) + t·p₁(v|Λ¹)`.
pub fn interpolate<T: Scalar>(
    m0: &ClassicalModel<T>,
    m1: &ClassicalModel<T>,
    t: T,
) -> Result<ClassicalModel<T>, ModelError> {
    if m0.scenario != m1.scenario {
        return Err(ModelError::ScenarioMismatch);
    }
    if t.is_negative() || t > T::one() {
        return Err(ModelError::Shape(
            "interpolation parameter outside [0, 1]".into(),
        ));
    }
    let c1 = m1.source_cardinalities();
    let source_dists: Vec<Vec<T>> = m0
        .source_dists
        .iter()
        .zip(&m1.source_dists)
        .map(|(d0, d1)| {
            d0.iter()
                .flat_map(|p| d1.iter().map(move |q| p.clone() * q.clone()))
                .collect()
        })
        .collect();
    let s = m0.scenario.clone();
    let one_minus = T::one() - t.clone();
    ClassicalModel::from_fn(s.clone(), source_dists, |v, hidden| {
        let sources = s.sources_of(v);
        let h0: Vec<usize> = sources
            .iter()
            .zip(hidden)
            .map(|(&e, &h)| h / c1[e])
            .collect();
        let h1: Vec<usize> = sources
            .iter()
            .zip(hidden)
            .map(|(&e, &h)| h % c1[e])
            .collect();
        m0.kernel_row(v, &h0)
            .iter()
            .zip(m1.kernel_row(v, &h1))
            .map(|(a, b)| one_minus.clone() * a.clone() + t.clone() * b.clone())
            .collect()
    })
}

/// Builds a model reproducing a correlation on a star-forest graph scenario:
/// every leaf's source carries the leaf's value and each centre responds with
/// `p(centre | leaves)`.
pub fn star_model_construct<T: Scalar>(
    s: &Scenario,
    p: &Distribution<T>,
) -> Result<ClassicalModel<T>, ModelError> {
    match classify_graph_scenario(s) {
        Ok(Classification::StarForest) => {}
        _ => return Err(ModelError::NotStarForest),
    }
    let report = is_correlation(s, p).map_err(|e| match e {
        CorrelationError::VariableMismatch { .. } => ModelError::VariableMismatch,
        CorrelationError::Dist(d) => ModelError::Dist(d),
    })?;
    if !report.is_correlation {
        return Err(ModelError::NotACorrelation);
    }
    let p = align_to_scenario(s, p).map_err(|_| ModelError::VariableMismatch)?;
    let n = s.num_measurements();
    let adj = gaifman_graph(s).adjacency_masks();
    let names = s.measurement_names();

    // Role of each vertex and, for leaves and isolated vertices, the source
    // that carries its value.
    #[derive(Clone, Copy, PartialEq)]
    enum Role {
        Centre,
        Carried(usize),
    }
    let binary_source = |u: usize, w: usize| -> usize {
        s.sources()
            .iter()
            .position(|e| e.connects == [u.min(w), u.max(w)])
            .expect("edge has a source")
    };
    let mut role = vec![Role::Centre; n];
    let mut seen = vec![false; n];
    for v in 0..n {
        if seen[v] {
            continue;
        }
        let comp: Vec<usize> = component(&adj, v);
        for &u in &comp {
            seen[u] = true;
        }
        if comp.len() == 1 {
            role[v] = Role::Carried(s.sources_of(v)[0]);
            continue;
        }
        let centre = if comp.len() == 2 {
            comp[0]
        } else {
            *comp
                .iter()
                .find(|&&u| adj[u].count_ones() as usize == comp.len() - 1)
                .expect("star has a centre")
        };
        for &u in &comp {
            if u != centre {
                role[u] = Role::Carried(binary_source(centre, u));
            }
        }
    }

    let mut carrier = vec![None; s.num_sources()];
    for (v, r) in role.iter().enumerate() {
        if let Role::Carried(e) = *r {
            carrier[e] = Some(v);
        }
    }
    let mut source_dists = Vec::with_capacity(s.num_sources());
    for c in &carrier {
        match *c {
            Some(v) => {
                let marginal = p.marginalize(&[names[v]])?;
                source_dists.push(marginal.probabilities().to_vec());
            }
            None => source_dists.push(vec![T::one()]),
        }
    }

    // Conditional tables p(centre | leaves), leaves in source order.
    let mut conditionals: Vec<Option<(Vec<usize>, Distribution<T>, Distribution<T>)>> =
        vec![None; n];
    for v in 0..n {
        if role[v] != Role::Centre {
            continue;
        }
        let leaves: Vec<usize> = s.sources_of(v).iter().filter_map(|&e| carrier[e]).collect();
        let mut keep: Vec<&str> = vec![names[v]];
        keep.extend(leaves.iter().map(|&u| names[u]));
        let joint = p.marginalize(&keep)?;
        let leaf_names: Vec<&str> = leaves.iter().map(|&u| names[u]).collect();
        let leaf_marginal = p.marginalize(&leaf_names)?;
        conditionals[v] = Some((leaves, joint, leaf_marginal));
    }

    ClassicalModel::from_fn(s.clone(), source_dists, |v, hidden| {
        let d = s.measurements()[v].outcomes;
        match role[v] {
            Role::Carried(e) => {
                let slot = s
                    .sources_of(v)
                    .iter()
                    .position(|&x| x == e)
                    .expect("incident");
                let mut row = vec![T::zero(); d];
                row[hidden[slot]] = T::one();
                row
            }
            Role::Centre => {
                let (leaves, joint, leaf_marginal) = conditionals[v].as_ref().expect("centre");
                // The marginals keep declaration order; locate each variable.
                let pos = |name: &str, dist: &Distribution<T>| dist.index_of(name).expect("var");
                let mut leaf_values = vec![0; leaves.len()];
                for (slot, &e) in s.sources_of(v).iter().enumerate() {
                    if let Some(u) = carrier[e] {
                        let i = leaves.iter().position(|&w| w == u).expect("leaf");
                        leaf_values[i] = hidden[slot];
                    }
                }
                let mut lm_tuple = vec![0; leaves.len()];
                for (i, &u) in leaves.iter().enumerate() {
                    lm_tuple[pos(names[u], leaf_marginal)] = leaf_values[i];
                }
                let mass = leaf_marginal.get(&lm_tuple).clone();
                let mut row = vec![T::zero(); d];
                if !mass.is_positive_beyond(0.0) {
                    row[0] = T::one();
                    return row;
                }
                let mut jt = vec![0; leaves.len() + 1];
                for (i, &u) in leaves.iter().enumerate() {
                    jt[pos(names[u], joint)] = leaf_values[i];
                }
                let cpos = pos(names[v], joint);
                for (o, slot) in row.iter_mut().enumerate() {
                    jt[cpos] = o;
                    *slot = joint.get(&jt).clone() / mass.clone();
                }
                row
            }
        }
    })
}

fn component(adj: &[u64], start: usize) -> Vec<usize> {
    let mut comp = 1u64 << start;
    let mut frontier = comp;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & !comp;
        comp |= new;
        frontier |= new;
    }
    (0..adj.len()).filter(|&v| comp >> v & 1 == 1).collect()
}

impl From<DistError> for ModelError {
    fn from(e: DistError) -> Self {
        ModelError::Dist(e)
    }
}
