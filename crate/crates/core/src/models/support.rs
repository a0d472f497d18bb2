//! Possibilistic realizability: can deterministic responses to independent
//! finite hidden variables produce exactly a given support?
//!
//! The search is a table-constraint CSP whose cells are the response values
//! `f_v(h)`. Every joint hidden assignment is a constraint requiring the
//! produced outcome tuple to lie in the support; constraints are kept
//! generalized-arc-consistent and the remaining cells are branched on,
//! smallest domain first.
//!
//! If a realization exists at all, picking one hidden assignment per support
//! tuple and relabeling gives one with hidden set `{0..m-1}` (`m` the support
//! size) in which the diagonal assignment `(j, ..., j)` produces tuple `j`.
//! So for `k ≥ m` the diagonal is fixed up front and the search is complete.
//! Otherwise tuples are placed one at a time on hidden assignments whose new
//! values appear in first-use order.

use std::collections::BTreeSet;
use std::time::Instant;

use num_traits::{One, Zero};

use crate::dist::{Distribution, TupleIter, Variable};
use crate::scalar::{Rational, Scalar};
use crate::scenario::Scenario;

use super::{ClassicalModel, ExactModel, ModelError};

/// Default cap on search nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPattern {
    variables: Vec<Variable>,
    tuples: BTreeSet<Vec<usize>>,
}

impl SupportPattern {
    pub fn new(variables: Vec<Variable>, tuples: BTreeSet<Vec<usize>>) -> Result<Self, ModelError> {
        if tuples.is_empty() {
            return Err(ModelError::InvalidSupport("support is empty".into()));
        }
        for t in &tuples {
            if t.len() != variables.len()
                || t.iter().zip(&variables).any(|(&x, v)| x >= v.cardinality)
            {
                return Err(ModelError::InvalidSupport(format!(
                    "tuple {t:?} out of range"
                )));
            }
        }
        Ok(SupportPattern { variables, tuples })
    }

    pub fn from_distribution<T: Scalar>(p: &Distribution<T>) -> Self {
        SupportPattern {
            variables: p.variables().to_vec(),
            tuples: p.support().into_iter().collect(),
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<usize>> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.contains(t)
    }

    /// Tuples with the variables permuted into `order`.
    fn aligned(&self, order: &[&str]) -> Result<Vec<Vec<usize>>, ModelError> {
        let pos: Vec<usize> = order
            .iter()
            .map(|n| {
                self.variables
                    .iter()
                    .position(|v| v.name == *n)
                    .ok_or(ModelError::VariableMismatch)
            })
            .collect::<Result<_, _>>()?;
        Ok(self
            .tuples
            .iter()
            .map(|t| pos.iter().map(|&i| t[i]).collect())
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub node_budget: u64,
    /// Fix the diagonal when `k` is at least the support size.
    pub use_reduction: bool,
    /// Wall-clock limit; reaching it ends the search as inconclusive.
    pub deadline: Option<Instant>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            use_reduction: true,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SupportOutcome {
    /// Uniform sources with 0/1 kernels whose joint image is the support.
    Realizable(ExactModel),
    NotRealizableUpTo(usize),
    /// Node budget exhausted.
    Inconclusive {
        nodes: u64,
    },
}

/// Decides whether some model with at most `k` hidden values per source has
/// exactly the given support.
pub fn support_realizable(
    s: &Scenario,
    sp: &SupportPattern,
    k: usize,
    opts: SearchOptions,
) -> Result<SupportOutcome, ModelError> {
    search_support(s, sp, k, opts).map(|(o, _)| o)
}

/// As [`support_realizable`], also returning the number of search nodes.
pub fn search_support(
    s: &Scenario,
    sp: &SupportPattern,
    k: usize,
    opts: SearchOptions,
) -> Result<(SupportOutcome, u64), ModelError> {
    if k == 0 {
        return Err(ModelError::InvalidSupport(
            "cardinality bound must be positive".into(),
        ));
    }
    if sp.variables.len() != s.num_measurements()
        || s.measurements().iter().any(|m| {
            !sp.variables
                .iter()
                .any(|v| v.name == m.name && v.cardinality == m.outcomes)
        })
    {
        return Err(ModelError::VariableMismatch);
    }
    if s.measurements().iter().any(|m| m.outcomes > 32) {
        return Err(ModelError::Shape(
            "support search supports at most 32 outcomes".into(),
        ));
    }
    let tuples = sp.aligned(&s.measurement_names())?;
    let m = tuples.len();
    let reduce = opts.use_reduction && k >= m;
    let cap = if reduce { m } else { k.min(m) };
    let mut csp = Csp::new(s, tuples, cap, opts.node_budget);
    csp.deadline = opts.deadline;
    let result = if reduce {
        csp.run_diagonal()
    } else {
        csp.run_sequential()
    };
    let nodes = csp.nodes;
    let outcome = match result {
        Err(Exhausted) => SupportOutcome::Inconclusive { nodes },
        Ok(None) => SupportOutcome::NotRealizableUpTo(k),
        Ok(Some(state)) => {
            let model = csp.witness(s, &state);
            let expected: BTreeSet<Vec<usize>> = csp.tuples.iter().cloned().collect();
            if deterministic_image(&model) != expected {
                return Err(ModelError::InvalidSupport(
                    "internal error: witness image differs from support".into(),
                ));
            }
            SupportOutcome::Realizable(model)
        }
    };
    Ok((outcome, nodes))
}

/// Image of the joint assignment map of a model with 0/1 kernels, over the
/// hidden values of positive probability.
pub fn deterministic_image<T: Scalar>(m: &ClassicalModel<T>) -> BTreeSet<Vec<usize>> {
    let s = m.scenario();
    let positive: Vec<Vec<usize>> = m
        .source_dists()
        .iter()
        .map(|d| {
            (0..d.len())
                .filter(|&i| d[i].is_positive_beyond(0.0))
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = positive.iter().map(|p| p.len()).collect();
    let mut out = BTreeSet::new();
    for idx in TupleIter::new(&sizes) {
        let global: Vec<usize> = idx
            .iter()
            .enumerate()
            .map(|(e, &i)| positive[e][i])
            .collect();
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for v in 0..s.num_measurements() {
            let row = m.kernel_row_global(v, &global);
            let outs: Vec<usize> = (0..row.len())
                .filter(|&o| row[o].is_positive_beyond(0.0))
                .collect();
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    outs.iter().map(move |&o| {
                        let mut t = t.clone();
                        t.push(o);
                        t
                    })
                })
                .collect();
        }
        out.extend(tuples);
    }
    out
}

#[derive(Debug)]
struct Exhausted;

#[derive(Clone)]
struct State {
    dom: Vec<u32>,
    active: Vec<usize>,
}

struct Csp {
    sources_of: Vec<Vec<usize>>,
    n_src: usize,
    cap: usize,
    offset: Vec<usize>,
    tuples: Vec<Vec<usize>>,
    full: Vec<u32>,
    budget: u64,
    deadline: Option<Instant>,
    nodes: u64,
}

impl Csp {
    fn new(s: &Scenario, tuples: Vec<Vec<usize>>, cap: usize, budget: u64) -> Csp {
        let n = s.num_measurements();
        let sources_of: Vec<Vec<usize>> = (0..n).map(|v| s.sources_of(v).to_vec()).collect();
        let mut offset = Vec::with_capacity(n + 1);
        let mut total = 0;
        for v in 0..n {
            offset.push(total);
            total += cap.pow(sources_of[v].len() as u32);
        }
        offset.push(total);
        let full = s
            .outcomes()
            .iter()
            .map(|&d| if d == 32 { u32::MAX } else { (1u32 << d) - 1 })
            .collect();
        Csp {
            sources_of,
            n_src: s.num_sources(),
            cap,
            offset,
            tuples,
            full,
            budget,
            deadline: None,
            nodes: 0,
        }
    }

    fn initial_state(&self) -> State {
        let mut dom = vec![0u32; *self.offset.last().unwrap_or(&0)];
        for v in 0..self.sources_of.len() {
            for c in self.offset[v]..self.offset[v + 1] {
                dom[c] = self.full[v];
            }
        }
        State {
            dom,
            active: vec![0; self.n_src],
        }
    }

    fn cell(&self, v: usize, global: &[usize]) -> usize {
        self.offset[v]
            + self.sources_of[v]
                .iter()
                .fold(0, |acc, &e| acc * self.cap + global[e])
    }

    /// Hidden values of a cell, in the order of `sources_of[v]`.
    fn cell_digits(&self, v: usize, cell: usize) -> Vec<usize> {
        let mut local = cell - self.offset[v];
        let deg = self.sources_of[v].len();
        let mut out = vec![0; deg];
        for i in (0..deg).rev() {
            out[i] = local % self.cap;
            local /= self.cap;
        }
        out
    }

    fn cell_owner(&self, cell: usize) -> usize {
        match self.offset.binary_search(&cell) {
            Ok(v) => v,
            Err(v) => v - 1,
        }
    }

    fn constraint_id(&self, global: &[usize]) -> usize {
        global.iter().fold(0, |acc, &g| acc * self.cap + g)
    }

    fn constraint_digits(&self, mut id: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_src];
        for i in (0..self.n_src).rev() {
            out[i] = id % self.cap;
            id /= self.cap;
        }
        out
    }

    fn cell_is_active(&self, st: &State, v: usize, cell: usize) -> bool {
        self.cell_digits(v, cell)
            .iter()
            .zip(&self.sources_of[v])
            .all(|(&h, &e)| h < st.active[e])
    }

    /// Constraints in the active product that involve `cell`.
    fn dependents(&self, st: &State, cell: usize, out: &mut Vec<usize>) {
        let v = self.cell_owner(cell);
        let digits = self.cell_digits(v, cell);
        let mut ranges: Vec<usize> = st.active.clone();
        let mut fixed = vec![None; self.n_src];
        for (&e, &h) in self.sources_of[v].iter().zip(&digits) {
            if h >= st.active[e] {
                return;
            }
            fixed[e] = Some(h);
            ranges[e] = 1;
        }
        for free in TupleIter::new(&ranges) {
            let global: Vec<usize> = (0..self.n_src)
                .map(|e| fixed[e].unwrap_or(free[e]))
                .collect();
            out.push(self.constraint_id(&global));
        }
    }

    /// Generalized arc consistency over the queued constraints.
    fn propagate(&self, st: &mut State, mut queue: Vec<usize>) -> bool {
        let total = self.cap.pow(self.n_src as u32);
        let mut queued = vec![false; total];
        for &c in &queue {
            queued[c] = true;
        }
        let n = self.sources_of.len();
        let mut cells = vec![0; n];
        let mut supp = vec![0u32; n];
        let mut deps = Vec::new();
        while let Some(c) = queue.pop() {
            queued[c] = false;
            let global = self.constraint_digits(c);
            for v in 0..n {
                cells[v] = self.cell(v, &global);
                supp[v] = 0;
            }
            let mut any = false;
            for t in &self.tuples {
                if (0..n).all(|v| st.dom[cells[v]] >> t[v] & 1 == 1) {
                    any = true;
                    for v in 0..n {
                        supp[v] |= 1 << t[v];
                    }
                }
            }
            if !any {
                return false;
            }
            for v in 0..n {
                let d = st.dom[cells[v]];
                if d & supp[v] != d {
                    st.dom[cells[v]] = d & supp[v];
                    deps.clear();
                    self.dependents(st, cells[v], &mut deps);
                    for &dc in &deps {
                        if !queued[dc] {
                            queued[dc] = true;
                            queue.push(dc);
                        }
                    }
                }
            }
        }
        true
    }

    fn all_active_constraints(&self, st: &State) -> Vec<usize> {
        TupleIter::new(&st.active)
            .map(|g| self.constraint_id(&g))
            .collect()
    }

    fn tick(&mut self) -> Result<(), Exhausted> {
        self.nodes += 1;
        let late = self.nodes % 256 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d);
        if self.nodes > self.budget || late {
            Err(Exhausted)
        } else {
            Ok(())
        }
    }

    fn run_diagonal(&mut self) -> Result<Option<State>, Exhausted> {
        let mut st = self.initial_state();
        st.active = vec![self.cap; self.n_src];
        for j in 0..self.tuples.len() {
            let global = vec![j; self.n_src];
            for v in 0..self.sources_of.len() {
                let c = self.cell(v, &global);
                st.dom[c] &= 1 << self.tuples[j][v];
            }
        }
        if st.dom.contains(&0) {
            return Ok(None);
        }
        self.tick()?;
        let queue = self.all_active_constraints(&st);
        if !self.propagate(&mut st, queue) {
            return Ok(None);
        }
        self.branch(st)
    }

    fn run_sequential(&mut self) -> Result<Option<State>, Exhausted> {
        let st = self.initial_state();
        self.place(st, 0)
    }

    fn place(&mut self, st: State, j: usize) -> Result<Option<State>, Exhausted> {
        if j == self.tuples.len() {
            return self.branch(st);
        }
        let ranges: Vec<usize> = st.active.iter().map(|&a| (a + 1).min(self.cap)).collect();
        let t = self.tuples[j].clone();
        for global in TupleIter::new(&ranges) {
            self.tick()?;
            let mut next = st.clone();
            let mut grew = false;
            for (e, &g) in global.iter().enumerate() {
                if g >= next.active[e] {
                    next.active[e] = g + 1;
                    grew = true;
                }
            }
            let mut ok = true;
            let mut queue = Vec::new();
            for v in 0..self.sources_of.len() {
                let c = self.cell(v, &global);
                let bit = 1u32 << t[v];
                if next.dom[c] & bit == 0 {
                    ok = false;
                    break;
                }
                if next.dom[c] != bit {
                    next.dom[c] = bit;
                    if !grew {
                        self.dependents(&next, c, &mut queue);
                    }
                }
            }
            if !ok {
                continue;
            }
            if grew {
                queue = self.all_active_constraints(&next);
            }
            if !self.propagate(&mut next, queue) {
                continue;
            }
            if let Some(sol) = self.place(next, j + 1)? {
                return Ok(Some(sol));
            }
        }
        Ok(None)
    }

    fn branch(&mut self, st: State) -> Result<Option<State>, Exhausted> {
        let mut best: Option<(u32, usize)> = None;
        for v in 0..self.sources_of.len() {
            for c in self.offset[v]..self.offset[v + 1] {
                let size = st.dom[c].count_ones();
                if size > 1 && best.is_none_or(|(b, _)| size < b) && self.cell_is_active(&st, v, c)
                {
                    best = Some((size, c));
                }
            }
        }
        let Some((_, c)) = best else {
            return Ok(Some(st));
        };
        let mut values = st.dom[c];
        while values != 0 {
            let o = values.trailing_zeros();
            values &= values - 1;
            self.tick()?;
            let mut next = st.clone();
            next.dom[c] = 1 << o;
            let mut queue = Vec::new();
            self.dependents(&next, c, &mut queue);
            if !self.propagate(&mut next, queue) {
                continue;
            }
            if let Some(sol) = self.branch(next)? {
                return Ok(Some(sol));
            }
        }
        Ok(None)
    }

    fn witness(&self, s: &Scenario, st: &State) -> ExactModel {
        let dists: Vec<Vec<Rational>> = st
            .active
            .iter()
            .map(|&a| vec![Rational::from_ratio(1, a as i64); a])
            .collect();
        ClassicalModel::from_fn(s.clone(), dists, |v, hidden| {
            let mut global = vec![0; self.n_src];
            for (&e, &h) in self.sources_of[v].iter().zip(hidden) {
                global[e] = h;
            }
            let c = self.cell(v, &global);
            let o = st.dom[c].trailing_zeros() as usize;
            let mut row = vec![Rational::zero(); s.measurements()[v].outcomes];
            row[o] = Rational::one();
            row
        })
        .expect("witness model is valid")
    }
}
