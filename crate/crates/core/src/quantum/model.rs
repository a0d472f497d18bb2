//! Quantum models: a state per source on its connection spaces and a POVM per
//! measurement on the connection spaces it receives.
//!
//! Connections `(source, measurement)` are ordered globally by source index,
//! then measurement index. A source's state acts on its connections in that
//! order; a measurement's POVM acts on its incoming connections ordered by
//! source index. The trace `tr[(⊗ρ_s)(⊗F_m)]` is evaluated term by term over
//! the nonzero entries of the states, mapping each global multi-index to the
//! local indices of every POVM.

use num_complex::Complex64;
use thiserror::Error;

use crate::dist::{JointDistribution, TupleIter};
use crate::models::{ClassicalModel, ModelError};
use crate::scenario::Scenario;

use super::matrix::{self, born, density_defect, kron_all, povm_defect, CMatrix, MATRIX_TOL};

/// Default cap on the total Hilbert-space dimension.
pub const DEFAULT_DIMENSION_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("total dimension {dim} exceeds the budget {budget}")]
    DimensionBudgetExceeded { dim: usize, budget: usize },
    #[error("invalid state for source `{source_name}`: {reason}")]
    InvalidState { source_name: String, reason: String },
    #[error("invalid POVM for measurement `{measurement}`: {reason}")]
    InvalidPovm { measurement: String, reason: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("separable decomposition mismatch: {0}")]
    DecompositionMismatch(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumModel {
    scenario: Scenario,
    /// Per source, the dimension of each connection in `connects` order.
    connection_dims: Vec<Vec<usize>>,
    states: Vec<CMatrix>,
    povms: Vec<Vec<CMatrix>>,
}

impl QuantumModel {
    pub fn new(
        scenario: Scenario,
        connection_dims: Vec<Vec<usize>>,
        states: Vec<CMatrix>,
        povms: Vec<Vec<CMatrix>>,
    ) -> Result<Self, QuantumError> {
        let q = QuantumModel {
            scenario,
            connection_dims,
            states,
            povms,
        };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<(), QuantumError> {
        let s = &self.scenario;
        if self.connection_dims.len() != s.num_sources()
            || self.states.len() != s.num_sources()
            || self.povms.len() != s.num_measurements()
        {
            return Err(QuantumError::Shape(
                "need one dimension list and state per source and one POVM per measurement".into(),
            ));
        }
        for (e, src) in s.sources().iter().enumerate() {
            let dims = &self.connection_dims[e];
            if dims.len() != src.connects.len() || dims.contains(&0) {
                return Err(QuantumError::Shape(format!(
                    "source `{}` needs {} positive connection dimensions",
                    src.name,
                    src.connects.len()
                )));
            }
            let dim: usize = dims.iter().product();
            if self.states[e].shape() != (dim, dim) {
                return Err(QuantumError::InvalidState {
                    source_name: src.name.clone(),
                    reason: format!("expected a {dim}x{dim} matrix"),
                });
            }
            if let Some(reason) = density_defect(&self.states[e], MATRIX_TOL) {
                return Err(QuantumError::InvalidState {
                    source_name: src.name.clone(),
                    reason,
                });
            }
        }
        for v in 0..s.num_measurements() {
            let m = &s.measurements()[v];
            if self.povms[v].len() != m.outcomes {
                return Err(QuantumError::InvalidPovm {
                    measurement: m.name.clone(),
                    reason: format!("expected {} elements", m.outcomes),
                });
            }
            if let Some(reason) = povm_defect(&self.povms[v], self.measurement_dim(v), MATRIX_TOL) {
                return Err(QuantumError::InvalidPovm {
                    measurement: m.name.clone(),
                    reason,
                });
            }
        }
        Ok(())
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn connection_dims(&self) -> &[Vec<usize>] {
        &self.connection_dims
    }

    pub fn states(&self) -> &[CMatrix] {
        &self.states
    }

    pub fn povms(&self) -> &[Vec<CMatrix>] {
        &self.povms
    }

    /// Dimension of the connection from source `e` to measurement `v`.
    pub fn connection_dim(&self, e: usize, v: usize) -> usize {
        let pos = self.scenario.sources()[e]
            .connects
            .iter()
            .position(|&w| w == v)
            .expect("connected");
        self.connection_dims[e][pos]
    }

    /// Dimension of the space measurement `v` acts on.
    pub fn measurement_dim(&self, v: usize) -> usize {
        self.scenario
            .sources_of(v)
            .iter()
            .map(|&e| self.connection_dim(e, v))
            .product()
    }

    pub fn total_dim(&self) -> usize {
        self.connection_dims.iter().flatten().product()
    }

    /// Evaluates the trace formula with the default dimension budget.
    pub fn evaluate(&self) -> Result<JointDistribution, QuantumError> {
        self.evaluate_with_budget(DEFAULT_DIMENSION_BUDGET)
    }

    pub fn evaluate_with_budget(&self, budget: usize) -> Result<JointDistribution, QuantumError> {
        let dim = self.total_dim();
        if dim > budget {
            return Err(QuantumError::DimensionBudgetExceeded { dim, budget });
        }
        let s = &self.scenario;
        let n = s.num_measurements();

        // Nonzero entries of every state.
        let entries: Vec<Vec<(usize, usize, Complex64)>> = self
            .states
            .iter()
            .map(|rho| {
                let d = rho.nrows();
                let mut out = Vec::new();
                for i in 0..d {
                    for j in 0..d {
                        let z = rho[(i, j)];
                        if z.norm() > 1e-15 {
                            out.push((i, j, z));
                        }
                    }
                }
                out
            })
            .collect();

        // For measurement v and each incoming source, the stride of that
        // connection in v's local index and the position in the source's
        // connection list.
        let plan: Vec<Vec<(usize, usize, usize)>> = (0..n)
            .map(|v| {
                let incoming = s.sources_of(v);
                let dims: Vec<usize> = incoming
                    .iter()
                    .map(|&e| self.connection_dim(e, v))
                    .collect();
                incoming
                    .iter()
                    .enumerate()
                    .map(|(k, &e)| {
                        let stride: usize = dims[k + 1..].iter().product();
                        let pos = s.sources()[e]
                            .connects
                            .iter()
                            .position(|&w| w == v)
                            .expect("connected");
                        (e, pos, stride)
                    })
                    .collect()
            })
            .collect();

        // Digits of every state index over the source's connections.
        let digits = |e: usize, mut idx: usize| -> Vec<usize> {
            let dims = &self.connection_dims[e];
            let mut out = vec![0; dims.len()];
            for k in (0..dims.len()).rev() {
                out[k] = idx % dims[k];
                idx /= dims[k];
            }
            out
        };
        let digit_tables: Vec<Vec<Vec<usize>>> = (0..s.num_sources())
            .map(|e| {
                let d: usize = self.connection_dims[e].iter().product();
                (0..d).map(|i| digits(e, i)).collect()
            })
            .collect();

        // Terms: coefficient and, per measurement, local (row, col) of F.
        let counts: Vec<usize> = entries.iter().map(|x| x.len()).collect();
        let mut terms: Vec<(Complex64, Vec<(usize, usize)>)> = Vec::new();
        for choice in TupleIter::new(&counts) {
            let mut coef = Complex64::new(1.0, 0.0);
            for (e, &k) in choice.iter().enumerate() {
                coef *= entries[e][k].2;
            }
            let local: Vec<(usize, usize)> = plan
                .iter()
                .map(|incoming| {
                    let mut row = 0;
                    let mut col = 0;
                    for &(e, pos, stride) in incoming {
                        let (i, j, _) = entries[e][choice[e]];
                        // tr(ρF) = Σ ρ[i,j] F[j,i].
                        row += digit_tables[e][j][pos] * stride;
                        col += digit_tables[e][i][pos] * stride;
                    }
                    (row, col)
                })
                .collect();
            terms.push((coef, local));
        }

        let outcomes = s.outcomes();
        let mut probs = Vec::with_capacity(outcomes.iter().product());
        for t in TupleIter::new(&outcomes) {
            let mut total = Complex64::new(0.0, 0.0);
            for (coef, local) in &terms {
                let mut z = *coef;
                for (v, &(r, c)) in local.iter().enumerate() {
                    z *= self.povms[v][t[v]][(r, c)];
                    if z.norm_sqr() == 0.0 {
                        break;
                    }
                }
                total += z;
            }
            let p = total.re;
            probs.push(if p < 0.0 && p > -1e-12 { 0.0 } else { p });
        }
        JointDistribution::with_eps(s.variables(), probs, 1e-10)
            .map_err(|e| QuantumError::Shape(format!("evaluation is not a distribution: {e}")))
    }
}

/// Per source, a finite mixture of product states `Σ_j μ_j ⊗_m ρ_(s,m,j)`
/// with one factor per connection.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    pub terms: Vec<Vec<(f64, Vec<CMatrix>)>>,
}

impl SeparableDecomposition {
    /// Mixture state of source `e`.
    pub fn state(&self, e: usize) -> Option<CMatrix> {
        let terms = self.terms.get(e)?;
        let first = terms.first()?;
        let dim: usize = first.1.iter().map(|f| f.nrows()).product();
        let mut out = matrix::zeros(dim);
        for (w, factors) in terms {
            let prod = kron_all(factors.iter());
            if prod.shape() != out.shape() {
                return None;
            }
            out += prod * Complex64::new(*w, 0.0);
        }
        Some(out)
    }
}

/// Classical model whose hidden value for source `s` is the mixture index and
/// whose kernels are the Born probabilities on the product factors.
pub fn separable_to_classical(
    q: &QuantumModel,
    decomp: &SeparableDecomposition,
) -> Result<ClassicalModel<f64>, QuantumError> {
    let s = q.scenario();
    if decomp.terms.len() != s.num_sources() {
        return Err(QuantumError::DecompositionMismatch(
            "need one decomposition per source".into(),
        ));
    }
    for (e, terms) in decomp.terms.iter().enumerate() {
        let name = &s.sources()[e].name;
        let mismatch =
            |r: String| QuantumError::DecompositionMismatch(format!("source `{name}`: {r}"));
        if terms.is_empty() {
            return Err(mismatch("no terms".into()));
        }
        let total: f64 = terms.iter().map(|t| t.0).sum();
        if terms.iter().any(|t| t.0 < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(mismatch("weights are not a probability vector".into()));
        }
        for (j, (_, factors)) in terms.iter().enumerate() {
            if factors.len() != q.connection_dims()[e].len() {
                return Err(mismatch(format!(
                    "term {j} has the wrong number of factors"
                )));
            }
            for (f, &d) in factors.iter().zip(&q.connection_dims()[e]) {
                if f.shape() != (d, d) {
                    return Err(mismatch(format!("term {j} has a factor of the wrong size")));
                }
                if let Some(r) = density_defect(f, MATRIX_TOL) {
                    return Err(mismatch(format!("term {j}: {r}")));
                }
            }
        }
        let mix = decomp
            .state(e)
            .ok_or_else(|| mismatch("inconsistent shapes".into()))?;
        let err = matrix::max_abs_diff(&mix, &q.states()[e]);
        if err > 1e-9 {
            return Err(mismatch(format!(
                "mixture differs from the state by {err:.3e}"
            )));
        }
    }
    let dists: Vec<Vec<f64>> = decomp
        .terms
        .iter()
        .map(|t| t.iter().map(|x| x.0).collect())
        .collect();
    let model = ClassicalModel::from_fn(s.clone(), dists, |v, hidden| {
        let factors: Vec<&CMatrix> = s
            .sources_of(v)
            .iter()
            .zip(hidden)
            .map(|(&e, &j)| {
                let pos = s.sources()[e]
                    .connects
                    .iter()
                    .position(|&w| w == v)
                    .expect("connected");
                &decomp.terms[e][j].1[pos]
            })
            .collect();
        let rho = kron_all(factors);
        let mut row: Vec<f64> = q.povms()[v]
            .iter()
            .map(|f| born(&rho, f).max(0.0))
            .collect();
        let total: f64 = row.iter().sum();
        for x in &mut row {
            *x /= total;
        }
        row
    })?;
    Ok(model)
}
