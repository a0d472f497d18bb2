//! Dense two-phase simplex over [`Scalar`], with Bland's rule.
//!
//! Solves `minimize cᵀx subject to Ax = b, x ≥ 0`. With rationals every
//! comparison is exact; with floats pivots and reduced costs below `tol` are
//! treated as zero.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult<T> {
    /// Optimal primal `x`, dual `y` with `c − Aᵀy ≥ 0`, and the objective.
    Optimal {
        x: Vec<T>,
        y: Vec<T>,
        value: T,
    },
    /// Farkas vector `y` with `yᵀA ≤ 0` and `yᵀb > 0`.
    Infeasible {
        farkas: Vec<T>,
    },
    Unbounded,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    /// Structural columns, followed by one artificial per row.
    n: usize,
    m: usize,
    tol: f64,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.rows[i][self.n + self.m]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            if !T::EXACT {
                row[col] = T::zero();
            }
        }
        self.basis[r] = col;
    }

    /// Simplex multipliers `y = c_Bᵀ B⁻¹`, read off the artificial columns.
    fn duals(&self, cost: &[T]) -> Vec<T> {
        (0..self.m)
            .map(|k| {
                self.basis
                    .iter()
                    .enumerate()
                    .fold(T::zero(), |acc, (i, &bi)| {
                        acc + cost[bi].clone() * self.rows[i][self.n + k].clone()
                    })
            })
            .collect()
    }

    fn reduced_cost(&self, cost: &[T], y: &[T], a_cols: &dyn Fn(usize, usize) -> T, j: usize) -> T {
        let mut r = cost[j].clone();
        for (i, yi) in y.iter().enumerate() {
            if !yi.is_zero() {
                r = r - yi.clone() * a_cols(i, j);
            }
        }
        r
    }

    /// Runs simplex iterations on `cost` over the columns `0..allowed`.
    /// Returns `false` if the objective is unbounded below.
    fn optimize(
        &mut self,
        cost: &[T],
        allowed: usize,
        original: &dyn Fn(usize, usize) -> T,
    ) -> Result<bool, String> {
        let max_iters = 50_000 + 50 * (self.n + self.m);
        for _ in 0..max_iters {
            let y = self.duals(cost);
            let entering = (0..allowed).find(|&j| {
                !self.basis.contains(&j) && {
                    let r = self.reduced_cost(cost, &y, original, j);
                    if T::EXACT {
                        r.is_negative()
                    } else {
                        r.as_f64() < -self.tol
                    }
                }
            });
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.m {
                let d = self.rows[i][col].clone();
                let positive = if T::EXACT {
                    d.is_positive()
                } else {
                    d.as_f64() > self.tol
                };
                if !positive {
                    continue;
                }
                let ratio = self.rhs(i).clone() / d;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br
                            || (ratio.approx_eq(br, if T::EXACT { 0.0 } else { self.tol })
                                && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return Ok(false);
            };
            self.pivot(r, col);
        }
        Err("iteration limit reached".into())
    }
}

/// Solves the problem with tolerance `tol` (ignored for exact scalars).
pub fn solve<T: Scalar>(problem: &LpProblem<T>, tol: f64) -> Result<LpResult<T>, String> {
    let m = problem.b.len();
    let n = problem.c.len();
    if problem.a.len() != m || problem.a.iter().any(|r| r.len() != n) {
        return Err("constraint matrix has the wrong shape".into());
    }
    let sign: Vec<T> = problem
        .b
        .iter()
        .map(|bi| {
            if bi.is_negative() {
                -T::one()
            } else {
                T::one()
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<T> = problem.a[i]
            .iter()
            .map(|v| v.clone() * sign[i].clone())
            .collect();
        for k in 0..m {
            row.push(if k == i { T::one() } else { T::zero() });
        }
        row.push(problem.b[i].clone() * sign[i].clone());
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        n,
        m,
        tol,
    };
    // Columns of the sign-adjusted system, including the artificial identity.
    let orig = |i: usize, j: usize| -> T {
        if j < n {
            problem.a[i][j].clone() * sign[i].clone()
        } else if j - n == i {
            T::one()
        } else {
            T::zero()
        }
    };

    let phase1: Vec<T> = (0..n + m)
        .map(|j| if j < n { T::zero() } else { T::one() })
        .collect();
    t.optimize(&phase1, n + m, &orig)?;
    let infeasibility = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bi)| bi >= n)
        .fold(T::zero(), |acc, (i, _)| acc + t.rhs(i).clone());
    if infeasibility.is_positive_beyond(if T::EXACT { 0.0 } else { tol.max(1e-12) * 10.0 }) {
        let y = t.duals(&phase1);
        let farkas = y
            .into_iter()
            .zip(&sign)
            .map(|(v, s)| v * s.clone())
            .collect();
        return Ok(LpResult::Infeasible { farkas });
    }

    // Drive zero-level artificials out of the basis where possible.
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| {
                !t.basis.contains(&j)
                    && !t.rows[i][j].is_negligible(if T::EXACT { 0.0 } else { tol })
            }) {
                t.pivot(i, j);
            }
        }
    }

    let mut phase2: Vec<T> = problem.c.clone();
    phase2.extend((0..m).map(|_| T::zero()));
    if !t.optimize(&phase2, n, &orig)? {
        return Ok(LpResult::Unbounded);
    }
    let mut x = vec![T::zero(); n];
    for (i, &bi) in t.basis.iter().enumerate() {
        if bi < n {
            x[bi] = t.rhs(i).clone();
        }
    }
    let value = x
        .iter()
        .zip(&problem.c)
        .fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    let y = t
        .duals(&phase2)
        .into_iter()
        .zip(&sign)
        .map(|(v, s)| v * s.clone())
        .collect();
    Ok(LpResult::Optimal { x, y, value })
}
