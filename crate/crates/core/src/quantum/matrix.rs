//! Dense complex matrices and the few linear-algebra predicates the quantum
//! models need.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance for hermiticity, positivity and normalization checks.
pub const MATRIX_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors
        .into_iter()
        .fold(identity(1), |acc, f| kron(&acc, f))
}

/// `|i⟩⟨i|` in dimension `n`.
pub fn basis_projector(n: usize, i: usize) -> CMatrix {
    let mut m = zeros(n);
    m[(i, i)] = c(1.0, 0.0);
    m
}

/// `|v⟩⟨v|` for a (not necessarily normalized) vector.
pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn ket(entries: &[Complex64]) -> CVector {
    CVector::from_column_slice(entries)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// `n · σ` for a Bloch vector `n`.
pub fn bloch_observable(n: [f64; 3]) -> CMatrix {
    pauli_x() * c(n[0], 0.0) + pauli_y() * c(n[1], 0.0) + pauli_z() * c(n[2], 0.0)
}

/// Spectral projectors `(P₊, P₋)` of a ±1-valued qubit observable.
pub fn observable_projectors(obs: &CMatrix) -> (CMatrix, CMatrix) {
    let id = identity(obs.nrows());
    let half = c(0.5, 0.0);
    ((&id + obs) * half, (&id - obs) * half)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && hermiticity_error(m) <= tol
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn is_psd(m: &CMatrix, tol: f64) -> bool {
    is_hermitian(m, tol) && eigenvalues(m).first().is_none_or(|&l| l >= -tol)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Reason a matrix fails to be a density matrix, if any.
pub fn density_defect(m: &CMatrix, tol: f64) -> Option<String> {
    if !m.is_square() {
        return Some("not square".into());
    }
    if !is_finite(m) {
        return Some("non-finite entry".into());
    }
    if !is_hermitian(m, tol) {
        return Some(format!(
            "not hermitian (error {:.3e})",
            hermiticity_error(m)
        ));
    }
    let min = eigenvalues(m).first().copied().unwrap_or(0.0);
    if min < -tol {
        return Some(format!("negative eigenvalue {min:.3e}"));
    }
    let tr = trace(m);
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Some(format!("trace {tr}"));
    }
    None
}

/// Reason a list of operators fails to be a POVM on dimension `dim`.
pub fn povm_defect(elements: &[CMatrix], dim: usize, tol: f64) -> Option<String> {
    let mut total = zeros(dim);
    for (i, e) in elements.iter().enumerate() {
        if e.shape() != (dim, dim) {
            return Some(format!(
                "element {i} has shape {:?}, expected {dim}x{dim}",
                e.shape()
            ));
        }
        if !is_finite(e) {
            return Some(format!("element {i} has a non-finite entry"));
        }
        if !is_psd(e, tol) {
            return Some(format!("element {i} is not positive semidefinite"));
        }
        total += e;
    }
    let err = max_abs_diff(&total, &identity(dim));
    if err > tol {
        return Some(format!("elements sum to identity only within {err:.3e}"));
    }
    None
}

/// Born probability `Re tr(ρ E)`.
pub fn born(rho: &CMatrix, e: &CMatrix) -> f64 {
    (rho * e).trace().re
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Haar-random unitary via QR of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let qr = ginibre(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..n {
            out[(i, j)] *= phase;
        }
    }
    out
}

/// Random pure state vector.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| c(gaussian(rng), gaussian(rng)));
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// Random density matrix of the given rank (`G G† / tr`).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> CMatrix {
    let g = ginibre(rng, n, rank.max(1));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    hermitize(&(rho / tr))
}

/// Random POVM with `outcomes` elements, `E_i = S^{-1/2} G_i S^{-1/2}`.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, n: usize, outcomes: usize) -> Vec<CMatrix> {
    let gs: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let a = ginibre(rng, n, n);
            &a * a.adjoint()
        })
        .collect();
    let total = gs.iter().fold(zeros(n), |acc, g| acc + g);
    let s = inverse_sqrt_psd(&total);
    gs.iter().map(|g| hermitize(&(&s * g * &s))).collect()
}

/// Random projective measurement onto a random basis, with the basis vectors
/// split as evenly as possible between outcomes.
pub fn random_projective<R: Rng + ?Sized>(rng: &mut R, n: usize, outcomes: usize) -> Vec<CMatrix> {
    let u = random_unitary(rng, n);
    let mut out = vec![zeros(n); outcomes];
    for j in 0..n {
        let col = u.column(j).into_owned();
        out[j % outcomes] += projector(&col);
    }
    out
}

/// Projective ±1 qubit measurement along a random Bloch direction.
pub fn random_qubit_observable<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    let v = [gaussian(rng), gaussian(rng), gaussian(rng)];
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    bloch_observable([v[0] / norm, v[1] / norm, v[2] / norm])
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

fn inverse_sqrt_psd(m: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(hermitize(m));
    let n = m.nrows();
    let mut d = zeros(n);
    for i in 0..n {
        d[(i, i)] = c(1.0 / eig.eigenvalues[i].max(1e-300).sqrt(), 0.0);
    }
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}
