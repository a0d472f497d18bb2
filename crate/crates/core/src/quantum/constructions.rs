//! Explicit quantum models: the triangle CHSH construction, the path
//! embeddings of bipartite Bell and bilocal experiments, and random models.

use rand::Rng;

use crate::scenario::standard::{c3, p4, p5};

use super::matrix::{
    basis_projector, bloch_observable, c, kron, observable_projectors, projector, random_density,
    random_povm, random_pure_state, random_qubit_observable, zeros, CMatrix, CVector,
};
use super::model::{QuantumError, QuantumModel, SeparableDecomposition};

/// `(|00⟩ + |11⟩)/√2` as a density matrix.
pub fn phi_plus() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = CVector::from_column_slice(&[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
    projector(&v)
}

/// `(|01⟩ − |10⟩)/√2` as a density matrix.
pub fn singlet() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = CVector::from_column_slice(&[c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]);
    projector(&v)
}

/// `½(|00⟩⟨00| + |11⟩⟨11|)`.
pub fn classically_correlated_bits() -> CMatrix {
    (basis_projector(4, 0) + basis_projector(4, 3)) * c(0.5, 0.0)
}

/// The two-term product decomposition of [`classically_correlated_bits`].
pub fn classically_correlated_terms() -> Vec<(f64, Vec<CMatrix>)> {
    (0..2)
        .map(|i| (0.5, vec![basis_projector(2, i), basis_projector(2, i)]))
        .collect()
}

/// The two observables shared by both parties of the triangle construction:
/// `Z` and `½Z − (√3/2)Y`.
pub fn c3_observables() -> [CMatrix; 2] {
    let s = 3f64.sqrt() / 2.0;
    [
        bloch_observable([0.0, 0.0, 1.0]),
        bloch_observable([0.0, -s, 0.5]),
    ]
}

/// Triangle model violating CHSH by 2.5.
///
/// `a` and `b` share `|Φ+⟩` on source `AB`. Sources `BC` and `CA` distribute
/// a classically correlated bit to `c` and to `b` resp. `a`, which use it as
/// their setting. `a = 2x + o` with `x` the `CA` bit, `b = 2y + o` with `y`
/// the `BC` bit, and `c = 2x + y`.
pub fn c3_quantum() -> QuantumModel {
    c3_with_ab_state(phi_plus())
}

/// [`c3_quantum`] with a different state on source `AB`.
pub fn c3_with_ab_state(ab: CMatrix) -> QuantumModel {
    let s = c3(4);
    // Sources: AB = {a,b}, BC = {b,c}, CA = {a,c}; each in ascending order.
    let obs = c3_observables();
    let proj: Vec<(CMatrix, CMatrix)> = obs.iter().map(observable_projectors).collect();
    let element = |setting: usize, o: usize| -> &CMatrix {
        if o == 0 {
            &proj[setting].0
        } else {
            &proj[setting].1
        }
    };
    // a acts on AB ⊗ CA; the setting is the CA factor.
    let a: Vec<CMatrix> = (0..4)
        .map(|t| kron(element(t / 2, t % 2), &basis_projector(2, t / 2)))
        .collect();
    // b acts on AB ⊗ BC; the setting is the BC factor.
    let b: Vec<CMatrix> = (0..4)
        .map(|t| kron(element(t / 2, t % 2), &basis_projector(2, t / 2)))
        .collect();
    // c acts on BC ⊗ CA; c = 2·(CA bit) + (BC bit).
    let cc: Vec<CMatrix> = (0..4)
        .map(|t| kron(&basis_projector(2, t % 2), &basis_projector(2, t / 2)))
        .collect();
    let dims = vec![vec![2, 2]; 3];
    let states = vec![
        ab,
        classically_correlated_bits(),
        classically_correlated_bits(),
    ];
    QuantumModel::new(s, dims, states, vec![a, b, cc]).expect("triangle model is valid")
}

/// The separable triangle model with every source carrying
/// `½(|00⟩⟨00| + |11⟩⟨11|)`, with its decomposition.
pub fn c3_separable() -> (QuantumModel, SeparableDecomposition) {
    let q = c3_with_ab_state(classically_correlated_bits());
    let decomp = SeparableDecomposition {
        terms: vec![classically_correlated_terms(); 3],
    };
    (q, decomp)
}

fn setting_state(px: &[f64]) -> CMatrix {
    let n = px.len();
    let mut rho = zeros(n * n);
    for (i, &p) in px.iter().enumerate() {
        rho[(i * n + i, i * n + i)] = c(p, 0.0);
    }
    rho
}

fn check_settings(px: &[f64]) -> Result<(), QuantumError> {
    let total: f64 = px.iter().sum();
    if px.is_empty() || px.iter().any(|&p| p < 0.0 || !p.is_finite()) || (total - 1.0).abs() > 1e-10
    {
        return Err(QuantumError::Shape(
            "setting distribution is not a probability vector".into(),
        ));
    }
    Ok(())
}

fn controlled(settings: usize, povms: &[Vec<CMatrix>], o: usize, control_first: bool) -> CMatrix {
    let dim = povms[0][0].nrows();
    let mut out = zeros(settings * dim);
    for (x, povm) in povms.iter().enumerate() {
        let term = if control_first {
            kron(&basis_projector(settings, x), &povm[o])
        } else {
            kron(&povm[o], &basis_projector(settings, x))
        };
        out += term;
    }
    out
}

fn setting_readout(n: usize) -> Vec<CMatrix> {
    (0..n).map(|i| basis_projector(n, i)).collect()
}

fn povm_family_shape(povms: &[Vec<CMatrix>]) -> Result<(usize, usize), QuantumError> {
    let first = povms
        .first()
        .and_then(|p| p.first())
        .ok_or_else(|| QuantumError::Shape("empty measurement family".into()))?;
    let (dim, outcomes) = (first.nrows(), povms[0].len());
    if povms
        .iter()
        .any(|p| p.len() != outcomes || p.iter().any(|e| e.shape() != (dim, dim)))
    {
        return Err(QuantumError::Shape(
            "measurement family has inconsistent shapes".into(),
        ));
    }
    Ok((dim, outcomes))
}

/// Quantum model on the path `x – a – b – y` realizing
/// `p(x) p(y) tr[ρ (A^x_a ⊗ B^y_b)]`.
///
/// The outer sources carry `Σ_x p(x)|xx⟩⟨xx|`; `x` and `y` read their copy in
/// the computational basis and the middle parties apply the corresponding
/// measurement to their share of `rho`.
pub fn p4_embedding(
    rho: &CMatrix,
    alice: &[Vec<CMatrix>],
    bob: &[Vec<CMatrix>],
    px: &[f64],
    py: &[f64],
) -> Result<QuantumModel, QuantumError> {
    check_settings(px)?;
    check_settings(py)?;
    let (da, oa) = povm_family_shape(alice)?;
    let (db, ob) = povm_family_shape(bob)?;
    if alice.len() != px.len() || bob.len() != py.len() {
        return Err(QuantumError::Shape(
            "one measurement per setting is required".into(),
        ));
    }
    if rho.shape() != (da * db, da * db) {
        return Err(QuantumError::Shape(
            "state does not match the measurement dimensions".into(),
        ));
    }
    let (nx, ny) = (px.len(), py.len());
    let s = p4(2).with_outcomes(&[nx, oa, ob, ny]);
    // Sources XA = {x,a}, AB = {a,b}, BY = {b,y}.
    let dims = vec![vec![nx, nx], vec![da, db], vec![ny, ny]];
    let states = vec![setting_state(px), rho.clone(), setting_state(py)];
    let a: Vec<CMatrix> = (0..oa).map(|o| controlled(nx, alice, o, true)).collect();
    let b: Vec<CMatrix> = (0..ob).map(|o| controlled(ny, bob, o, false)).collect();
    QuantumModel::new(
        s,
        dims,
        states,
        vec![setting_readout(nx), a, b, setting_readout(ny)],
    )
}

/// Quantum model on the path `x – a – b – c – z` realizing the bilocal law
/// `p(x) p(z) tr[(ρ₁ ⊗ ρ₂)(A^x_a ⊗ B_b ⊗ C^z_c)]`.
///
/// `rho1` lives on `A ⊗ B₁`, `rho2` on `B₂ ⊗ C`, and `middle` acts on
/// `B₁ ⊗ B₂`.
pub fn p5_embedding(
    rho1: &CMatrix,
    rho2: &CMatrix,
    alice: &[Vec<CMatrix>],
    middle: &[CMatrix],
    charlie: &[Vec<CMatrix>],
    px: &[f64],
    pz: &[f64],
) -> Result<QuantumModel, QuantumError> {
    check_settings(px)?;
    check_settings(pz)?;
    let (da, oa) = povm_family_shape(alice)?;
    let (dc, oc) = povm_family_shape(charlie)?;
    if alice.len() != px.len() || charlie.len() != pz.len() || middle.is_empty() {
        return Err(QuantumError::Shape(
            "one measurement per setting is required".into(),
        ));
    }
    let db = middle[0].nrows();
    let d1 = rho1.nrows();
    let d2 = rho2.nrows();
    if !d1.is_multiple_of(da) || !d2.is_multiple_of(dc) || (d1 / da) * (d2 / dc) != db {
        return Err(QuantumError::Shape(
            "states do not match the measurement dimensions".into(),
        ));
    }
    let (b1, b2) = (d1 / da, d2 / dc);
    let (nx, nz) = (px.len(), pz.len());
    let s = p5(2).with_outcomes(&[nx, oa, middle.len(), oc, nz]);
    // Sources XA = {x,a}, AB = {a,b}, BC = {b,c}, CZ = {c,z}.
    let dims = vec![vec![nx, nx], vec![da, b1], vec![b2, dc], vec![nz, nz]];
    let states = vec![
        setting_state(px),
        rho1.clone(),
        rho2.clone(),
        setting_state(pz),
    ];
    let a: Vec<CMatrix> = (0..oa).map(|o| controlled(nx, alice, o, true)).collect();
    let cc: Vec<CMatrix> = (0..oc).map(|o| controlled(nz, charlie, o, false)).collect();
    QuantumModel::new(
        s,
        dims,
        states,
        vec![
            setting_readout(nx),
            a,
            middle.to_vec(),
            cc,
            setting_readout(nz),
        ],
    )
}

/// Projectors onto the Bell basis `Φ+, Φ−, Ψ+, Ψ−`.
pub fn bell_basis_measurement() -> Vec<CMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let vecs = [
        [c(h, 0.0), z, z, c(h, 0.0)],
        [c(h, 0.0), z, z, c(-h, 0.0)],
        [z, c(h, 0.0), c(h, 0.0), z],
        [z, c(h, 0.0), c(-h, 0.0), z],
    ];
    vecs.iter()
        .map(|v| projector(&CVector::from_column_slice(v)))
        .collect()
}

/// Entanglement swapping on `P5`: two singlets, a Bell-basis measurement in
/// the middle, and `Z`/`X` measurements with uniform settings at the ends.
pub fn entanglement_swapping() -> QuantumModel {
    let zx: Vec<Vec<CMatrix>> = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]
        .iter()
        .map(|&n| {
            let (p, m) = observable_projectors(&bloch_observable(n));
            vec![p, m]
        })
        .collect();
    p5_embedding(
        &singlet(),
        &singlet(),
        &zx,
        &bell_basis_measurement(),
        &zx,
        &[0.5, 0.5],
        &[0.5, 0.5],
    )
    .expect("swapping model is valid")
}

/// Two-qubit model on `P4` with uniform binary settings, a random state of
/// random rank and random projective ±1 measurements.
pub fn random_two_qubit_p4<R: Rng + ?Sized>(rng: &mut R) -> QuantumModel {
    let rank = rng.gen_range(1..=4);
    let rho = random_density(rng, 4, rank);
    let family = |rng: &mut R| -> Vec<Vec<CMatrix>> {
        (0..2)
            .map(|_| {
                let (p, m) = observable_projectors(&random_qubit_observable(rng));
                vec![p, m]
            })
            .collect()
    };
    let alice = family(rng);
    let bob = family(rng);
    p4_embedding(&rho, &alice, &bob, &[0.5, 0.5], &[0.5, 0.5]).expect("random model is valid")
}

/// Random separable model on `scenario`-shaped data: every source is a
/// mixture of at most `max_terms` products of random states of dimension at
/// most `max_dim` per connection, every measurement a random POVM.
pub fn random_separable<R: Rng + ?Sized>(
    rng: &mut R,
    scenario: &crate::scenario::Scenario,
    max_dim: usize,
    max_terms: usize,
) -> (QuantumModel, SeparableDecomposition) {
    let dims: Vec<Vec<usize>> = scenario
        .sources()
        .iter()
        .map(|src| {
            src.connects
                .iter()
                .map(|_| rng.gen_range(1..=max_dim.max(1)))
                .collect()
        })
        .collect();
    let terms: Vec<Vec<(f64, Vec<CMatrix>)>> = dims
        .iter()
        .map(|d| {
            let k = rng.gen_range(1..=max_terms.max(1));
            let w = crate::models::random::random_simplex(rng, k);
            w.into_iter()
                .map(|wj| {
                    let factors = d
                        .iter()
                        .map(|&n| {
                            if rng.gen_bool(0.5) {
                                projector(&random_pure_state(rng, n))
                            } else {
                                let rank = rng.gen_range(1..=n);
                                random_density(rng, n, rank)
                            }
                        })
                        .collect();
                    (wj, factors)
                })
                .collect()
        })
        .collect();
    let decomp = SeparableDecomposition { terms };
    let states: Vec<CMatrix> = (0..scenario.num_sources())
        .map(|e| super::matrix::hermitize(&decomp.state(e).expect("consistent shapes")))
        .collect();
    let povms: Vec<Vec<CMatrix>> = (0..scenario.num_measurements())
        .map(|v| {
            let dim: usize = scenario
                .sources_of(v)
                .iter()
                .map(|&e| {
                    let pos = scenario.sources()[e]
                        .connects
                        .iter()
                        .position(|&w| w == v)
                        .expect("connected");
                    dims[e][pos]
                })
                .product();
            random_povm(rng, dim, scenario.measurements()[v].outcomes)
        })
        .collect();
    let q =
        QuantumModel::new(scenario.clone(), dims, states, povms).expect("random model is valid");
    (q, decomp)
}
