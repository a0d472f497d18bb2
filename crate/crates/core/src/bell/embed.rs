//! Embeddings of Bell boxes into path and star scenarios, and of bilocal
//! experiments into the five-vertex path.

use crate::dist::JointDistribution;
use crate::models::ClassicalModel;
use crate::quantum::constructions::p5_embedding;
use crate::quantum::matrix::CMatrix;
use crate::scenario::standard::{multiarm, p4, p5};

use super::{is_no_signaling, BellError, ConditionalBox};

fn check_inputs(inputs: &[Vec<f64>], b: &ConditionalBox) -> Result<(), BellError> {
    if inputs.len() != b.parties().len() {
        return Err(BellError::ShapeMismatch(
            "one input distribution per party is required".into(),
        ));
    }
    for (dist, party) in inputs.iter().zip(b.parties()) {
        let total: f64 = dist.iter().sum();
        if dist.len() != party.settings
            || dist.iter().any(|&q| q <= 0.0 || !q.is_finite())
            || (total - 1.0).abs() > 1e-9
        {
            return Err(BellError::ShapeMismatch(
                "input distributions must have full support and sum to one".into(),
            ));
        }
    }
    Ok(())
}

/// `p(x₁, a₁, …, x_k, a_k) = Π p(x_i) · p(a|x)` with variables in the order
/// given by `names`.
fn embed(
    b: &ConditionalBox,
    inputs: &[Vec<f64>],
    names: &[(String, String)],
    order: &[&str],
) -> Result<JointDistribution, BellError> {
    check_inputs(inputs, b)?;
    if !is_no_signaling(b) {
        return Err(BellError::SignalingBox);
    }
    let settings: Vec<f64> = crate::dist::TupleIter::new(&b.setting_cards())
        .map(|xs| xs.iter().enumerate().map(|(i, &x)| inputs[i][x]).product())
        .collect();
    let joint = b.joint_with_settings(&settings, names)?;
    Ok(joint.reorder(order)?)
}

/// The correlation `p(x) p(y) p(a,b|x,y)` on `x – a – b – y`.
pub fn embed_bell_to_p4(
    b: &ConditionalBox,
    px: &[f64],
    py: &[f64],
) -> Result<JointDistribution, BellError> {
    if b.parties().len() != 2 {
        return Err(BellError::ShapeMismatch(
            "a bipartite box is required".into(),
        ));
    }
    let names = vec![
        ("x".to_string(), "a".to_string()),
        ("y".to_string(), "b".to_string()),
    ];
    let s = p4(2);
    let order = s.measurement_names();
    embed(b, &[px.to_vec(), py.to_vec()], &names, &order)
}

/// The correlation `Π p(x_i) · p(a₁…a_k | x₁…x_k)` on the `k`-arm star.
pub fn embed_bell_to_ak(
    b: &ConditionalBox,
    inputs: &[Vec<f64>],
) -> Result<JointDistribution, BellError> {
    let k = b.parties().len();
    let names: Vec<(String, String)> = (1..=k)
        .map(|i| (format!("x{i}"), format!("a{i}")))
        .collect();
    let s = multiarm(k, 2);
    let order = s.measurement_names();
    embed(b, inputs, &names, &order)
}

/// Bilocal model with two independent hidden variables: `a` depends on
/// `(x, λ₁)`, `b` on `(λ₁, λ₂)` and `c` on `(λ₂, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BgpClassical {
    pub px: Vec<f64>,
    pub pz: Vec<f64>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    /// `alice[x][λ₁][a]`.
    pub alice: Vec<Vec<Vec<f64>>>,
    /// `bob[λ₁][λ₂][b]`.
    pub bob: Vec<Vec<Vec<f64>>>,
    /// `charlie[z][λ₂][c]`.
    pub charlie: Vec<Vec<Vec<f64>>>,
}

/// Bilocal quantum model: `rho1` on `A ⊗ B₁`, `rho2` on `B₂ ⊗ C`, one
/// measurement per setting for the outer parties and one joint measurement
/// on `B₁ ⊗ B₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct BgpQuantum {
    pub rho1: CMatrix,
    pub rho2: CMatrix,
    pub alice: Vec<Vec<CMatrix>>,
    pub middle: Vec<CMatrix>,
    pub charlie: Vec<Vec<CMatrix>>,
    pub px: Vec<f64>,
    pub pz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BgpModel {
    Classical(BgpClassical),
    Quantum(BgpQuantum),
}

fn kernel_shape(
    k: &[Vec<Vec<f64>>],
    outer: usize,
    inner: usize,
    what: &str,
) -> Result<usize, BellError> {
    let bad = || BellError::MalformedBgpInput(format!("{what} kernel has the wrong shape"));
    if k.len() != outer || k.iter().any(|r| r.len() != inner) {
        return Err(bad());
    }
    let d = k
        .first()
        .and_then(|r| r.first())
        .map(|row| row.len())
        .ok_or_else(bad)?;
    for row in k.iter().flatten() {
        let total: f64 = row.iter().sum();
        if row.len() != d || row.iter().any(|&q| q < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(BellError::MalformedBgpInput(format!(
                "{what} kernel rows must be distributions"
            )));
        }
    }
    Ok(d)
}

impl BgpClassical {
    /// The classical model on `x – a – b – c – z` with `λ_XA = x` and
    /// `λ_CZ = z`.
    pub fn to_p5_model(&self) -> Result<ClassicalModel<f64>, BellError> {
        let (nx, nz, k1, k2) = (
            self.px.len(),
            self.pz.len(),
            self.lambda1.len(),
            self.lambda2.len(),
        );
        for (d, what) in [
            (&self.px, "x"),
            (&self.pz, "z"),
            (&self.lambda1, "λ₁"),
            (&self.lambda2, "λ₂"),
        ] {
            let total: f64 = d.iter().sum();
            if d.is_empty() || d.iter().any(|&q| q < 0.0) || (total - 1.0).abs() > 1e-9 {
                return Err(BellError::MalformedBgpInput(format!(
                    "distribution of {what} is invalid"
                )));
            }
        }
        let da = kernel_shape(&self.alice, nx, k1, "a")?;
        let db = kernel_shape(&self.bob, k1, k2, "b")?;
        let dc = kernel_shape(&self.charlie, nz, k2, "c")?;
        let s = p5(2).with_outcomes(&[nx, da, db, dc, nz]);
        let dists = vec![
            self.px.clone(),
            self.lambda1.clone(),
            self.lambda2.clone(),
            self.pz.clone(),
        ];
        let point = |d: usize, o: usize| {
            let mut r = vec![0.0; d];
            r[o] = 1.0;
            r
        };
        ClassicalModel::from_fn(s, dists, |v, h| match v {
            0 => point(nx, h[0]),
            1 => self.alice[h[0]][h[1]].clone(),
            2 => self.bob[h[0]][h[1]].clone(),
            3 => self.charlie[h[1]][h[0]].clone(),
            _ => point(nz, h[0]),
        })
        .map_err(|e| BellError::MalformedBgpInput(e.to_string()))
    }
}

/// The correlation `p(x) p(z) p(a,b,c|x,z)` induced by a bilocal model.
pub fn embed_bgp_to_p5(model: &BgpModel) -> Result<JointDistribution, BellError> {
    match model {
        BgpModel::Classical(m) => Ok(m.to_p5_model()?.evaluate()),
        BgpModel::Quantum(q) => {
            let qm = p5_embedding(
                &q.rho1, &q.rho2, &q.alice, &q.middle, &q.charlie, &q.px, &q.pz,
            )
            .map_err(|e| BellError::MalformedBgpInput(e.to_string()))?;
            qm.evaluate()
                .map_err(|e| BellError::MalformedBgpInput(e.to_string()))
        }
    }
}
