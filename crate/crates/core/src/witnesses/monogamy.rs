//! Triangle witness combining monogamy with CHSH: if bits of `a` and `b` are
//! perfectly predicted by bits of `c`, a classical triangle model makes them
//! independent of the source shared by `a` and `b`, so the box of the
//! remaining bits conditioned on them is Bell-local.

use serde::{Deserialize, Serialize};

use crate::dist::JointDistribution;

use super::{Verdict, WitnessError, WitnessKind, WitnessReport};

/// Failure probability tolerated in a perfect correlation.
pub const PERFECT_TOL: f64 = 1e-9;
/// CHSH values above `2 + CHSH_TOL` count as violations.
pub const CHSH_TOL: f64 = 1e-7;

/// Which bits of `a` and `b` act as settings, and which bits of `c` predict
/// them. Negation flips the predicted value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitProjections {
    pub a_bit: usize,
    pub b_bit: usize,
    pub c_bit_for_a: usize,
    pub c_bit_for_b: usize,
    #[serde(default)]
    pub negate_a: bool,
    #[serde(default)]
    pub negate_b: bool,
}

fn bits_of(card: usize) -> Option<usize> {
    (card >= 2 && card.is_power_of_two()).then(|| card.trailing_zeros() as usize)
}

fn bit(value: usize, i: usize) -> usize {
    (value >> i) & 1
}

/// Probability that `bit(u, i) ≠ bit(w, j) ⊕ neg` for variables at `u`, `w`.
fn mismatch(p: &JointDistribution, u: usize, i: usize, w: usize, j: usize, neg: bool) -> f64 {
    p.iter()
        .filter(|(t, _)| bit(t[u], i) != (bit(t[w], j) ^ neg as usize))
        .map(|(_, v)| *v)
        .sum()
}

/// CHSH value maximized over the eight relabelings of settings and outcomes,
/// or `None` if some setting pair has probability zero.
fn conditional_chsh(p: &JointDistribution, proj: &BitProjections) -> Option<f64> {
    let (ra, rb) = (1 - proj.a_bit, 1 - proj.b_bit);
    let mut mass = [[0.0f64; 2]; 2];
    let mut corr = [[0.0f64; 2]; 2];
    for (t, &v) in p.iter() {
        let (x, y) = (bit(t[0], proj.a_bit), bit(t[1], proj.b_bit));
        let sign = if bit(t[0], ra) == bit(t[1], rb) {
            1.0
        } else {
            -1.0
        };
        mass[x][y] += v;
        corr[x][y] += sign * v;
    }
    let mut e = [0.0f64; 4];
    for x in 0..2 {
        for y in 0..2 {
            if mass[x][y] <= PERFECT_TOL {
                return None;
            }
            e[2 * x + y] = corr[x][y] / mass[x][y];
        }
    }
    let total: f64 = e.iter().sum();
    Some(
        e.iter()
            .map(|ei| (total - 2.0 * ei).abs())
            .fold(0.0, f64::max),
    )
}

fn candidates(p: &JointDistribution, u: usize, w: usize) -> Vec<(usize, usize, bool)> {
    let mut out = Vec::new();
    for i in 0..2 {
        for j in 0..bits_of(p.variables()[w].cardinality).unwrap_or(0) {
            for neg in [false, true] {
                if mismatch(p, u, i, w, j, neg) <= PERFECT_TOL {
                    out.push((i, j, neg));
                }
            }
        }
    }
    out
}

/// Runs the witness on a triangle correlation with variables `a`, `b`, `c`,
/// where `a` and `b` have four outcomes read as two bits and `c` has a power
/// of two outcomes. Without explicit projections every coordinate bit is
/// tried and the largest CHSH value is reported.
pub fn monogamy_chsh_witness(
    p: &JointDistribution,
    projections: Option<&BitProjections>,
) -> Result<WitnessReport, WitnessError> {
    let p = p.reorder(&["a", "b", "c"]).map_err(|_| {
        WitnessError::ShapeMismatch("expected exactly the variables a, b, c".into())
    })?;
    let cards = p.cardinalities();
    if cards[0] != 4 || cards[1] != 4 || bits_of(cards[2]).is_none() {
        return Err(WitnessError::ShapeMismatch(
            "a and b need four outcomes and c a power of two".into(),
        ));
    }
    let c_bits = bits_of(cards[2]).unwrap_or(0);

    let chosen: Vec<BitProjections> = match projections {
        Some(pr) => {
            if pr.a_bit > 1 || pr.b_bit > 1 || pr.c_bit_for_a >= c_bits || pr.c_bit_for_b >= c_bits
            {
                return Err(WitnessError::ShapeMismatch("bit index out of range".into()));
            }
            let fa = mismatch(&p, 0, pr.a_bit, 2, pr.c_bit_for_a, pr.negate_a);
            let fb = mismatch(&p, 1, pr.b_bit, 2, pr.c_bit_for_b, pr.negate_b);
            if fa > PERFECT_TOL || fb > PERFECT_TOL {
                return Ok(WitnessReport {
                    kind: WitnessKind::MonogamyChsh,
                    verdict: Verdict::Inconclusive,
                    slack: 0.0,
                    chain: Vec::new(),
                    notes: vec![format!(
                        "perfect correlation fails: mismatch {fa:.3e} for a, {fb:.3e} for b"
                    )],
                });
            }
            vec![*pr]
        }
        None => {
            let ca = candidates(&p, 0, 2);
            let cb = candidates(&p, 1, 2);
            let mut all = Vec::new();
            for &(a_bit, c_bit_for_a, negate_a) in &ca {
                for &(b_bit, c_bit_for_b, negate_b) in &cb {
                    all.push(BitProjections {
                        a_bit,
                        b_bit,
                        c_bit_for_a,
                        c_bit_for_b,
                        negate_a,
                        negate_b,
                    });
                }
            }
            if all.is_empty() {
                return Err(WitnessError::MissingDecomposition);
            }
            all
        }
    };

    let mut best: Option<(f64, BitProjections)> = None;
    for pr in chosen {
        if let Some(s) = conditional_chsh(&p, &pr) {
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, pr));
            }
        }
    }
    let Some((chsh, pr)) = best else {
        return Ok(WitnessReport {
            kind: WitnessKind::MonogamyChsh,
            verdict: Verdict::Inconclusive,
            slack: 0.0,
            chain: Vec::new(),
            notes: vec!["some setting pair has probability zero".into()],
        });
    };
    let slack = chsh - 2.0;
    Ok(WitnessReport {
        kind: WitnessKind::MonogamyChsh,
        verdict: if slack > CHSH_TOL {
            Verdict::NonClassical
        } else {
            Verdict::Consistent
        },
        slack,
        chain: Vec::new(),
        notes: vec![
            format!("CHSH {chsh:.12}"),
            format!(
                "settings: bit {} of a = bit {} of c{}, bit {} of b = bit {} of c{}",
                pr.a_bit,
                pr.c_bit_for_a,
                if pr.negate_a { " negated" } else { "" },
                pr.b_bit,
                pr.c_bit_for_b,
                if pr.negate_b { " negated" } else { "" },
            ),
        ],
    })
}
