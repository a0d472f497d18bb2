//! Relabeling a path correlation into a square correlation by swapping the
//! roles of settings and outcomes.

use rand::Rng;

use crate::correlation::is_correlation;
use crate::dist::JointDistribution;
use crate::models::random::random_model;
use crate::models::ClassicalModel;
use crate::scalar::Scalar;
use crate::scenario::standard::{c4, p4};

use super::{box_from_correlation, is_no_signaling, signaling_deviation, BellError};

const SWAP: [(&str, &str); 4] = [("x", "a"), ("a", "x"), ("b", "y"), ("y", "b")];

/// Swaps `a ↔ x` and `b ↔ y` in a correlation on `x – a – b – y` and returns
/// it in the variable order of the square scenario.
pub fn time_reverse_relabel(p: &JointDistribution) -> Result<JointDistribution, BellError> {
    let cards: Vec<usize> = ["x", "a", "b", "y"]
        .iter()
        .map(|n| {
            p.index_of(n)
                .map(|i| p.variables()[i].cardinality)
                .ok_or(BellError::NotACorrelation)
        })
        .collect::<Result<_, _>>()?;
    let s = p4(2).with_outcomes(&cards);
    let report = is_correlation(&s, p).map_err(|_| BellError::NotACorrelation)?;
    if !report.is_correlation {
        return Err(BellError::NotACorrelation);
    }
    let swapped = p.rename(&SWAP)?;
    Ok(swapped.reorder(&c4(2).measurement_names())?)
}

/// Maps a classical model on the path to the square: source `XA` stays, `AB`
/// becomes `YX`, `BY` stays, and `AB` of the square is trivial.
pub fn time_reverse_model<T: Scalar>(
    m: &ClassicalModel<T>,
) -> Result<ClassicalModel<T>, BellError> {
    let path = m.scenario();
    if path.measurement_names() != p4(2).measurement_names()
        || path
            .sources()
            .iter()
            .map(|s| s.name.as_str())
            .collect::<Vec<_>>()
            != ["XA", "AB", "BY"]
    {
        return Err(BellError::ShapeMismatch(
            "model must live on the standard path scenario".into(),
        ));
    }
    let out = path.outcomes();
    let (dx, da, db, dy) = (out[0], out[1], out[2], out[3]);
    // New a = old x, new b = old y, new x = old a, new y = old b.
    let square = c4(2).with_outcomes(&[dx, dy, da, db]);
    let src = |n: &str| square.source_index(n).expect("standard name");
    let old = m.source_dists();
    let mut dists = vec![vec![T::one()]; square.num_sources()];
    dists[src("XA")] = old[0].clone();
    dists[src("YX")] = old[1].clone();
    dists[src("BY")] = old[2].clone();
    let old_m = |n: &str| path.measurement_index(n).expect("standard name");
    let new_to_old = [("a", "x"), ("b", "y"), ("x", "a"), ("y", "b")];
    let old_src = |n: &str| match n {
        "XA" => Some(0),
        "YX" => Some(1),
        "BY" => Some(2),
        _ => None,
    };
    ClassicalModel::from_fn(square.clone(), dists, |v, hidden| {
        let name = &square.measurements()[v].name;
        let ov = old_m(
            new_to_old
                .iter()
                .find(|(nn, _)| nn == name)
                .expect("known")
                .1,
        );
        // Hidden values of the old sources of `ov`, in their ascending order.
        let mut pairs: Vec<(usize, usize)> = square
            .sources_of(v)
            .iter()
            .zip(hidden)
            .filter_map(|(&e, &h)| old_src(&square.sources()[e].name).map(|o| (o, h)))
            .collect();
        pairs.sort_unstable();
        let local: Vec<usize> = pairs.into_iter().map(|(_, h)| h).collect();
        m.kernel_row(ov, &local).to_vec()
    })
    .map_err(|e| BellError::ShapeMismatch(e.to_string()))
}

/// Searches random binary classical path models for one whose relabeled
/// square correlation has a signaling box `p(a,b|x,y)`. Returns the model,
/// the square correlation and the signaling deviation.
pub fn find_signaling_time_reversal<R: Rng + ?Sized>(
    rng: &mut R,
    max_tries: usize,
    min_deviation: f64,
) -> Option<(ClassicalModel<f64>, JointDistribution, f64)> {
    let s = p4(2);
    for _ in 0..max_tries {
        let m = random_model(rng, &s, 2, 0.7);
        let Ok(q) = time_reverse_relabel(&m.evaluate()) else {
            continue;
        };
        let Ok(e) = box_from_correlation(&q, &[("x", "a"), ("y", "b")]) else {
            continue;
        };
        if is_no_signaling(&e.conditional) {
            continue;
        }
        let dev = signaling_deviation(&e.conditional);
        if dev > min_deviation {
            return Some((m, q, dev));
        }
    }
    None
}
