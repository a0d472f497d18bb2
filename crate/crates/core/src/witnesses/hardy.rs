//! Possibilistic witness on the square scenario.
//!
//! Take two hidden assignments `ℓ` and `κ` that produce the support tuples
//! `s1` and `s2`. In a deterministic model with independent sources, every
//! recombination of their source values also occurs with positive
//! probability, and each outcome depends only on the two adjacent sources.
//! Whenever the outcomes already known for a recombination leave exactly one
//! value for another outcome among the support tuples, that value is forced.
//! A recombination whose known outcomes match no support tuple refutes every
//! classical model.

use serde::Serialize;

use crate::correlation::is_correlation;
use crate::dist::JointDistribution;
use crate::models::SupportPattern;
use crate::scenario::standard::c4;
use crate::scenario::Scenario;

use super::{Verdict, WitnessError, WitnessKind, WitnessReport};

/// Longest chain the search accepts.
pub const MAX_DEPTH: usize = 6;

const LABELS: [&str; 2] = ["ℓ", "κ"];

/// One recombination step, in the coordinates of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HardyStep {
    /// Label (`0` for `ℓ`, `1` for `κ`) of each source, in scenario order.
    pub hidden: Vec<usize>,
    /// Outcomes known before the step, `None` where unknown.
    pub known: Vec<Option<usize>>,
    /// Outcomes forced by the step.
    pub forced: Vec<(usize, usize)>,
    /// Set when no support tuple matches `known`.
    pub contradiction: bool,
}

/// A chain of deductions starting from two support tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HardyChain {
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub steps: Vec<HardyStep>,
}

impl HardyChain {
    /// Outcome pattern that no support tuple matches.
    pub fn refuted_pattern(&self) -> Option<&[Option<usize>]> {
        self.steps
            .last()
            .filter(|s| s.contradiction)
            .map(|s| s.known.as_slice())
    }
}

/// Forced-deduction engine on an arbitrary scenario with two labels per
/// source. Facts are keyed by measurement and the labels of its sources.
struct Engine<'a> {
    s: &'a Scenario,
    support: &'a [Vec<usize>],
    facts: Vec<std::collections::BTreeMap<Vec<usize>, usize>>,
}

impl<'a> Engine<'a> {
    fn new(s: &'a Scenario, support: &'a [Vec<usize>], s1: &[usize], s2: &[usize]) -> Self {
        let facts = (0..s.num_measurements())
            .map(|v| {
                let deg = s.sources_of(v).len();
                let mut f = std::collections::BTreeMap::new();
                f.insert(vec![0; deg], s1[v]);
                f.insert(vec![1; deg], s2[v]);
                f
            })
            .collect();
        Engine { s, support, facts }
    }

    fn key(&self, v: usize, hidden: &[usize]) -> Vec<usize> {
        self.s.sources_of(v).iter().map(|&e| hidden[e]).collect()
    }

    fn known(&self, hidden: &[usize]) -> Vec<Option<usize>> {
        (0..self.s.num_measurements())
            .map(|v| self.facts[v].get(&self.key(v, hidden)).copied())
            .collect()
    }

    /// Evaluates a recombination: `Err(())` on contradiction, otherwise the
    /// outcomes it forces.
    fn examine(&self, known: &[Option<usize>]) -> Result<Vec<(usize, usize)>, ()> {
        let matching: Vec<&Vec<usize>> = self
            .support
            .iter()
            .filter(|t| {
                known
                    .iter()
                    .zip(t.iter())
                    .all(|(k, &x)| k.is_none_or(|k| k == x))
            })
            .collect();
        if matching.is_empty() {
            return Err(());
        }
        Ok((0..known.len())
            .filter(|&v| known[v].is_none())
            .filter_map(|v| {
                let first = matching[0][v];
                matching.iter().all(|t| t[v] == first).then_some((v, first))
            })
            .collect())
    }

    fn apply(&mut self, step: &HardyStep) {
        for &(v, x) in &step.forced {
            let key = self.key(v, &step.hidden);
            self.facts[v].insert(key, x);
        }
    }

    /// Greedy chain: a contradiction is taken as soon as one exists,
    /// otherwise the first recombination that forces something.
    fn run(mut self, max_depth: usize) -> Option<Vec<HardyStep>> {
        let ns = self.s.num_sources();
        let combos: Vec<Vec<usize>> = (0..1usize << ns)
            .map(|m| (0..ns).map(|e| (m >> (ns - 1 - e)) & 1).collect())
            .collect();
        let mut steps = Vec::new();
        while steps.len() < max_depth {
            let mut next: Option<HardyStep> = None;
            for h in &combos {
                let known = self.known(h);
                match self.examine(&known) {
                    Err(()) => {
                        steps.push(HardyStep {
                            hidden: h.clone(),
                            known,
                            forced: Vec::new(),
                            contradiction: true,
                        });
                        return Some(steps);
                    }
                    Ok(forced) if !forced.is_empty() && next.is_none() => {
                        next = Some(HardyStep {
                            hidden: h.clone(),
                            known,
                            forced,
                            contradiction: false,
                        });
                    }
                    Ok(_) => {}
                }
            }
            let step = next?;
            self.apply(&step);
            steps.push(step);
        }
        None
    }
}

/// Searches a chain from the fixed pair `s1`, `s2` (in scenario order).
pub fn hardy_chain(
    s: &Scenario,
    support: &[Vec<usize>],
    s1: &[usize],
    s2: &[usize],
    max_depth: usize,
) -> Option<HardyChain> {
    Engine::new(s, support, s1, s2)
        .run(max_depth)
        .map(|steps| HardyChain {
            s1: s1.to_vec(),
            s2: s2.to_vec(),
            steps,
        })
}

/// Checks a prescribed sequence of recombinations: every step but the last
/// must force at least one outcome and the last must be a contradiction.
pub fn replay_hardy_chain(
    s: &Scenario,
    support: &[Vec<usize>],
    s1: &[usize],
    s2: &[usize],
    recombinations: &[Vec<usize>],
) -> Option<HardyChain> {
    let mut engine = Engine::new(s, support, s1, s2);
    let mut steps = Vec::new();
    for (i, h) in recombinations.iter().enumerate() {
        let known = engine.known(h);
        let last = i + 1 == recombinations.len();
        match engine.examine(&known) {
            Err(()) if last => steps.push(HardyStep {
                hidden: h.clone(),
                known,
                forced: Vec::new(),
                contradiction: true,
            }),
            Ok(forced) if !last && !forced.is_empty() => {
                let step = HardyStep {
                    hidden: h.clone(),
                    known,
                    forced,
                    contradiction: false,
                };
                engine.apply(&step);
                steps.push(step);
            }
            _ => return None,
        }
    }
    Some(HardyChain {
        s1: s1.to_vec(),
        s2: s2.to_vec(),
        steps,
    })
}

/// A relabeling of the square: outcome flips, then a dihedral symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Frame {
    flips: [usize; 4],
    /// New position of each measurement.
    perm: [usize; 4],
    rotation: usize,
    reflected: bool,
}

/// Measurements of `c4` around the cycle `a – b – y – x`.
const CYCLE: [usize; 4] = [0, 1, 3, 2];

fn frames() -> Vec<Frame> {
    let mut out = Vec::with_capacity(128);
    for reflected in [false, true] {
        for rotation in 0..4 {
            let mut perm = [0; 4];
            for (pos, &v) in CYCLE.iter().enumerate() {
                let np = if reflected {
                    (rotation + 4 - pos) % 4
                } else {
                    (pos + rotation) % 4
                };
                perm[v] = CYCLE[np];
            }
            for f in 0..16usize {
                let flips = [(f >> 3) & 1, (f >> 2) & 1, (f >> 1) & 1, f & 1];
                out.push(Frame {
                    flips,
                    perm,
                    rotation,
                    reflected,
                });
            }
        }
    }
    out
}

impl Frame {
    fn forward(&self, t: &[usize]) -> Vec<usize> {
        let mut out = vec![0; 4];
        for v in 0..4 {
            out[self.perm[v]] = t[v] ^ self.flips[v];
        }
        out
    }

    fn back_partial(&self, t: &[Option<usize>]) -> Vec<Option<usize>> {
        (0..4)
            .map(|v| t[self.perm[v]].map(|x| x ^ self.flips[v]))
            .collect()
    }

    fn back(&self, t: &[usize]) -> Vec<usize> {
        (0..4).map(|v| t[self.perm[v]] ^ self.flips[v]).collect()
    }

    /// Source of the square mapped onto each source by the symmetry.
    fn source_map(&self, s: &Scenario) -> Vec<usize> {
        let ends = |e: usize| -> Vec<usize> {
            let mut m: Vec<usize> = (0..4).filter(|&v| s.sources_of(v).contains(&e)).collect();
            m.sort_unstable();
            m
        };
        (0..s.num_sources())
            .map(|e| {
                let mut img: Vec<usize> = ends(e).iter().map(|&v| self.perm[v]).collect();
                img.sort_unstable();
                (0..s.num_sources())
                    .find(|&f| ends(f) == img)
                    .expect("symmetry of the cycle")
            })
            .collect()
    }

    fn describe(&self) -> String {
        format!(
            "frame: flips {:?}, rotation {}, {}",
            self.flips,
            self.rotation,
            if self.reflected {
                "reflected"
            } else {
                "unreflected"
            }
        )
    }
}

fn fmt_tuple(t: &[Option<usize>]) -> String {
    let parts: Vec<String> = t
        .iter()
        .map(|x| x.map_or_else(|| "*".to_string(), |x| x.to_string()))
        .collect();
    format!("({})", parts.join(","))
}

fn describe_step(s: &Scenario, step: &HardyStep, n: usize) -> String {
    let hidden: Vec<String> = s
        .sources()
        .iter()
        .zip(&step.hidden)
        .map(|(src, &h)| format!("{}={}", src.name, LABELS[h]))
        .collect();
    let names = s.measurement_names();
    if step.contradiction {
        format!(
            "{n}. hidden ({}) yields {} with positive probability, which matches no support tuple",
            hidden.join(", "),
            fmt_tuple(&step.known)
        )
    } else {
        let forced: Vec<String> = step
            .forced
            .iter()
            .map(|&(v, x)| format!("{}={}", names[v], x))
            .collect();
        format!(
            "{n}. hidden ({}) yields {}; the support forces {}",
            hidden.join(", "),
            fmt_tuple(&step.known),
            forced.join(", ")
        )
    }
}

/// Looks for a refuting chain over all frames. Outcomes must be binary and
/// `p` must be a correlation on the square.
pub fn hardy_c4_witness(p: &JointDistribution) -> Result<WitnessReport, WitnessError> {
    let s = c4(2);
    let names = s.measurement_names();
    let p = p.reorder(&names).map_err(|_| {
        WitnessError::ShapeMismatch("expected exactly the variables a, b, x, y".into())
    })?;
    if p.cardinalities() != [2, 2, 2, 2] {
        return Err(WitnessError::ShapeMismatch(
            "outcomes must be binary".into(),
        ));
    }
    let report = is_correlation(&s, &p).map_err(|e| WitnessError::ShapeMismatch(e.to_string()))?;
    if !report.is_correlation {
        return Err(WitnessError::ShapeMismatch(
            "input is not a correlation on the square".into(),
        ));
    }
    let support: Vec<Vec<usize>> = SupportPattern::from_distribution(&p)
        .tuples()
        .iter()
        .cloned()
        .collect();
    let origin = [0usize; 4];

    for frame in frames() {
        let mut local: Vec<Vec<usize>> = support.iter().map(|t| frame.forward(t)).collect();
        local.sort();
        if !local.iter().any(|t| t[..] == origin) {
            continue;
        }
        let best = local
            .iter()
            .filter(|t| t[..] != origin)
            .filter_map(|s2| hardy_chain(&s, &local, &origin, s2, MAX_DEPTH))
            .min_by_key(|c| c.steps.len());
        let Some(chain) = best else {
            continue;
        };
        let map = frame.source_map(&s);
        let steps: Vec<HardyStep> = chain
            .steps
            .iter()
            .map(|st| HardyStep {
                hidden: (0..s.num_sources()).map(|e| st.hidden[map[e]]).collect(),
                known: frame.back_partial(&st.known),
                forced: st
                    .forced
                    .iter()
                    .map(|&(v, x)| {
                        let orig = (0..4).find(|&u| frame.perm[u] == v).expect("permutation");
                        (orig, x ^ frame.flips[orig])
                    })
                    .collect(),
                contradiction: st.contradiction,
            })
            .collect();
        let s1 = frame.back(&chain.s1);
        let s2 = frame.back(&chain.s2);
        let mut lines = vec![format!(
            "hidden ℓ produces {} and κ produces {}, both in the support",
            fmt_tuple(&s1.iter().map(|&x| Some(x)).collect::<Vec<_>>()),
            fmt_tuple(&s2.iter().map(|&x| Some(x)).collect::<Vec<_>>())
        )];
        lines.extend(
            steps
                .iter()
                .enumerate()
                .map(|(i, st)| describe_step(&s, st, i + 1)),
        );
        return Ok(WitnessReport {
            kind: WitnessKind::HardyC4,
            verdict: Verdict::NonClassical,
            slack: 1.0,
            chain: lines,
            notes: vec![
                frame.describe(),
                format!("variable order ({})", names.join(",")),
            ],
        });
    }
    Ok(WitnessReport {
        kind: WitnessKind::HardyC4,
        verdict: Verdict::Consistent,
        slack: 0.0,
        chain: Vec::new(),
        notes: vec![format!("no refuting chain of depth at most {MAX_DEPTH}")],
    })
}
