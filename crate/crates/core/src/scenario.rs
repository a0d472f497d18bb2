//! Correlation scenarios as hypergraphs: measurements are vertices, sources
//! are edges.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::Variable;

/// Largest supported number of measurements (vertex sets are `u64` masks).
pub const MAX_MEASUREMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub outcomes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub name: String,
    pub connects: Vec<String>,
}

/// Unvalidated scenario as read from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub measurements: Vec<Measurement>,
    pub sources: Vec<SourceSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    AntiChainViolation {
        contained: String,
        container: String,
    },
    DuplicateVertexProfile {
        first: String,
        second: String,
    },
    UnknownMeasurement {
        source: String,
        measurement: String,
    },
    IsolatedMeasurement {
        measurement: String,
    },
    DuplicateName {
        name: String,
    },
    InvalidName {
        name: String,
    },
    ZeroOutcomes {
        measurement: String,
    },
    EmptySource {
        source: String,
    },
    RepeatedConnection {
        source: String,
        measurement: String,
    },
    UnarySource {
        source: String,
    },
    TooManyMeasurements {
        count: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AntiChainViolation {
                contained,
                container,
            } => write!(
                f,
                "source `{contained}` is contained in source `{container}`"
            ),
            Violation::DuplicateVertexProfile { first, second } => write!(
                f,
                "measurements `{first}` and `{second}` belong to the same sources"
            ),
            Violation::UnknownMeasurement {
                source,
                measurement,
            } => write!(
                f,
                "source `{source}` connects unknown measurement `{measurement}`"
            ),
            Violation::IsolatedMeasurement { measurement } => {
                write!(
                    f,
                    "measurement `{measurement}` is not connected to any source"
                )
            }
            Violation::DuplicateName { name } => write!(f, "duplicate name `{name}`"),
            Violation::InvalidName { name } => write!(f, "invalid identifier `{name}`"),
            Violation::ZeroOutcomes { measurement } => {
                write!(f, "measurement `{measurement}` has no outcomes")
            }
            Violation::EmptySource { source } => write!(f, "source `{source}` connects nothing"),
            Violation::RepeatedConnection {
                source,
                measurement,
            } => write!(f, "source `{source}` lists `{measurement}` twice"),
            Violation::UnarySource { source } => {
                write!(f, "source `{source}` connects a single measurement")
            }
            Violation::TooManyMeasurements { count } => write!(
                f,
                "{count} measurements exceed the supported maximum of {MAX_MEASUREMENTS}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("invalid arity: need 1 <= k < n, got n = {n}, k = {k}")]
    InvalidArity { n: usize, k: usize },
    #[error("source `{0}` does not connect exactly two measurements")]
    NotAGraphScenario(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    pub name: String,
    /// Measurement indices, ascending.
    pub connects: Vec<usize>,
}

/// A validated correlation scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    measurements: Vec<Measurement>,
    sources: Vec<Source>,
    /// Per measurement, indices of incident sources in ascending order.
    incidence: Vec<Vec<usize>>,
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Validates a scenario description. With `strict`, unary sources are
/// reported as violations too.
pub fn validate_scenario(spec: &ScenarioSpec, strict: bool) -> Result<Scenario, ScenarioError> {
    build(spec, strict, true)
}

impl Scenario {
    /// Builds a scenario without the vertex-distinguishability check. Used
    /// for internal constructions such as stars and complete graphs.
    pub fn relaxed(spec: &ScenarioSpec) -> Result<Scenario, ScenarioError> {
        build(spec, false, false)
    }

    /// Convenience constructor from `(name, outcomes)` and `(name, connects)`.
    pub fn from_parts(
        measurements: &[(&str, usize)],
        sources: &[(&str, &[&str])],
    ) -> Result<Scenario, ScenarioError> {
        validate_scenario(&spec_from_parts(measurements, sources), false)
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn num_measurements(&self) -> usize {
        self.measurements.len()
    }

    pub fn num_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn measurement_index(&self, name: &str) -> Option<usize> {
        self.measurements.iter().position(|m| m.name == name)
    }

    pub fn source_index(&self, name: &str) -> Option<usize> {
        self.sources.iter().position(|s| s.name == name)
    }

    pub fn measurement_names(&self) -> Vec<&str> {
        self.measurements.iter().map(|m| m.name.as_str()).collect()
    }

    pub fn outcomes(&self) -> Vec<usize> {
        self.measurements.iter().map(|m| m.outcomes).collect()
    }

    /// Measurement variables in declaration order.
    pub fn variables(&self) -> Vec<Variable> {
        self.measurements
            .iter()
            .map(|m| Variable::new(m.name.clone(), m.outcomes))
            .collect()
    }

    /// Sources incident to measurement `v`, ascending.
    pub fn sources_of(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Vertex mask of source `e`.
    pub fn source_mask(&self, e: usize) -> u64 {
        mask_of(&self.sources[e].connects)
    }

    /// Open Gaifman neighbourhood masks, one per measurement.
    pub fn neighbor_masks(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.measurements.len()];
        for s in &self.sources {
            let m = mask_of(&s.connects);
            for &v in &s.connects {
                out[v] |= m & !(1u64 << v);
            }
        }
        out
    }

    pub fn all_mask(&self) -> u64 {
        full_mask(self.measurements.len())
    }

    /// Names of the measurements in a mask, in declaration order.
    pub fn names_of_mask(&self, mask: u64) -> Vec<String> {
        (0..self.measurements.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| self.measurements[i].name.clone())
            .collect()
    }

    pub fn to_spec(&self) -> ScenarioSpec {
        ScenarioSpec {
            measurements: self.measurements.clone(),
            sources: self
                .sources
                .iter()
                .map(|s| SourceSpec {
                    name: s.name.clone(),
                    connects: s
                        .connects
                        .iter()
                        .map(|&i| self.measurements[i].name.clone())
                        .collect(),
                })
                .collect(),
        }
    }

    /// Same hypergraph with different outcome counts.
    pub fn with_outcomes(&self, outcomes: &[usize]) -> Scenario {
        let mut out = self.clone();
        for (m, &d) in out.measurements.iter_mut().zip(outcomes) {
            m.outcomes = d;
        }
        out
    }

    /// Same hypergraph with every measurement having `d` outcomes.
    pub fn with_uniform_outcomes(&self, d: usize) -> Scenario {
        self.with_outcomes(&vec![d; self.measurements.len()])
    }
}

pub(crate) fn mask_of(indices: &[usize]) -> u64 {
    indices.iter().fold(0u64, |m, &i| m | 1u64 << i)
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn spec_from_parts(measurements: &[(&str, usize)], sources: &[(&str, &[&str])]) -> ScenarioSpec {
    ScenarioSpec {
        measurements: measurements
            .iter()
            .map(|&(n, d)| Measurement {
                name: n.to_string(),
                outcomes: d,
            })
            .collect(),
        sources: sources
            .iter()
            .map(|&(n, c)| SourceSpec {
                name: n.to_string(),
                connects: c.iter().map(|s| s.to_string()).collect(),
            })
            .collect(),
    }
}

fn build(spec: &ScenarioSpec, strict: bool, distinguish: bool) -> Result<Scenario, ScenarioError> {
    let mut violations = Vec::new();
    if spec.measurements.len() > MAX_MEASUREMENTS {
        return Err(ScenarioError::Invalid(vec![
            Violation::TooManyMeasurements {
                count: spec.measurements.len(),
            },
        ]));
    }
    let mut names = BTreeSet::new();
    let mut index = HashMap::new();
    for (i, m) in spec.measurements.iter().enumerate() {
        if !is_identifier(&m.name) {
            violations.push(Violation::InvalidName {
                name: m.name.clone(),
            });
        }
        if !names.insert(m.name.clone()) {
            violations.push(Violation::DuplicateName {
                name: m.name.clone(),
            });
        }
        if m.outcomes == 0 {
            violations.push(Violation::ZeroOutcomes {
                measurement: m.name.clone(),
            });
        }
        index.entry(m.name.as_str()).or_insert(i);
    }
    let mut source_names = BTreeSet::new();
    let mut sources = Vec::with_capacity(spec.sources.len());
    for s in &spec.sources {
        if !is_identifier(&s.name) {
            violations.push(Violation::InvalidName {
                name: s.name.clone(),
            });
        }
        if !source_names.insert(s.name.clone()) {
            violations.push(Violation::DuplicateName {
                name: s.name.clone(),
            });
        }
        if s.connects.is_empty() {
            violations.push(Violation::EmptySource {
                source: s.name.clone(),
            });
        }
        let mut connects = Vec::new();
        for m in &s.connects {
            match index.get(m.as_str()) {
                Some(&i) => {
                    if connects.contains(&i) {
                        violations.push(Violation::RepeatedConnection {
                            source: s.name.clone(),
                            measurement: m.clone(),
                        });
                    } else {
                        connects.push(i);
                    }
                }
                None => violations.push(Violation::UnknownMeasurement {
                    source: s.name.clone(),
                    measurement: m.clone(),
                }),
            }
        }
        connects.sort_unstable();
        if strict && connects.len() == 1 {
            violations.push(Violation::UnarySource {
                source: s.name.clone(),
            });
        }
        sources.push(Source {
            name: s.name.clone(),
            connects,
        });
    }

    let masks: Vec<u64> = sources.iter().map(|s| mask_of(&s.connects)).collect();
    for (i, &mi) in masks.iter().enumerate() {
        for (j, &mj) in masks.iter().enumerate() {
            if i == j || mi == 0 {
                continue;
            }
            let contained = mi & !mj == 0;
            if contained && (mi != mj || i < j) {
                violations.push(Violation::AntiChainViolation {
                    contained: sources[i].name.clone(),
                    container: sources[j].name.clone(),
                });
            }
        }
    }

    let n = spec.measurements.len();
    let mut incidence = vec![Vec::new(); n];
    for (e, s) in sources.iter().enumerate() {
        for &v in &s.connects {
            incidence[v].push(e);
        }
    }
    for (v, inc) in incidence.iter().enumerate() {
        if inc.is_empty() {
            violations.push(Violation::IsolatedMeasurement {
                measurement: spec.measurements[v].name.clone(),
            });
        }
    }
    if distinguish {
        for u in 0..n {
            for w in u + 1..n {
                if !incidence[u].is_empty() && incidence[u] == incidence[w] {
                    violations.push(Violation::DuplicateVertexProfile {
                        first: spec.measurements[u].name.clone(),
                        second: spec.measurements[w].name.clone(),
                    });
                }
            }
        }
    }

    if violations.is_empty() {
        Ok(Scenario {
            measurements: spec.measurements.clone(),
            sources,
            incidence,
        })
    } else {
        Err(ScenarioError::Invalid(violations))
    }
}

/// Simple undirected graph on the measurements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaifmanGraph {
    pub vertices: Vec<String>,
    /// Edges `(u, w)` with `u < w` by vertex index, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl GaifmanGraph {
    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        let key = (u.min(w), u.max(w));
        self.edges.binary_search(&key).is_ok()
    }

    /// Edge set as sorted name pairs, independent of declaration order.
    pub fn named_edges(&self) -> BTreeSet<(String, String)> {
        self.edges
            .iter()
            .map(|&(u, w)| {
                let (a, b) = (&self.vertices[u], &self.vertices[w]);
                if a <= b {
                    (a.clone(), b.clone())
                } else {
                    (b.clone(), a.clone())
                }
            })
            .collect()
    }

    pub fn adjacency_masks(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.vertices.len()];
        for &(u, w) in &self.edges {
            adj[u] |= 1 << w;
            adj[w] |= 1 << u;
        }
        adj
    }
}

pub fn gaifman_graph(s: &Scenario) -> GaifmanGraph {
    let mut edges = BTreeSet::new();
    for src in s.sources() {
        for (i, &u) in src.connects.iter().enumerate() {
            for &w in &src.connects[i + 1..] {
                edges.insert((u.min(w), u.max(w)));
            }
        }
    }
    GaifmanGraph {
        vertices: s
            .measurement_names()
            .iter()
            .map(|n| n.to_string())
            .collect(),
        edges: edges.into_iter().collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ObstructionKind {
    C3,
    C4,
    P4,
}

impl fmt::Display for ObstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ObstructionKind::C3 => "C3",
            ObstructionKind::C4 => "C4",
            ObstructionKind::P4 => "P4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Classification {
    StarForest,
    ContainsObstruction {
        kind: ObstructionKind,
        /// Vertices in path or cycle order.
        vertices: Vec<String>,
    },
}

/// Induced obstruction found in an abstract graph, as vertex indices in path
/// or cycle order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    pub vertices: Vec<usize>,
}

/// Classifies a graph scenario as a star forest or names an induced C3, C4
/// or P4. Unary sources are accepted and contribute no edges.
pub fn classify_graph_scenario(s: &Scenario) -> Result<Classification, ScenarioError> {
    if let Some(bad) = s.sources().iter().find(|e| e.connects.len() > 2) {
        return Err(ScenarioError::NotAGraphScenario(bad.name.clone()));
    }
    let g = gaifman_graph(s);
    Ok(match classify_graph(&g.adjacency_masks()) {
        None => Classification::StarForest,
        Some(ob) => Classification::ContainsObstruction {
            kind: ob.kind,
            vertices: ob.vertices.iter().map(|&i| g.vertices[i].clone()).collect(),
        },
    })
}

/// Returns `None` when every component is a star (an isolated vertex or a
/// single edge counts), otherwise the first induced obstruction in the order
/// C3, C4, P4 with lexicographically smallest vertex set.
pub fn classify_graph(adj: &[u64]) -> Option<Obstruction> {
    if is_star_forest(adj) {
        return None;
    }
    let found = find_induced(adj, ObstructionKind::C3)
        .or_else(|| find_induced(adj, ObstructionKind::C4))
        .or_else(|| find_induced(adj, ObstructionKind::P4));
    debug_assert!(found.is_some(), "non-star component without obstruction");
    found
}

/// Every connected component is a star K_{1,m} with m >= 0.
pub fn is_star_forest(adj: &[u64]) -> bool {
    let n = adj.len();
    let mut seen = 0u64;
    for start in 0..n {
        if seen >> start & 1 == 1 {
            continue;
        }
        let mut comp = 1u64 << start;
        let mut frontier = comp;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = adj[v] & !comp;
            comp |= new;
            frontier |= new;
        }
        seen |= comp;
        let size = comp.count_ones();
        let edges: u32 = (0..n)
            .filter(|&v| comp >> v & 1 == 1)
            .map(|v| adj[v].count_ones())
            .sum::<u32>()
            / 2;
        if edges != size - 1 {
            return false;
        }
        if size > 2 {
            let has_center = (0..n)
                .filter(|&v| comp >> v & 1 == 1)
                .any(|v| adj[v].count_ones() == size - 1);
            if !has_center {
                return false;
            }
        }
    }
    true
}

/// Looks for an induced subgraph of the given kind, scanning vertex sets in
/// lexicographic order of sorted index tuples.
pub fn find_induced(adj: &[u64], kind: ObstructionKind) -> Option<Obstruction> {
    let n = adj.len();
    let size = if kind == ObstructionKind::C3 { 3 } else { 4 };
    let mut combo: Vec<usize> = (0..size).collect();
    if n < size {
        return None;
    }
    loop {
        if let Some(order) = match_kind(adj, &combo, kind) {
            return Some(Obstruction {
                kind,
                vertices: order,
            });
        }
        let mut i = size;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if combo[i] < n - size + i {
                combo[i] += 1;
                for j in i + 1..size {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn match_kind(adj: &[u64], set: &[usize], kind: ObstructionKind) -> Option<Vec<usize>> {
    let mask = mask_of(set);
    let deg = |v: usize| (adj[v] & mask).count_ones();
    let edges: u32 = set.iter().map(|&v| deg(v)).sum::<u32>() / 2;
    match kind {
        ObstructionKind::C3 => (edges == 3).then(|| set.to_vec()),
        ObstructionKind::C4 => {
            if edges != 4 || set.iter().any(|&v| deg(v) != 2) {
                return None;
            }
            let start = set[0];
            let mut order = vec![start];
            let mut prev = usize::MAX;
            let mut cur = start;
            for _ in 0..3 {
                let next = set.iter().copied().find(|&w| {
                    w != prev && w != cur && adj[cur] >> w & 1 == 1 && !order.contains(&w)
                })?;
                order.push(next);
                prev = cur;
                cur = next;
            }
            Some(order)
        }
        ObstructionKind::P4 => {
            if edges != 3 {
                return None;
            }
            let ends: Vec<usize> = set.iter().copied().filter(|&v| deg(v) == 1).collect();
            if ends.len() != 2 || set.iter().any(|&v| deg(v) == 0 || deg(v) > 2) {
                return None;
            }
            let mut order = vec![ends[0]];
            let mut cur = ends[0];
            while order.len() < 4 {
                let next = set
                    .iter()
                    .copied()
                    .find(|&w| adj[cur] >> w & 1 == 1 && !order.contains(&w))?;
                order.push(next);
                cur = next;
            }
            Some(order)
        }
    }
}

/// Name of the `i`-th ancestor-scenario measurement.
fn ancestor_name(i: usize, n: usize) -> String {
    if n <= 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("v{i}")
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        out.push(combo.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if combo[i] < n - k + i {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Scenario with `n` measurements of `d` outcomes and one source for every
/// `k`-element subset of measurements.
pub fn build_ancestor_scenario(n: usize, k: usize, d: usize) -> Result<Scenario, ScenarioError> {
    if k < 1 || k >= n {
        return Err(ScenarioError::InvalidArity { n, k });
    }
    let names: Vec<String> = (0..n).map(|i| ancestor_name(i, n)).collect();
    let sources = combinations(n, k)
        .into_iter()
        .map(|c| {
            let name = if n <= 26 {
                c.iter()
                    .map(|&i| names[i].to_uppercase())
                    .collect::<String>()
            } else {
                format!(
                    "S_{}",
                    c.iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join("_")
                )
            };
            SourceSpec {
                name,
                connects: c.iter().map(|&i| names[i].clone()).collect(),
            }
        })
        .collect();
    let spec = ScenarioSpec {
        measurements: names
            .iter()
            .map(|n| Measurement {
                name: n.clone(),
                outcomes: d,
            })
            .collect(),
        sources,
    };
    validate_scenario(&spec, false)
}

/// Standard named scenarios.
pub mod standard {
    use super::*;

    fn make(m: &[(&str, usize)], s: &[(&str, &[&str])]) -> Scenario {
        Scenario::from_parts(m, s).expect("standard scenario is valid")
    }

    /// Bell scenario as a path `x - a - b - y`.
    pub fn p4(d: usize) -> Scenario {
        make(
            &[("x", d), ("a", d), ("b", d), ("y", d)],
            &[
                ("XA", &["x", "a"]),
                ("AB", &["a", "b"]),
                ("BY", &["b", "y"]),
            ],
        )
    }

    /// Bilocality scenario as a path `x - a - b - c - z`.
    pub fn p5(d: usize) -> Scenario {
        make(
            &[("x", d), ("a", d), ("b", d), ("c", d), ("z", d)],
            &[
                ("XA", &["x", "a"]),
                ("AB", &["a", "b"]),
                ("BC", &["b", "c"]),
                ("CZ", &["c", "z"]),
            ],
        )
    }

    pub fn c3(d: usize) -> Scenario {
        make(
            &[("a", d), ("b", d), ("c", d)],
            &[
                ("AB", &["a", "b"]),
                ("BC", &["b", "c"]),
                ("CA", &["c", "a"]),
            ],
        )
    }

    /// Square `a - b - y - x - a` with variables in order `(a, b, x, y)`.
    pub fn c4(d: usize) -> Scenario {
        make(
            &[("a", d), ("b", d), ("x", d), ("y", d)],
            &[
                ("AB", &["a", "b"]),
                ("BY", &["b", "y"]),
                ("YX", &["y", "x"]),
                ("XA", &["x", "a"]),
            ],
        )
    }

    /// Star with centre `a` and leaves `b1..bn`.
    pub fn star(n: usize, d: usize) -> Scenario {
        let mut spec = ScenarioSpec {
            measurements: vec![Measurement {
                name: "a".into(),
                outcomes: d,
            }],
            sources: Vec::new(),
        };
        for i in 1..=n {
            spec.measurements.push(Measurement {
                name: format!("b{i}"),
                outcomes: d,
            });
            spec.sources.push(SourceSpec {
                name: format!("AB{i}"),
                connects: vec!["a".into(), format!("b{i}")],
            });
        }
        Scenario::relaxed(&spec).expect("star scenario")
    }

    /// Multi-arm scenario: arms `x_i - a_i` plus one source on all `a_i`.
    /// Measurements are ordered `x1, a1, x2, a2, ...`.
    pub fn multiarm(k: usize, d: usize) -> Scenario {
        let mut spec = ScenarioSpec {
            measurements: Vec::new(),
            sources: Vec::new(),
        };
        for i in 1..=k {
            for name in [format!("x{i}"), format!("a{i}")] {
                spec.measurements.push(Measurement { name, outcomes: d });
            }
            spec.sources.push(SourceSpec {
                name: format!("XA{i}"),
                connects: vec![format!("x{i}"), format!("a{i}")],
            });
        }
        spec.sources.push(SourceSpec {
            name: "A".into(),
            connects: (1..=k).map(|i| format!("a{i}")).collect(),
        });
        validate_scenario(&spec, false).expect("multi-arm scenario")
    }

    /// Graph scenario from an edge list on vertices `v0..v{n-1}`.
    pub fn from_graph(n: usize, edges: &[(usize, usize)], d: usize) -> Scenario {
        let spec = ScenarioSpec {
            measurements: (0..n)
                .map(|i| Measurement {
                    name: format!("v{i}"),
                    outcomes: d,
                })
                .collect(),
            sources: edges
                .iter()
                .map(|&(u, w)| SourceSpec {
                    name: format!("E{u}_{w}"),
                    connects: vec![format!("v{u}"), format!("v{w}")],
                })
                .collect(),
        };
        Scenario::relaxed(&spec).expect("graph scenario")
    }
}
