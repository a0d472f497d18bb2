//! JSON formats for scenarios, distributions, classical and quantum models,
//! boxes and reports.
//!
//! Every document written carries `"schema_version"`. On input the field is
//! optional but, when present, must match [`SCHEMA_VERSION`]. Probabilities
//! may be JSON numbers or strings such as `"1/3"` or `"0.125"`. Tables are
//! dense with the last index fastest.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::bell::{BellError, BgpClassical, BgpModel, BgpQuantum, ConditionalBox};
use crate::dist::{DistError, Distribution, Variable};
use crate::models::{ClassicalModel, ModelError};
use crate::quantum::matrix::{c, CMatrix};
use crate::quantum::{QuantumError, QuantumModel};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};
use crate::scenario::{validate_scenario, Scenario, ScenarioError, ScenarioSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("malformed document: {0}")]
    Format(String),
    #[error("unsupported schema_version {0}, expected {SCHEMA_VERSION}")]
    SchemaVersion(u64),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Bell(#[from] BellError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json(e.to_string())
    }
}

fn fmt_err(msg: impl Into<String>) -> IoError {
    IoError::Format(msg.into())
}

/// Parses text and checks the schema version.
pub fn parse_document(text: &str) -> Result<Value, IoError> {
    let v: Value = serde_json::from_str(text)?;
    check_version(&v)?;
    Ok(v)
}

fn check_version(v: &Value) -> Result<(), IoError> {
    match v.get("schema_version") {
        None => Ok(()),
        Some(s) => match s.as_u64() {
            Some(n) if n == SCHEMA_VERSION as u64 => Ok(()),
            Some(n) => Err(IoError::SchemaVersion(n)),
            None => Err(fmt_err("schema_version must be an integer")),
        },
    }
}

/// Serializes `value` as an object with `schema_version` first.
pub fn with_version<S: Serialize>(value: &S) -> Value {
    let inner = serde_json::to_value(value).expect("serializable");
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    match inner {
        Value::Object(o) => m.extend(o),
        other => {
            m.insert("result".into(), other);
        }
    }
    Value::Object(m)
}

/// Scalars with a JSON representation: floats as numbers, rationals as
/// `"p/q"` strings.
pub trait JsonScalar: Scalar {
    fn from_json(v: &Value) -> Result<Self, IoError>;
    fn to_json(&self) -> Value;
}

impl JsonScalar for f64 {
    fn from_json(v: &Value) -> Result<Self, IoError> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| fmt_err("number out of range")),
            Value::String(s) => parse_rational(s)
                .map(|r| r.as_f64())
                .ok_or_else(|| fmt_err(format!("cannot parse number `{s}`"))),
            _ => Err(fmt_err("expected a number")),
        }
    }

    fn to_json(&self) -> Value {
        json!(self)
    }
}

impl JsonScalar for Rational {
    fn from_json(v: &Value) -> Result<Self, IoError> {
        match v {
            Value::Number(n) => parse_rational(&n.to_string())
                .or_else(|| n.as_f64().map(Rational::from_real))
                .ok_or_else(|| fmt_err("number out of range")),
            Value::String(s) => {
                parse_rational(s).ok_or_else(|| fmt_err(format!("cannot parse rational `{s}`")))
            }
            _ => Err(fmt_err("expected a number or a rational string")),
        }
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, IoError> {
    v.get(key)
        .ok_or_else(|| fmt_err(format!("missing field `{key}`")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array()
        .ok_or_else(|| fmt_err(format!("`{what}` must be an array")))
}

fn usize_of(v: &Value, what: &str) -> Result<usize, IoError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| fmt_err(format!("`{what}` must be a non-negative integer")))
}

fn usizes(v: &Value, what: &str) -> Result<Vec<usize>, IoError> {
    array(v, what)?.iter().map(|x| usize_of(x, what)).collect()
}

fn scalars<T: JsonScalar>(v: &Value, what: &str) -> Result<Vec<T>, IoError> {
    array(v, what)?.iter().map(T::from_json).collect()
}

fn scalar_table<T: JsonScalar>(v: &Value, what: &str) -> Result<Vec<Vec<T>>, IoError> {
    array(v, what)?.iter().map(|r| scalars(r, what)).collect()
}

// Scenarios.

/// Reads a scenario, validating it in the given mode.
pub fn scenario_from_json(v: &Value, strict: bool) -> Result<Scenario, IoError> {
    let spec = scenario_spec_from_json(v)?;
    Ok(validate_scenario(&spec, strict)?)
}

pub fn scenario_spec_from_json(v: &Value) -> Result<ScenarioSpec, IoError> {
    check_version(v)?;
    let mut v = v.clone();
    if let Value::Object(o) = &mut v {
        o.remove("schema_version");
    }
    Ok(serde_json::from_value(v)?)
}

pub fn scenario_to_json(s: &Scenario) -> Value {
    with_version(&s.to_spec())
}

// Distributions.

/// Reads the dense form (`variables`, `cardinalities`, `probabilities`) or
/// the sparse form (`variables`, `cardinalities`, `support`).
pub fn distribution_from_json<T: JsonScalar>(v: &Value) -> Result<Distribution<T>, IoError> {
    check_version(v)?;
    let names = array(field(v, "variables")?, "variables")?
        .iter()
        .map(|n| {
            n.as_str()
                .map(str::to_string)
                .ok_or_else(|| fmt_err("variable names must be strings"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cards = usizes(field(v, "cardinalities")?, "cardinalities")?;
    if names.len() != cards.len() {
        return Err(fmt_err("`variables` and `cardinalities` differ in length"));
    }
    let variables: Vec<Variable> = names
        .iter()
        .zip(&cards)
        .map(|(n, &c)| Variable::new(n.clone(), c))
        .collect();
    let eps = match v.get("eps") {
        Some(e) => e
            .as_f64()
            .ok_or_else(|| fmt_err("`eps` must be a number"))?,
        None => crate::dist::DEFAULT_EPS,
    };
    let probabilities = if let Some(p) = v.get("probabilities") {
        scalars(p, "probabilities")?
    } else if let Some(sup) = v.get("support") {
        let len: usize = cards.iter().product();
        let mut probs = vec![T::zero(); len];
        for entry in array(sup, "support")? {
            let values = usizes(field(entry, "values")?, "values")?;
            if values.len() != cards.len() || values.iter().zip(&cards).any(|(&x, &c)| x >= c) {
                return Err(fmt_err(format!("support tuple {values:?} is out of range")));
            }
            let i = crate::dist::flat_index(&cards, &values);
            probs[i] = probs[i].clone() + T::from_json(field(entry, "p")?)?;
        }
        probs
    } else {
        return Err(fmt_err("expected `probabilities` or `support`"));
    };
    Ok(Distribution::with_eps(variables, probabilities, eps)?)
}

pub fn distribution_to_json<T: JsonScalar>(p: &Distribution<T>) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "variables": p.names(),
        "cardinalities": p.cardinalities(),
        "probabilities": p.probabilities().iter().map(T::to_json).collect::<Vec<_>>(),
    })
}

// Classical models.

/// Model document: the scenario inline, one probability vector per source,
/// and per measurement a flat kernel whose rows are indexed by the hidden
/// values of its sources (in scenario source order, last fastest).
pub fn model_from_json<T: JsonScalar>(v: &Value) -> Result<ClassicalModel<T>, IoError> {
    check_version(v)?;
    let s = Scenario::relaxed(&scenario_spec_from_json(field(v, "scenario")?)?)?;
    let sources = scalar_table(field(v, "sources")?, "sources")?;
    let kernels = scalar_table(field(v, "kernels")?, "kernels")?;
    Ok(ClassicalModel::new(s, sources, kernels)?)
}

pub fn model_to_json<T: JsonScalar>(m: &ClassicalModel<T>) -> Value {
    let table = |rows: &[Vec<T>]| -> Vec<Vec<Value>> {
        rows.iter()
            .map(|r| r.iter().map(T::to_json).collect())
            .collect()
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": serde_json::to_value(m.scenario().to_spec()).expect("serializable"),
        "source_cardinalities": m.source_cardinalities(),
        "sources": table(m.source_dists()),
        "kernels": table(m.kernels()),
    })
}

// Complex matrices.

fn complex_from_json(v: &Value) -> Result<num_complex::Complex64, IoError> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            Ok(c(f64::from_json(&pair[0])?, f64::from_json(&pair[1])?))
        }
        Value::Number(_) | Value::String(_) => Ok(c(f64::from_json(v)?, 0.0)),
        _ => Err(fmt_err("complex entries must be [re, im]")),
    }
}

pub fn matrix_from_json(v: &Value) -> Result<CMatrix, IoError> {
    let rows = array(v, "matrix")?;
    let n = rows.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        let r = array(r, "matrix row")?;
        if r.len() != n {
            return Err(fmt_err("matrices must be square"));
        }
        for (j, e) in r.iter().enumerate() {
            m[(i, j)] = complex_from_json(e)?;
        }
    }
    Ok(m)
}

pub fn matrix_to_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn matrices_from_json(v: &Value, what: &str) -> Result<Vec<CMatrix>, IoError> {
    array(v, what)?.iter().map(matrix_from_json).collect()
}

fn matrix_lists_from_json(v: &Value, what: &str) -> Result<Vec<Vec<CMatrix>>, IoError> {
    array(v, what)?
        .iter()
        .map(|l| matrices_from_json(l, what))
        .collect()
}

fn matrices_to_json(ms: &[CMatrix]) -> Value {
    Value::Array(ms.iter().map(matrix_to_json).collect())
}

// Quantum models.

/// Quantum model document: the scenario inline, per source the dimensions of
/// its subsystems (in the order of `connects`), one density matrix per
/// source and one POVM per measurement.
pub fn quantum_from_json(v: &Value) -> Result<QuantumModel, IoError> {
    check_version(v)?;
    let s = Scenario::relaxed(&scenario_spec_from_json(field(v, "scenario")?)?)?;
    let dims = array(field(v, "dims")?, "dims")?
        .iter()
        .map(|d| usizes(d, "dims"))
        .collect::<Result<Vec<_>, _>>()?;
    let states = matrices_from_json(field(v, "states")?, "states")?;
    let povms = matrix_lists_from_json(field(v, "povms")?, "povms")?;
    Ok(QuantumModel::new(s, dims, states, povms)?)
}

pub fn quantum_to_json(q: &QuantumModel) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": serde_json::to_value(q.scenario().to_spec()).expect("serializable"),
        "dims": q.connection_dims(),
        "states": matrices_to_json(q.states()),
        "povms": q.povms().iter().map(|p| matrices_to_json(p)).collect::<Vec<_>>(),
    })
}

// Boxes.

pub fn box_from_json(v: &Value) -> Result<ConditionalBox, IoError> {
    check_version(v)?;
    #[derive(Deserialize)]
    struct Raw {
        parties: Vec<crate::bell::Party>,
        table: Vec<Value>,
    }
    let raw: Raw = serde_json::from_value(v.clone())?;
    let table = raw
        .table
        .iter()
        .map(f64::from_json)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConditionalBox::new(raw.parties, table)?)
}

pub fn box_to_json(b: &ConditionalBox) -> Value {
    with_version(b)
}

// Bilocal models.

/// Either `{"kind":"classical", px, pz, lambda1, lambda2, alice, bob,
/// charlie}` with kernels indexed `[setting or λ][λ][outcome]`, or
/// `{"kind":"quantum", rho1, rho2, alice, middle, charlie, px, pz}`.
pub fn bgp_from_json(v: &Value) -> Result<BgpModel, IoError> {
    check_version(v)?;
    let kind = field(v, "kind")?
        .as_str()
        .ok_or_else(|| fmt_err("`kind` must be a string"))?;
    let kernel = |key: &str| -> Result<Vec<Vec<Vec<f64>>>, IoError> {
        array(field(v, key)?, key)?
            .iter()
            .map(|m| scalar_table(m, key))
            .collect()
    };
    match kind {
        "classical" => Ok(BgpModel::Classical(BgpClassical {
            px: scalars(field(v, "px")?, "px")?,
            pz: scalars(field(v, "pz")?, "pz")?,
            lambda1: scalars(field(v, "lambda1")?, "lambda1")?,
            lambda2: scalars(field(v, "lambda2")?, "lambda2")?,
            alice: kernel("alice")?,
            bob: kernel("bob")?,
            charlie: kernel("charlie")?,
        })),
        "quantum" => Ok(BgpModel::Quantum(BgpQuantum {
            rho1: matrix_from_json(field(v, "rho1")?)?,
            rho2: matrix_from_json(field(v, "rho2")?)?,
            alice: matrix_lists_from_json(field(v, "alice")?, "alice")?,
            middle: matrices_from_json(field(v, "middle")?, "middle")?,
            charlie: matrix_lists_from_json(field(v, "charlie")?, "charlie")?,
            px: scalars(field(v, "px")?, "px")?,
            pz: scalars(field(v, "pz")?, "pz")?,
        })),
        other => Err(fmt_err(format!("unknown bilocal model kind `{other}`"))),
    }
}

pub fn bgp_to_json(m: &BgpModel) -> Value {
    match m {
        BgpModel::Classical(b) => json!({
            "schema_version": SCHEMA_VERSION,
            "kind": "classical",
            "px": b.px, "pz": b.pz,
            "lambda1": b.lambda1, "lambda2": b.lambda2,
            "alice": b.alice, "bob": b.bob, "charlie": b.charlie,
        }),
        BgpModel::Quantum(q) => json!({
            "schema_version": SCHEMA_VERSION,
            "kind": "quantum",
            "rho1": matrix_to_json(&q.rho1),
            "rho2": matrix_to_json(&q.rho2),
            "alice": q.alice.iter().map(|l| matrices_to_json(l)).collect::<Vec<_>>(),
            "middle": matrices_to_json(&q.middle),
            "charlie": q.charlie.iter().map(|l| matrices_to_json(l)).collect::<Vec<_>>(),
            "px": q.px, "pz": q.pz,
        }),
    }
}

/// JSON schemas of the input documents, printed by `--schema`.
pub fn schemas() -> Value {
    let number = json!({"oneOf": [{"type": "number"}, {"type": "string", "pattern": "^-?[0-9]+(/[0-9]+|\\.[0-9]+)?$"}]});
    let name = json!({"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_]*$"});
    let version = json!({"const": SCHEMA_VERSION});
    let complex =
        json!({"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2});
    let matrix = json!({"type": "array", "items": {"type": "array", "items": complex}});
    let scenario = json!({
        "type": "object",
        "required": ["measurements", "sources"],
        "properties": {
            "schema_version": version,
            "measurements": {"type": "array", "items": {
                "type": "object", "required": ["name", "outcomes"],
                "properties": {"name": name, "outcomes": {"type": "integer", "minimum": 1}}}},
            "sources": {"type": "array", "items": {
                "type": "object", "required": ["name", "connects"],
                "properties": {"name": name, "connects": {"type": "array", "items": name}}}}
        }
    });
    json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": scenario,
        "distribution": {
            "type": "object",
            "required": ["variables", "cardinalities"],
            "description": "dense table, last variable fastest; or sparse `support` list",
            "properties": {
                "schema_version": version,
                "variables": {"type": "array", "items": name},
                "cardinalities": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "probabilities": {"type": "array", "items": number},
                "support": {"type": "array", "items": {
                    "type": "object", "required": ["values", "p"],
                    "properties": {"values": {"type": "array", "items": {"type": "integer"}}, "p": number}}},
                "eps": {"type": "number"}
            }
        },
        "classical_model": {
            "type": "object",
            "required": ["scenario", "sources", "kernels"],
            "description": "kernel rows indexed by the hidden values of the measurement's sources in scenario order, last fastest",
            "properties": {
                "schema_version": version,
                "scenario": scenario,
                "source_cardinalities": {"type": "array", "items": {"type": "integer"}},
                "sources": {"type": "array", "items": {"type": "array", "items": number}},
                "kernels": {"type": "array", "items": {"type": "array", "items": number}}
            }
        },
        "quantum_model": {
            "type": "object",
            "required": ["scenario", "dims", "states", "povms"],
            "description": "complex entries as [re, im]; dims per source in the order of `connects`",
            "properties": {
                "schema_version": version,
                "scenario": scenario,
                "dims": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                "states": {"type": "array", "items": matrix},
                "povms": {"type": "array", "items": {"type": "array", "items": matrix}}
            }
        },
        "box": {
            "type": "object",
            "required": ["parties", "table"],
            "description": "row-major over all settings, then all outcomes",
            "properties": {
                "schema_version": version,
                "parties": {"type": "array", "items": {
                    "type": "object", "required": ["settings", "outcomes"],
                    "properties": {"settings": {"type": "integer"}, "outcomes": {"type": "integer"}}}},
                "table": {"type": "array", "items": number}
            }
        },
        "bilocal_model": {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"enum": ["classical", "quantum"]}}
        }
    })
}
