//! Command-line interface. Every command prints a single JSON document.
//!
//! Exit codes: 0 success, consistent or classical; 3 non-classical or a
//! violation; 2 inconclusive within the budget; 1 input error.

use std::io::Read;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bell::{
    box_from_correlation, decide_ak, decide_p4, embed_bell_to_ak, embed_bell_to_p4,
    embed_bgp_to_p5, pr_box, pr_square, time_reverse_model, time_reverse_relabel, BellDecision,
};
use crate::correlation::is_correlation;
use crate::dist::{Distribution, JointDistribution};
use crate::io::{self, JsonScalar, SCHEMA_VERSION};
use crate::models::support::{search_support, DEFAULT_NODE_BUDGET};
use crate::models::{
    determinize, fit_probabilities, interpolate, ClassicalModel, FitOptions, FitOutcome,
    SearchOptions, SupportOutcome, SupportPattern,
};
use crate::quantum::constructions::c3_quantum;
use crate::quantum::DEFAULT_DIMENSION_BUDGET;
use crate::scalar::{parse_rational, Rational};
use crate::scenario::standard::p4;
use crate::scenario::{classify_graph_scenario, validate_scenario, Scenario, ScenarioError};
use crate::witnesses::{
    ancestor_witness, entropic_triangle_witness, hardy_c4_witness, monogamy_chsh_witness,
    perfect_correlation, AncestorOptions, Verdict, WitnessError, WitnessReport,
};

pub const BUDGET_ENV: &str = "CORRSCEN_BUDGET_NODES";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_NONCLASSICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "corrscen",
    version,
    about = "Correlation scenarios with independent sources"
)]
pub struct Cli {
    /// Print the JSON schemas of all input documents and exit.
    #[arg(long)]
    pub schema: bool,
    /// Fix all random seeds so that identical inputs give identical output.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Reject redundant structure such as sources with a single measurement.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Wall-clock limit in seconds for searches and fits; hitting it gives
    /// an inconclusive result.
    #[arg(long, global = true, value_name = "SECONDS")]
    pub time_limit: Option<f64>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check structural conditions on a scenario.
    ValidateScenario {
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Check the independence conditions of a correlation.
    CheckCorrelation {
        #[command(flatten)]
        input: ScenarioDist,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Star forest or an induced C3, C4 or P4.
    ClassifyScenario {
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Decide classicality of a Bell-shaped correlation.
    Decide {
        #[arg(value_enum)]
        shape: DecideShape,
        #[arg(long)]
        dist: Option<PathBuf>,
        /// Number of arms for `ak`.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Run a non-classicality witness.
    Witness {
        #[arg(value_enum)]
        kind: WitnessChoice,
        #[command(flatten)]
        input: ScenarioDist,
        /// Sources may be shared by at most this many variables (`ancestor`).
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        max_nodes: Option<u64>,
    },
    /// Search a classical model reproducing a correlation or its support.
    SearchModel {
        #[command(flatten)]
        input: ScenarioDist,
        /// Only match the support, with 0/1 kernels.
        #[arg(long)]
        support: bool,
        /// Hidden cardinality per source.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        max_nodes: Option<u64>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        eps_fit: Option<f64>,
    },
    /// Generate standard documents.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Transform models and correlations.
    Transform {
        #[command(subcommand)]
        what: TransformCommand,
    },
    /// Evaluate a model to its correlation.
    Eval {
        #[arg(value_enum)]
        kind: EvalKind,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Evaluate a classical model in exact arithmetic.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        dim_budget: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct ScenarioDist {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Distribution document; standard input when omitted or `-`.
    #[arg(long)]
    pub dist: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DecideShape {
    P4,
    Ak,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WitnessChoice {
    Entropy,
    ChshC3,
    HardyC4,
    Ancestor,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EvalKind {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PrForm {
    /// Correlation on the square.
    Square,
    /// Correlation on the path with uniform settings.
    Path,
    /// The conditional box.
    Box,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum C3Form {
    Dist,
    Model,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// The PR box, by default as a correlation on the square.
    PrBox {
        #[arg(long = "as", value_enum, default_value_t = PrForm::Square)]
        form: PrForm,
    },
    /// Three perfectly correlated uniform bits.
    Perfect,
    /// The entangled triangle construction.
    QuantumC3 {
        #[arg(long = "as", value_enum, default_value_t = C3Form::Dist)]
        form: C3Form,
    },
    /// Embed a box as a path (two parties) or star correlation.
    EmbedBell {
        #[arg(long = "box")]
        box_path: Option<PathBuf>,
        /// Setting distributions, one comma-separated list per party joined
        /// by `;`. Uniform when omitted.
        #[arg(long)]
        inputs: Option<String>,
        /// Force the star form even for two parties.
        #[arg(long)]
        star: bool,
    },
    /// Embed a bilocal model as a correlation on `x – a – b – c – z`.
    EmbedBgp {
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum TransformCommand {
    /// Replace every source by its deterministic refinement.
    Determinize {
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// The model family connecting two models, at parameter `t`.
    Interpolate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        other: PathBuf,
        /// Rational such as `1/4` or a decimal.
        #[arg(long, default_value = "1/2")]
        t: String,
    },
    /// Swap the roles of settings and outcomes of a path correlation or model.
    TimeReverse {
        #[arg(long)]
        dist: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

/// Exit code and output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Res = Result<(i32, Value), Failure>;

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
    strict: bool,
    deterministic: bool,
    deadline: Option<Instant>,
}

impl Ctx<'_> {
    fn read(&mut self, path: Option<&PathBuf>) -> Result<Value, Failure> {
        let text = match path {
            Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
                .map_err(|e| Failure(format!("cannot read {}: {e}", p.display())))?,
            _ => {
                if self.stdin_used {
                    return Err(Failure("standard input can only be read once".into()));
                }
                self.stdin_used = true;
                let mut s = String::new();
                self.stdin.read_to_string(&mut s)?;
                s
            }
        };
        Ok(io::parse_document(&text)?)
    }

    fn scenario(&mut self, path: Option<&PathBuf>) -> Result<Scenario, Failure> {
        let v = self.read(path)?;
        Ok(io::scenario_from_json(&v, self.strict)?)
    }

    fn dist<T: JsonScalar>(&mut self, path: Option<&PathBuf>) -> Result<Distribution<T>, Failure> {
        let v = self.read(path)?;
        Ok(io::distribution_from_json(&v)?)
    }
}

fn node_budget(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(n) = flag {
        return positive(n);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => positive(
            v.trim()
                .parse()
                .map_err(|_| Failure(format!("{BUDGET_ENV} must be a positive integer")))?,
        ),
        Err(_) => Ok(DEFAULT_NODE_BUDGET),
    }
}

fn positive(n: u64) -> Result<u64, Failure> {
    if n == 0 {
        Err(Failure("budgets must be positive".into()))
    } else {
        Ok(n)
    }
}

fn report_code(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::NonClassical => EXIT_NONCLASSICAL,
        Verdict::Consistent => EXIT_OK,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn witness_value(r: &WitnessReport) -> Value {
    io::with_version(r)
}

/// Reorders `p` to the scenario's measurement order when a scenario is given.
fn aligned<T: crate::scalar::Scalar>(
    s: Option<&Scenario>,
    p: Distribution<T>,
) -> Result<Distribution<T>, Failure> {
    match s {
        Some(s) => Ok(p.reorder(&s.measurement_names()).map_err(|_| {
            Failure("distribution variables do not match the scenario measurements".into())
        })?),
        None => Ok(p),
    }
}

fn parse_inputs(text: &str) -> Result<Vec<Vec<f64>>, Failure> {
    text.split(';')
        .map(|party| {
            party
                .split(',')
                .map(|x| {
                    parse_rational(x)
                        .map(|r| crate::scalar::Scalar::as_f64(&r))
                        .ok_or_else(|| Failure(format!("cannot parse probability `{x}`")))
                })
                .collect()
        })
        .collect()
}

fn decision_value(d: &BellDecision) -> (i32, Value) {
    match d {
        BellDecision::Classical { model } => (
            EXIT_OK,
            json!({
                "schema_version": SCHEMA_VERSION,
                "verdict": "Classical",
                "model": io::model_to_json(model),
            }),
        ),
        BellDecision::NonClassical { certificate } => (
            EXIT_NONCLASSICAL,
            json!({
                "schema_version": SCHEMA_VERSION,
                "verdict": "NonClassical",
                "certificate": serde_json::to_value(certificate).expect("serializable"),
            }),
        ),
    }
}

fn execute(cmd: Command, ctx: &mut Ctx) -> Res {
    match cmd {
        Command::ValidateScenario { scenario } => {
            let v = ctx.read(scenario.as_ref())?;
            let spec = io::scenario_spec_from_json(&v)?;
            match validate_scenario(&spec, ctx.strict) {
                Ok(s) => Ok((
                    EXIT_OK,
                    json!({
                        "schema_version": SCHEMA_VERSION,
                        "valid": true,
                        "measurements": s.num_measurements(),
                        "sources": s.num_sources(),
                    }),
                )),
                Err(ScenarioError::Invalid(violations)) => Ok((
                    EXIT_INPUT,
                    json!({
                        "schema_version": SCHEMA_VERSION,
                        "valid": false,
                        "violations": violations,
                        "messages": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    }),
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::CheckCorrelation { input, eps } => {
            let s = ctx.scenario(input.scenario.as_ref())?;
            let mut p: JointDistribution = ctx.dist(input.dist.as_ref())?;
            if let Some(e) = eps {
                if !(e.is_finite() && e >= 0.0) {
                    return Err(Failure("eps must be a non-negative number".into()));
                }
                p.set_eps(e);
            }
            let r = is_correlation(&s, &p)?;
            let code = if r.is_correlation {
                EXIT_OK
            } else {
                EXIT_NONCLASSICAL
            };
            Ok((code, io::with_version(&r)))
        }
        Command::ClassifyScenario { scenario } => {
            let s = ctx.scenario(scenario.as_ref())?;
            let c = classify_graph_scenario(&s)?;
            Ok((EXIT_OK, io::with_version(&c)))
        }
        Command::Decide { shape, dist, k } => {
            let p: JointDistribution = ctx.dist(dist.as_ref())?;
            let d = match shape {
                DecideShape::P4 => decide_p4(&p)?,
                DecideShape::Ak => {
                    let k = k.ok_or_else(|| Failure("`decide ak` needs --k".into()))?;
                    decide_ak(&p, k)?
                }
            };
            Ok(decision_value(&d))
        }
        Command::Witness {
            kind,
            input,
            k,
            max_nodes,
        } => {
            let s = match &input.scenario {
                Some(path) => Some(ctx.scenario(Some(path))?),
                None => None,
            };
            match kind {
                WitnessChoice::Entropy => {
                    let p: Distribution<Rational> =
                        aligned(s.as_ref(), ctx.dist(input.dist.as_ref())?)?;
                    let reports = entropic_triangle_witness(&p)?;
                    let verdict = if reports.iter().any(|r| r.is_nonclassical()) {
                        Verdict::NonClassical
                    } else {
                        Verdict::Consistent
                    };
                    Ok((
                        report_code(verdict),
                        json!({
                            "schema_version": SCHEMA_VERSION,
                            "verdict": verdict,
                            "reports": reports.iter().map(|r| serde_json::to_value(r).expect("serializable")).collect::<Vec<_>>(),
                        }),
                    ))
                }
                WitnessChoice::ChshC3 => {
                    let p: JointDistribution = aligned(s.as_ref(), ctx.dist(input.dist.as_ref())?)?;
                    match monogamy_chsh_witness(&p, None) {
                        Ok(r) => Ok((report_code(r.verdict), witness_value(&r))),
                        Err(WitnessError::MissingDecomposition) => Ok((
                            EXIT_INCONCLUSIVE,
                            json!({
                                "schema_version": SCHEMA_VERSION,
                                "verdict": Verdict::Inconclusive,
                                "kind": "monogamy_chsh",
                                "error": "MissingDecomposition",
                                "message": WitnessError::MissingDecomposition.to_string(),
                            }),
                        )),
                        Err(e) => Err(e.into()),
                    }
                }
                WitnessChoice::HardyC4 => {
                    let p: JointDistribution = aligned(s.as_ref(), ctx.dist(input.dist.as_ref())?)?;
                    let r = hardy_c4_witness(&p)?;
                    Ok((report_code(r.verdict), witness_value(&r)))
                }
                WitnessChoice::Ancestor => {
                    let p: JointDistribution = aligned(s.as_ref(), ctx.dist(input.dist.as_ref())?)?;
                    let opts = AncestorOptions {
                        k,
                        search: SearchOptions {
                            node_budget: node_budget(max_nodes)?,
                            use_reduction: true,
                            deadline: ctx.deadline,
                        },
                    };
                    let r = ancestor_witness(&p, opts)?;
                    Ok((report_code(r.verdict), witness_value(&r)))
                }
            }
        }
        Command::SearchModel {
            input,
            support,
            k,
            max_nodes,
            restarts,
            seed,
            eps_fit,
        } => {
            let s = ctx.scenario(input.scenario.as_ref())?;
            let p: JointDistribution = ctx.dist(input.dist.as_ref())?;
            if support {
                let sp = SupportPattern::from_distribution(&p);
                let k = k.unwrap_or(sp.len());
                let opts = SearchOptions {
                    node_budget: node_budget(max_nodes)?,
                    use_reduction: true,
                    deadline: ctx.deadline,
                };
                let (outcome, nodes) = search_support(&s, &sp, k, opts)?;
                let complete = k >= sp.len();
                Ok(match outcome {
                    SupportOutcome::Realizable(m) => (
                        EXIT_OK,
                        json!({
                            "schema_version": SCHEMA_VERSION,
                            "outcome": "Realizable",
                            "nodes": nodes,
                            "model": io::model_to_json(&m),
                        }),
                    ),
                    SupportOutcome::NotRealizableUpTo(k) => (
                        if complete {
                            EXIT_NONCLASSICAL
                        } else {
                            EXIT_INCONCLUSIVE
                        },
                        json!({
                            "schema_version": SCHEMA_VERSION,
                            "outcome": "NotRealizableUpTo",
                            "k": k,
                            "complete": complete,
                            "nodes": nodes,
                        }),
                    ),
                    SupportOutcome::Inconclusive { nodes } => (
                        EXIT_INCONCLUSIVE,
                        json!({
                            "schema_version": SCHEMA_VERSION,
                            "outcome": "Inconclusive",
                            "nodes": nodes,
                        }),
                    ),
                })
            } else {
                let mut opts = FitOptions {
                    deadline: ctx.deadline,
                    ..FitOptions::default()
                };
                if let Some(k) = k {
                    opts.k = k;
                }
                if let Some(r) = restarts {
                    opts.restarts = r;
                }
                if let Some(e) = eps_fit {
                    opts.eps_fit = e;
                }
                opts.seed = if ctx.deterministic {
                    0
                } else {
                    seed.unwrap_or(0)
                };
                Ok(match fit_probabilities(&s, &p, &opts)? {
                    FitOutcome::Model { model, residual } => (
                        EXIT_OK,
                        json!({
                            "schema_version": SCHEMA_VERSION,
                            "outcome": "Model",
                            "residual": residual,
                            "model": io::model_to_json(&model),
                        }),
                    ),
                    FitOutcome::Inconclusive { best_residual } => (
                        EXIT_INCONCLUSIVE,
                        json!({
                            "schema_version": SCHEMA_VERSION,
                            "outcome": "Inconclusive",
                            "best_residual": best_residual,
                        }),
                    ),
                })
            }
        }
        Command::Gen { what } => generate(what, ctx),
        Command::Transform { what } => transform(what, ctx),
        Command::Eval {
            kind,
            model,
            exact,
            dim_budget,
        } => {
            let v = ctx.read(model.as_ref())?;
            match kind {
                EvalKind::Classical if exact => {
                    let m: ClassicalModel<Rational> = io::model_from_json(&v)?;
                    Ok((EXIT_OK, io::distribution_to_json(&m.evaluate())))
                }
                EvalKind::Classical => {
                    let m: ClassicalModel<f64> = io::model_from_json(&v)?;
                    Ok((EXIT_OK, io::distribution_to_json(&m.evaluate())))
                }
                EvalKind::Quantum => {
                    let q = io::quantum_from_json(&v)?;
                    let budget = dim_budget.unwrap_or(DEFAULT_DIMENSION_BUDGET);
                    if budget == 0 {
                        return Err(Failure("budgets must be positive".into()));
                    }
                    Ok((
                        EXIT_OK,
                        io::distribution_to_json(&q.evaluate_with_budget(budget)?),
                    ))
                }
            }
        }
    }
}

fn generate(what: GenCommand, ctx: &mut Ctx) -> Res {
    let out = match what {
        GenCommand::PrBox { form } => match form {
            PrForm::Square => io::distribution_to_json(&pr_square()),
            PrForm::Path => {
                io::distribution_to_json(&embed_bell_to_p4(&pr_box(), &[0.5, 0.5], &[0.5, 0.5])?)
            }
            PrForm::Box => io::box_to_json(&pr_box()),
        },
        GenCommand::Perfect => io::distribution_to_json(&perfect_correlation()),
        GenCommand::QuantumC3 { form } => match form {
            C3Form::Dist => io::distribution_to_json(&c3_quantum().evaluate()?),
            C3Form::Model => io::quantum_to_json(&c3_quantum()),
        },
        GenCommand::EmbedBell {
            box_path,
            inputs,
            star,
        } => {
            let b = io::box_from_json(&ctx.read(box_path.as_ref())?)?;
            let inputs = match inputs {
                Some(t) => parse_inputs(&t)?,
                None => b
                    .setting_cards()
                    .iter()
                    .map(|&m| vec![1.0 / m as f64; m])
                    .collect(),
            };
            if inputs.len() != b.parties().len() {
                return Err(Failure(
                    "one input distribution per party is required".into(),
                ));
            }
            let p = if b.parties().len() == 2 && !star {
                embed_bell_to_p4(&b, &inputs[0], &inputs[1])?
            } else {
                embed_bell_to_ak(&b, &inputs)?
            };
            io::distribution_to_json(&p)
        }
        GenCommand::EmbedBgp { model } => {
            let m = io::bgp_from_json(&ctx.read(model.as_ref())?)?;
            io::distribution_to_json(&embed_bgp_to_p5(&m)?)
        }
    };
    Ok((EXIT_OK, out))
}

fn transform(what: TransformCommand, ctx: &mut Ctx) -> Res {
    match what {
        TransformCommand::Determinize { model } => {
            let m: ClassicalModel<Rational> = io::model_from_json(&ctx.read(model.as_ref())?)?;
            Ok((EXIT_OK, io::model_to_json(&determinize(&m))))
        }
        TransformCommand::Interpolate { model, other, t } => {
            let t = parse_rational(&t).ok_or_else(|| Failure(format!("cannot parse t = `{t}`")))?;
            let m0: ClassicalModel<Rational> = io::model_from_json(&ctx.read(Some(&model))?)?;
            let m1: ClassicalModel<Rational> = io::model_from_json(&ctx.read(Some(&other))?)?;
            Ok((EXIT_OK, io::model_to_json(&interpolate(&m0, &m1, t)?)))
        }
        TransformCommand::TimeReverse { dist, model } => match (dist, model) {
            (Some(_), Some(_)) => Err(Failure("pass either --dist or --model".into())),
            (None, Some(m)) => {
                let m: ClassicalModel<f64> = io::model_from_json(&ctx.read(Some(&m))?)?;
                if m.scenario().measurement_names() != p4(2).measurement_names() {
                    return Err(Failure("model must live on the path x – a – b – y".into()));
                }
                Ok((EXIT_OK, io::model_to_json(&time_reverse_model(&m)?)))
            }
            (d, None) => {
                let p: JointDistribution = ctx.dist(d.as_ref())?;
                let q = time_reverse_relabel(&p)?;
                let e = box_from_correlation(&q, &[("x", "a"), ("y", "b")])?;
                let mut out = io::distribution_to_json(&q);
                out["signaling_deviation"] =
                    json!(crate::bell::signaling_deviation(&e.conditional));
                Ok((EXIT_OK, out))
            }
        },
    }
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_INPUT,
                    stdout: render(&json!({
                        "schema_version": SCHEMA_VERSION,
                        "error": "usage",
                        "message": text.trim_end(),
                    })),
                    stderr: text,
                },
            };
        }
    };
    if cli.schema {
        return Outcome {
            code: EXIT_OK,
            stdout: render(&io::schemas()),
            stderr: String::new(),
        };
    }
    let Some(cmd) = cli.command else {
        return Outcome {
            code: EXIT_INPUT,
            stdout: render(&json!({
                "schema_version": SCHEMA_VERSION,
                "error": "usage",
                "message": "no command given; see --help",
            })),
            stderr: "no command given; see --help\n".into(),
        };
    };
    let deadline = match cli.time_limit {
        None => None,
        Some(t) if t.is_finite() && t > 0.0 => Some(Instant::now() + Duration::from_secs_f64(t)),
        Some(_) => {
            let msg = "--time-limit must be a positive number of seconds";
            return Outcome {
                code: EXIT_INPUT,
                stdout: render(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "error": "usage",
                    "message": msg,
                })),
                stderr: format!("{msg}\n"),
            };
        }
    };
    let mut ctx = Ctx {
        stdin,
        stdin_used: false,
        strict: cli.strict,
        deterministic: cli.deterministic,
        deadline,
    };
    let (code, doc) = match execute(cmd, &mut ctx) {
        Ok(r) => r,
        Err(Failure(msg)) => (
            EXIT_INPUT,
            json!({
                "schema_version": SCHEMA_VERSION,
                "error": "input",
                "message": msg,
            }),
        ),
    };
    let text = render(&doc);
    let stderr = doc
        .get("message")
        .filter(|_| code == EXIT_INPUT && doc.get("error").is_some())
        .and_then(Value::as_str)
        .map(|m| format!("error: {m}\n"))
        .unwrap_or_default();
    match cli.output {
        Some(path) => match std::fs::write(&path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => Outcome {
                code: EXIT_INPUT,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => Outcome {
            code,
            stdout: text,
            stderr,
        },
    }
}
