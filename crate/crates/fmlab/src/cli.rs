//! The `fmlab` command line.
//!
//! Reports go to standard output. Exit status is 0 on success, 1 when an
//! assertion subcommand (`types verify-*`, `indisc check`, `ramsey arrow`)
//! finds a counterexample, and 2 for usage, input and analysis errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fmlab_core::budget::DEFAULT_BUDGET;
use fmlab_core::classify::{self, AmalgamConfig, ClassContext, GoodOptions, Goodness, RefutationKind};
use fmlab_core::counting::{self, BoundReport, BoundValue};
use fmlab_core::detect::{self, IndependenceWitness};
use fmlab_core::indiscernible::{self, Extraction, Mode};
use fmlab_core::ramsey::{self, ExperimentConfig, Homogeneous, McRecord, RGraph};
use fmlab_core::tuples::tuples_over;
use fmlab_core::{Budget, Elem, Error, PartitionedFormula, PhiType, Search, Signature, Tuple, TupleSequence};
use serde::Serialize;
use serde_json::Value;

use crate::diag::Diagnostic;
use crate::fm::{parse_structure, StructureDocument};
use crate::fml::parse_formulas;
use crate::mc;
use crate::report::{self, big, rational, real, tuple, tuples, Report, REPORT_VERSION};

#[derive(Parser, Debug)]
#[command(name = "fmlab", version, about = "Local stability of first-order formulas in finite structures")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for Monte Carlo experiments. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Search budget in elementary steps.
    #[arg(long, global = true, env = "FMLAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Witness search for the independence, order, weak order and cover
    /// properties, and for splitting of a type.
    Detect(DetectArgs),
    /// Counting types over a parameter set and the type-count bounds under
    /// no order and no independence (Sauer–Shelah).
    #[command(subcommand)]
    Types(TypesCmd),
    /// Indiscernible sequences: checking, end-indiscernible and
    /// indiscernible extraction, and extraction length bounds.
    #[command(subcommand)]
    Indisc(IndiscCmd),
    /// Partition relations, homogeneous sets in hypergraphs without the
    /// independence property, and the hypergraph Ramsey bound comparison.
    #[command(subcommand)]
    Ramsey(RamseyCmd),
    /// The coupon-collector probability and the independence property in
    /// random graphs.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Good structures, averages of indiscernible sequences and the class
    /// relation, stable amalgamation and its symmetry.
    #[command(subcommand)]
    Classify(ClassifyCmd),
}

#[derive(Args, Debug, Serialize)]
pub struct Inputs {
    /// Structure file (`.fm`).
    #[arg(long)]
    pub structure: PathBuf,
    /// Formula file (`.fml`).
    #[arg(long)]
    pub formula: PathBuf,
    /// Declaration to use when the formula file holds several.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Independence,
    Order,
    WeakOrder,
    Cover,
    Splitting,
}

#[derive(Args, Debug, Serialize)]
pub struct DetectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub inputs: Inputs,
    #[arg(long, value_enum)]
    pub property: Property,
    /// Size of the independence witness.
    #[arg(long)]
    pub k: Option<usize>,
    /// Length of the order witness.
    #[arg(long)]
    pub n: Option<usize>,
    /// Length of the weak order witness.
    #[arg(long)]
    pub m: Option<usize>,
    /// Cover width: every fewer than `d` instances consistent.
    #[arg(long)]
    pub d: Option<usize>,
    /// Largest family tried by the cover search (default: all sizes).
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Named set of parameter tuples the cover search draws from.
    #[arg(long)]
    pub pool: Option<String>,
    /// Object tuple whose type is tested for splitting, as `e0,e1,…`.
    #[arg(long)]
    pub tuple: Option<String>,
    /// Named set of parameter tuples forming the domain of the type.
    #[arg(long)]
    pub params: Option<String>,
    /// Named set `B` the type may split over (default: empty).
    #[arg(long)]
    pub over: Option<String>,
    /// Formula file for the second component of splitting (default: the
    /// formula with its blocks swapped).
    #[arg(long)]
    pub delta1: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum TypesCmd {
    /// Number of realized types over `A^s`.
    Count(SetArgs),
    /// Type count bound without the `n`-order property.
    VerifyOrderBound(BoundArgs),
    /// Type count bound `|A|^{s(k-1)}` without the `k`-independence property.
    VerifyIndependenceBound(BoundArgs),
    /// A shattered `k`-subset of `A^s` in the family of realized types
    /// (Sauer–Shelah).
    Shatter(ShatterArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub inputs: Inputs,
    /// Named set of elements `A`.
    #[arg(long)]
    pub set: String,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub inputs: Inputs,
    #[arg(long)]
    pub set: String,
    /// `n` for the order bound, `k` for the independence bound.
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ShatterArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub inputs: Inputs,
    #[arg(long)]
    pub set: String,
    #[arg(long)]
    pub k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Sequence,
    Set,
    End,
}

#[derive(Subcommand, Debug)]
pub enum IndiscCmd {
    /// Is the sequence `(Δ, m)`-indiscernible over `A` (all formulas of the
    /// file form `Δ`)?
    Check(CheckArgs),
    /// Extract an end-indiscernible subsequence.
    ExtractEnd(ExtractArgs),
    /// Extract an indiscernible subsequence by iterating end extraction.
    Extract(ExtractArgs),
    /// Closed-form input lengths sufficient for extraction.
    Bounds(IndiscBoundsArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub inputs: Inputs,
    /// Named sequence.
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub m: usize,
    /// Named set of elements `A` (default: empty).
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Sequence)]
    pub mode: ModeArg,
}

#[derive(Args, Debug, Serialize)]
pub struct ExtractArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub inputs: Inputs,
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub set: Option<String>,
    /// Required output length.
    #[arg(long)]
    pub k: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct IndiscBoundsArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub k: u64,
    /// Exponent of a polynomial type count `F(i) = i^p`.
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    /// `n` of the missing independence or order property.
    #[arg(long, default_value_t = 2)]
    pub n: u64,
    #[arg(long, default_value_t = 1)]
    pub s: u64,
    #[arg(long, default_value_t = 1)]
    pub t: u64,
}

#[derive(Subcommand, Debug)]
pub enum RamseyCmd {
    /// Decide `x → (y)^a_b` exhaustively.
    Arrow(ArrowArgs),
    /// A homogeneous set in an `r`-graph given as a symmetric relation `R`.
    Homogeneous(HomogeneousArgs),
    /// Iterated logarithms of the two hypergraph Ramsey upper bounds.
    CompareBounds(CompareArgs),
    /// `E_p^{(j)}(x)` with `E(α) = (α+1)^{p(α+1)}`.
    EBound(EBoundArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ArrowArgs {
    #[arg(long)]
    pub x: usize,
    #[arg(long)]
    pub y: usize,
    #[arg(long)]
    pub a: usize,
    #[arg(long)]
    pub b: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct HomogeneousArgs {
    #[arg(long)]
    pub structure: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Require the graph to lack the `n`-independence property.
    #[arg(long)]
    pub certify: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct EBoundArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub j: u32,
    #[arg(long)]
    pub x: u64,
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCmd {
    /// `q(n, m)`: `n` balls in `m` boxes leave none empty.
    Coupon(CouponArgs),
    /// Monte Carlo probability that `G(n, p)` has the `k`-independence
    /// property.
    IndependenceMc(McArgs),
    /// The same probability along `n = k + ⌈2^k ln k⌉`.
    Thmg1(TrendArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CouponArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub m: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct McArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge probability.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct TrendArgs {
    /// Values of `k`, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    pub ks: Vec<usize>,
    #[arg(long, default_value_t = 2000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum ClassifyCmd {
    /// The closure `Δ*_n` of the formulas in a file.
    DeltaStar(DeltaStarArgs),
    /// `κ_{Δ,n}(M)` over sequences of length up to `max_len`.
    Kappa(KappaArgs),
    /// The average over `A` of an indiscernible sequence of parameters.
    Average(AverageArgs),
    /// Is the structure `(φ, n, d)`-good?
    Good(GoodArgs),
    /// `N ≺_K M` for two submodels.
    Prec(PrecArgs),
    /// Stable amalgamation of submodels `M0`, `M1`, `M2`.
    Amalgam(AmalgamArgs),
    /// Stable amalgamation with `M1` and `M2` exchanged.
    Symmetry(AmalgamArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct DeltaStarArgs {
    #[arg(long)]
    pub formula: PathBuf,
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct KappaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub inputs: Inputs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 6)]
    pub max_len: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct AverageArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub inputs: Inputs,
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long)]
    pub kappa: usize,
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct GoodArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub inputs: Inputs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 6)]
    pub max_len: usize,
    #[arg(long)]
    pub cover_n_max: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct ClassArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub inputs: Inputs,
    /// Named set of elements `A` (default: empty).
    #[arg(long)]
    pub set: Option<String>,
    /// Saturation width.
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    /// Also require the conditions for `ψ` and the negations.
    #[arg(long)]
    pub delta: bool,
    #[arg(long, default_value_t = 6)]
    pub max_len: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct PrecArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub class: ClassArgs,
    /// Submodel `N`.
    #[arg(long)]
    pub sub: String,
    /// Submodel `M` (default: the whole structure).
    #[arg(long)]
    pub sup: Option<String>,
    /// Indiscernibility over `A` rather than over the empty set.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct AmalgamArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub class: ClassArgs,
    #[arg(long, default_value = "M0")]
    pub m0: String,
    #[arg(long, default_value = "M1")]
    pub m1: String,
    #[arg(long, default_value = "M2")]
    pub m2: String,
}

/// Exit status, standard output and standard error of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{diag}")]
    Parse { path: String, diag: Diagnostic },
    #[error("{0}")]
    Core(#[from] Error),
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// What a command produced.
struct Output {
    name: &'static str,
    config: Value,
    result: Value,
    /// Assertion subcommands set this to false on a counterexample.
    passed: bool,
    table: Option<(Vec<&'static str>, Vec<Vec<Value>>)>,
}

impl Output {
    fn new(name: &'static str, config: &impl Serialize, result: impl Into<Value>) -> Self {
        Output { name, config: serde_json::to_value(config).expect("config serializes"), result: result.into(), passed: true, table: None }
    }

    fn assertion(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut warnings = String::new();
    match dispatch(&cli, &mut warnings) {
        Ok(out) => render(&cli, out, warnings),
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("{warnings}error: {e}\n") },
    }
}

/// True if any search in the result ran out of budget.
fn exhausted(v: &Value) -> bool {
    match v {
        Value::Object(m) => m.get("outcome").and_then(Value::as_str) == Some("budget-exhausted") || m.values().any(exhausted),
        Value::Array(a) => a.iter().any(exhausted),
        _ => false,
    }
}

fn render(cli: &Cli, out: Output, warnings: String) -> Outcome {
    let code = if exhausted(&out.result) {
        2
    } else if out.passed {
        0
    } else {
        1
    };
    let stdout = match cli.format {
        Format::Csv => match &out.table {
            Some((cols, rows)) => report::to_csv(cols, rows),
            None => return Outcome { code: 2, stdout: String::new(), stderr: format!("{warnings}error: {} has no CSV output\n", out.name) },
        },
        Format::Json | Format::Text => {
            let mut config = out.config;
            if let Value::Object(m) = &mut config {
                m.insert("budget".into(), Value::from(cli.budget));
            }
            let doc = Report::new()
                .with("fmlab_report", REPORT_VERSION)
                .with("command", out.name)
                .with("config", config)
                .with("result", out.result)
                .with("passed", out.passed)
                .into_value();
            if cli.format == Format::Json {
                report::emit_report(&doc) + "\n"
            } else {
                report::to_text(&doc)
            }
        }
    };
    Outcome { code, stdout, stderr: warnings }
}

fn dispatch(cli: &Cli, warnings: &mut String) -> CliResult<Output> {
    let budget = cli.budget;
    match &cli.command {
        Command::Detect(a) => detect_cmd(a, budget, warnings),
        Command::Types(c) => types_cmd(c, budget, warnings),
        Command::Indisc(c) => indisc_cmd(c, warnings),
        Command::Ramsey(c) => ramsey_cmd(c, budget, warnings),
        Command::Experiment(c) => experiment_cmd(c, cli.threads, budget),
        Command::Classify(c) => classify_cmd(c, budget, warnings),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_structure(path: &Path, warnings: &mut String) -> CliResult<StructureDocument> {
    let parsed = parse_structure(&read(path)?).map_err(|diag| CliError::Parse { path: path.display().to_string(), diag })?;
    for w in parsed.warnings {
        warnings.push_str(&format!("warning: {}:{w}\n", path.display()));
    }
    Ok(parsed.document)
}

fn load_formulas(path: &Path, sig: Option<&Signature>) -> CliResult<Vec<PartitionedFormula>> {
    parse_formulas(&read(path)?, sig).map_err(|diag| CliError::Parse { path: path.display().to_string(), diag })
}

fn pick(formulas: Vec<PartitionedFormula>, name: Option<&str>) -> CliResult<PartitionedFormula> {
    match name {
        None => Ok(formulas.into_iter().next().expect("parser returns at least one")),
        Some(n) => formulas.into_iter().find(|f| f.name == n).ok_or_else(|| usage(format!("no formula named {n}"))),
    }
}

/// Structure and selected formula.
fn load(inputs: &Inputs, warnings: &mut String) -> CliResult<(StructureDocument, PartitionedFormula)> {
    let doc = load_structure(&inputs.structure, warnings)?;
    let phi = pick(load_formulas(&inputs.formula, Some(doc.structure.signature()))?, inputs.name.as_deref())?;
    Ok((doc, phi))
}

/// Structure and all formulas, or the selected one.
fn load_all(inputs: &Inputs, warnings: &mut String) -> CliResult<(StructureDocument, Vec<PartitionedFormula>)> {
    let doc = load_structure(&inputs.structure, warnings)?;
    let fs = load_formulas(&inputs.formula, Some(doc.structure.signature()))?;
    let fs = match &inputs.name {
        Some(_) => vec![pick(fs, inputs.name.as_deref())?],
        None => fs,
    };
    Ok((doc, fs))
}

fn need<T: Copy>(v: Option<T>, flag: &str, property: &str) -> CliResult<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required for {property}")))
}

fn opt_elements(doc: &StructureDocument, name: &Option<String>) -> CliResult<Vec<Elem>> {
    match name {
        None => Ok(Vec::new()),
        Some(n) => doc.element_set(n).map_err(usage),
    }
}

fn parse_tuple(s: &str) -> CliResult<Tuple> {
    s.split(',').map(|p| p.trim().parse::<Elem>().map_err(|_| usage(format!("bad tuple {s:?}")))).collect()
}

fn search_value<T>(s: Search<T>, f: impl FnOnce(T) -> Value) -> Value {
    match s {
        Search::Found(w) => Report::new().with("outcome", "found").with("witness", f(w)).into_value(),
        Search::Exhausted => Report::new().with("outcome", "none").with("witness", Value::Null).into_value(),
        Search::OutOfBudget => Report::new().with("outcome", "budget-exhausted").with("witness", Value::Null).into_value(),
    }
}

pub fn independence_value(w: &IndependenceWitness) -> Value {
    Report::new().with("a", tuples(&w.a)).with("b", report::masked_tuples(&w.b)).into_value()
}

pub fn type_value(p: &PhiType) -> Value {
    Value::Array(
        p.entries()
            .iter()
            .map(|e| Report::new().with("formula", e.formula).with("params", tuple(&e.params)).with("positive", e.positive).into_value())
            .collect(),
    )
}

fn detect_cmd(a: &DetectArgs, budget: u64, warnings: &mut String) -> CliResult<Output> {
    let (doc, phi) = load(&a.inputs, warnings)?;
    let m = &doc.structure;
    let mut b = Budget::new(budget);
    let result = match a.property {
        Property::Independence => {
            let k = need(a.k, "k", "independence")?;
            let s = detect::find_k_independence(m, &phi, k, &mut b)?;
            let verified = match &s {
                Search::Found(w) => Some(w.verify(m, &phi)?),
                _ => None,
            };
            let mut r = search_value(s, |w| independence_value(&w));
            r["verified"] = verified.into();
            r
        }
        Property::Order => {
            let n = need(a.n, "n", "order")?;
            let s = detect::find_n_order(m, &phi, n, &mut b)?;
            let verified = match &s {
                Search::Found(w) => Some(w.verify(m, &phi)?),
                _ => None,
            };
            let mut r = search_value(s, |w| Report::new().with("a", tuples(&w.a)).into_value());
            r["verified"] = verified.into();
            r
        }
        Property::WeakOrder => {
            let mm = need(a.m, "m", "weak-order")?;
            let s = detect::find_weak_m_order(m, &phi, mm, &mut b)?;
            let verified = match &s {
                Search::Found(w) => Some(w.verify(m, &phi)?),
                _ => None,
            };
            let mut r = search_value(s, |w| Report::new().with("d", tuples(&w.d)).with("realizers", tuples(&w.realizers)).into_value());
            r["verified"] = verified.into();
            r
        }
        Property::Cover => {
            let d = need(a.d, "d", "cover")?;
            let pool = match &a.pool {
                Some(n) => Some(doc.set(n).map_err(usage)?.to_vec()),
                None => None,
            };
            let n_max = match (a.n_max, &pool) {
                (Some(n), _) => n,
                (None, Some(p)) => p.len().max(d),
                (None, None) => tuples_count(m.size(), phi.s())?.max(d),
            };
            let s = detect::find_cover_violation(m, &phi, d, n_max, pool.as_deref(), &mut b)?;
            search_value(s, |w| Report::new().with("d", w.d).with("b", tuples(&w.b)).into_value())
        }
        Property::Splitting => {
            let a_tuple = parse_tuple(a.tuple.as_deref().ok_or_else(|| usage("--tuple is required for splitting"))?)?;
            let params = doc.set(a.params.as_deref().ok_or_else(|| usage("--params is required for splitting"))?).map_err(usage)?.to_vec();
            let over = match &a.over {
                Some(n) => doc.set(n).map_err(usage)?.to_vec(),
                None => Vec::new(),
            };
            let delta1 = match &a.delta1 {
                Some(p) => load_formulas(p, Some(m.signature()))?,
                None => vec![phi.swap_blocks()],
            };
            let p = fmlab_core::logic::tp(std::slice::from_ref(&phi), &a_tuple, &params, m)?;
            let w = detect::splits(&p, &over, &[0], &delta1, m)?;
            Report::new()
                .with("type", type_value(&p))
                .with("splits", w.is_some())
                .with(
                    "witness",
                    w.map_or(Value::Null, |w| Report::new().with("formula", w.formula).with("b", tuple(&w.b)).with("c", tuple(&w.c)).into_value()),
                )
                .into_value()
        }
    };
    Ok(Output::new("detect", a, result))
}

fn tuples_count(n: usize, s: usize) -> CliResult<usize> {
    n.checked_pow(s as u32).ok_or_else(|| CliError::Core(Error::TooLarge("parameter space".into())))
}

fn bound_value(b: &BoundValue) -> Value {
    match b.exact() {
        Some(v) => big(v),
        None => Value::String(b.to_string()),
    }
}

fn bound_report(r: &BoundReport) -> Value {
    Report::new()
        .with("lhs", r.lhs)
        .with("rhs", bound_value(&r.rhs))
        .with("n_or_k", r.n_or_k)
        .with("r", r.r)
        .with("s", r.s)
        .with("t", r.t)
        .with("a_size", r.a_size)
        .with("holds", r.holds)
        .with("hypothesis_holds", r.hypothesis_holds)
        .with("note", r.note.clone())
        .into_value()
}

fn types_cmd(c: &TypesCmd, budget: u64, warnings: &mut String) -> CliResult<Output> {
    let mut b = Budget::new(budget);
    match c {
        TypesCmd::Count(a) => {
            let (doc, phi) = load(&a.inputs, warnings)?;
            let set = doc.element_set(&a.set).map_err(usage)?;
            let params = tuples_over(&set, phi.s());
            let n = counting::count_phi_types(&doc.structure, &phi, &params)?;
            Ok(Output::new("types count", a, Report::new().with("count", n).with("params", params.len())))
        }
        TypesCmd::VerifyOrderBound(a) => {
            let (doc, phi) = load(&a.inputs, warnings)?;
            let set = doc.element_set(&a.set).map_err(usage)?;
            let r = counting::verify_order_bound(&doc.structure, &phi, &set, a.n, &mut b)?;
            Ok(Output::new("types verify-order-bound", a, bound_report(&r)).assertion(r.holds))
        }
        TypesCmd::VerifyIndependenceBound(a) => {
            let (doc, phi) = load(&a.inputs, warnings)?;
            let set = doc.element_set(&a.set).map_err(usage)?;
            let r = counting::verify_independence_bound(&doc.structure, &phi, &set, a.n, &mut b)?;
            Ok(Output::new("types verify-independence-bound", a, bound_report(&r)).assertion(r.holds))
        }
        TypesCmd::Shatter(a) => {
            let (doc, phi) = load(&a.inputs, warnings)?;
            let set = doc.element_set(&a.set).map_err(usage)?;
            let params = tuples_over(&set, phi.s());
            let fam = counting::type_family(&doc.structure, &phi, &params)?;
            let w = counting::find_shattered(&fam, a.k)?;
            let witness = w.map_or(Value::Null, |w| {
                let sel: serde_json::Map<String, Value> = w.selectors.iter().map(|(&m, &j)| (report::mask_key(m), Value::from(j))).collect();
                Report::new()
                    .with("alphas", Value::Array(w.alphas.iter().map(|&i| tuple(&params[i])).collect()))
                    .with("selectors", Value::Object(sel))
                    .into_value()
            });
            let result = Report::new().with("family_size", fam.distinct()).with("ground", fam.ground()).with("shattered", !witness.is_null()).with("witness", witness);
            Ok(Output::new("types shatter", a, result))
        }
    }
}

fn load_seq(doc: &StructureDocument, name: &str) -> CliResult<TupleSequence> {
    doc.seq(name).cloned().map_err(usage)
}

fn extraction_value(e: &Extraction) -> Value {
    match e {
        Extraction::Success { sequence, positions, trace } => Report::new()
            .with("outcome", "success")
            .with("sequence", tuples(sequence.tuples()))
            .with("positions", positions.clone())
            .with("set_sizes", trace.set_sizes.clone())
            .into_value(),
        Extraction::Failure { level, achieved, trace } => Report::new()
            .with("outcome", "failure")
            .with("level", *level)
            .with("achieved", *achieved)
            .with("set_sizes", trace.set_sizes.clone())
            .into_value(),
    }
}

fn beth_value(b: &indiscernible::BethValue) -> Value {
    let v = b.value().ok().filter(|v| v.bits() <= 4096);
    Report::new().with("level", b.level).with("arg", b.arg).with("value", v.map_or(Value::Null, |v| big(&v))).into_value()
}

fn indisc_cmd(c: &IndiscCmd, warnings: &mut String) -> CliResult<Output> {
    match c {
        IndiscCmd::Check(a) => {
            let (doc, delta) = load_all(&a.inputs, warnings)?;
            let seq = load_seq(&doc, &a.seq)?;
            let set = opt_elements(&doc, &a.set)?;
            let mode = match a.mode {
                ModeArg::Sequence => Mode::Sequence,
                ModeArg::Set => Mode::Set,
                ModeArg::End => Mode::End,
            };
            let cert = indiscernible::check_indiscernible(&seq, &delta, a.m, &set, &doc.structure, mode)?;
            let cx = cert.counterexample.as_ref().map_or(Value::Null, |(u, v)| Report::new().with("first", u.clone()).with("second", v.clone()).into_value());
            let result = Report::new().with("verified", cert.verified).with("counterexample", cx);
            Ok(Output::new("indisc check", a, result).assertion(cert.verified))
        }
        IndiscCmd::ExtractEnd(a) | IndiscCmd::Extract(a) => {
            let (doc, phi) = load(&a.inputs, warnings)?;
            let seq = load_seq(&doc, &a.seq)?;
            let set = opt_elements(&doc, &a.set)?;
            let (name, e) = if matches!(c, IndiscCmd::Extract(_)) {
                ("indisc extract", indiscernible::extract_indiscernible(&seq, &phi, a.m, &set, &doc.structure, a.k)?)
            } else {
                ("indisc extract-end", indiscernible::extract_end_indiscernible(&seq, &phi, a.m, &set, &doc.structure, a.k)?)
            };
            Ok(Output::new(name, a, extraction_value(&e)))
        }
        IndiscCmd::Bounds(a) => {
            let e = indiscernible::cor9_estimates(a.m, a.k, a.p, a.n, a.s, a.t)?;
            let result = Report::new()
                .with("worst_case_log", e.worst_case_log)
                .with("polynomial_log", e.polynomial_log)
                .with("no_independence", beth_value(&e.no_independence))
                .with("no_order", beth_value(&e.no_order));
            Ok(Output::new("indisc bounds", a, result))
        }
    }
}

fn ramsey_cmd(c: &RamseyCmd, budget: u64, warnings: &mut String) -> CliResult<Output> {
    match c {
        RamseyCmd::Arrow(a) => {
            let holds = detect::arrow_check(a.x, a.y, a.a, a.b)?;
            Ok(Output::new("ramsey arrow", a, Report::new().with("holds", holds)).assertion(holds))
        }
        RamseyCmd::Homogeneous(a) => {
            let doc = load_structure(&a.structure, warnings)?;
            let g = RGraph::from_structure(&doc.structure)?;
            if let Some(n) = a.certify {
                if ramsey::has_independence(&g, n, &mut Budget::new(budget))? {
                    return Err(CliError::Core(Error::Precondition(format!("the graph has the {n}-independence property"))));
                }
            }
            let h = ramsey::extract_homogeneous(&g, a.k, None)?;
            let result = match h {
                Homogeneous::Found { vertices, complete } => {
                    Report::new().with("outcome", "found").with("vertices", vertices).with("kind", if complete { "complete" } else { "empty" })
                }
                Homogeneous::Failure { level, achieved } => Report::new().with("outcome", "failure").with("level", level).with("achieved", achieved),
            };
            Ok(Output::new("ramsey homogeneous", a, result))
        }
        RamseyCmd::CompareBounds(a) => {
            let r = ramsey::bound_compare(a.r, a.n, a.k)?;
            let result = Report::new()
                .with("a_level", real(r.a_level))
                .with("b_level", real(r.b_level))
                .with("b_coefficient", r.b_coefficient.map_or(Value::Null, real))
                .with("b_smaller", r.b_smaller);
            Ok(Output::new("ramsey compare-bounds", a, result))
        }
        RamseyCmd::EBound(a) => {
            let v = ramsey::e_bound(a.p, a.j, a.x)?;
            Ok(Output::new("ramsey e-bound", a, Report::new().with("value", big(&v))))
        }
    }
}

const MC_COLUMNS: [&str; 7] = ["k", "n", "trials", "estimate", "stderr", "exact_per_tuple", "union_bound"];

fn mc_value(r: &McRecord) -> Value {
    Report::new()
        .with("k", r.k)
        .with("n", r.n)
        .with("trials", r.trials)
        .with("hits", r.hits)
        .with("estimate", real(r.estimate))
        .with("stderr", real(r.stderr))
        .with("exact_per_tuple", rational(&r.exact_per_tuple))
        .with("exact_per_tuple_float", real(num_traits_to_f64(&r.exact_per_tuple)))
        .with("union_bound", real(r.union_bound))
        .with("union_bound_nk", real(r.union_bound_nk))
        .into_value()
}

fn mc_row(r: &McRecord) -> Vec<Value> {
    vec![r.k.into(), r.n.into(), r.trials.into(), real(r.estimate), real(r.stderr), rational(&r.exact_per_tuple), real(r.union_bound)]
}

fn num_traits_to_f64(q: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

fn experiment_cmd(c: &ExperimentCmd, threads: usize, budget: u64) -> CliResult<Output> {
    match c {
        ExperimentCmd::Coupon(a) => {
            let q = ramsey::coupon_q(a.n, a.m);
            let qs = ramsey::coupon_q_stirling(a.n, a.m);
            let result = Report::new().with("q", rational(&q)).with("q_stirling", rational(&qs)).with("agree", q == qs).with("q_float", real(num_traits_to_f64(&q)));
            let row = vec![a.n.into(), a.m.into(), rational(&q), real(num_traits_to_f64(&q))];
            let mut out = Output::new("experiment coupon", a, result);
            out.table = Some((vec!["n", "m", "q", "q_float"], vec![row]));
            Ok(out)
        }
        ExperimentCmd::IndependenceMc(a) => {
            let cfg = ExperimentConfig { n: a.n, k: a.k, trials: a.trials, seed: a.seed, p: a.p, budget };
            let r = mc::independence_mc(&cfg, threads)?;
            let mut out = Output::new("experiment independence-mc", a, mc_value(&r));
            out.table = Some((MC_COLUMNS.to_vec(), vec![mc_row(&r)]));
            Ok(out)
        }
        ExperimentCmd::Thmg1(a) => {
            let mut rows = Vec::new();
            for &k in &a.ks {
                let mut cfg = ramsey::thmg1_config(k, a.trials, a.seed)?;
                cfg.budget = budget;
                rows.push(mc::independence_mc(&cfg, threads)?);
            }
            let result = Report::new()
                .with("rows", Value::Array(rows.iter().map(mc_value).collect()))
                .with("nonincreasing_within_3se", ramsey::nonincreasing_within(&rows, 3.0));
            let mut out = Output::new("experiment thmg1", a, result);
            out.table = Some((MC_COLUMNS.to_vec(), rows.iter().map(mc_row).collect()));
            Ok(out)
        }
    }
}

fn good_options(max_len: usize, cover_n_max: Option<usize>, budget: u64) -> GoodOptions {
    GoodOptions { max_len, cover_n_max, budget }
}

fn formula_names(fs: &[PartitionedFormula]) -> Value {
    Value::Array(fs.iter().map(|f| Value::String(crate::fml::formula_to_text(f))).collect())
}

fn classify_cmd(c: &ClassifyCmd, budget: u64, warnings: &mut String) -> CliResult<Output> {
    match c {
        ClassifyCmd::DeltaStar(a) => {
            let delta = load_formulas(&a.formula, None)?;
            let ds = classify::delta_star(&delta, a.n)?;
            let top: Vec<Value> = ds.top.iter().map(|f| Value::String(f.to_string())).collect();
            let result = Report::new().with("top", top).with("closure_size", ds.formulas.len());
            Ok(Output::new("classify delta-star", a, result))
        }
        ClassifyCmd::Kappa(a) => {
            let (doc, delta) = load_all(&a.inputs, warnings)?;
            let r = classify::kappa(&doc.structure, &delta, a.n, a.max_len)?;
            let w = r.witness.map_or(Value::Null, |w| {
                Report::new().with("sequence", tuples(&w.sequence)).with("formula", w.formula).with("c", tuple(&w.c)).with("minority", w.minority).into_value()
            });
            Ok(Output::new("classify kappa", a, Report::new().with("kappa", r.kappa).with("witness", w)))
        }
        ClassifyCmd::Average(a) => {
            let (doc, phi) = load(&a.inputs, warnings)?;
            let seq = load_seq(&doc, &a.seq)?;
            let set = opt_elements(&doc, &a.set)?;
            let ty = classify::average_type(&doc.structure, &phi, &seq, &set, a.kappa, a.n)?;
            let params = tuples_over(&set, phi.r());
            let complete = classify::is_complete_over(&ty, 0, &params);
            Ok(Output::new("classify average", a, Report::new().with("type", type_value(&ty)).with("complete", complete)))
        }
        ClassifyCmd::Good(a) => {
            let (doc, phi) = load(&a.inputs, warnings)?;
            let g = classify::is_good(&doc.structure, &phi, a.n, a.d, &good_options(a.max_len, a.cover_n_max, budget))?;
            let result = match g {
                Goodness::Good(g) => Report::new()
                    .with("good", true)
                    .with("kappa_phi", g.kappa_phi)
                    .with("kappa_psi", g.kappa_psi)
                    .with("kappa", g.kappa)
                    .with("lambda_phi", g.lambda_phi),
                Goodness::Refuted(r) => {
                    let w = match &r.kind {
                        RefutationKind::Independence(w) => Report::new().with("property", "independence").with("witness", independence_value(w)),
                        RefutationKind::Cover(c) => Report::new().with("property", "cover").with("d", c.d).with("b", tuples(&c.b)),
                    };
                    Report::new().with("good", false).with("formula", crate::fml::formula_to_text(&r.formula)).with("refutation", w).with("reason", r.to_string())
                }
            };
            Ok(Output::new("classify good", a, result))
        }
        ClassifyCmd::Prec(a) => {
            let (doc, phi) = load(&a.class.inputs, warnings)?;
            let set = opt_elements(&doc, &a.class.set)?;
            let whole = doc.structure.elements();
            let n_verts = doc.submodel(&a.sub).map_err(usage)?.to_vec();
            let m_verts = match &a.sup {
                Some(s) => doc.submodel(s).map_err(usage)?.to_vec(),
                None => whole,
            };
            let opts = good_options(a.class.max_len, None, budget);
            let members: [(&str, &[Elem]); 2] = [("N", &n_verts), ("M", &m_verts)];
            let mut ctx = ClassContext::for_class(&doc.structure, &members, &phi, &set, a.class.k, a.class.n, a.class.d, a.class.delta, &opts)?;
            ctx.strict = a.strict;
            let r = classify::prec_k_trusted(&doc.structure, &n_verts, &m_verts, &ctx)?;
            let failures: Vec<Value> = r
                .failures
                .iter()
                .map(|f| Report::new().with("condition", f.condition.to_string()).with("formula", f.formula).with("tuples", tuples(&f.tuples)).into_value())
                .collect();
            let result = Report::new()
                .with("holds", r.holds)
                .with("subset", r.subset)
                .with("agreement", r.agreement)
                .with("saturation", r.saturation)
                .with("averages", r.averages)
                .with("kappa", ctx.kappa)
                .with("lambda", r.lambda)
                .with("formulas", formula_names(&ctx.formulas()))
                .with("failures", failures);
            Ok(Output::new("classify prec", a, result))
        }
        ClassifyCmd::Amalgam(a) | ClassifyCmd::Symmetry(a) => {
            let (doc, phi) = load(&a.class.inputs, warnings)?;
            let cfg = AmalgamConfig {
                m0: doc.submodel(&a.m0).map_err(usage)?.to_vec(),
                m1: doc.submodel(&a.m1).map_err(usage)?.to_vec(),
                m2: doc.submodel(&a.m2).map_err(usage)?.to_vec(),
                a_set: opt_elements(&doc, &a.class.set)?,
                ambient: doc.structure,
                phi,
                k: a.class.k,
                n: a.class.n,
                d: a.class.d,
                delta: a.class.delta,
                options: good_options(a.class.max_len, None, budget),
            };
            if matches!(c, ClassifyCmd::Symmetry(_)) {
                let r = classify::symmetry_test(&cfg)?;
                let result = Report::new().with("forward", r.forward).with("backward", r.backward).with("symmetric", r.symmetric);
                return Ok(Output::new("classify symmetry", a, result));
            }
            let r = classify::stable_amalgam(&cfg)?;
            let witnesses: Vec<Value> = r
                .witnesses
                .iter()
                .map(|w| Report::new().with("formula", w.formula).with("c", tuple(&w.c)).with("sequence", tuples(&w.sequence)).into_value())
                .collect();
            let failure = r.failure.as_ref().map_or(Value::Null, |(f, t)| Report::new().with("formula", *f).with("c", tuple(t)).into_value());
            let result = Report::new()
                .with("holds", r.holds)
                .with("kappa", r.kappa)
                .with("lambda", r.lambda)
                .with("witnesses", witnesses)
                .with("failure", failure);
            Ok(Output::new("classify amalgam", a, result))
        }
    }
}
