//! Command-line front end. Every subcommand builds a JSON report with the
//! `jetwronsk/1` schema; a short table goes to stderr.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
//! and parse errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::bounds::{self, ParamSet};
use crate::error::Error;
use crate::exec::ExecMode;
use crate::family::{
    assemble_f, germ_in_hypersurface, reduced_jet_derivative, reduced_wronskian, FamilySpec, FamilySpecJson,
    MultiIndex,
};
use crate::grassmann::{
    incidence_residuals, index_labels, multi_index_labels, phi_matrix, plucker_of_with, PluckerImage,
};
use crate::jet::{jet_derivative, jet_of_curve, CurveGerm, JetContext, JetPoint};
use crate::matrix::Matrix;
use crate::parse::parse_polynomial;
use crate::rational::{parse_rational, parse_rational_list, Rational};
use crate::reparam::{act, Reparam};
use crate::series::TruncatedSeries;
use crate::verify::{self, DEFAULT_TRIALS};
use crate::wronskian::{kprime, wronskian, wronskian_at, WronskianSpec};

pub const SCHEMA: &str = "jetwronsk/1";

#[derive(Parser, Debug)]
#[command(name = "jetwronsk", version, about = "Exact jet derivatives, Wronskians and their identities")]
pub struct Cli {
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Leave the timing field out of the report.
    #[arg(long, global = true)]
    pub no_timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// d^[p] of a polynomial in z1..zn.
    Diff(DiffArgs),
    /// W(f_0, …, f_k), optionally evaluated and checked for invariance.
    Wronskian(WronskianArgs),
    /// Reduced jet derivatives and the reduced Wronskian of a family.
    ReducedWronskian(ReducedArgs),
    /// A germ of order k inside F = 0 through a smooth point.
    Germ(GermArgs),
    /// Plücker coordinates of a matrix or of a family's Φ(a, w).
    Plucker(PluckerArgs),
    /// Whether the forms Φ(a, [γ]_k) vanish at [τ^r(x)].
    Incidence(IncidenceArgs),
    /// Dimension counts, δ-conditions, thresholds, degree decomposition.
    Bounds(BoundsArgs),
    /// Run a randomized verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct DiffArgs {
    #[arg(long)]
    pub expr: Option<String>,
    #[arg(long)]
    pub p: Option<usize>,
    /// Defaults to the largest variable index in the expression.
    #[arg(long)]
    pub n: Option<usize>,
    /// Defaults to p.
    #[arg(long)]
    pub k: Option<usize>,
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    #[serde(skip)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct WronskianArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Defaults to (number of functions) − 1.
    #[arg(long)]
    pub k: Option<usize>,
    /// Functions separated by ';'.
    #[arg(long, value_delimiter = ';')]
    pub f: Vec<String>,
    /// Jet point: "z1,z1',…,z2,…" values, or a JSON object in --input.
    #[arg(long, value_parser = string_value)]
    pub point: Option<Value>,
    /// Reparametrization "a1,…,ak" for the invariance check.
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct FamilyArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub delta: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub epsilon: Option<u32>,
    /// τ_0, …, τ_N separated by ';'.
    #[arg(long, value_delimiter = ';')]
    pub tau: Vec<String>,
    /// Coefficients "(i0,…,iN)=expr" separated by ';', or a JSON object.
    #[arg(long, value_parser = string_value)]
    pub a: Option<Value>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct ReducedArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    /// k+1 multi-indices separated by ';'. Defaults to the first k+1
    /// indices carrying a coefficient.
    #[arg(long, value_delimiter = ';')]
    pub indices: Vec<String>,
    #[arg(long)]
    #[serde(skip)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct GermArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Order of the germ.
    #[arg(long)]
    pub k: Option<usize>,
    /// Defining polynomial F.
    #[arg(long)]
    pub f: Option<String>,
    /// Base point "x1,…,xn".
    #[arg(long)]
    pub x: Option<String>,
    /// Linear direction of the free coordinates (defaults to all ones).
    #[arg(long)]
    pub direction: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct PluckerArgs {
    /// Rows separated by ';', entries by ','.
    #[arg(long, value_parser = string_value)]
    pub matrix: Option<Value>,
    /// Column labels separated by ';'.
    #[arg(long, value_delimiter = ';')]
    pub labels: Vec<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    /// Jet point for Φ(a, w) when a family is given.
    #[arg(long, value_parser = string_value)]
    pub point: Option<Value>,
    #[arg(long)]
    #[serde(skip)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct IncidenceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    /// Germ components separated by ';', coefficients by ','.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Build the germ inside F = 0 through this point instead.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub direction: Option<String>,
    /// Added to the top coefficient of the solved coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub big_n: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub delta: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<u64>,
    #[arg(long)]
    pub u: Option<u64>,
    #[arg(long)]
    pub v: Option<u64>,
    #[arg(long)]
    pub m_inf: Option<u64>,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub big_m: Option<u64>,
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub big_r: Option<u64>,
    #[arg(long)]
    pub d: Option<u64>,
    /// Evaluate the explicit degree bound for n instead.
    #[arg(long)]
    pub deng: bool,
    #[arg(long)]
    #[serde(skip)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    #[serde(skip)]
    pub input: Option<PathBuf>,
}

fn string_value(s: &str) -> std::result::Result<Value, String> {
    Ok(Value::String(s.to_string()))
}

/// Errors that end a command.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Algebra(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Algebra(Error::DivisionFails(_)) => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Algebra(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Algebra(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| usage(format!("missing required --{flag}")))
}

/// Flag values override the file; unset flags (`null`, `false`, `[]`) fall
/// through to it. Unknown keys in the file are rejected.
fn merge_input<T: Serialize + DeserializeOwned>(flags: &T, input: Option<&Path>) -> CliResult<T> {
    let Some(path) = input else {
        return Ok(serde_json::from_value(serde_json::to_value(flags).expect("args serialize"))
            .expect("args round-trip"));
    };
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let file: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let Value::Object(mut merged) = file else {
        return Err(usage(format!("{}: expected a JSON object", path.display())));
    };
    let Value::Object(known) = serde_json::to_value(flags).expect("args serialize") else {
        unreachable!("argument structs serialize to objects");
    };
    if let Some(bad) = merged.keys().find(|key| !known.contains_key(*key)) {
        return Err(usage(format!("{}: unknown key {bad:?}", path.display())));
    }
    for (key, value) in known {
        let unset = match &value {
            Value::Null | Value::Bool(false) => true,
            Value::Array(items) => items.is_empty(),
            _ => false,
        };
        if !unset {
            merged.insert(key, value);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Named pass/fail checks, each with a witness when it fails.
#[derive(Default)]
struct Checks(Map<String, Value>);

impl Checks {
    fn add(&mut self, name: &str, pass: bool, witness: Value) {
        let mut entry = Map::new();
        entry.insert("pass".into(), Value::Bool(pass));
        if !pass {
            entry.insert("witness".into(), witness);
        }
        self.0.insert(name.to_string(), Value::Object(entry));
    }

    fn all_pass(&self) -> bool {
        self.0.values().all(|c| c["pass"] == Value::Bool(true))
    }
}

struct Outcome {
    inputs: Value,
    results: Value,
    checks: Checks,
    seed: Option<u64>,
}

/// The finished report and its exit code.
pub struct RunOutput {
    pub report: Value,
    pub exit_code: u8,
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Diff(_) => "diff",
        Command::Wronskian(_) => "wronskian",
        Command::ReducedWronskian(_) => "reduced-wronskian",
        Command::Germ(_) => "germ",
        Command::Plucker(_) => "plucker",
        Command::Incidence(_) => "incidence",
        Command::Bounds(_) => "bounds",
        Command::Verify(_) => "verify",
    }
}

pub fn execute(cli: &Cli) -> RunOutput {
    let start = Instant::now();
    let name = command_name(&cli.command);
    let outcome = match &cli.command {
        Command::Diff(a) => merge_input(a, a.input.as_deref()).and_then(|a| cmd_diff(&a)),
        Command::Wronskian(a) => merge_input(a, a.input.as_deref()).and_then(|a| cmd_wronskian(&a)),
        Command::ReducedWronskian(a) => merge_input(a, a.input.as_deref()).and_then(|a| cmd_reduced(&a)),
        Command::Germ(a) => merge_input(a, a.input.as_deref()).and_then(|a| cmd_germ(&a)),
        Command::Plucker(a) => merge_input(a, a.input.as_deref()).and_then(|a| cmd_plucker(&a)),
        Command::Incidence(a) => merge_input(a, a.input.as_deref()).and_then(|a| cmd_incidence(&a)),
        Command::Bounds(a) => merge_input(a, a.input.as_deref()).and_then(|a| cmd_bounds(&a)),
        Command::Verify(a) => merge_input(a, a.input.as_deref()).and_then(|a| cmd_verify(&a)),
    };
    let mut report = Map::new();
    report.insert("schema".into(), json!(SCHEMA));
    report.insert("command".into(), json!(name));
    let exit_code = match outcome {
        Ok(out) => {
            let code = if out.checks.all_pass() { 0 } else { 1 };
            report.insert("inputs".into(), out.inputs);
            report.insert("results".into(), out.results);
            report.insert("checks".into(), Value::Object(out.checks.0));
            report.insert("seed".into(), json!(out.seed));
            report.insert("status".into(), json!(if code == 0 { "pass" } else { "fail" }));
            code
        }
        Err(e) => {
            report.insert("status".into(), json!("error"));
            report.insert("error".into(), json!(e.to_string()));
            e.exit_code()
        }
    };
    if !cli.no_timing {
        report.insert(
            "timing".into(),
            json!({"elapsed_ms": start.elapsed().as_secs_f64() * 1000.0}),
        );
    }
    RunOutput {
        report: Value::Object(report),
        exit_code,
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let out = execute(&cli);
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let _ = match cli.format {
        Format::Json => writeln!(lock, "{}", serde_json::to_string_pretty(&out.report).expect("report serializes")),
        Format::Csv => write!(lock, "{}", render_csv(&out.report)),
    };
    eprint!("{}", render_table(&out.report));
    out.exit_code
}

/// `check,pass,failures` rows.
pub fn render_csv(report: &Value) -> String {
    let mut s = String::from("check,pass,failures\n");
    if let Some(checks) = report["checks"].as_object() {
        for (name, c) in checks {
            let failures = c.get("failures").and_then(Value::as_u64).unwrap_or(u64::from(c["pass"] != true));
            s.push_str(&format!("{name},{},{failures}\n", c["pass"]));
        }
    }
    s
}

pub fn render_table(report: &Value) -> String {
    let mut s = format!("{} [{}]\n", report["command"].as_str().unwrap_or("?"), report["status"].as_str().unwrap_or("?"));
    if let Some(err) = report["error"].as_str() {
        s.push_str(&format!("  error: {err}\n"));
    }
    if let Some(results) = report["results"].as_object() {
        for (key, value) in results {
            let text = match value {
                Value::String(t) => t.clone(),
                other => other.to_string(),
            };
            let text = if text.len() > 100 { format!("{}…", &text[..text.floor_char_boundary(100)]) } else { text };
            s.push_str(&format!("  {key:<22} {text}\n"));
        }
    }
    if let Some(checks) = report["checks"].as_object() {
        for (name, c) in checks {
            let mark = if c["pass"] == true { "PASS" } else { "FAIL" };
            let extra = match (c.get("trials"), c.get("failures")) {
                (Some(t), Some(f)) => format!("  ({f}/{t} failed)"),
                _ => String::new(),
            };
            s.push_str(&format!("  {mark}  {name}{extra}\n"));
        }
    }
    s
}

/// Largest `i` with `z<i>` in the text.
fn max_variable_index(expr: &str) -> usize {
    let bytes = expr.as_bytes();
    let mut best = 0;
    let mut i = 0;
    while i < bytes.len() {
        let word_start = i == 0 || !(bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_');
        if bytes[i] == b'z' && word_start {
            let digits: String = expr[i + 1..].chars().take_while(char::is_ascii_digit).collect();
            if let Ok(v) = digits.parse::<usize>() {
                best = best.max(v);
            }
            i += 1 + digits.len();
        } else {
            i += 1;
        }
    }
    best
}

fn cmd_diff(a: &DiffArgs) -> CliResult<Outcome> {
    let expr = required(a.expr.clone(), "expr")?;
    let p = required(a.p, "p")?;
    let n = a.n.unwrap_or_else(|| max_variable_index(&expr).max(1));
    let k = a.k.unwrap_or(p);
    let ctx = JetContext::new(n, k)?;
    let f = ctx.lift(&parse_polynomial(&expr, ctx.base_vars())?)?;
    let d = jet_derivative(&f, p)?;
    Ok(Outcome {
        inputs: json!({"expr": expr, "p": p, "n": n, "k": k}),
        results: json!({"derivative": d.to_string()}),
        checks: Checks::default(),
        seed: None,
    })
}

fn parse_point(ctx: &JetContext, value: &Value) -> CliResult<JetPoint> {
    match value {
        Value::Object(_) => Ok(JetPoint::from_json(ctx, value)?),
        Value::String(text) => {
            let values = parse_rational_list(text)?;
            let per = ctx.k() + 1;
            if values.len() != ctx.n() * per {
                return Err(usage(format!("a jet point needs {} values, got {}", ctx.n() * per, values.len())));
            }
            let derivs: Vec<Vec<Rational>> = values.chunks(per).map(<[Rational]>::to_vec).collect();
            Ok(JetPoint::from_derivatives(ctx, &derivs)?)
        }
        Value::Array(items) => {
            let text: Vec<String> = items.iter().map(value_text).collect();
            parse_point(ctx, &Value::String(text.join(",")))
        }
        _ => Err(usage("a jet point is a list of values or a JSON object")),
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn cmd_wronskian(a: &WronskianArgs) -> CliResult<Outcome> {
    if a.f.is_empty() {
        return Err(usage("missing required --f"));
    }
    let k = a.k.unwrap_or(a.f.len() - 1);
    let n = a
        .n
        .unwrap_or_else(|| a.f.iter().map(|e| max_variable_index(e)).max().unwrap_or(1).max(1));
    let ctx = JetContext::new(n, k)?;
    let inputs = a
        .f
        .iter()
        .map(|e| parse_polynomial(e, ctx.base_vars()))
        .collect::<crate::Result<Vec<_>>>()?;
    let spec = WronskianSpec::new(&ctx, inputs)?;
    let w_poly = wronskian(&spec)?;
    let mut results = Map::new();
    results.insert("wronskian".into(), json!(w_poly.to_string()));
    results.insert("weight".into(), json!(kprime(k)));
    let mut checks = Checks::default();
    if let Some(pv) = &a.point {
        let w = parse_point(&ctx, pv)?;
        let value = wronskian_at(&spec, &w)?;
        let symbolic = crate::jet::evaluate(&w_poly, &w)?;
        checks.add("pointwise", value == symbolic, json!({"w": w.to_json()}));
        results.insert("value".into(), json!(value.to_string()));
        if let Some(phi_text) = &a.phi {
            let phi = Reparam::new(parse_rational_list(phi_text)?)?;
            let moved = wronskian_at(&spec, &act(&phi, &w)?)?;
            let expected = crate::rational::pow(phi.a1(), kprime(k) as u32) * &value;
            results.insert("moved_value".into(), json!(moved.to_string()));
            checks.add(
                "invariance",
                moved == expected,
                json!({"phi": phi.to_string(), "w": w.to_json(), "expected": expected.to_string()}),
            );
        }
    } else if a.phi.is_some() {
        return Err(usage("--phi needs --point"));
    }
    Ok(Outcome {
        inputs: json!({"n": n, "k": k, "f": a.f, "point": a.point, "phi": a.phi}),
        results: Value::Object(results),
        checks,
        seed: None,
    })
}

fn family_from_args(f: &FamilyArgs) -> CliResult<FamilySpec> {
    let n = required(f.n, "n")?;
    let k = required(f.k, "k")?;
    let delta = required(f.delta, "delta")?;
    let r = required(f.r, "r")?;
    if f.tau.is_empty() {
        return Err(usage("missing required --tau"));
    }
    let a: BTreeMap<String, String> = match &f.a {
        None => BTreeMap::new(),
        Some(Value::Object(map)) => map.iter().map(|(key, v)| (key.clone(), value_text(v))).collect(),
        Some(Value::String(text)) => text
            .split(';')
            .filter(|part| !part.trim().is_empty())
            .map(|part| {
                let (key, expr) =
                    part.split_once('=').ok_or_else(|| usage(format!("coefficient {part:?} must be I=expr")))?;
                Ok((key.trim().to_string(), expr.trim().to_string()))
            })
            .collect::<CliResult<_>>()?,
        Some(_) => return Err(usage("--a must be \"I=expr;…\" or a JSON object")),
    };
    let json = FamilySpecJson {
        n,
        big_n: f.tau.len() - 1,
        k,
        delta,
        r,
        epsilon: f.epsilon,
        tau: f.tau.clone(),
        a,
    };
    Ok(json.into_spec()?)
}

fn family_inputs(spec: &FamilySpec) -> Value {
    serde_json::to_value(spec.to_json()).expect("family serializes")
}

fn cmd_reduced(a: &ReducedArgs) -> CliResult<Outcome> {
    let spec = family_from_args(&a.family)?;
    let k = spec.context().k();
    let indices: Vec<MultiIndex> = if a.indices.is_empty() {
        let support: Vec<MultiIndex> = spec.coefficients().keys().cloned().collect();
        if support.len() < k + 1 {
            return Err(usage(format!("need {} indices; the family has {} coefficients", k + 1, support.len())));
        }
        support.into_iter().take(k + 1).collect()
    } else {
        a.indices.iter().map(|s| s.parse()).collect::<crate::Result<_>>()?
    };
    let mut derivs = Map::new();
    for index in &indices {
        let column = (0..=k)
            .map(|p| reduced_jet_derivative(&spec, index, p).map(|d| d.to_string()))
            .collect::<crate::Result<Vec<_>>>()?;
        derivs.insert(index.to_string(), json!(column));
    }
    let w = reduced_wronskian(&spec, &indices)?;
    let identity = verify::reduced_wronskian_identity(&spec, &indices)?;
    let mut checks = Checks::default();
    checks.add(
        "reduced-wronskian-identity",
        identity,
        json!({"family": family_inputs(&spec), "indices": multi_index_labels(&indices)}),
    );
    Ok(Outcome {
        inputs: json!({"family": family_inputs(&spec), "indices": multi_index_labels(&indices)}),
        results: json!({"reduced_derivatives": derivs, "reduced_wronskian": w.to_string()}),
        checks,
        seed: None,
    })
}

fn cmd_germ(a: &GermArgs) -> CliResult<Outcome> {
    let expr = required(a.f.clone(), "f")?;
    let k = required(a.k, "k")?;
    let x = parse_rational_list(&required(a.x.clone(), "x")?)?;
    let n = a.n.unwrap_or(x.len());
    let ctx = JetContext::new(n, k)?;
    let f = parse_polynomial(&expr, ctx.base_vars())?;
    let direction = match &a.direction {
        Some(d) => parse_rational_list(d)?,
        None => vec![Rational::from_integer(1.into()); n],
    };
    let gamma = germ_in_hypersurface(&ctx, &f, &x, &direction, k)?;
    let composed = gamma.compose(&f)?;
    let mut checks = Checks::default();
    checks.add(
        "composes-to-zero",
        composed.coeffs().iter().all(Zero::is_zero),
        json!({"f_of_gamma": composed.to_string()}),
    );
    let components: Vec<String> = gamma.components().iter().map(ToString::to_string).collect();
    Ok(Outcome {
        inputs: json!({"n": n, "k": k, "f": expr, "x": a.x, "direction": a.direction}),
        results: json!({"gamma": components, "jet": jet_of_curve(&gamma).to_json()}),
        checks,
        seed: None,
    })
}

fn parse_matrix(value: &Value) -> CliResult<Matrix<Rational>> {
    let rows: Vec<Vec<Rational>> = match value {
        Value::String(text) => text
            .split(';')
            .map(|row| parse_rational_list(row).map_err(CliError::from))
            .collect::<CliResult<_>>()?,
        Value::Array(rows) => rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| usage("matrix rows must be arrays"))?
                    .iter()
                    .map(|v| parse_rational(&value_text(v)).map_err(CliError::from))
                    .collect()
            })
            .collect::<CliResult<_>>()?,
        _ => return Err(usage("--matrix must be \"a,b;c,d\" or an array of rows")),
    };
    Ok(Matrix::from_rows(rows)?)
}

fn cmd_plucker(a: &PluckerArgs) -> CliResult<Outcome> {
    let (matrix, labels, inputs) = match &a.matrix {
        Some(m) => {
            let matrix = parse_matrix(m)?;
            let labels = if a.labels.is_empty() { index_labels(matrix.cols()) } else { a.labels.clone() };
            let rows: Vec<Vec<String>> =
                matrix.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
            (matrix, labels, json!({"matrix": rows, "labels": a.labels}))
        }
        None => {
            let spec = family_from_args(&a.family)?;
            let w = parse_point(spec.context(), &required(a.point.clone(), "point")?)?;
            let matrix = phi_matrix(&spec, &w)?;
            let labels = multi_index_labels(&spec.index_set()?);
            (matrix, labels, json!({"family": family_inputs(&spec), "point": w.to_json()}))
        }
    };
    let image = plucker_of_with(&matrix, &labels, ExecMode::default())?;
    let rank = matrix.rank();
    let mut checks = Checks::default();
    let matrix_rows: Vec<Vec<String>> =
        matrix.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    checks.add(
        "degenerate-iff-rank-deficient",
        image.is_degenerate() == (rank < matrix.rows()),
        json!({"matrix": matrix_rows}),
    );
    let results = match &image {
        PluckerImage::Degenerate => json!({"degenerate": true, "rank": rank}),
        PluckerImage::Point(p) => {
            let violated = p.first_violated_relation();
            checks.add(
                "plucker-relations",
                violated.is_none(),
                json!({"matrix": matrix_rows, "relation": violated}),
            );
            json!({
                "degenerate": false,
                "rank": rank,
                "coordinates": p.to_json(),
                "normalized": p.normalized().to_json(),
            })
        }
    };
    Ok(Outcome {
        inputs,
        results,
        checks,
        seed: None,
    })
}

fn parse_gamma(ctx: &JetContext, text: &str) -> CliResult<CurveGerm> {
    let comps = text
        .split(';')
        .map(|part| Ok(TruncatedSeries::new(parse_rational_list(part)?)?))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(CurveGerm::new(ctx, comps)?)
}

fn cmd_incidence(a: &IncidenceArgs) -> CliResult<Outcome> {
    let spec = family_from_args(&a.family)?;
    let ctx = spec.context();
    let mut gamma = match (&a.gamma, &a.x) {
        (Some(g), _) => parse_gamma(ctx, g)?,
        (None, Some(x)) => {
            let x = parse_rational_list(x)?;
            let direction = match &a.direction {
                Some(d) => parse_rational_list(d)?,
                None => vec![Rational::from_integer(1.into()); ctx.n()],
            };
            germ_in_hypersurface(ctx, &assemble_f(&spec), &x, &direction, ctx.k())?
        }
        (None, None) => return Err(usage("incidence needs --gamma or --x")),
    };
    if let Some(by) = &a.perturb {
        gamma = verify::perturb_germ(&spec, &gamma, &parse_rational(by)?)?;
    }
    let residuals = incidence_residuals(&spec, &gamma)?;
    let components: Vec<String> = gamma.components().iter().map(ToString::to_string).collect();
    let mut checks = Checks::default();
    checks.add(
        "incidence",
        residuals.iter().all(Zero::is_zero),
        json!({"family": family_inputs(&spec), "gamma": components}),
    );
    Ok(Outcome {
        inputs: json!({"family": family_inputs(&spec), "gamma": components, "perturb": a.perturb}),
        results: json!({"residuals": residuals.iter().map(ToString::to_string).collect::<Vec<_>>()}),
        checks,
        seed: None,
    })
}

fn cmd_bounds(a: &BoundsArgs) -> CliResult<Outcome> {
    let inputs = serde_json::to_value(a).expect("args serialize");
    let mut checks = Checks::default();
    if a.deng {
        let n = required(a.n, "n")?;
        let (d0, cap) = bounds::deng_bound(n)?;
        checks.add("deng-bound", d0 <= cap, json!({"n": n}));
        return Ok(Outcome {
            inputs,
            results: json!({"deng": {"n": n, "d0": d0.to_string(), "cap": cap.to_string(), "holds": d0 <= cap}}),
            checks,
            seed: None,
        });
    }
    let params = ParamSet {
        n: required(a.n, "n")?,
        big_n: required(a.big_n, "N")?,
        k: required(a.k, "k")?,
        delta: required(a.delta, "delta")?,
        epsilon: a.epsilon.unwrap_or(0),
        u: a.u.unwrap_or(1),
        v: a.v.unwrap_or(1),
        m_inf: a.m_inf.unwrap_or(0),
        big_m: a.big_m.unwrap_or(0),
        big_r: a.big_r.unwrap_or(0),
    };
    params.validate()?;
    let report = bounds::delta_conditions(&params)?;
    checks.add(
        "basic-iff-margin",
        report.basic == (report.estimation_margin < 0),
        json!({"params": params}),
    );
    let (count, _) = bounds::index_counts(params.big_n, params.delta, 1)?;
    let mut results = Map::new();
    results.insert("jet_dim".into(), json!(bounds::jet_dim(params.n as i64, params.k as i64)));
    results.insert("index_count".into(), json!(count.to_string()));
    results.insert("kprime".into(), json!(kprime(params.k as usize)));
    results.insert("delta".into(), serde_json::to_value(&report).expect("report serializes"));
    if a.big_m.is_some() {
        let r = bounds::r_threshold_for(&params)?;
        let twist = bounds::twist_exponent(&params, params.big_m, r);
        checks.add("twist-negative", twist <= -1, json!({"params": params, "r": r}));
        results.insert("r_threshold".into(), json!(r));
        results.insert("twist_exponent".into(), json!(twist.to_string()));
        if params.delta > 0 {
            results.insert("r_window_max".into(), json!(bounds::r_window_max(&params)?));
        }
    }
    if a.m_inf.is_some() || a.big_r.is_some() || a.d.is_some() {
        results.insert("d0".into(), json!(bounds::d0(&params)?));
    }
    if let Some(d) = a.d {
        let dd = bounds::decompose_degree(&params, d)?;
        checks.add("decomposition-valid", dd.is_valid_for(&params), json!({"params": params, "d": d}));
        results.insert("decomposition".into(), serde_json::to_value(&dd).expect("serializes"));
    }
    Ok(Outcome {
        inputs,
        results: Value::Object(results),
        checks,
        seed: None,
    })
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let suite = required(a.suite.clone(), "suite")?;
    let seed = a.seed.unwrap_or(0);
    let trials = a.trials.unwrap_or(DEFAULT_TRIALS);
    let mode = if a.sequential { ExecMode::Sequential } else { ExecMode::Parallel };
    let report = verify::run_suite_with(&suite, seed, trials, mode).map_err(|e| match e {
        Error::InvalidInput(msg) => usage(msg),
        other => CliError::Algebra(other),
    })?;
    let mut checks = Checks::default();
    for c in &report.checks {
        let mut entry = Map::new();
        entry.insert("pass".into(), json!(c.pass));
        entry.insert("trials".into(), json!(c.trials));
        entry.insert("failures".into(), json!(c.failures));
        if let Some(w) = &c.witness {
            entry.insert("witness".into(), w.clone());
        }
        checks.0.insert(c.name.clone(), Value::Object(entry));
    }
    Ok(Outcome {
        inputs: json!({"suite": suite, "seed": seed, "trials": trials}),
        results: json!({"suite": suite, "trials": trials, "passed": report.passed()}),
        checks,
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> RunOutput {
        let mut full = vec!["jetwronsk", "--no-timing"];
        full.extend_from_slice(args);
        execute(&Cli::try_parse_from(full).unwrap())
    }

    #[test]
    fn diff_example() {
        let out = run_args(&["diff", "--expr", "z1*z2", "--p", "2", "--n", "2", "--k", "2"]);
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report["results"]["derivative"], "z1''*z2 + 2*z1'*z2' + z1*z2''");
        assert_eq!(out.report["schema"], SCHEMA);
        let echo = run_args(&["diff", "--expr", "z1^2 - 3", "--p", "0"]);
        assert_eq!(echo.report["results"]["derivative"], "z1^2 - 3");
    }

    #[test]
    fn diff_errors() {
        let bad = run_args(&["diff", "--expr", "z1^^2", "--p", "1", "--n", "1"]);
        assert_eq!(bad.exit_code, 2);
        assert!(bad.report["error"].as_str().unwrap().contains("offset 3"));
        assert_eq!(run_args(&["diff", "--expr", "z1", "--p", "3", "--k", "2"]).exit_code, 2);
        assert_eq!(run_args(&["diff", "--p", "1"]).exit_code, 2);
    }

    #[test]
    fn variable_index_scan() {
        assert_eq!(max_variable_index("z1*z12 + z3'"), 12);
        assert_eq!(max_variable_index("3"), 0);
    }

    #[test]
    fn bounds_examples() {
        let out = run_args(&["bounds", "--n", "2", "--N", "2", "--k", "1", "--delta", "4"]);
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report["results"]["delta"]["basic"], true);
        assert_eq!(out.report["results"]["delta"]["estimation_margin"], -1);
        let deng = run_args(&["bounds", "--deng", "--n", "2"]);
        assert_eq!(deng.report["results"]["deng"]["d0"], "12338");
        assert_eq!(deng.report["results"]["deng"]["cap"], "59049");
        assert_eq!(run_args(&["bounds", "--n", "2", "--k", "1", "--delta", "4"]).exit_code, 2);
        let dec = run_args(&[
            "bounds", "--n", "2", "--N", "2", "--k", "1", "--delta", "4", "--u", "3", "--v", "1", "--m-inf", "2", "--R",
            "5", "--d", "43",
        ]);
        assert_eq!(dec.exit_code, 0);
        assert_eq!(dec.report["results"]["d0"], 42);
        assert_eq!(dec.report["results"]["decomposition"]["epsilon"], 5);
        assert_eq!(dec.report["results"]["decomposition"]["r"], 6);
    }

    #[test]
    fn wronskian_and_invariance() {
        let out = run_args(&["wronskian", "--f", "1;z1;1/2*z1^2", "--n", "2", "--point", "1,2,3,4,5,6", "--phi", "2,1"]);
        assert_eq!(out.exit_code, 0, "{}", out.report);
        assert_eq!(out.report["results"]["wronskian"], "z1'^3");
        assert_eq!(out.report["results"]["value"], "8");
    }

    #[test]
    fn incidence_pass_and_fail() {
        let base = [
            "incidence", "--n", "2", "--k", "1", "--delta", "1", "--r", "1", "--tau", "z1 + 1;z2 + 2", "--a",
            "(1,0)=z2 + 1;(0,1)=-1/4", "--x", "0,0",
        ];
        let ok = run_args(&base);
        assert_eq!(ok.exit_code, 0, "{}", ok.report);
        let mut perturbed = base.to_vec();
        perturbed.extend(["--perturb", "1"]);
        assert_eq!(run_args(&perturbed).exit_code, 1);
    }

    #[test]
    fn plucker_matrix() {
        let out = run_args(&["plucker", "--matrix", "1,0,2;0,1,3"]);
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report["results"]["coordinates"]["(0,1)"], "1");
        let flat = run_args(&["plucker", "--matrix", "1,2;2,4"]);
        assert_eq!(flat.report["results"]["degenerate"], true);
        assert_eq!(flat.exit_code, 0);
    }

    #[test]
    fn verify_unknown_suite() {
        assert_eq!(run_args(&["verify", "--suite", "nope"]).exit_code, 2);
        let ok = run_args(&["verify", "--suite", "bounds", "--trials", "3"]);
        assert_eq!(ok.exit_code, 0);
        assert_eq!(ok.report["seed"], 0);
    }

    #[test]
    fn input_file_merges_under_flags() {
        let dir = std::env::temp_dir().join(format!("jetwronsk-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("diff.json");
        std::fs::write(&path, r#"{"expr": "z1*z2", "p": 1, "n": 2}"#).unwrap();
        let p = path.to_str().unwrap();
        let out = run_args(&["diff", "--input", p]);
        assert_eq!(out.report["results"]["derivative"], "z1'*z2 + z1*z2'");
        let over = run_args(&["diff", "--input", p, "--p", "0"]);
        assert_eq!(over.report["results"]["derivative"], "z1*z2");
        std::fs::write(&path, r#"{"expr": "z1", "bogus": 1}"#).unwrap();
        assert_eq!(run_args(&["diff", "--input", p]).exit_code, 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
