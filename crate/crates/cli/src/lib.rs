//! Command-line front end: parses argv, reads JSON documents, and produces a
//! single JSON report per invocation.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use etkk_core::charts::{
    compose_charts, decompose, find_distribution, has_distribution, interior_bound_checks, witness_failure, ChartError,
};
use etkk_core::doc::{self, DocError};
use etkk_core::kkcalc::{
    compose, dl_generators, dl_order_failures, in_m, is_positive, kk_equal, positive_mod_m, GeneratorLabel, KkError,
};
use etkk_core::ktheory::compute_ktheory;
use etkk_core::lifting::{composed_existence, d0_conditions, decide_lift, suff_condition, zero_kk_check, LiftError, LiftStatus};
use etkk_core::num::{parse_int, parse_rat, Int, Rat};
use etkk_core::spectra::{
    align_spectra, eig, eig_dist, grid_from_eta, kk_equal_points, pair_cores, test_functions, SpectraError, TestFunction,
    TestKind,
};

pub mod paper;

pub const DEFAULT_BUDGET: usize = 4096;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Doc { path: PathBuf, source: DocError },
    #[error("{0}")]
    Input(String),
}

/// Outcome of one invocation. `exit_code` is 0 for an affirmative verdict, 1
/// for a well-formed negative one and 2 for input errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub verdict: Value,
    pub exit_code: i32,
    pub details: Map<String, Value>,
}

impl Report {
    fn new(command: &str, verdict: Value, exit_code: i32, details: Value) -> Report {
        let details = match details {
            Value::Object(m) => m,
            Value::Null => Map::new(),
            other => {
                let mut m = Map::new();
                m.insert("result".into(), other);
                m
            }
        };
        Report { command: command.to_string(), verdict, exit_code, details }
    }

    pub fn boolean(command: &str, ok: bool, details: Value) -> Report {
        Report::new(command, Value::Bool(ok), if ok { 0 } else { 1 }, details)
    }

    pub fn input_error(command: &str, err: &CliError) -> Report {
        let mut details = json!({ "error": err.to_string() });
        if let CliError::Usage(_) = err {
            details["usage"] = Value::String(USAGE_HINT.to_string());
        }
        Report::new(command, Value::Null, 2, details)
    }

    /// Flat object: `command`, `verdict`, `exit_code`, then the details.
    pub fn to_json(&self) -> Value {
        let mut m = self.details.clone();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert("verdict".into(), self.verdict.clone());
        m.insert("exit_code".into(), json!(self.exit_code));
        Value::Object(m)
    }

    pub fn render(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("report serializes")
    }
}

const USAGE_HINT: &str = "etkk [--budget N] [--seed N] [--format json] <ktheory|kk|lift|spectra|chart|verify-paper> ...; see etkk --help";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "etkk", version, about = "Exact KK calculus and spectral checks for one-dimensional NCCW blocks")]
struct Cli {
    /// Cap on enumerated type-2 test functions and positive representatives.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Seed for the randomized sweep of `verify-paper`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// K-theory of a block or algebra document.
    Ktheory { file: PathBuf },
    /// Diagram calculus on diagram documents.
    #[command(subcommand)]
    Kk(KkOp),
    /// Lifting criteria for diagram classes.
    #[command(subcommand)]
    Lift(LiftOp),
    /// Point-evaluation spectra and test functions.
    #[command(subcommand)]
    Spectra(SpectraOp),
    /// Spectral charts, distributions and decompositions.
    #[command(subcommand)]
    Chart(ChartOp),
    /// Run the built-in worked examples.
    VerifyPaper {
        /// Replace the embedded case data with this document.
        #[arg(long)]
        cases: Option<PathBuf>,
        /// Number of random samples per property in the seeded sweep.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
enum KkOp {
    /// Check the commuting-square and shape conditions.
    Validate { file: PathBuf },
    /// KK-equality of two diagrams, with the M witness.
    Equal { first: PathBuf, second: PathBuf },
    /// `first` followed by `second`.
    Compose { first: PathBuf, second: PathBuf },
    /// Positivity of the diagram as written.
    Positive { file: PathBuf },
    /// Search for a positive representative of the class.
    PositiveModM { file: PathBuf },
    /// Order generators of a block document.
    Generators { file: PathBuf },
    /// Whether the class is positive on every order generator.
    PreservesOrder { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum LiftOp {
    /// Three-condition lifting criterion.
    D0 { file: PathBuf },
    /// Entrywise sufficient criterion.
    Suff { file: PathBuf },
    /// Decomposition document followed by the diagram `g`.
    Composed { decomposition: PathBuf, g: PathBuf },
    /// Zero-KK rigidity for an order-preserving class killing the unit.
    ZeroCheck { file: PathBuf },
    /// Combined decision: exact for circle and split sources.
    Decide { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum SpectraOp {
    /// Eigenvalue multisets of a spectrum under the test functions.
    Eig {
        file: PathBuf,
        #[arg(long, value_parser = rat_arg)]
        eta: Rat,
    },
    /// Largest matching distance over the test functions.
    Dist {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_parser = rat_arg)]
        eta: Rat,
    },
    /// KK-equality of two point evaluations.
    KkEqual { first: PathBuf, second: PathBuf },
    /// Align two dense spectra onto a common base.
    Align {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_parser = rat_arg)]
        eta: Rat,
    },
    /// Pair the interior points within 2·eta.
    Pair {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_parser = rat_arg)]
        eta: Rat,
    },
}

#[derive(Debug, Subcommand)]
enum ChartOp {
    /// Check fibers, multiplicities and paths.
    Validate { file: PathBuf },
    /// Spectrum of the chart at a point.
    Fiber {
        file: PathBuf,
        #[arg(long, value_parser = rat_arg)]
        x: Rat,
    },
    /// `first` followed by `second`.
    Compose { first: PathBuf, second: PathBuf },
    /// Search for or check a distribution witness.
    Distribute {
        file: PathBuf,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        l: Option<u64>,
        /// Grid size for the search; by default it is derived from K and L.
        #[arg(long, value_parser = int_arg)]
        mesh: Option<Int>,
        /// Check this witness instead of searching.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Decomposition certificate from a distribution witness.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        l: Option<u64>,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
}

fn rat_arg(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

fn int_arg(s: &str) -> Result<Int, String> {
    parse_int(s).map_err(|e| e.to_string())
}

struct Ctx {
    budget: usize,
    seed: u64,
}

/// Parses and runs one command line (including the program name).
pub fn run<I, T>(argv: I) -> Report
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Report::new("help", Value::Bool(true), 0, json!({ "text": e.to_string() }))
                }
                _ => Report::input_error("usage", &CliError::Usage(e.to_string())),
            };
        }
    };
    let ctx = Ctx { budget: cli.budget, seed: cli.seed };
    let name = command_name(&cli.command);
    match dispatch(&ctx, &cli.command) {
        Ok(r) => r,
        Err(e) => Report::input_error(&name, &e),
    }
}

fn command_name(c: &Command) -> String {
    let sub = |op: &dyn std::fmt::Debug| {
        let s = format!("{op:?}");
        let head: String = s.chars().take_while(|c| c.is_alphanumeric()).collect();
        kebab(&head)
    };
    match c {
        Command::Ktheory { .. } => "ktheory".into(),
        Command::Kk(op) => format!("kk {}", sub(op)),
        Command::Lift(op) => format!("lift {}", sub(op)),
        Command::Spectra(op) => format!("spectra {}", sub(op)),
        Command::Chart(op) => format!("chart {}", sub(op)),
        Command::VerifyPaper { .. } => "verify-paper".into(),
    }
}

fn kebab(s: &str) -> String {
    let mut out = String::new();
    for (i, ch) in s.chars().enumerate() {
        if ch.is_uppercase() {
            if i > 0 {
                out.push('-');
            }
            out.extend(ch.to_lowercase());
        } else {
            out.push(ch);
        }
    }
    out
}

fn load(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    doc::parse(&text).map_err(|source| CliError::Doc { path: path.to_path_buf(), source })
}

fn with_path<T>(path: &Path, r: Result<T, DocError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Doc { path: path.to_path_buf(), source })
}

fn load_with<T>(path: &Path, f: impl Fn(&Value) -> Result<T, DocError>) -> Result<T, CliError> {
    let v = load(path)?;
    with_path(path, f(&v))
}

fn kk_err(e: KkError) -> CliError {
    CliError::Input(e.to_string())
}

fn dispatch(ctx: &Ctx, c: &Command) -> Result<Report, CliError> {
    match c {
        Command::Ktheory { file } => ktheory(file),
        Command::Kk(op) => kk(op),
        Command::Lift(op) => lift(op),
        Command::Spectra(op) => spectra(ctx, op),
        Command::Chart(op) => chart(op),
        Command::VerifyPaper { cases, samples } => {
            let data = match cases {
                Some(p) => load(p)?,
                None => paper::default_cases(),
            };
            Ok(paper::verify_with(&data, ctx.budget as u64, ctx.seed, *samples))
        }
    }
}

fn ktheory(file: &Path) -> Result<Report, CliError> {
    let v = load(file)?;
    if let Some(blocks) = v.get("blocks") {
        let blocks = with_path(
            file,
            blocks
                .as_array()
                .ok_or(DocError::Type { field: "blocks".into(), expected: "an array" })
                .and_then(|bs| bs.iter().map(doc::block_from).collect::<Result<Vec<_>, _>>()),
        )?;
        let alg = etkk_core::Algebra::new(blocks).map_err(|e| CliError::Input(e.to_string()))?;
        let parts: Vec<Value> = alg.blocks().iter().map(|b| doc::ktheory_json(&compute_ktheory(b))).collect();
        return Ok(Report::boolean("ktheory", true, json!({ "blocks": parts })));
    }
    let b = with_path(file, doc::block_from(&v))?;
    Ok(Report::boolean("ktheory", true, doc::ktheory_json(&compute_ktheory(&b))))
}

fn kk(op: &KkOp) -> Result<Report, CliError> {
    Ok(match op {
        KkOp::Validate { file } => {
            let v = load(file)?;
            match doc::diagram_from(&v) {
                Ok(d) => Report::boolean("kk validate", true, json!({ "diagram": doc::diagram_json(&d) })),
                Err(DocError::Kk(e)) => Report::boolean("kk validate", false, json!({ "reason": e.to_string() })),
                Err(e) => return Err(CliError::Doc { path: file.clone(), source: e }),
            }
        }
        KkOp::Equal { first, second } => {
            let d1 = load_with(first, doc::diagram_from)?;
            let d2 = load_with(second, doc::diagram_from)?;
            let eq = kk_equal(&d1, &d2).map_err(kk_err)?;
            let mut details = json!({});
            if eq {
                let w = in_m(&d1.sub(&d2).map_err(kk_err)?).expect("equal classes differ by M");
                details["mu"] = doc::ints_json(&w.mu);
            }
            Report::boolean("kk equal", eq, details)
        }
        KkOp::Compose { first, second } => {
            let d1 = load_with(first, doc::diagram_from)?;
            let d2 = load_with(second, doc::diagram_from)?;
            let d = compose(&d1, &d2).map_err(kk_err)?;
            Report::boolean("kk compose", true, json!({ "diagram": doc::diagram_json(&d) }))
        }
        KkOp::Positive { file } => {
            let d = load_with(file, doc::diagram_from)?;
            Report::boolean("kk positive", is_positive(&d), json!({}))
        }
        KkOp::PositiveModM { file } => {
            let d = load_with(file, doc::diagram_from)?;
            match positive_mod_m(&d) {
                Some((w, rep)) => Report::boolean(
                    "kk positive-mod-m",
                    true,
                    json!({ "mu": doc::ints_json(&w.mu), "representative": doc::diagram_json(&rep) }),
                ),
                None => Report::boolean("kk positive-mod-m", false, json!({})),
            }
        }
        KkOp::Generators { file } => {
            let b = load_with(file, doc::block_from)?;
            let g = dl_generators(&b).map_err(kk_err)?;
            let gens: Vec<Value> = g
                .generators
                .iter()
                .map(|x| json!({ "label": label_json(&x.label), "diagram": doc::diagram_json(&x.diagram) }))
                .collect();
            Report::boolean("kk generators", true, json!({ "permutation": g.permutation, "generators": gens }))
        }
        KkOp::PreservesOrder { file } => {
            let d = load_with(file, doc::diagram_from)?;
            let fails = dl_order_failures(&d).map_err(kk_err)?;
            let failing: Vec<Value> = fails.iter().map(|x| label_json(&x.label)).collect();
            Report::boolean("kk preserves-order", fails.is_empty(), json!({ "failing_generators": failing }))
        }
    })
}

fn label_json(l: &GeneratorLabel) -> Value {
    match l {
        GeneratorLabel::DimensionDrop { x, y, w } => json!({ "kind": "dimension_drop", "x": x, "y": y, "w": doc::int_json(w) }),
        GeneratorLabel::Circle { index } => json!({ "kind": "circle", "index": index }),
    }
}

fn lift_report(command: &str, r: Result<etkk_core::lifting::LiftVerdict, LiftError>) -> Result<Report, CliError> {
    let v = r.map_err(|e| CliError::Input(e.to_string()))?;
    let code = if v.status == LiftStatus::Liftable { 0 } else { 1 };
    let details = doc::verdict_json(&v);
    Ok(Report::new(command, Value::String(v.status.name().into()), code, details))
}

fn lift(op: &LiftOp) -> Result<Report, CliError> {
    match op {
        LiftOp::D0 { file } => lift_report("lift d0", d0_conditions(&load_with(file, doc::diagram_from)?)),
        LiftOp::Suff { file } => lift_report("lift suff", suff_condition(&load_with(file, doc::diagram_from)?)),
        LiftOp::Decide { file } => lift_report("lift decide", decide_lift(&load_with(file, doc::diagram_from)?)),
        LiftOp::Composed { decomposition, g } => {
            let dec = load_with(decomposition, doc::decomposition_input_from)?;
            let g = load_with(g, doc::diagram_from)?;
            lift_report("lift composed", composed_existence(&dec, &g))
        }
        LiftOp::ZeroCheck { file } => {
            let g = load_with(file, doc::diagram_from)?;
            let ok = zero_kk_check(&g).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(Report::boolean("lift zero-check", ok, json!({})))
        }
    }
}

/// Spectra errors that describe a well-formed negative answer.
fn spectra_negative(e: &SpectraError) -> bool {
    matches!(
        e,
        SpectraError::CardinalityMismatch { .. }
            | SpectraError::InteriorCountMismatch { .. }
            | SpectraError::InteriorMismatch
            | SpectraError::DensityViolation { .. }
            | SpectraError::NotKkEqual
    )
}

fn spectra_result(command: &str, r: Result<Report, SpectraError>) -> Result<Report, CliError> {
    match r {
        Ok(rep) => Ok(rep),
        Err(e) if spectra_negative(&e) => Ok(Report::boolean(command, false, json!({ "reason": e.to_string() }))),
        Err(e) => Err(CliError::Input(e.to_string())),
    }
}

fn test_function_json(h: &TestFunction) -> Value {
    match &h.kind {
        TestKind::Type1 { j, r, s } => json!({ "type": 1, "m": h.m, "j": j, "r": r, "s": s }),
        TestKind::Type2(set) => json!({ "type": 2, "m": h.m, "points": set.points, "cells": set.cells }),
    }
}

fn spectra(ctx: &Ctx, op: &SpectraOp) -> Result<Report, CliError> {
    match op {
        SpectraOp::Eig { file, eta } => {
            let s = load_with(file, doc::spectrum_from)?;
            spectra_result("spectra eig", (|| {
                let m = grid_from_eta(eta)?;
                let fam = test_functions(s.block(), m, ctx.budget)?;
                let rows = fam
                    .functions
                    .iter()
                    .map(|h| Ok(json!({ "function": test_function_json(h), "eig": doc::eig_json(&eig(h, &s)?) })))
                    .collect::<Result<Vec<_>, SpectraError>>()?;
                Ok(Report::boolean("spectra eig", true, json!({ "functions": rows, "type2_truncated": fam.type2_truncated })))
            })())
        }
        SpectraOp::Dist { first, second, eta } => {
            let s1 = load_with(first, doc::spectrum_from)?;
            let s2 = load_with(second, doc::spectrum_from)?;
            if s1.block() != s2.block() {
                return Err(CliError::Input(SpectraError::BlockMismatch.to_string()));
            }
            spectra_result("spectra dist", (|| {
                let m = grid_from_eta(eta)?;
                let fam = test_functions(s1.block(), m, ctx.budget)?;
                let mut best: Option<(Rat, &TestFunction)> = None;
                for h in &fam.functions {
                    let d = eig_dist(&eig(h, &s1)?, &eig(h, &s2)?)?;
                    if best.as_ref().is_none_or(|(b, _)| &d > b) {
                        best = Some((d, h));
                    }
                }
                let (max, arg) = match best {
                    Some((d, h)) => (doc::rat_json(&d), test_function_json(h)),
                    None => (doc::rat_json(&Rat::from_integer(0.into())), Value::Null),
                };
                Ok(Report::boolean(
                    "spectra dist",
                    true,
                    json!({ "max": max, "argmax": arg, "functions": fam.functions.len(), "type2_truncated": fam.type2_truncated }),
                ))
            })())
        }
        SpectraOp::KkEqual { first, second } => {
            let s1 = load_with(first, doc::spectrum_from)?;
            let s2 = load_with(second, doc::spectrum_from)?;
            spectra_result("spectra kk-equal", kk_equal_points(&s1, &s2).map(|c| match c {
                Some(c) => Report::boolean("spectra kk-equal", true, json!({ "c": doc::int_json(&c) })),
                None => Report::boolean("spectra kk-equal", false, json!({})),
            }))
        }
        SpectraOp::Align { first, second, eta } => {
            let s1 = load_with(first, doc::spectrum_from)?;
            let s2 = load_with(second, doc::spectrum_from)?;
            spectra_result("spectra align", (|| {
                let m = grid_from_eta(eta)?;
                let a = align_spectra(&s1, &s2, m)?;
                let ok = a.left.base() == a.right.base() && a.maxdist <= a.bound;
                Ok(Report::boolean("spectra align", ok, doc::alignment_json(&a)))
            })())
        }
        SpectraOp::Pair { first, second, eta } => {
            let s1 = load_with(first, doc::spectrum_from)?;
            let s2 = load_with(second, doc::spectrum_from)?;
            spectra_result("spectra pair", pair_cores(&s1, &s2, eta).map(|p| match p {
                Some(pairs) => Report::boolean(
                    "spectra pair",
                    true,
                    json!({ "pairing": pairs.iter().map(|(x, y)| json!([doc::rat_json(x), doc::rat_json(y)])).collect::<Vec<_>>() }),
                ),
                None => Report::boolean("spectra pair", false, json!({})),
            }))
        }
    }
}

fn require(name: &str, v: Option<u64>) -> Result<u64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{name} is required")))
}

fn chart_input(e: ChartError) -> CliError {
    CliError::Input(e.to_string())
}

fn chart(op: &ChartOp) -> Result<Report, CliError> {
    Ok(match op {
        ChartOp::Validate { file } => {
            let v = load(file)?;
            match doc::chart_from(&v) {
                Ok(c) => Report::boolean("chart validate", true, json!({ "chart": doc::chart_json(&c) })),
                Err(e @ (DocError::Chart(_) | DocError::Spectra(_))) => {
                    Report::boolean("chart validate", false, json!({ "reason": e.to_string() }))
                }
                Err(e) => return Err(CliError::Doc { path: file.clone(), source: e }),
            }
        }
        ChartOp::Fiber { file, x } => {
            let c = load_with(file, doc::chart_from)?;
            if x < &Rat::from_integer(0.into()) || x > &Rat::from_integer(1.into()) {
                return Err(CliError::Input(format!("x = {x} is outside [0, 1]")));
            }
            Report::boolean("chart fiber", true, json!({ "fiber": doc::spectrum_json(&c.fiber(x)) }))
        }
        ChartOp::Compose { first, second } => {
            let c1 = load_with(first, doc::chart_from)?;
            let c2 = load_with(second, doc::chart_from)?;
            let c = compose_charts(&c1, &c2).map_err(chart_input)?;
            Report::boolean("chart compose", true, json!({ "chart": doc::chart_json(&c) }))
        }
        ChartOp::Distribute { file, k, l, mesh, witness } => {
            let c = load_with(file, doc::chart_from)?;
            if let Some(wp) = witness {
                let w = load_with(wp, doc::witness_from)?;
                return Ok(match witness_failure(&c, &w).map_err(chart_input)? {
                    None => Report::boolean("chart distribute", true, json!({ "witness": doc::witness_json(&w) })),
                    Some(reason) => Report::boolean("chart distribute", false, json!({ "reason": reason })),
                });
            }
            let (k, l) = (require("k", *k)?, require("l", *l)?);
            match mesh {
                Some(mesh) => match has_distribution(&c, mesh, k, l).map_err(chart_input)? {
                    Some(w) => Report::boolean("chart distribute", true, json!({ "witness": doc::witness_json(&w) })),
                    None => Report::boolean("chart distribute", false, json!({ "reason": "no witness on this grid" })),
                },
                None => match find_distribution(&c, k, l) {
                    Ok((_, w)) => Report::boolean("chart distribute", true, json!({ "witness": doc::witness_json(&w) })),
                    Err(ChartError::DistributionNotFound(reason)) => {
                        Report::boolean("chart distribute", false, json!({ "reason": reason }))
                    }
                    Err(e) => return Err(chart_input(e)),
                },
            }
        }
        ChartOp::Decompose { file, k, l, witness } => {
            let c = load_with(file, doc::chart_from)?;
            let w = match witness {
                Some(wp) => load_with(wp, doc::witness_from)?,
                None => match find_distribution(&c, require("k", *k)?, require("l", *l)?) {
                    Ok((_, w)) => w,
                    Err(ChartError::DistributionNotFound(reason)) => {
                        return Ok(Report::boolean("chart decompose", false, json!({ "reason": reason })))
                    }
                    Err(e) => return Err(chart_input(e)),
                },
            };
            let mut details = match decompose(&c, &w) {
                Ok(cert) => {
                    let ok = cert.checks.iter().all(|x| x.holds());
                    json!({ "ok": ok, "certificate": doc::certificate_json(&cert) })
                }
                Err(ChartError::InequalityFailed { name }) => json!({ "ok": false, "reason": format!("inequality failed: {name}") }),
                Err(e) => return Err(chart_input(e)),
            };
            details["witness"] = doc::witness_json(&w);
            match interior_bound_checks(&c) {
                Ok(checks) => {
                    details["interior_bound"] = Value::Array(checks.iter().map(doc::check_json).collect());
                }
                Err(ChartError::NotInteriorSupported) => {}
                Err(e) => return Err(chart_input(e)),
            }
            let ok = details["ok"].as_bool().unwrap_or(false)
                && details
                    .get("interior_bound")
                    .and_then(Value::as_array)
                    .is_none_or(|a| a.iter().all(|x| x["holds"] == Value::Bool(true)));
            if let Some(m) = details.as_object_mut() {
                m.remove("ok");
            }
            Report::boolean("chart decompose", ok, details)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names() {
        assert_eq!(kebab("PositiveModM"), "positive-mod-m");
        assert_eq!(kebab("KkEqual"), "kk-equal");
        assert_eq!(kebab("D0"), "d0");
    }

    #[test]
    fn usage_errors_exit_two() {
        let r = run(["etkk", "kk", "frobnicate"]);
        assert_eq!(r.exit_code, 2);
        assert!(r.details.contains_key("usage"));
        let r = run(["etkk", "ktheory", "/nonexistent/file.json"]);
        assert_eq!(r.exit_code, 2);
        assert_eq!(r.command, "ktheory");
    }
}
