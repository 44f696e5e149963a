//! The `symidx` command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::czindex::{cz_lagrangian_against, cz_periodic, hormander, Flavor, IndexReport};
use crate::doubling::{verify_diagonal, verify_index_theorem, DefectReport, DiagonalReport, HalfPathData};
use crate::error::Error;
use crate::maslov::{CrossingOptions, CrossingPosition, SymplecticPathSpec};
use crate::novikov::{self, NovikovError, PushforwardTable};
use crate::random::DEFAULT_SEED;
use crate::suite::{self, Status, SuiteConfig, SuiteSummary, TrialRecord};
use crate::symlin::{LagrangianFrame, Mat, SympSpace, SymplecticMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    /// One JSON object per line.
    Records,
}

#[derive(Debug, Parser)]
#[command(name = "symidx", version, about = "Maslov, Conley-Zehnder and Hormander indices; doubling checks; Novikov bookkeeping")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed for randomized work.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Trials per dimension in each suite.
    #[arg(long, global = true, default_value_t = 50)]
    pub trials: usize,
    /// Signature tolerance; intersections are decided at its square root.
    #[arg(long, global = true, default_value_t = crate::symlin::DEFAULT_TOL)]
    pub tol: f64,
    /// Grid cells for the crossing scan.
    #[arg(long, global = true, default_value_t = 4096)]
    pub grid: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Conley-Zehnder index of a path file.
    Index {
        input: PathBuf,
        #[arg(long, value_parser = parse_flavor)]
        flavor: Option<Flavor>,
        /// Stretch the segment durations to this total, keeping the generators.
        #[arg(long)]
        duration: Option<f64>,
        /// Treat an endpoint with eigenvalue 1 as an error (periodic flavor).
        #[arg(long)]
        nondegenerate: bool,
    },
    /// Doubles a half-path and checks the index defect formula.
    Double {
        input: PathBuf,
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Diagonal doubling of a path on [0, 2].
    Diagonal {
        input: PathBuf,
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Hormander index s(A, B; C, D) of four frames.
    Hormander { input: PathBuf },
    /// Pushes a Novikov element forward, or runs the golden check.
    Novikov {
        input: Option<PathBuf>,
        #[arg(long)]
        golden: bool,
    },
    /// Runs every property suite.
    Suite,
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    s.parse()
}

/// A fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub grid: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let c = cli.common;
        RunConfig {
            command: cli.command,
            seed: c.seed,
            trials: c.trials,
            tol: c.tol,
            grid: c.grid,
            format: c.format,
            output: c.output,
        }
    }
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            seed: DEFAULT_SEED,
            trials: 50,
            tol: crate::symlin::DEFAULT_TOL,
            grid: 4096,
            format: Format::Text,
            output: None,
        }
    }

    fn opts(&self) -> CrossingOptions {
        CrossingOptions { tol: self.tol, grid: self.grid }
    }
}

/// Report text and exit status of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub text: String,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::IrregularCrossing { .. }
            | Error::Unresolved { .. }
            | Error::Degenerate { .. }
            | Error::DegenerateEndpoint
            | Error::Nondegeneracy(_)
            | Error::Transversality(_)
            | Error::AuxiliaryNotFound { .. } => EXIT_DEGENERATE,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<NovikovError> for Failure {
    fn from(e: NovikovError) -> Self {
        Failure::input(e.to_string())
    }
}

/// The path file: `{"n", "segments": [{"S": [...], "d"}], "start"?, "seed_frame"?, "flavor"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathFile {
    pub n: usize,
    pub segments: Vec<SegmentFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_frame: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<Flavor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentFile {
    #[serde(rename = "S")]
    pub s: Vec<f64>,
    pub d: f64,
}

/// Four row-major `2n × n` frames: `{"n", "A", "B", "C", "D"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HormanderFile {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
}

fn matrix(field: &str, data: &[f64], rows: usize, cols: usize) -> Result<Mat, Failure> {
    if data.len() != rows * cols {
        return Err(Failure::input(format!("{field}: expected {} entries ({rows}x{cols}), found {}", rows * cols, data.len())));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Failure::input(format!("{field}: entries must be finite")));
    }
    Ok(Mat::from_row_slice(rows, cols, data))
}

fn frame(field: &str, data: &[f64], space: &SympSpace) -> Result<LagrangianFrame, Failure> {
    let m = matrix(field, data, space.dim(), space.dim_half())?;
    LagrangianFrame::new(m, space, 1e-9).map_err(|e| Failure::input(format!("{field}: {e}")))
}

impl PathFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("path file: {e}"))
    }

    fn space(&self) -> Result<SympSpace, Failure> {
        if self.n == 0 {
            return Err(Failure::input("n: must be positive"));
        }
        Ok(SympSpace::standard(self.n))
    }

    pub fn to_path(&self) -> Result<SymplecticPathSpec, String> {
        self.to_path_inner().map_err(|f| f.message)
    }

    fn to_path_inner(&self) -> Result<SymplecticPathSpec, Failure> {
        let space = self.space()?;
        let dim = space.dim();
        if self.segments.is_empty() {
            return Err(Failure::input("segments: at least one segment is required"));
        }
        let mut parts = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            let s = matrix(&format!("segments[{i}].S"), &seg.s, dim, dim)?;
            let asym = (&s - s.transpose()).amax();
            if asym > 1e-10 {
                return Err(Failure::input(format!("segments[{i}].S: generator is not symmetric (residual {asym:.3e})")));
            }
            if !(seg.d.is_finite() && seg.d > 0.0) {
                return Err(Failure::input(format!("segments[{i}].d: duration must be positive")));
            }
            parts.push((s, seg.d));
        }
        let start = match &self.start {
            Some(data) => {
                let m = matrix("start", data, dim, dim)?;
                Some(SymplecticMatrix::new(m, &space, 1e-9).map_err(|e| Failure::input(format!("start: {e}")))?)
            }
            None => None,
        };
        SymplecticPathSpec::new(&space, parts, start).map_err(|e| Failure::input(format!("segments: {e}")))
    }

    fn seed_frame(&self) -> Result<Option<LagrangianFrame>, Failure> {
        let space = self.space()?;
        self.seed_frame.as_ref().map(|d| frame("seed_frame", d, &space)).transpose()
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_path(input: &PathBuf, duration: Option<f64>) -> Result<(PathFile, SymplecticPathSpec), Failure> {
    let file = PathFile::parse(&read(input)?).map_err(Failure::input)?;
    let mut path = file.to_path_inner()?;
    if let Some(t) = duration {
        if !(t.is_finite() && t > 0.0) {
            return Err(Failure::input("--duration: must be positive"));
        }
        path = path.with_total_duration(t);
    }
    Ok((file, path))
}

fn position_name(p: CrossingPosition) -> &'static str {
    match p {
        CrossingPosition::Start => "start",
        CrossingPosition::Interior => "interior",
        CrossingPosition::Joint => "joint",
        CrossingPosition::End => "end",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub time: f64,
    pub position: String,
    pub dimension: usize,
    pub signature: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature_after: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub kind: String,
    pub flavor: Flavor,
    pub value: crate::halfint::HalfInt,
    pub crossings: Vec<CrossingRecord>,
}

impl IndexRecord {
    fn from_report(r: &IndexReport) -> Self {
        let crossings = r
            .crossings
            .iter()
            .map(|c| CrossingRecord {
                // rounded so reports do not depend on the last bits of a bisection
                time: (c.time * 1e9).round() / 1e9,
                position: position_name(c.position).into(),
                dimension: c.dimension(),
                signature: c.signature.value(),
                signature_after: c.signature_after.map(|s| s.value()),
            })
            .collect();
        IndexRecord { kind: "index".into(), flavor: r.flavor, value: r.value, crossings }
    }
}

fn emit<T: Serialize>(out: &mut String, record: &T) {
    out.push_str(&serde_json::to_string(record).expect("records serialize"));
    out.push('\n');
}

pub fn run_index(cfg: &RunConfig) -> Result<String, String> {
    run_index_inner(cfg).map_err(|f| f.message)
}

fn run_index_inner(cfg: &RunConfig) -> Result<String, Failure> {
    let Command::Index { input, flavor, duration, nondegenerate } = &cfg.command else {
        return Err(Failure::input("not an index command"));
    };
    let (file, path) = load_path(input, *duration)?;
    let flavor = flavor.or(file.flavor).unwrap_or(Flavor::Lagrangian);
    let opts = cfg.opts();
    let report = match flavor {
        Flavor::Lagrangian => {
            let reference = file.seed_frame()?.unwrap_or_else(|| path.space().reference_lagrangian());
            cz_lagrangian_against(&path, &reference, &opts)?
        }
        Flavor::Periodic => cz_periodic(&path, *nondegenerate, &opts)?,
    };
    let record = IndexRecord::from_report(&report);
    let mut out = String::new();
    match cfg.format {
        Format::Records => emit(&mut out, &record),
        Format::Text => {
            let _ = writeln!(out, "flavor = {}", record.flavor);
            let _ = writeln!(out, "index = {}", record.value);
            for c in &record.crossings {
                let after = c.signature_after.map(|s| format!(" signature_after={s:+}")).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "crossing t={:.9} position={} dim={} signature={:+}{}",
                    c.time, c.position, c.dimension, c.signature, after
                );
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectRecord {
    pub kind: String,
    #[serde(flatten)]
    pub report: DefectReport,
    pub pass: bool,
}

fn defect_text(out: &mut String, r: &DefectReport) {
    let _ = writeln!(out, "mu_plus = {}", r.mu_plus);
    let _ = writeln!(out, "mu_minus = {}", r.mu_minus);
    let _ = writeln!(out, "mu_loop = {}", r.mu_loop);
    let _ = writeln!(out, "sign_q = {}", r.q_signature);
    let _ = writeln!(out, "defect = {}", r.defect);
}

fn run_double(cfg: &RunConfig, input: &PathBuf, duration: Option<f64>) -> Result<(String, bool), Failure> {
    let (_, path) = load_path(input, duration)?;
    let report = verify_index_theorem(&HalfPathData::standard(path)?, &cfg.opts())?;
    let mut out = String::new();
    match cfg.format {
        Format::Records => emit(&mut out, &DefectRecord { kind: "double".into(), report, pass: report.pass() }),
        Format::Text => {
            defect_text(&mut out, &report);
            let _ = writeln!(out, "{}", if report.pass() { "PASS" } else { "FAIL" });
        }
    }
    Ok((out, report.pass()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalRecord {
    pub kind: String,
    #[serde(flatten)]
    pub report: DiagonalReport,
    pub pass: bool,
}

fn run_diagonal(cfg: &RunConfig, input: &PathBuf, duration: Option<f64>) -> Result<(String, bool), Failure> {
    let (_, path) = load_path(input, duration)?;
    let report = verify_diagonal(&path, &cfg.opts())?;
    let mut out = String::new();
    match cfg.format {
        Format::Records => emit(&mut out, &DiagonalRecord { kind: "diagonal".into(), report, pass: report.pass() }),
        Format::Text => {
            defect_text(&mut out, &report.defect);
            let _ = writeln!(out, "mu_half = {}", report.mu_half);
            let _ = writeln!(out, "cz_factor = {}", report.cz_factor);
            let _ = writeln!(out, "sign_q_zero = {}", report.sign_q_zero);
            let _ = writeln!(out, "q_block_anti_diagonal = {}", report.q_block_anti_diagonal);
            let _ = writeln!(out, "loop_equals_twice_half = {}", report.loop_equals_twice_half);
            let _ = writeln!(out, "half_equals_factor_index = {}", report.half_equals_factor_index);
            let _ = writeln!(out, "{}", if report.pass() { "PASS" } else { "FAIL" });
        }
    }
    Ok((out, report.pass()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HormanderRecord {
    pub kind: String,
    pub value: crate::halfint::HalfInt,
}

fn run_hormander(cfg: &RunConfig, input: &PathBuf) -> Result<String, Failure> {
    let file: HormanderFile =
        serde_json::from_str(&read(input)?).map_err(|e| Failure::input(format!("hormander file: {e}")))?;
    if file.n == 0 {
        return Err(Failure::input("n: must be positive"));
    }
    let space = SympSpace::standard(file.n);
    let a = frame("A", &file.a, &space)?;
    let b = frame("B", &file.b, &space)?;
    let c = frame("C", &file.c, &space)?;
    let d = frame("D", &file.d, &space)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let value = hormander(&a, &b, &c, &d, &cfg.opts(), &mut rng)?;
    let mut out = String::new();
    match cfg.format {
        Format::Records => emit(&mut out, &HormanderRecord { kind: "hormander".into(), value }),
        Format::Text => {
            let _ = writeln!(out, "s = {value}");
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NovikovRecord {
    pub kind: String,
    pub element: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub golden: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diff: Vec<novikov::TermDiff>,
}

pub fn run_novikov(cfg: &RunConfig) -> Result<String, String> {
    run_novikov_inner(cfg).map(|(s, _)| s).map_err(|f| f.message)
}

fn run_novikov_inner(cfg: &RunConfig) -> Result<(String, bool), Failure> {
    let Command::Novikov { input, golden } = &cfg.command else {
        return Err(Failure::input("not a novikov command"));
    };
    let element = match input {
        Some(p) => Some(novikov::parse_element(read(p)?.trim())?),
        None => None,
    };
    let mut out = String::new();
    let (record, ok) = if *golden {
        let report = match &element {
            Some(e) => novikov::verify_seidel_with(e)?,
            None => novikov::verify_seidel(),
        };
        let ok = report.pass();
        (
            NovikovRecord { kind: "novikov".into(), element: report.computed.to_string(), golden: Some(ok), diff: report.diff },
            ok,
        )
    } else {
        let Some(e) = element else {
            return Err(Failure::input("novikov: an element file is required without --golden"));
        };
        let pushed = novikov::albers_delta1_pushforward(&e, &PushforwardTable::default())?;
        (NovikovRecord { kind: "novikov".into(), element: pushed.to_string(), golden: None, diff: Vec::new() }, true)
    };
    match cfg.format {
        Format::Records => emit(&mut out, &record),
        Format::Text => {
            if !record.element.is_empty() {
                let _ = writeln!(out, "{}", record.element);
            }
            if let Some(pass) = record.golden {
                for d in &record.diff {
                    let _ = writeln!(
                        out,
                        "mismatch {} e^{{{}}}: expected {}, found {}",
                        d.symbol, d.exponent, d.expected, d.found
                    );
                }
                let _ = writeln!(out, "{}", if pass { "PASS" } else { "MISMATCH" });
            }
        }
    }
    Ok((out, ok))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub kind: String,
    #[serde(flatten)]
    pub summary: SuiteSummary,
}

pub fn run_suite(cfg: &RunConfig) -> (String, bool) {
    let scfg = SuiteConfig { seed: cfg.seed, trials: cfg.trials, opts: cfg.opts() };
    let summaries = suite::run_all(&scfg);
    let ok = summaries.iter().all(SuiteSummary::ok);
    let mut out = String::new();
    match cfg.format {
        Format::Records => {
            for s in &summaries {
                for r in &s.records {
                    emit(&mut out, r);
                }
                emit(&mut out, &SummaryRecord { kind: "summary".into(), summary: s.clone() });
            }
        }
        Format::Text => {
            let _ = writeln!(out, "seed = {:#x}, trials = {}", cfg.seed, cfg.trials);
            if cfg.trials == 0 {
                let _ = writeln!(out, "warning: 0 trials, randomized suites pass vacuously");
            }
            for s in &summaries {
                let _ = writeln!(out, "{:<30} pass {:>4}  skip {:>4}  fail {:>4}", s.suite, s.pass, s.skip, s.fail);
                for r in s.records.iter().filter(|r| r.status == Status::Fail) {
                    let _ = writeln!(out, "  FAIL {}", failure_line(r));
                }
            }
            let _ = writeln!(out, "{}", if ok { "ALL PASS" } else { "FAILURES" });
        }
    }
    (out, ok)
}

fn failure_line(r: &TrialRecord) -> String {
    let values: Vec<String> = r.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("trial {} seed {:#x} n {} {} {}", r.trial, r.seed, r.n, values.join(" "), r.note.clone().unwrap_or_default())
}

/// Runs a command to completion; errors become a message and an exit status.
pub fn execute(cfg: &RunConfig) -> RunOutput {
    let result: Result<(String, bool), Failure> = match &cfg.command {
        Command::Index { .. } => run_index_inner(cfg).map(|s| (s, true)),
        Command::Double { input, duration } => run_double(cfg, input, *duration),
        Command::Diagonal { input, duration } => run_diagonal(cfg, input, *duration),
        Command::Hormander { input } => run_hormander(cfg, input).map(|s| (s, true)),
        Command::Novikov { .. } => run_novikov_inner(cfg),
        Command::Suite => Ok(run_suite(cfg)),
    };
    match result {
        Ok((text, true)) => RunOutput { code: EXIT_OK, text },
        Ok((text, false)) => RunOutput { code: EXIT_VERIFICATION, text },
        Err(f) => RunOutput { code: f.code, text: format!("error: {}\n", f.message) },
    }
}
