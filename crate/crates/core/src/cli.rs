//! The `rbdcalc` command line. Exit codes: 0 success, 1 verification
//! failure, 2 usage or parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::handlecalc::{HandleExpression, Ledger};
use crate::numbers::{cf_eval, format_rational, ContinuedFraction};
use crate::plumbing::{boundary_lens, build_linear, to_dot};
use crate::scriptdsl::{
    check_simple_diagram, em_script, execute, parse_script, simple_case, thm_a_script, thm_b_script, DiagramReport,
    ExecError, MoveScript, SimpleCase,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rbdcalc",
    version,
    about = "Rational blow-down calculator: lattice-level Kirby moves with invariant ledgers"
)]
pub struct Cli {
    /// Progress messages on stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
    #[value(name = "em")]
    Em,
    #[value(name = "simple")]
    Simple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    V,
    V4,
    Em,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lens space bounding a linear plumbing.
    Boundary {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true, num_args = 1)]
        framings: Vec<i64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Replay a built-in construction for one n or a range `LO..HI`.
    Verify {
        #[arg(value_enum)]
        theorem: Theorem,
        #[arg(long = "n", value_parser = parse_range)]
        n: NRange,
        /// Parameter m of E(m) for `em` and `simple --case em`.
        #[arg(long, default_value_t = 1)]
        m: i64,
        /// Which embedding to check with `simple` (default: all).
        #[arg(long, value_enum)]
        case: Option<CaseArg>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Parse and execute a move script.
    Run {
        script: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// DOT rendering of the plumbing graph after `step` moves.
    Dot {
        script: PathBuf,
        #[arg(long)]
        step: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub lo: i64,
    pub hi: i64,
}

impl NRange {
    pub fn values(&self) -> Vec<i64> {
        (self.lo..=self.hi).collect()
    }
}

/// `N`, `LO..HI` or `LO..=HI`, both ends inclusive.
pub fn parse_range(text: &str) -> Result<NRange, String> {
    let int = |s: &str| s.trim().parse::<i64>().map_err(|_| format!("`{s}` is not an integer"));
    let range = match text.split_once("..") {
        Some((lo, hi)) => NRange { lo: int(lo)?, hi: int(hi.strip_prefix('=').unwrap_or(hi))? },
        None => {
            let n = int(text)?;
            NRange { lo: n, hi: n }
        }
    };
    if range.lo > range.hi {
        return Err(format!("empty range {text}"));
    }
    Ok(range)
}

#[derive(Debug, Serialize)]
pub struct CaseResult {
    pub theorem: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub n: i64,
    pub pass: bool,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ledger: Option<Ledger>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagram: Option<DiagramReport>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub theorem: String,
    pub pass: bool,
    pub results: Vec<CaseResult>,
}

impl VerifyReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let case = r.case.as_deref().map(|c| format!(" [{c}]")).unwrap_or_default();
            out.push_str(&format!(
                "{}{case} n={:<3} {}  {}\n",
                r.theorem,
                r.n,
                if r.pass { "pass" } else { "FAIL" },
                r.summary
            ));
            if let Some(e) = &r.error {
                out.push_str(&format!("    {e}\n"));
            }
        }
        let failed = self.results.iter().filter(|r| !r.pass).count();
        if failed == 0 {
            out.push_str(&format!("all {} passed\n", self.results.len()));
        } else {
            out.push_str(&format!("{failed} of {} failed\n", self.results.len()));
        }
        out
    }
}

fn endpoint(expr: &HandleExpression) -> String {
    let pieces = expr.piece_multiset();
    if pieces.is_empty() {
        format!("end {}", expr.form())
    } else {
        format!("end {} + [{}]", expr.form(), pieces.join(","))
    }
}

fn script_case(theorem: &str, n: i64, script: Result<MoveScript, String>) -> CaseResult {
    let base = |pass, summary: String, error, ledger| CaseResult {
        theorem: theorem.into(),
        case: None,
        n,
        pass,
        summary,
        error,
        ledger,
        diagram: None,
    };
    let script = match script {
        Ok(s) => s,
        Err(e) => return base(false, "not run".into(), Some(e), None),
    };
    match execute(&script) {
        Ok(run) => base(true, endpoint(&run.expression), None, Some(run.ledger)),
        Err(e) => {
            let ledger = e.ledger().cloned();
            base(false, failing_step(&e), Some(e.to_string()), ledger)
        }
    }
}

fn failing_step(e: &ExecError) -> String {
    match e {
        ExecError::Header { .. } => "start manifold rejected".into(),
        ExecError::MoveRejected { step, statement, .. } => format!("failed at step {step} `{statement}`"),
        ExecError::ExpectationFailed { step, line, .. } => format!("expectation after step {step} (line {line})"),
    }
}

fn simple_result(case: SimpleCase, n: i64) -> CaseResult {
    let mut result = CaseResult {
        theorem: "simple".into(),
        case: Some(case.name()),
        n,
        pass: false,
        summary: String::new(),
        error: None,
        ledger: None,
        diagram: None,
    };
    let report = simple_case(case, n)
        .map_err(|e| e.to_string())
        .and_then(|(start, up, down)| check_simple_diagram(&start, &up, &down, n).map_err(|e| e.to_string()));
    match report {
        Ok(report) => {
            result.pass = report.simple == case.expected_simple();
            let verdict = if report.simple { "simple" } else { "non-simple" };
            let detail: Vec<String> =
                report.mismatches.iter().map(|m| format!("{} {}: {} -> {}", m.path, m.key, m.start, m.end)).collect();
            result.summary =
                if detail.is_empty() { verdict.into() } else { format!("{verdict} ({})", detail.join("; ")) };
            result.diagram = Some(report);
        }
        Err(e) => {
            result.summary = "not run".into();
            result.error = Some(e);
        }
    }
    result
}

fn jobs(
    theorem: Theorem,
    range: NRange,
    m: i64,
    case: Option<CaseArg>,
) -> Result<Vec<(Theorem, Option<SimpleCase>, i64)>, String> {
    let min = match theorem {
        Theorem::A | Theorem::Em | Theorem::Simple => 2,
        Theorem::B => 4,
    };
    if range.lo < min {
        return Err(format!("verify {theorem:?} needs n >= {min}"));
    }
    if m < 1 {
        return Err("--m must be at least 1".into());
    }
    let ns = range.values();
    if theorem != Theorem::Simple {
        return Ok(ns.into_iter().map(|n| (theorem, None, n)).collect());
    }
    let cases: Vec<SimpleCase> = match case {
        Some(CaseArg::V) => vec![SimpleCase::Sphere],
        Some(CaseArg::V4) => vec![SimpleCase::MinusFour],
        Some(CaseArg::Em) => vec![SimpleCase::Elliptic { m }],
        None => vec![SimpleCase::Sphere, SimpleCase::MinusFour, SimpleCase::Elliptic { m }],
    };
    let mut out = Vec::new();
    for c in cases {
        for &n in &ns {
            if c == SimpleCase::MinusFour && (n < 3 || n % 2 == 0) {
                continue;
            }
            out.push((theorem, Some(c), n));
        }
    }
    if out.is_empty() {
        return Err("no n in range applies (the v4 case needs odd n >= 3)".into());
    }
    Ok(out)
}

pub fn verify(theorem: Theorem, range: NRange, m: i64, case: Option<CaseArg>) -> Result<VerifyReport, String> {
    let jobs = jobs(theorem, range, m, case)?;
    let results: Vec<CaseResult> = jobs
        .par_iter()
        .map(|&(t, case, n)| match t {
            Theorem::A => script_case("A", n, thm_a_script(n).map_err(|e| e.to_string())),
            Theorem::B => {
                let mut r = script_case("B", n, thm_b_script(n).map_err(|e| e.to_string()));
                if r.pass {
                    let kind = if n % 2 == 1 { "odd: back to V(-4)" } else { "even: B_2 # -CP^2" };
                    r.summary = format!("{} ({kind})", r.summary);
                }
                r
            }
            Theorem::Em => script_case("em", n, em_script(n, m).map_err(|e| e.to_string())),
            Theorem::Simple => simple_result(case.expect("simple jobs carry a case"), n),
        })
        .collect();
    Ok(VerifyReport { theorem: theorem_name(theorem).into(), pass: results.iter().all(|r| r.pass), results })
}

fn theorem_name(t: Theorem) -> &'static str {
    match t {
        Theorem::A => "A",
        Theorem::B => "B",
        Theorem::Em => "em",
        Theorem::Simple => "simple",
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn read_script(path: &Path) -> Result<MoveScript, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_script(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs the command line; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(stderr, "error: {message}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match cli.command {
        Command::Boundary { framings, format } => {
            let g = build_linear(&framings).map_err(|e| e.to_string())?;
            let lens = boundary_lens(&g).map_err(|e| e.to_string())?;
            let value = cf_eval(&ContinuedFraction(framings.clone())).map_err(|e| e.to_string())?;
            match format {
                Format::Text => {
                    writeln!(stdout, "{lens}  (continued fraction {})", format_rational(&value)).map_err(io)?
                }
                Format::Json => {
                    let json = serde_json::json!({
                        "framings": framings,
                        "value": format_rational(&value),
                        "lens": lens.to_string(),
                    });
                    writeln!(stdout, "{}", serde_json::to_string_pretty(&json).expect("json")).map_err(io)?
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify { theorem, n, m, case, out, format } => {
            if cli.verbose > 0 {
                let _ = writeln!(stderr, "verifying {} for n = {}..={}", theorem_name(theorem), n.lo, n.hi);
            }
            let report = verify(theorem, n, m, case)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            if let Some(path) = &out {
                write_file(path, &json)?;
            }
            match (format, &out) {
                (Format::Json, None) => writeln!(stdout, "{json}").map_err(io)?,
                _ => write!(stdout, "{}", report.to_text()).map_err(io)?,
            }
            for r in report.results.iter().filter(|r| !r.pass) {
                let _ = writeln!(stderr, "{} n={}: {}", r.theorem, r.n, r.error.as_deref().unwrap_or(&r.summary));
            }
            Ok(if report.pass { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Run { script, out, format } => {
            let parsed = read_script(&script)?;
            let (ledger, code) = match execute(&parsed) {
                Ok(run) => (run.ledger, EXIT_OK),
                Err(e) => {
                    let _ = writeln!(stderr, "{}: {e}", script.display());
                    (e.ledger().cloned().unwrap_or_default(), EXIT_FAILED)
                }
            };
            let body = match format {
                Format::Json => ledger.to_json() + "\n",
                Format::Text => ledger.to_text(),
            };
            match &out {
                Some(path) => write_file(path, &body)?,
                None => write!(stdout, "{body}").map_err(io)?,
            }
            Ok(code)
        }
        Command::Dot { script, step } => {
            let parsed = read_script(&script)?;
            let run = match execute(&parsed) {
                Ok(run) => run,
                Err(e) => {
                    let _ = writeln!(stderr, "{}: {e}", script.display());
                    return Ok(EXIT_FAILED);
                }
            };
            let graph = run.graph_at(step)?;
            write!(stdout, "{}", to_dot(graph)).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}
