//! Batch runner for scenario files.
//!
//! A scenario file is a JSON document `{"scenarios": [...]}`; see
//! [`Scenario`] for the fields. Each scenario is verified independently and
//! reported as `PASS`, `FAIL` or `INCONCLUSIVE`.

mod report;
mod scenario;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;

pub use report::{RunReport, ScenarioResult, Totals};
pub use scenario::{load_scenarios, parse_scenarios, Budgets, Kind, Scenario, ScenarioFile};

use crate::collar_formula::Outcome;

/// The bundled catalog.
pub const THEOREM_SUITE: &str = include_str!("../../scenarios/theorem_suite.json");

/// Negative-path fixtures with the exit code each must produce.
pub const FIXTURES: [(&str, &str, i32); 4] = [
    (
        "pass",
        include_str!("../../scenarios/fixtures/pass.json"),
        0,
    ),
    (
        "broken_identity",
        include_str!("../../scenarios/fixtures/broken_identity.json"),
        1,
    ),
    (
        "degenerate_morse",
        include_str!("../../scenarios/fixtures/degenerate_morse.json"),
        2,
    ),
    (
        "malformed",
        include_str!("../../scenarios/fixtures/malformed.json"),
        3,
    ),
];

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Structured,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "collar-index",
    version,
    about = "Verify fixed point index identities on collared domains"
)]
pub struct Args {
    /// Scenario file; the bundled catalog when omitted.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub report: ReportFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Only scenarios of this kind.
    #[arg(long)]
    pub filter: Option<String>,
    /// List the scenarios instead of running them.
    #[arg(long)]
    pub list: bool,
    /// Run the bundled negative-path fixtures and check their exit codes.
    #[arg(long)]
    pub self_test: bool,
}

/// Exit code for a finished run: any `FAIL` wins over `INCONCLUSIVE`.
pub fn exit_code(report: &RunReport) -> i32 {
    if report.totals.fail > 0 {
        EXIT_FAIL
    } else if report.totals.inconclusive > 0 {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_PASS
    }
}

/// Runs the scenarios on a pool of `jobs` workers; results keep the
/// declaration order.
pub fn run_scenarios(scenarios: &[Scenario], jobs: Option<usize>) -> crate::Result<RunReport> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| crate::Error::Internal(format!("cannot start worker pool: {e}")))?;
    let results: Vec<ScenarioResult> =
        pool.install(|| scenarios.par_iter().map(report::run_one).collect());
    Ok(RunReport::new(results))
}

fn filtered(scenarios: Vec<Scenario>, filter: &Option<String>) -> Vec<Scenario> {
    match filter {
        None => scenarios,
        Some(k) => scenarios
            .into_iter()
            .filter(|s| s.kind.name() == k)
            .collect(),
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn load(args: &Args) -> Result<Vec<Scenario>, String> {
    let scenarios = match &args.file {
        Some(p) => load_scenarios(p),
        None => parse_scenarios(THEOREM_SUITE),
    };
    scenarios.map_err(|e| e.to_string())
}

/// Runs the source text of a scenario file and returns the exit code.
pub fn run_source(src: &str, jobs: Option<usize>) -> i32 {
    match parse_scenarios(src) {
        Err(_) => EXIT_INVALID,
        Ok(s) => match run_scenarios(&s, jobs) {
            Ok(r) => exit_code(&r),
            Err(_) => EXIT_INVALID,
        },
    }
}

fn self_test(args: &Args) -> i32 {
    let mut lines = String::new();
    let mut ok = true;
    for (name, src, want) in FIXTURES {
        let got = run_source(src, args.jobs);
        let verdict = if got == want { "ok" } else { "MISMATCH" };
        ok &= got == want;
        lines.push_str(&format!(
            "{verdict:8} {name:20} expected exit {want}, got {got}\n"
        ));
    }
    if emit(&lines, &args.out).is_err() {
        return EXIT_INVALID;
    }
    if ok {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with(args: Args) -> i32 {
    if args.self_test {
        return self_test(&args);
    }
    let scenarios = match load(&args) {
        Ok(s) => filtered(s, &args.filter),
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    if args.list {
        let mut text = String::new();
        for s in &scenarios {
            text.push_str(&format!(
                "{:32} {:24} {}\n",
                s.name,
                s.kind.name(),
                s.description
            ));
        }
        return match emit(&text, &args.out) {
            Ok(()) => EXIT_PASS,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INVALID
            }
        };
    }
    let start = Instant::now();
    let report = match run_scenarios(&scenarios, args.jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let text = match args.report {
        ReportFormat::Text => report.to_text(Some(start.elapsed())),
        ReportFormat::Structured => report.to_json(),
    };
    if let Err(e) = emit(&text, &args.out) {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    exit_code(&report)
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Inconclusive => "INCONCLUSIVE",
        }
    }
}
