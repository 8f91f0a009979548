//! `evoalg`: command-line front end for evolution-algebra analysis.
//!
//! Exit codes: 0 success (conjecture candidates included), 2 usage, input or
//! parse error, 3 internal-consistency violation, 4 solver shortfall above
//! `--max-shortfall`.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evoalg::analysis::{self, AnalysisReport};
use evoalg::harness::{self, CampaignReport, ConjectureVerdict, Verdict};
use evoalg::json::{SolutionRecord, SolveRecord};
use evoalg::{AnyAlgebra, QuadraticSystem, SolveOutcome, SolverConfig, SystemKind};
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 2;
const EXIT_VIOLATION: u8 = 3;
const EXIT_SHORTFALL: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "evoalg",
    version,
    about = "Idempotents, subalgebras and solvability of evolution algebras"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Emit JSON instead of the text report
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit the text report (default)
    #[arg(long, global = true)]
    text: bool,
    /// Write the report to this file instead of standard output
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Track paths and run trials on all cores
    #[arg(long, global = true)]
    parallel: bool,
    /// Endpoint residual bound
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_final: f64,
    /// Coordinates below this modulus count as zero
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_zero: f64,
    /// Relative radius for merging endpoints
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol_dedup: f64,
    /// Seed for start systems and random campaigns
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest tolerated fraction of failed paths or shortfall trials
    #[arg(long, global = true, default_value_t = 0.05)]
    max_shortfall: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one of the quadratic systems attached to an algebra
    Solve {
        #[arg(long, value_enum)]
        system: KindArg,
        #[arg(long)]
        input: PathBuf,
    },
    /// Full structural report for an algebra
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Certified idempotents
    Idempotents {
        #[arg(long)]
        input: PathBuf,
    },
    /// One-dimensional subalgebras of a regular algebra
    Subalgebras {
        #[arg(long)]
        input: PathBuf,
    },
    /// Randomised campaign for a proved statement
    Verify {
        #[arg(value_enum)]
        campaign: CampaignArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Solvability / idempotent / trivial-solution agreement
    Conjecture {
        #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
        input: Option<PathBuf>,
        /// Number of random algebras to sweep
        #[arg(long)]
        sweep: Option<usize>,
        /// Largest dimension in a sweep
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
    /// Re-evaluate the residuals recorded in a `solve --json` output
    Check {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    General,
    Subalgebra,
    Idempotent,
}

impl From<KindArg> for SystemKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::General => SystemKind::General,
            KindArg::Subalgebra => SystemKind::Subalgebra,
            KindArg::Idempotent => SystemKind::Idempotent,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CampaignArg {
    /// Two non-zero coordinates for `x∘x = A x`
    Theorem21,
    /// Every regular algebra has an idempotent
    Idempotents,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<evoalg::Error> for Failure {
    fn from(e: evoalg::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(message: String) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message,
    }
}

/// Rendered report plus the exit status it implies.
struct Output {
    json: Value,
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = if cli.global.json {
                let mut s = serde_json::to_string_pretty(&out.json).expect("report serialises");
                s.push('\n');
                s
            } else {
                out.text
            };
            if let Err(f) = emit(cli.global.output.as_deref(), &body) {
                eprintln!("error: {}", f.message);
                return ExitCode::from(f.code);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(path: Option<&Path>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn config(g: &Global) -> Result<SolverConfig, Failure> {
    if !(0.0..=1.0).contains(&g.max_shortfall) {
        return Err(usage(format!(
            "--max-shortfall {} outside [0, 1]",
            g.max_shortfall
        )));
    }
    let cfg = SolverConfig {
        tol_final: g.tol_final,
        tol_zero: g.tol_zero,
        tol_dedup: g.tol_dedup,
        rng_seed: g.seed,
        parallel: g.parallel,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> Result<AnyAlgebra, Failure> {
    AnyAlgebra::from_json_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    let cfg = config(g)?;
    match &cli.command {
        Command::Solve { system, input } => {
            let alg = load_algebra(input)?;
            let kind = SystemKind::from(*system);
            let sys = match &alg {
                AnyAlgebra::Float(a) => QuadraticSystem::for_algebra(kind, a)?,
                AnyAlgebra::Exact(a) => QuadraticSystem::for_algebra(kind, a)?.to_float(),
            };
            let outcome = evoalg::solver::solve(&sys, &cfg)?;
            Ok(solve_output(&outcome, &cfg, g.max_shortfall))
        }
        Command::Analyze { input } => {
            let report = match load_algebra(input)? {
                AnyAlgebra::Float(a) => analysis::analyze(&a, &cfg)?,
                AnyAlgebra::Exact(a) => analysis::analyze(&a, &cfg)?,
            };
            Ok(analysis_output(&report, g.max_shortfall))
        }
        Command::Idempotents { input } => {
            let search = match load_algebra(input)? {
                AnyAlgebra::Float(a) => analysis::search_idempotents(&a, &cfg)?,
                AnyAlgebra::Exact(a) => analysis::search_idempotents(&a, &cfg)?,
            };
            let records: Vec<_> = search
                .witnesses
                .iter()
                .map(analysis::IdempotentRecord::from)
                .collect();
            let text = render::idempotents(&records);
            Ok(Output {
                json: json!({ "idempotents": records, "paths": analysis::PathStats::from(&search.outcome) }),
                text,
                code: path_code(&search.outcome, g.max_shortfall),
            })
        }
        Command::Subalgebras { input } => {
            let search = match load_algebra(input)? {
                AnyAlgebra::Float(a) => analysis::search_one_dim_subalgebras(&a, &cfg)?,
                AnyAlgebra::Exact(a) => analysis::search_one_dim_subalgebras(&a, &cfg)?,
            };
            let records: Vec<_> = search
                .witnesses
                .iter()
                .map(analysis::SubalgebraRecord::from)
                .collect();
            let text = render::subalgebras(&records);
            Ok(Output {
                json: json!({ "one_dim_subalgebras": records, "paths": analysis::PathStats::from(&search.outcome) }),
                text,
                code: path_code(&search.outcome, g.max_shortfall),
            })
        }
        Command::Verify { campaign, n, trials } => {
            let report = match campaign {
                CampaignArg::Theorem21 => harness::verify_theorem_main(*n, *trials, &cfg)?,
                CampaignArg::Idempotents => harness::verify_idempotent_existence(*n, *trials, &cfg)?,
            };
            // Candidates here contradict a proved statement.
            let bad = report.internal_violations + report.counterexample_candidates.len();
            Ok(campaign_output(&report, bad, g.max_shortfall))
        }
        Command::Conjecture { input, sweep, n_max } => match (input, sweep) {
            (Some(path), _) => {
                let alg = load_algebra(path)?;
                let verdict = harness::test_conjecture(&alg, &cfg)?;
                Ok(verdict_output(&verdict))
            }
            (None, Some(count)) => {
                let report = harness::conjecture_sweep(*count, *n_max, &cfg)?;
                Ok(campaign_output(
                    &report,
                    report.internal_violations,
                    g.max_shortfall,
                ))
            }
            (None, None) => Err(usage("conjecture needs --input or --sweep".into())),
        },
        Command::Check { input } => {
            let text = read(input)?;
            let record: SolveRecord =
                serde_json::from_str(&text).map_err(|e| usage(format!("{}: $: {e}", input.display())))?;
            check(&record, &cfg)
        }
    }
}

fn shortfall_code(rate: f64, max: f64) -> u8 {
    if rate > max {
        EXIT_SHORTFALL
    } else {
        0
    }
}

fn path_code(outcome: &SolveOutcome, max: f64) -> u8 {
    shortfall_code(
        outcome.failed_paths as f64 / outcome.bezout_count.max(1) as f64,
        max,
    )
}

fn solve_output(outcome: &SolveOutcome, cfg: &SolverConfig, max_shortfall: f64) -> Output {
    let record = SolveRecord::from(outcome);
    let real_nontrivial: Vec<SolutionRecord> = analysis::real_records(&outcome.solutions, cfg.tol_zero)
        .into_iter()
        .filter(|r| !r.support.is_empty())
        .collect();
    Output {
        json: serde_json::to_value(&record).expect("record serialises"),
        text: render::solve(&record, &real_nontrivial),
        code: path_code(outcome, max_shortfall),
    }
}

fn analysis_output(report: &AnalysisReport, max_shortfall: f64) -> Output {
    let p = &report.idempotent_paths;
    Output {
        json: serde_json::to_value(report).expect("report serialises"),
        text: render::analysis(report),
        code: shortfall_code(
            p.failed_paths as f64 / p.bezout_count.max(1) as f64,
            max_shortfall,
        ),
    }
}

fn campaign_output(report: &CampaignReport, bad: usize, max_shortfall: f64) -> Output {
    let code = if bad > 0 {
        EXIT_VIOLATION
    } else {
        shortfall_code(report.shortfall_rate(), max_shortfall)
    };
    Output {
        json: serde_json::to_value(report).expect("report serialises"),
        text: render::campaign(report),
        code,
    }
}

fn verdict_output(v: &ConjectureVerdict) -> Output {
    let code = match v.classify() {
        Verdict::Violation => EXIT_VIOLATION,
        _ => 0,
    };
    Output {
        json: serde_json::to_value(v).expect("verdict serialises"),
        text: render::verdict(v),
        code,
    }
}

/// Recomputes every residual from the normal form stored in the record.
fn check(record: &SolveRecord, cfg: &SolverConfig) -> Result<Output, Failure> {
    let sys = record.system()?;
    let mut mismatches = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (i, s) in record.solutions.iter().enumerate() {
        let r = sys.residual(&s.point())?;
        max_residual = max_residual.max(r);
        if r > s.residual * (1.0 + 1e-6) + 1e-15 {
            mismatches.push(json!({ "solution": i, "recorded": s.residual, "recomputed": r }));
        }
    }
    let within_tol = record
        .solutions
        .iter()
        .filter(|s| s.residual <= cfg.tol_final)
        .count();
    let ok = mismatches.is_empty();
    let text = format!(
        "solutions={} reproduced={} within_tol_final={} max_residual={:e}\n",
        record.solutions.len(),
        ok,
        within_tol,
        max_residual
    );
    Ok(Output {
        json: json!({
            "solutions": record.solutions.len(),
            "reproduced": ok,
            "within_tol_final": within_tol,
            "max_residual": max_residual,
            "mismatches": mismatches,
        }),
        text,
        code: if ok { 0 } else { EXIT_VIOLATION },
    })
}
