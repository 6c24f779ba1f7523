use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use abp::bench::{load_suite, run_bench};
use abp::format::{self, Format};
use abp::{load_domain, load_problem, LoadError};
use abp_core::oracle::brute_force;
use abp_core::{plan, validate, Domain, PlanStatus, Problem, SearchConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "abp", version, about = "Assumption-based HTN planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SearchArgs {
    /// Maximum number of assumptions in a conjecture (unbounded by default).
    #[arg(long)]
    max_assumptions: Option<u32>,
    #[arg(long, default_value_t = 64)]
    max_depth: u32,
    /// Retry with depth bounds 1, 2, ... up to --max-depth.
    #[arg(long)]
    iterative_deepening: bool,
    /// Retry with assumption bounds 0, 1, ... up to --max-assumptions.
    #[arg(long)]
    widen_assumptions: bool,
    #[arg(long, default_value_t = 1_000_000)]
    node_budget: u64,
    /// Skip nodes reached before with no more assumptions.
    #[arg(long)]
    prune_dominated: bool,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            max_assumptions: self.max_assumptions,
            max_depth: self.max_depth,
            iterative_deepening: self.iterative_deepening,
            widen_assumptions: self.widen_assumptions,
            node_budget: self.node_budget,
            prune_dominated: self.prune_dominated,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Find the conjecture with the fewest assumptions.
    Plan {
        domain: PathBuf,
        problem: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value_t = Format::Sexp)]
        format: Format,
        /// Recorded in JSON output; the search itself is deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Replay a conjecture and report its state trajectory.
    Validate {
        domain: PathBuf,
        problem: PathBuf,
        conjecture: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Sexp)]
        format: Format,
    },
    /// Exhaustive search for the minimum weight (small instances only).
    Oracle {
        domain: PathBuf,
        problem: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long, default_value_t = 3)]
        weight: u32,
        #[arg(long, value_enum, default_value_t = Format::Sexp)]
        format: Format,
    },
    /// Time the planner on every problem of a directory.
    Bench {
        suite: PathBuf,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        /// Comma-separated assumption bounds; "none" is unbounded.
        #[arg(long, default_value = "0,2")]
        bounds: String,
        #[arg(long, default_value_t = 64)]
        max_depth: u32,
        #[arg(long, default_value_t = 1_000_000)]
        node_budget: u64,
        #[arg(long, value_enum, default_value_t = Format::Sexp)]
        format: Format,
    },
}

fn load(domain: &Path, problem: &Path) -> Result<(Domain, Problem), LoadError> {
    let d = load_domain(domain)?;
    for warning in d.lint() {
        eprintln!("warning: {}: {}", domain.display(), warning);
    }
    let p = load_problem(problem, &d)?;
    Ok((d, p))
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {}", msg);
    ExitCode::from(1)
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = out.write_all(text.as_bytes());
}

fn parse_bounds(s: &str) -> Result<Vec<Option<u32>>, String> {
    s.split(',')
        .map(|b| match b.trim() {
            "none" | "inf" => Ok(None),
            b => b.parse().map(Some).map_err(|_| format!("bad bound {:?}", b)),
        })
        .collect()
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Plan {
            domain,
            problem,
            search,
            format,
            seed,
        } => {
            let (d, p) = match load(&domain, &problem) {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            let start = Instant::now();
            let mut report = match plan(&d, &p, &search.config()) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            report.elapsed = start.elapsed();
            emit(&match format {
                Format::Sexp => format::plan_report_to_sexp(&report),
                Format::Json => format::plan_report_to_json(&report, seed),
            });
            ExitCode::from(match report.status {
                PlanStatus::Solved => 0,
                PlanStatus::NoSolutionWithinBounds => 2,
                PlanStatus::BudgetExhausted => 3,
            })
        }
        Command::Validate {
            domain,
            problem,
            conjecture,
            format,
        } => {
            let (d, p) = match load(&domain, &problem) {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            let text = match fs::read_to_string(&conjecture) {
                Ok(t) => t,
                Err(e) => return fail(LoadError::io(&conjecture, e)),
            };
            let chi = match format::parse_conjecture(&text) {
                Ok(c) => c,
                Err(e) => return fail(LoadError::parse(&conjecture, e)),
            };
            let report = match validate(&chi, &p.init, &d) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            emit(&match format {
                Format::Sexp => format::validation_to_sexp(&report),
                Format::Json => format::validation_to_json(&report),
            });
            ExitCode::from(if report.valid { 0 } else { 2 })
        }
        Command::Oracle {
            domain,
            problem,
            depth,
            weight,
            format,
        } => {
            let (d, p) = match load(&domain, &problem) {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            let r = match brute_force(&p.init, &d, &p.goals, depth, Some(weight)) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            emit(&match format {
                Format::Sexp => format::oracle_to_sexp(&r),
                Format::Json => format::oracle_to_json(&r),
            });
            ExitCode::from(if r.min_weight.is_some() { 0 } else { 2 })
        }
        Command::Bench {
            suite,
            repeat,
            bounds,
            max_depth,
            node_budget,
            format,
        } => {
            let bounds = match parse_bounds(&bounds) {
                Ok(b) => b,
                Err(e) => return fail(e),
            };
            let instances = match load_suite(&suite) {
                Ok(i) => i,
                Err(e) => return fail(e),
            };
            let base = SearchConfig {
                max_depth,
                node_budget,
                ..SearchConfig::default()
            };
            let mut out = String::new();
            for row in run_bench(&instances, &bounds, repeat, &base) {
                match format {
                    Format::Sexp => out.push_str(&row.to_sexp()),
                    Format::Json => out.push_str(&serde_json::to_string(&row).expect("row serializes")),
                }
                out.push('\n');
            }
            emit(&out);
            ExitCode::SUCCESS
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}
