use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nurse_roster::bench::run_bench;
use nurse_roster::format::{self, FormatError};
use nurse_roster::oracle::{self, OracleStatus};
use nurse_roster::{constraints, penalty, solve, Instance, Selector, SolveError, SolverConfig, SwapMode};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE_SUPPLY: u8 = 10;
const EXIT_PHASE1_EXHAUSTED: u8 = 11;
const EXIT_VIOLATIONS: u8 = 12;
const EXIT_ORACLE_INFEASIBLE: u8 = 13;

#[derive(Parser)]
#[command(
    name = "nurse-roster",
    version,
    about = "Two-phase swap heuristic for nurse rostering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write the roster.
    Solve {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Roster output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON-lines report file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Check a roster against an instance.
    Check {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        roster: PathBuf,
        #[arg(long)]
        strict_sleep: bool,
    },
    /// Run many seeded solves and summarize them.
    Bench {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        /// First seed; run k uses seed + k.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON-lines file with one record per run plus a summary record.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Exhaustively solve a tiny instance.
    Oracle {
        #[arg(long)]
        instance: String,
        /// Witness roster output file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = oracle::DEFAULT_CELL_BUDGET)]
        budget: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectorArg {
    Most,
    Least,
}

#[derive(Clone, Copy, ValueEnum)]
enum SwapArg {
    WithinDay,
    CrossDay,
}

#[derive(Args)]
struct SearchFlags {
    #[arg(long)]
    phase1_cap: Option<u64>,
    #[arg(long)]
    phase2_cap: Option<u64>,
    #[arg(long)]
    stall_cap: Option<u64>,
    #[arg(long, value_enum, default_value_t = SelectorArg::Most)]
    selector: SelectorArg,
    #[arg(long, value_enum, default_value_t = SwapArg::WithinDay)]
    swap: SwapArg,
    /// Only the rest day after three or more nights is a sleep day.
    #[arg(long)]
    strict_sleep: bool,
    /// Accept Phase 1 swaps that do not change the violation count.
    #[arg(long)]
    plateau: bool,
}

impl SearchFlags {
    fn apply(&self, instance: &mut Instance, seed: u64) -> SolverConfig {
        if self.strict_sleep {
            instance.rules.strict_sleep = true;
        }
        let mut config = SolverConfig::for_instance(instance, seed);
        if let Some(c) = self.phase1_cap {
            config.phase1_iter_cap = c;
        }
        if let Some(c) = self.phase2_cap {
            config.phase2_iter_cap = c;
        }
        if let Some(c) = self.stall_cap {
            config.phase2_stall_cap = c;
        }
        config.selector = match self.selector {
            SelectorArg::Most => Selector::Most,
            SelectorArg::Least => Selector::Least,
        };
        config.swap = match self.swap {
            SwapArg::WithinDay => SwapMode::WithinDay,
            SwapArg::CrossDay => SwapMode::CrossDay,
        };
        config.plateau = self.plateau;
        config
    }
}

/// A path, or the name of a bundled fixture when no such file exists.
fn resolve_instance(spec: &str) -> Result<Instance, FormatError> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Some(text) = format::bundled(spec) {
            return format::parse_instance(text);
        }
    }
    format::load_instance(path)
}

fn write_text(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {}", path.display(), e))
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Solve {
            instance,
            seed,
            out,
            report,
            search,
        } => {
            let mut inst = resolve_instance(&instance).map_err(|e| e.to_string())?;
            let config = search.apply(&mut inst, seed);
            let (solution, code) = match solve(&inst, &config) {
                Ok(sol) => (sol, EXIT_OK),
                Err(SolveError::Phase1Exhausted(sol)) => {
                    eprintln!("phase 1 did not reach full feasibility");
                    (*sol, EXIT_PHASE1_EXHAUSTED)
                }
                Err(SolveError::InfeasibleSupply(rep)) => {
                    eprintln!(
                        "supply {} < demand {} or cell shortfall; no search performed",
                        rep.supply, rep.demand
                    );
                    for d in &rep.per_cell_deficits {
                        eprintln!(
                            "  shift {} ward {} day {}: {} required, {} available",
                            d.shift.code(),
                            d.ward,
                            d.day,
                            d.required,
                            d.available
                        );
                    }
                    return Ok(EXIT_INFEASIBLE_SUPPLY);
                }
                Err(e) => return Err(e.to_string()),
            };
            let r = &solution.report;
            match &out {
                Some(path) => format::write_roster(&solution.roster, path).map_err(|e| e.to_string())?,
                None => print!("{}", solution.roster),
            }
            eprintln!("seed          {}", r.seed);
            eprintln!(
                "phase 1       {} iterations, {} accepted, {:.4} s",
                r.phase1_iterations, r.phase1_accepted, r.phase1_seconds
            );
            eprintln!(
                "phase 2       {} iterations, {} accepted, {:.4} s",
                r.phase2_iterations, r.phase2_accepted, r.phase2_seconds
            );
            eprintln!("feasibility   {:.1}%", 100.0 * r.feasibility);
            eprintln!("objective     {}", r.objective);
            if let Some(path) = report {
                let line = serde_json::to_string(r).map_err(|e| e.to_string())?;
                write_text(&path, &(line + "\n"))?;
            }
            Ok(code)
        }
        Command::Check {
            instance,
            roster,
            strict_sleep,
        } => {
            let mut inst = resolve_instance(&instance).map_err(|e| e.to_string())?;
            inst.rules.strict_sleep |= strict_sleep;
            let r = format::load_roster(&roster).map_err(|e| e.to_string())?;
            r.check_shape(&inst).map_err(|e| format!("shape mismatch: {}", e))?;
            let (fraction, report) = constraints::feasibility(&r, &inst);
            println!(
                "feasibility {:.1}% ({}/{})",
                100.0 * fraction,
                report.satisfied_count,
                report.total_count
            );
            for v in &report.entries {
                println!("{}", v);
            }
            println!("objective {}", penalty::objective(&r, &inst.penalty));
            Ok(if report.is_feasible() { EXIT_OK } else { EXIT_VIOLATIONS })
        }
        Command::Bench {
            instance,
            runs,
            seed,
            out,
            search,
        } => {
            if runs == 0 {
                return Err("--runs must be at least 1".to_string());
            }
            let mut inst = resolve_instance(&instance).map_err(|e| e.to_string())?;
            let template = search.apply(&mut inst, seed);
            let summary = run_bench(&inst, &template, runs, seed);
            print!("{}", summary.table());
            if let Some(path) = out {
                write_text(&path, &summary.json_lines())?;
            }
            Ok(EXIT_OK)
        }
        Command::Oracle { instance, out, budget } => {
            let inst = resolve_instance(&instance).map_err(|e| e.to_string())?;
            let res = oracle::brute_force(&inst, budget).map_err(|e| e.to_string())?;
            println!("states enumerated {}", res.states_enumerated);
            match res.status {
                OracleStatus::Infeasible => {
                    println!("status infeasible");
                    Ok(EXIT_ORACLE_INFEASIBLE)
                }
                OracleStatus::Optimal => {
                    println!("status optimal");
                    println!("objective {}", res.best_objective.unwrap_or_default());
                    let witness = res.witness.expect("optimal result carries a witness");
                    match out {
                        Some(path) => format::write_roster(&witness, &path).map_err(|e| e.to_string())?,
                        None => print!("{}", witness),
                    }
                    Ok(EXIT_OK)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(EXIT_ERROR)
        }
    }
}
