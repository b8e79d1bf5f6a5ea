//! Monte Carlo campaigns: many independent seeded solves of one instance.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::Instance;
use crate::solver::{solve, SolveError, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    Converged,
    Phase1Exhausted,
    InfeasibleSupply,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub outcome: RunOutcome,
    pub feasibility: f64,
    pub objective: Option<i64>,
    pub phase1_iterations: u64,
    pub phase2_iterations: u64,
    pub phase1_seconds: f64,
    pub phase2_seconds: f64,
}

impl RunRecord {
    pub fn total_seconds(&self) -> f64 {
        self.phase1_seconds + self.phase2_seconds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_phase1_seconds: f64,
    pub median_phase1_seconds: f64,
    pub mean_phase2_seconds: f64,
    pub median_phase2_seconds: f64,
    pub median_total_seconds: f64,
    /// Over converged runs only.
    pub objective: Option<Spread>,
    pub records: Vec<RunRecord>,
}

pub fn run_once(instance: &Instance, config: &SolverConfig) -> RunRecord {
    let seed = config.seed;
    match solve(instance, config) {
        Ok(sol) => RunRecord {
            seed,
            outcome: RunOutcome::Converged,
            feasibility: sol.report.feasibility,
            objective: Some(sol.report.objective),
            phase1_iterations: sol.report.phase1_iterations,
            phase2_iterations: sol.report.phase2_iterations,
            phase1_seconds: sol.report.phase1_seconds,
            phase2_seconds: sol.report.phase2_seconds,
        },
        Err(SolveError::Phase1Exhausted(sol)) => RunRecord {
            seed,
            outcome: RunOutcome::Phase1Exhausted,
            feasibility: sol.report.feasibility,
            objective: None,
            phase1_iterations: sol.report.phase1_iterations,
            phase2_iterations: 0,
            phase1_seconds: sol.report.phase1_seconds,
            phase2_seconds: 0.0,
        },
        Err(_) => RunRecord {
            seed,
            outcome: RunOutcome::InfeasibleSupply,
            feasibility: 0.0,
            objective: None,
            phase1_iterations: 0,
            phase2_iterations: 0,
            phase1_seconds: 0.0,
            phase2_seconds: 0.0,
        },
    }
}

/// Solves with seeds `base_seed .. base_seed + runs`; records come back in seed order.
pub fn run_bench(instance: &Instance, template: &SolverConfig, runs: usize, base_seed: u64) -> BenchSummary {
    let records: Vec<RunRecord> = (0..runs as u64)
        .into_par_iter()
        .map(|k| {
            let config = SolverConfig {
                seed: base_seed + k,
                ..template.clone()
            };
            run_once(instance, &config)
        })
        .collect();
    summarize(records)
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

pub fn summarize(records: Vec<RunRecord>) -> BenchSummary {
    let runs = records.len();
    let successes = records.iter().filter(|r| r.outcome == RunOutcome::Converged).count();
    let mut p1: Vec<f64> = records.iter().map(|r| r.phase1_seconds).collect();
    let mut p2: Vec<f64> = records.iter().map(|r| r.phase2_seconds).collect();
    let mut total: Vec<f64> = records.iter().map(RunRecord::total_seconds).collect();
    let mut objectives: Vec<f64> = records.iter().filter_map(|r| r.objective).map(|o| o as f64).collect();
    let objective = if objectives.is_empty() {
        None
    } else {
        let med = median(&mut objectives);
        Some(Spread {
            min: objectives[0],
            median: med,
            max: objectives[objectives.len() - 1],
        })
    };
    BenchSummary {
        runs,
        successes,
        success_rate: if runs == 0 { 0.0 } else { successes as f64 / runs as f64 },
        mean_phase1_seconds: mean(&p1),
        median_phase1_seconds: median(&mut p1),
        mean_phase2_seconds: mean(&p2),
        median_phase2_seconds: median(&mut p2),
        median_total_seconds: median(&mut total),
        objective,
        records,
    }
}

impl BenchSummary {
    /// Human-readable summary table.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "runs              {}", self.runs);
        let _ = writeln!(
            s,
            "feasible runs     {} ({:.1}%)",
            self.successes,
            100.0 * self.success_rate
        );
        let _ = writeln!(s, "{:<17} {:>12} {:>12}", "stage", "mean (s)", "median (s)");
        let _ = writeln!(
            s,
            "{:<17} {:>12.4} {:>12.4}",
            "phase 1", self.mean_phase1_seconds, self.median_phase1_seconds
        );
        let _ = writeln!(
            s,
            "{:<17} {:>12.4} {:>12.4}",
            "phase 2", self.mean_phase2_seconds, self.median_phase2_seconds
        );
        match self.objective {
            Some(o) => {
                let _ = writeln!(
                    s,
                    "objective         min {} / median {} / max {}",
                    o.min, o.median, o.max
                );
            }
            None => {
                let _ = writeln!(s, "objective         n/a (no feasible run)");
            }
        }
        s
    }

    /// One JSON object per run, then one summary object without the per-run rows.
    pub fn json_lines(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            let _ = writeln!(s, "{}", serde_json::json!({ "kind": "run", "run": r }));
        }
        let head = serde_json::json!({
            "kind": "summary",
            "runs": self.runs,
            "successes": self.successes,
            "success_rate": self.success_rate,
            "mean_phase1_seconds": self.mean_phase1_seconds,
            "median_phase1_seconds": self.median_phase1_seconds,
            "mean_phase2_seconds": self.mean_phase2_seconds,
            "median_phase2_seconds": self.median_phase2_seconds,
            "median_total_seconds": self.median_total_seconds,
            "objective": self.objective,
        });
        let _ = writeln!(s, "{}", head);
        s
    }
}
