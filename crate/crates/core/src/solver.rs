//! Two-phase swap heuristic.
//!
//! 1. Build an initial roster with the right number of working days per
//!    nurse (leave days are rest by construction).
//! 2. Phase 1 repairs hard constraints by swapping two days of one randomly
//!    chosen nurse, keeping the swap only when fewer constraint instances
//!    are violated.
//! 3. Phase 2 picks the nurse with the largest preference cost, pairs them
//!    with a random colleague and exchanges their shifts on two random days.
//!    A move is kept only if the roster stays hard-feasible and the total
//!    cost strictly drops.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{Evaluator, Move};
use crate::model::{Instance, Roster, ShiftKind};
use crate::supply::{nurse_supply, supply_demand_check, SupplyDemandReport};

pub type SolverRng = ChaCha8Rng;

pub const DEFAULT_STALL_CAP: u64 = 100_000;

/// Which nurse Phase 2 moves first.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    /// Highest penalty, lowest index on ties.
    #[default]
    Most,
    /// Lowest penalty, lowest index on ties.
    Least,
}

/// How Phase 2 exchanges shifts between the two nurses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapMode {
    #[default]
    WithinDay,
    CrossDay,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seed: u64,
    pub phase1_iter_cap: u64,
    pub phase2_iter_cap: u64,
    /// Consecutive non-improving Phase 2 iterations before stopping.
    pub phase2_stall_cap: u64,
    pub selector: Selector,
    pub swap: SwapMode,
    /// Accept Phase 1 swaps that leave the violation count unchanged.
    pub plateau: bool,
}

impl SolverConfig {
    /// Iteration caps from the instance, everything else at its default.
    pub fn for_instance(instance: &Instance, seed: u64) -> Self {
        SolverConfig {
            seed,
            phase1_iter_cap: instance.phase1_iter_cap,
            phase2_iter_cap: instance.phase2_iter_cap,
            phase2_stall_cap: DEFAULT_STALL_CAP,
            selector: Selector::Most,
            swap: SwapMode::WithinDay,
            plateau: false,
        }
    }

    pub fn rng(&self) -> SolverRng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    One,
    Two,
}

/// Emitted after every accepted move.
#[derive(Debug)]
pub struct AcceptedMove<'r> {
    pub phase: Phase,
    pub iteration: u64,
    pub mv: Move,
    pub violations: usize,
    pub feasibility: f64,
    pub objective: i64,
    pub roster: &'r Roster,
}

pub trait SearchObserver {
    fn on_accept(&mut self, event: &AcceptedMove<'_>);
}

impl<F: FnMut(&AcceptedMove<'_>)> SearchObserver for F {
    fn on_accept(&mut self, event: &AcceptedMove<'_>) {
        self(event)
    }
}

pub struct NoObserver;

impl SearchObserver for NoObserver {
    fn on_accept(&mut self, _event: &AcceptedMove<'_>) {}
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOutcome {
    pub roster: Roster,
    pub iterations: u64,
    pub accepted: u64,
    pub feasibility: f64,
    pub violations: usize,
    pub objective: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub seed: u64,
    pub phase1_iterations: u64,
    pub phase1_accepted: u64,
    pub phase2_iterations: u64,
    pub phase2_accepted: u64,
    pub phase1_seconds: f64,
    pub phase2_seconds: f64,
    pub feasibility: f64,
    pub violations: usize,
    pub objective: i64,
    pub converged: bool,
}

impl SolveReport {
    pub fn total_seconds(&self) -> f64 {
        self.phase1_seconds + self.phase2_seconds
    }

    /// The report with wall-clock fields zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> SolveReport {
        SolveReport {
            phase1_seconds: 0.0,
            phase2_seconds: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub roster: Roster,
    pub report: SolveReport,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("manpower supply {} cannot cover demand {} ({} cell deficits)", .0.supply, .0.demand, .0.per_cell_deficits.len())]
    InfeasibleSupply(SupplyDemandReport),
    #[error("phase 1 stopped at feasibility {:.4} after {} iterations", .0.report.feasibility, .0.report.phase1_iterations)]
    Phase1Exhausted(Box<Solution>),
    #[error("phase 2 needs a hard-feasible roster, got {0} violations")]
    InfeasibleStart(usize),
}

/// Each nurse gets `D - leave - g_min` working days, filled left to right over
/// non-leave days with Morning, Afternoon, Night in rotation. The rotation
/// carries over from one nurse to the next so that shift totals stay level.
pub fn initial_roster(instance: &Instance) -> Roster {
    let mut roster = Roster::filled(instance.nurses(), instance.days(), ShiftKind::Rest);
    let mut next = 0usize;
    for i in 0..instance.nurses() {
        let mut remaining = nurse_supply(instance, i);
        for j in 0..instance.days() {
            if remaining == 0 {
                break;
            }
            if instance.on_leave(i, j) {
                continue;
            }
            roster.set(i, j, ShiftKind::WORKING[next % 3]);
            next += 1;
            remaining -= 1;
        }
    }
    roster
}

#[inline]
fn pick(rng: &mut impl Rng, bound: usize) -> usize {
    // u32 sampling keeps streams identical across pointer widths
    rng.gen_range(0..bound as u32) as usize
}

fn distinct_pair(rng: &mut impl Rng, bound: usize) -> (usize, usize) {
    let a = pick(rng, bound);
    let mut b = pick(rng, bound - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

fn shift_counts(cells: impl Iterator<Item = ShiftKind>) -> [usize; 4] {
    let mut counts = [0; 4];
    for s in cells {
        counts[s.code() as usize] += 1;
    }
    counts
}

/// Same-nurse day swaps until every hard constraint holds or the cap is hit.
pub fn phase1(
    roster: Roster,
    instance: &Instance,
    config: &SolverConfig,
    rng: &mut impl Rng,
    observer: &mut dyn SearchObserver,
) -> PhaseOutcome {
    let mut ev = Evaluator::new(instance, roster);
    let nurses = instance.nurses();
    let days = instance.days();
    let row_counts: Vec<[usize; 4]> = if cfg!(debug_assertions) {
        (0..nurses)
            .map(|i| shift_counts(ev.roster().row(i).iter().copied()))
            .collect()
    } else {
        Vec::new()
    };

    // accepted moves never raise the violation count, so the current roster is the best seen
    let mut iterations = 0u64;
    let mut accepted = 0u64;
    while ev.violations() > 0 && iterations < config.phase1_iter_cap && days >= 2 {
        iterations += 1;
        let nurse = pick(rng, nurses);
        let (a, b) = distinct_pair(rng, days);
        if instance.on_leave(nurse, a) || instance.on_leave(nurse, b) {
            continue;
        }
        if ev.roster().get(nurse, a) == ev.roster().get(nurse, b) {
            continue;
        }
        let before = ev.violations();
        let mv = Move::SameNurse { nurse, a, b };
        ev.apply(mv);
        let after = ev.violations();
        if after < before || (config.plateau && after == before) {
            accepted += 1;
            debug_assert!(ev.is_consistent());
            debug_assert_eq!(shift_counts(ev.roster().row(nurse).iter().copied()), row_counts[nurse]);
            observer.on_accept(&AcceptedMove {
                phase: Phase::One,
                iteration: iterations,
                mv,
                violations: after,
                feasibility: ev.feasibility(),
                objective: ev.objective(),
                roster: ev.roster(),
            });
        } else {
            ev.apply(mv);
        }
    }

    PhaseOutcome {
        iterations,
        accepted,
        feasibility: ev.feasibility(),
        violations: ev.violations(),
        objective: ev.objective(),
        roster: ev.into_roster(),
    }
}

/// Cross-nurse double swaps that keep hard feasibility and strictly lower the cost.
pub fn phase2(
    roster: Roster,
    instance: &Instance,
    config: &SolverConfig,
    rng: &mut impl Rng,
    observer: &mut dyn SearchObserver,
) -> Result<PhaseOutcome, SolveError> {
    let mut ev = Evaluator::new(instance, roster);
    if ev.violations() > 0 {
        return Err(SolveError::InfeasibleStart(ev.violations()));
    }
    let nurses = instance.nurses();
    let days = instance.days();
    let floor = instance.penalty.is_nonnegative().then_some(0i64);
    let stall_cap = config.phase2_stall_cap.min(config.phase2_iter_cap);
    let column_counts: Vec<[usize; 4]> = if cfg!(debug_assertions) {
        (0..days)
            .map(|j| shift_counts((0..nurses).map(|i| ev.roster().get(i, j))))
            .collect()
    } else {
        Vec::new()
    };

    let mut iterations = 0u64;
    let mut accepted = 0u64;
    let mut stall = 0u64;
    while nurses >= 2 && days >= 2 && iterations < config.phase2_iter_cap && stall < stall_cap {
        if floor.is_some_and(|f| ev.objective() <= f) {
            break;
        }
        iterations += 1;
        let n = select_nurse(ev.row_penalties(), config.selector);
        let mut m = pick(rng, nurses - 1);
        if m >= n {
            m += 1;
        }
        let (i, j) = distinct_pair(rng, days);
        let mv = match config.swap {
            SwapMode::WithinDay => Move::WithinDay { n, m, i, j },
            SwapMode::CrossDay => Move::CrossDay { n, m, i, j },
        };
        let before = ev.objective();
        ev.apply(mv);
        if ev.violations() > 0 || ev.objective() >= before {
            ev.apply(mv);
            stall += 1;
            continue;
        }
        stall = 0;
        accepted += 1;
        debug_assert!(ev.is_consistent());
        if cfg!(debug_assertions) && config.swap == SwapMode::WithinDay {
            for d in [i, j] {
                let now = shift_counts((0..nurses).map(|k| ev.roster().get(k, d)));
                debug_assert_eq!(now, column_counts[d]);
            }
        }
        observer.on_accept(&AcceptedMove {
            phase: Phase::Two,
            iteration: iterations,
            mv,
            violations: ev.violations(),
            feasibility: ev.feasibility(),
            objective: ev.objective(),
            roster: ev.roster(),
        });
    }

    Ok(PhaseOutcome {
        iterations,
        accepted,
        feasibility: ev.feasibility(),
        violations: ev.violations(),
        objective: ev.objective(),
        roster: ev.into_roster(),
    })
}

fn select_nurse(penalties: &[i64], selector: Selector) -> usize {
    let mut best = 0;
    for (i, p) in penalties.iter().enumerate().skip(1) {
        let better = match selector {
            Selector::Most => *p > penalties[best],
            Selector::Least => *p < penalties[best],
        };
        if better {
            best = i;
        }
    }
    best
}

pub fn solve(instance: &Instance, config: &SolverConfig) -> Result<Solution, SolveError> {
    solve_observed(instance, config, &mut NoObserver)
}

/// Supply check, initial roster, Phase 1, then Phase 2 if Phase 1 reached
/// full feasibility.
pub fn solve_observed(
    instance: &Instance,
    config: &SolverConfig,
    observer: &mut dyn SearchObserver,
) -> Result<Solution, SolveError> {
    let supply = supply_demand_check(instance);
    if !supply.feasible {
        return Err(SolveError::InfeasibleSupply(supply));
    }
    let mut rng = config.rng();
    let start = Instant::now();
    let p1 = phase1(initial_roster(instance), instance, config, &mut rng, observer);
    let phase1_seconds = start.elapsed().as_secs_f64();

    let mut report = SolveReport {
        seed: config.seed,
        phase1_iterations: p1.iterations,
        phase1_accepted: p1.accepted,
        phase2_iterations: 0,
        phase2_accepted: 0,
        phase1_seconds,
        phase2_seconds: 0.0,
        feasibility: p1.feasibility,
        violations: p1.violations,
        objective: p1.objective,
        converged: false,
    };
    if p1.violations > 0 {
        return Err(SolveError::Phase1Exhausted(Box::new(Solution {
            roster: p1.roster,
            report,
        })));
    }

    let start = Instant::now();
    let p2 = phase2(p1.roster, instance, config, &mut rng, observer)?;
    report.phase2_seconds = start.elapsed().as_secs_f64();
    report.phase2_iterations = p2.iterations;
    report.phase2_accepted = p2.accepted;
    report.feasibility = p2.feasibility;
    report.violations = p2.violations;
    report.objective = p2.objective;
    report.converged = true;
    Ok(Solution {
        roster: p2.roster,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{self, ConstraintId};
    use crate::model::HardRules;
    use crate::penalty;

    const RD: u8 = 0;
    const AM: u8 = 1;
    const PM: u8 = 2;
    const N: u8 = 3;

    #[test]
    fn initial_roster_examples() {
        let mut inst = Instance::new(1, 3, 1).unwrap();
        inst.g_min = 3;
        assert_eq!(initial_roster(&inst), Roster::filled(1, 3, ShiftKind::Rest));
        inst.g_min = 0;
        assert_eq!(initial_roster(&inst), Roster::from_codes(&[&[AM, PM, N]]));
        inst.set_leave(0, 1, true);
        let r = initial_roster(&inst);
        assert_eq!(r, Roster::from_codes(&[&[AM, RD, PM]]));
    }

    #[test]
    fn initial_roster_rotation_carries_across_nurses() {
        let mut inst = Instance::new(3, 4, 1).unwrap();
        inst.g_min = 2;
        let r = initial_roster(&inst);
        assert_eq!(
            r,
            Roster::from_codes(&[&[AM, PM, RD, RD], &[N, AM, RD, RD], &[PM, N, RD, RD]])
        );
    }

    #[test]
    fn phase1_leaves_feasible_roster_alone() {
        let mut inst = Instance::new(2, 4, 1).unwrap();
        inst.g_min = 1;
        let r = Roster::from_codes(&[&[AM, AM, RD, PM], &[PM, RD, AM, AM]]);
        assert!(constraints::is_feasible(&r, &inst));
        let cfg = SolverConfig::for_instance(&inst, 3);
        let out = phase1(r.clone(), &inst, &cfg, &mut cfg.rng(), &mut NoObserver);
        assert_eq!(out.roster, r);
        assert_eq!((out.iterations, out.accepted), (0, 0));
        assert_eq!(out.feasibility, 1.0);
    }

    #[test]
    fn phase1_repairs_single_night_morning() {
        // one nurse with N then AM: swapping the AM elsewhere fixes it
        let mut inst = Instance::new(3, 4, 1).unwrap();
        inst.g_min = 1;
        inst.k_max = 4;
        let r = Roster::from_codes(&[&[N, AM, PM, RD], &[AM, PM, RD, AM], &[RD, AM, AM, PM]]);
        assert_eq!(constraints::check_h5(&r, &inst).len(), 1);
        assert_eq!(constraints::violation_count(&r, &inst), 1);
        for seed in 0..20 {
            let cfg = SolverConfig::for_instance(&inst, seed);
            let out = phase1(r.clone(), &inst, &cfg, &mut cfg.rng(), &mut NoObserver);
            assert_eq!(out.feasibility, 1.0);
            assert!(constraints::is_feasible(&out.roster, &inst));
            assert_eq!(out.accepted, 1);
        }
    }

    #[test]
    fn phase1_never_moves_leave_days() {
        let mut inst = Instance::new(2, 6, 1).unwrap();
        inst.set_leave(0, 2, true);
        inst.set_leave(1, 0, true);
        for seed in 0..10 {
            let cfg = SolverConfig::for_instance(&inst, seed);
            let out = phase1(initial_roster(&inst), &inst, &cfg, &mut cfg.rng(), &mut NoObserver);
            assert_eq!(out.roster.get(0, 2), ShiftKind::Rest);
            assert_eq!(out.roster.get(1, 0), ShiftKind::Rest);
        }
    }

    #[test]
    fn phase2_zero_objective_stops_immediately() {
        let mut inst = Instance::new(2, 3, 1).unwrap();
        inst.g_min = 0;
        let r = Roster::from_codes(&[&[AM, RD, AM], &[PM, RD, PM]]);
        let cfg = SolverConfig::for_instance(&inst, 0);
        let out = phase2(r.clone(), &inst, &cfg, &mut cfg.rng(), &mut NoObserver).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.roster, r);
    }

    #[test]
    fn phase2_rejects_infeasible_start() {
        let mut inst = Instance::new(1, 2, 1).unwrap();
        inst.rules = HardRules::only(&[ConstraintId::H5]);
        let r = Roster::from_codes(&[&[N, AM]]);
        let cfg = SolverConfig::for_instance(&inst, 0);
        assert!(matches!(
            phase2(r, &inst, &cfg, &mut cfg.rng(), &mut NoObserver),
            Err(SolveError::InfeasibleStart(1))
        ));
    }

    #[test]
    fn phase2_objective_strictly_decreases() {
        let mut inst = Instance::new(4, 6, 1).unwrap();
        inst.g_min = 1;
        inst.rules = HardRules::only(&[ConstraintId::H4]);
        let r = Roster::from_codes(&[
            &[N, N, PM, RD, RD, AM],
            &[N, RD, RD, PM, AM, AM],
            &[AM, AM, AM, AM, AM, AM],
            &[PM, PM, PM, PM, PM, PM],
        ]);
        let start = penalty::objective(&r, &inst.penalty);
        let cfg = SolverConfig::for_instance(&inst, 11);
        let mut trace = vec![start];
        let out = phase2(r, &inst, &cfg, &mut cfg.rng(), &mut |e: &AcceptedMove<'_>| {
            assert_eq!(e.violations, 0);
            trace.push(e.objective)
        })
        .unwrap();
        assert!(trace.windows(2).all(|w| w[1] < w[0]), "{:?}", trace);
        assert!(out.objective < start);
        assert_eq!(out.objective, *trace.last().unwrap());
    }

    #[test]
    fn selector_tie_breaks_to_lowest_index() {
        assert_eq!(select_nurse(&[5, 9, 9, 1], Selector::Most), 1);
        assert_eq!(select_nurse(&[5, 1, 9, 1], Selector::Least), 1);
        assert_eq!(select_nurse(&[0, 0, 0], Selector::Most), 0);
    }

    #[test]
    fn solve_reports_infeasible_supply() {
        let mut inst = Instance::new(2, 3, 1).unwrap();
        inst.g_min = 0;
        inst.set_demand(ShiftKind::Morning, 0, 0, 3);
        match solve(&inst, &SolverConfig::for_instance(&inst, 1)) {
            Err(SolveError::InfeasibleSupply(rep)) => assert_eq!(rep.per_cell_deficits.len(), 1),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn solve_is_deterministic() {
        let text = crate::format::bundled("full-15x14").unwrap();
        let inst = crate::format::parse_instance(text).unwrap();
        let cfg = SolverConfig::for_instance(&inst, 5);
        let a = solve(&inst, &cfg);
        let b = solve(&inst, &cfg);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a.roster, b.roster);
                assert_eq!(a.report.without_timings(), b.report.without_timings());
            }
            (Err(SolveError::Phase1Exhausted(a)), Err(SolveError::Phase1Exhausted(b))) => {
                assert_eq!(a.roster, b.roster)
            }
            other => panic!("runs diverged: {:?}", other.0.is_ok()),
        }
    }
}
