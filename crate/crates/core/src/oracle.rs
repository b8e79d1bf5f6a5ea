//! Exhaustive search over every roster of a tiny instance.
//!
//! Cells are filled nurse-major, day-minor. Leave days are pinned to rest,
//! a prefix ending in Night-Morning is cut, and a completed row that already
//! breaks a row-local family (H1, H2) is cut. Coverage is checked on full
//! assignments. The first roster reaching the minimum cost in enumeration
//! order is the witness.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{self, ConstraintId};
use crate::model::{Instance, Roster, ShiftKind};
use crate::penalty;

pub const DEFAULT_CELL_BUDGET: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub status: OracleStatus,
    pub best_objective: Option<i64>,
    pub witness: Option<Roster>,
    /// Complete assignments that reached the coverage check.
    pub states_enumerated: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {cells} cells, over the budget of {budget}")]
    BudgetExceeded { cells: usize, budget: usize },
}

struct Search<'a> {
    instance: &'a Instance,
    roster: Roster,
    best: Option<(i64, Roster)>,
    leaves: u64,
}

impl Search<'_> {
    fn fill(&mut self, nurse: usize, day: usize, cost_so_far: i64) {
        let inst = self.instance;
        if nurse == inst.nurses() {
            self.leaves += 1;
            if inst.rules.is_enabled(ConstraintId::H3) && !constraints::check_h3(&self.roster, inst).is_empty() {
                return;
            }
            if self.best.as_ref().is_none_or(|(b, _)| cost_so_far < *b) {
                self.best = Some((cost_so_far, self.roster.clone()));
            }
            return;
        }
        let pinned = inst.rules.is_enabled(ConstraintId::H4) && inst.on_leave(nurse, day);
        let h5 = inst.rules.is_enabled(ConstraintId::H5);
        for shift in ShiftKind::ALL {
            if pinned && shift != ShiftKind::Rest {
                continue;
            }
            if h5 && shift == ShiftKind::Morning && day > 0 && self.roster.get(nurse, day - 1) == ShiftKind::Night {
                continue;
            }
            self.roster.set(nurse, day, shift);
            if day + 1 < inst.days() {
                self.fill(nurse, day + 1, cost_so_far);
            } else {
                let row = self.roster.row(nurse);
                if constraints::row_violation_count(inst, nurse, row) > 0 {
                    continue;
                }
                let cost = penalty::nurse_penalty(row, &inst.penalty, nurse);
                self.fill(nurse + 1, 0, cost_so_far + cost);
            }
        }
        self.roster.set(nurse, day, ShiftKind::Rest);
    }
}

pub fn brute_force(instance: &Instance, cell_budget: usize) -> Result<OracleResult, OracleError> {
    let cells = instance.nurses() * instance.days();
    if cells > cell_budget {
        return Err(OracleError::BudgetExceeded {
            cells,
            budget: cell_budget,
        });
    }
    let mut search = Search {
        instance,
        roster: Roster::filled(instance.nurses(), instance.days(), ShiftKind::Rest),
        best: None,
        leaves: 0,
    };
    search.fill(0, 0, 0);
    Ok(match search.best {
        Some((cost, witness)) => OracleResult {
            status: OracleStatus::Optimal,
            best_objective: Some(cost),
            witness: Some(witness),
            states_enumerated: search.leaves,
        },
        None => OracleResult {
            status: OracleStatus::Infeasible,
            best_objective: None,
            witness: None,
            states_enumerated: search.leaves,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_forced_rest() {
        let mut inst = Instance::new(1, 1, 1).unwrap();
        inst.g_min = 1;
        let res = brute_force(&inst, DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(res.status, OracleStatus::Optimal);
        assert_eq!(res.best_objective, Some(0));
        assert_eq!(res.witness, Some(Roster::filled(1, 1, ShiftKind::Rest)));
    }

    #[test]
    fn pigeonhole_infeasible() {
        let mut inst = Instance::new(1, 2, 1).unwrap();
        inst.g_min = 1;
        inst.set_demand(ShiftKind::Morning, 0, 0, 1);
        inst.set_demand(ShiftKind::Morning, 0, 1, 1);
        let res = brute_force(&inst, DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(res.status, OracleStatus::Infeasible);
        assert!(res.witness.is_none());
    }

    #[test]
    fn budget_is_enforced() {
        let inst = Instance::new(3, 5, 1).unwrap();
        assert_eq!(
            brute_force(&inst, 12).unwrap_err(),
            OracleError::BudgetExceeded { cells: 15, budget: 12 }
        );
    }

    #[test]
    fn two_by_three_witness_is_checked() {
        let mut inst = Instance::new(2, 3, 1).unwrap();
        inst.g_min = 1;
        inst.k_max = 3;
        inst.set_demand(ShiftKind::Morning, 0, 0, 1);
        inst.set_demand(ShiftKind::Night, 0, 1, 1);
        inst.set_demand(ShiftKind::Afternoon, 0, 2, 1);
        let res = brute_force(&inst, DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(res.status, OracleStatus::Optimal);
        let w = res.witness.unwrap();
        assert!(constraints::is_feasible(&w, &inst));
        assert_eq!(res.best_objective, Some(penalty::objective(&w, &inst.penalty)));
        // [RD,N,N] and [AM,RD,PM] match no pattern
        assert_eq!(res.best_objective, Some(0));
        let zero = Roster::from_codes(&[&[0, 3, 3], &[1, 0, 2]]);
        assert!(constraints::is_feasible(&zero, &inst));
        assert_eq!(penalty::objective(&zero, &inst.penalty), 0);
    }
}
