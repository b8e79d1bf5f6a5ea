//! Nurse rostering with a two-phase swap heuristic.
//!
//! Phase 1 restores hard-constraint feasibility with same-nurse day swaps;
//! Phase 2 lowers a pattern-based preference cost with cross-nurse double
//! swaps. An exhaustive oracle certifies results on tiny instances.

pub mod bench;
pub mod constraints;
pub mod eval;
pub mod format;
pub mod model;
pub mod oracle;
pub mod penalty;
pub mod solver;
pub mod supply;

pub use constraints::{feasibility, ConstraintId, Violation, ViolationReport};
pub use format::{load_instance, load_roster, write_instance, write_roster, FormatError};
pub use model::{HardRules, Instance, Roster, ShiftKind, ValidationError};
pub use oracle::{brute_force, OracleResult, OracleStatus};
pub use penalty::{nurse_penalty, objective, rank_nurses_by_penalty, PenaltyTable};
pub use solver::{solve, Selector, Solution, SolveError, SolveReport, SolverConfig, SwapMode};
pub use supply::{supply_demand_check, SupplyDemandReport};
