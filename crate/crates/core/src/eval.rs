//! Incremental hard-constraint and penalty bookkeeping for swap moves.
//!
//! Row-local families (H1, H2, H4, H5) and the preference cost are cached
//! per nurse; coverage is cached per (shift, ward, day) cell. A move only
//! touches two nurses and two days, so applying one re-evaluates those rows
//! and the coverage cells of those days.

use serde::{Deserialize, Serialize};

use crate::constraints::{self, ConstraintId};
use crate::model::{Instance, Roster, ShiftKind};
use crate::penalty;

/// A swap move. Every variant is its own inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    /// Swap days `a` and `b` of one nurse.
    SameNurse { nurse: usize, a: usize, b: usize },
    /// Exchange nurses `n` and `m` on day `i`, and again on day `j`.
    WithinDay { n: usize, m: usize, i: usize, j: usize },
    /// Exchange `n`'s day `i` with `m`'s day `j`, and `n`'s day `j` with `m`'s day `i`.
    CrossDay { n: usize, m: usize, i: usize, j: usize },
}

impl Move {
    fn exchanges(self) -> [((usize, usize), (usize, usize)); 2] {
        match self {
            Move::SameNurse { nurse, a, b } => [((nurse, a), (nurse, b)), ((nurse, a), (nurse, a))],
            Move::WithinDay { n, m, i, j } => [((n, i), (m, i)), ((n, j), (m, j))],
            Move::CrossDay { n, m, i, j } => [((n, i), (m, j)), ((n, j), (m, i))],
        }
    }

    fn nurses(self) -> [usize; 2] {
        match self {
            Move::SameNurse { nurse, .. } => [nurse, nurse],
            Move::WithinDay { n, m, .. } | Move::CrossDay { n, m, .. } => [n, m],
        }
    }

    fn days(self) -> [usize; 2] {
        match self {
            Move::SameNurse { a, b, .. } => [a, b],
            Move::WithinDay { i, j, .. } | Move::CrossDay { i, j, .. } => [i, j],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    instance: &'a Instance,
    roster: Roster,
    row_hard: Vec<u32>,
    row_hard_total: u64,
    /// skilled head count per (working shift, ward, day)
    cover: Vec<u32>,
    h3_violations: u64,
    row_penalty: Vec<i64>,
    objective: i64,
    total_count: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a Instance, roster: Roster) -> Self {
        assert!(roster.matches(instance), "roster shape does not match instance");
        let wards = instance.wards();
        let days = instance.days();
        let mut cover = vec![0u32; 3 * wards * days];
        for i in 0..instance.nurses() {
            for j in 0..days {
                if let Some(s) = roster.get(i, j).working_index() {
                    for t in 0..wards {
                        if instance.skilled(i, t) {
                            cover[(s * wards + t) * days + j] += 1;
                        }
                    }
                }
            }
        }
        let row_hard: Vec<u32> = (0..instance.nurses())
            .map(|i| constraints::row_violation_count(instance, i, roster.row(i)))
            .collect();
        let row_penalty: Vec<i64> = (0..instance.nurses())
            .map(|i| penalty::nurse_penalty(roster.row(i), &instance.penalty, i))
            .collect();
        let mut ev = Evaluator {
            instance,
            row_hard_total: row_hard.iter().map(|v| *v as u64).sum(),
            objective: row_penalty.iter().sum(),
            row_hard,
            row_penalty,
            cover,
            h3_violations: 0,
            total_count: constraints::total_count(instance),
            roster,
        };
        ev.h3_violations = (0..days).map(|j| ev.h3_deficits_on(j)).sum();
        ev
    }

    #[inline]
    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn into_roster(self) -> Roster {
        self.roster
    }

    #[inline]
    pub fn violations(&self) -> usize {
        (self.row_hard_total + self.h3_violations) as usize
    }

    pub fn feasibility(&self) -> f64 {
        constraints::fraction(self.total_count - self.violations(), self.total_count)
    }

    #[inline]
    pub fn objective(&self) -> i64 {
        self.objective
    }

    #[inline]
    pub fn row_penalties(&self) -> &[i64] {
        &self.row_penalty
    }

    #[inline]
    fn cover_index(&self, s: usize, ward: usize, day: usize) -> usize {
        (s * self.instance.wards() + ward) * self.instance.days() + day
    }

    fn h3_deficits_on(&self, day: usize) -> u64 {
        if !self.instance.rules.is_enabled(ConstraintId::H3) {
            return 0;
        }
        let mut count = 0;
        for shift in ShiftKind::WORKING {
            let s = shift.working_index().unwrap();
            for t in 0..self.instance.wards() {
                let need = self.instance.demand(shift, t, day);
                if need > 0 && self.cover[self.cover_index(s, t, day)] < need {
                    count += 1;
                }
            }
        }
        count
    }

    fn adjust_cover(&mut self, nurse: usize, day: usize, add: bool) {
        if let Some(s) = self.roster.get(nurse, day).working_index() {
            for t in 0..self.instance.wards() {
                if self.instance.skilled(nurse, t) {
                    let idx = self.cover_index(s, t, day);
                    if add {
                        self.cover[idx] += 1;
                    } else {
                        self.cover[idx] -= 1;
                    }
                }
            }
        }
    }

    /// Applies `mv` and updates every cached quantity. Applying the same move
    /// again restores the previous state.
    pub fn apply(&mut self, mv: Move) {
        let days = mv.days();
        let day_list: &[usize] = if days[0] == days[1] { &days[..1] } else { &days[..] };
        let nurses = mv.nurses();
        let nurse_list: &[usize] = if nurses[0] == nurses[1] {
            &nurses[..1]
        } else {
            &nurses[..]
        };

        for &d in day_list {
            self.h3_violations -= self.h3_deficits_on(d);
        }
        for &n in nurse_list {
            for &d in day_list {
                self.adjust_cover(n, d, false);
            }
        }
        for (a, b) in mv.exchanges() {
            if a != b {
                self.roster.exchange(a, b);
            }
        }
        for &n in nurse_list {
            for &d in day_list {
                self.adjust_cover(n, d, true);
            }
        }
        for &d in day_list {
            self.h3_violations += self.h3_deficits_on(d);
        }
        for &n in nurse_list {
            let row = self.roster.row(n);
            let hard = constraints::row_violation_count(self.instance, n, row);
            let pen = penalty::nurse_penalty(row, &self.instance.penalty, n);
            self.row_hard_total = self.row_hard_total - self.row_hard[n] as u64 + hard as u64;
            self.row_hard[n] = hard;
            self.objective += pen - self.row_penalty[n];
            self.row_penalty[n] = pen;
        }
    }

    /// Whether the cached state agrees with a full recomputation.
    pub fn is_consistent(&self) -> bool {
        let fresh = Evaluator::new(self.instance, self.roster.clone());
        fresh.violations() == self.violations()
            && fresh.objective == self.objective
            && fresh.cover == self.cover
            && fresh.row_hard == self.row_hard
            && fresh.row_penalty == self.row_penalty
            && self.violations() == constraints::violation_count(&self.roster, self.instance)
            && self.objective == penalty::objective(&self.roster, &self.instance.penalty)
    }
}
