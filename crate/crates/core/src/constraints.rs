//! Hard constraint evaluation.
//!
//! Each checker (`check_h1` .. `check_h5`) implements one constraint family
//! regardless of whether the instance enables it; [`feasibility`] combines
//! the enabled families into a [`ViolationReport`] over a fixed universe of
//! constraint instances, so the satisfied fraction has a denominator that
//! depends only on the instance.
//!
//! Constraint-instance universe per family:
//!
//! | family | instances |
//! |--------|-----------|
//! | H1 | one per nurse |
//! | H2 | per nurse, one per length-`k_max` window plus one per day (night-run start) |
//! | H3 | one per (shift, ward, day) cell with positive demand |
//! | H4 | one per (nurse, day) with leave |
//! | H5 | one per (nurse, day boundary) |

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Roster, ShiftKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstraintId {
    H1,
    H2,
    H3,
    H4,
    H5,
}

impl ConstraintId {
    pub const ALL: [ConstraintId; 5] = [
        ConstraintId::H1,
        ConstraintId::H2,
        ConstraintId::H3,
        ConstraintId::H4,
        ConstraintId::H5,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "H1" => Some(ConstraintId::H1),
            "H2" => Some(ConstraintId::H2),
            "H3" => Some(ConstraintId::H3),
            "H4" => Some(ConstraintId::H4),
            "H5" => Some(ConstraintId::H5),
            _ => None,
        }
    }
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H{}", self.index() + 1)
    }
}

/// Where in the roster a violation sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    /// The nurse's whole horizon (H1).
    Horizon,
    /// `len` consecutive days starting at `start` (H2 working window).
    Window { start: usize, len: usize },
    /// A maximal run of `len` nights starting at `start` (H2 night rule).
    NightRun { start: usize, len: usize },
    /// A coverage cell (H3). `shift` uses the grid code 1..=3.
    Cell { shift: u8, ward: usize, day: usize },
    /// A single nurse-day (H4).
    Day(usize),
    /// The boundary between `day` and `day + 1` (H5).
    Boundary(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Location::Horizon => f.write_str("horizon"),
            Location::Window { start, len } => write!(f, "days {}-{}", start, start + len - 1),
            Location::NightRun { start, len } => {
                write!(f, "nights {}-{}", start, start + len - 1)
            }
            Location::Cell { shift, ward, day } => {
                write!(f, "shift={} ward={} day={}", shift, ward, day)
            }
            Location::Day(d) => write!(f, "day {}", d),
            Location::Boundary(d) => write!(f, "days {}-{}", d, d + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: ConstraintId,
    pub nurse: Option<usize>,
    pub location: Location,
    pub detail: String,
}

impl fmt::Display for Violation {
    /// One tab-separated line: `<id>\t<nurse|->\t<location>\t<detail>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.nurse {
            Some(n) => write!(f, "{}\t{}\t", self.constraint, n)?,
            None => write!(f, "{}\t-\t", self.constraint)?,
        }
        write!(f, "{}\t{}", self.location, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub entries: Vec<Violation>,
    pub satisfied_count: usize,
    pub total_count: usize,
}

impl ViolationReport {
    pub fn fraction(&self) -> f64 {
        fraction(self.total_count - self.entries.len(), self.total_count)
    }

    pub fn is_feasible(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, id: ConstraintId) -> usize {
        self.entries.iter().filter(|v| v.constraint == id).count()
    }
}

/// `satisfied / total`, with an empty universe counting as fully satisfied.
#[inline]
pub fn fraction(satisfied: usize, total: usize) -> f64 {
    if total == 0 {
        1.0
    } else {
        satisfied as f64 / total as f64
    }
}

// --- row-level primitives -------------------------------------------------

/// Whether the rest day at `day` is a sleep day and therefore does not count
/// towards the minimum rest days.
#[inline]
pub fn is_sleep_day(row: &[ShiftKind], day: usize, strict: bool) -> bool {
    if day == 0 || row[day] != ShiftKind::Rest || row[day - 1] != ShiftKind::Night {
        return false;
    }
    if !strict {
        return true;
    }
    let run = row[..day].iter().rev().take_while(|s| **s == ShiftKind::Night).count();
    run >= 3
}

pub fn countable_rest_days(row: &[ShiftKind], strict: bool) -> usize {
    (0..row.len())
        .filter(|&j| row[j] == ShiftKind::Rest && !is_sleep_day(row, j, strict))
        .count()
}

/// Number of rest cells required right after a maximal night run of `len`,
/// or `None` when the run is too long to ever be legal.
#[inline]
fn required_rest_after_nights(len: usize) -> Option<usize> {
    match len {
        0..=2 => Some(0),
        // sleep day + rest day
        3 => Some(2),
        // sleep day + two rest days
        4 => Some(3),
        _ => None,
    }
}

pub(crate) fn for_each_h2(row: &[ShiftKind], k_max: usize, mut emit: impl FnMut(Location)) {
    let days = row.len();
    if k_max >= 1 && k_max <= days {
        // sliding count of working days in the current window
        let mut working = row[..k_max].iter().filter(|s| s.is_working()).count();
        for start in 0..=days - k_max {
            if start > 0 {
                working -= row[start - 1].is_working() as usize;
                working += row[start + k_max - 1].is_working() as usize;
            }
            if working == k_max {
                emit(Location::Window { start, len: k_max });
            }
        }
    }

    let mut j = 0;
    while j < days {
        if row[j] != ShiftKind::Night {
            j += 1;
            continue;
        }
        let start = j;
        while j < days && row[j] == ShiftKind::Night {
            j += 1;
        }
        let len = j - start;
        let ok = match required_rest_after_nights(len) {
            None => false,
            Some(need) => {
                let end = (j + need).min(days);
                row[j..end].iter().all(|s| *s == ShiftKind::Rest)
            }
        };
        if !ok {
            emit(Location::NightRun { start, len });
        }
    }
}

pub(crate) fn for_each_h4(instance: &Instance, nurse: usize, row: &[ShiftKind], mut emit: impl FnMut(Location)) {
    for (day, shift) in row.iter().enumerate() {
        if instance.on_leave(nurse, day) && *shift != ShiftKind::Rest {
            emit(Location::Day(day));
        }
    }
}

pub(crate) fn for_each_h5(row: &[ShiftKind], mut emit: impl FnMut(Location)) {
    for day in 0..row.len().saturating_sub(1) {
        if row[day] == ShiftKind::Night && row[day + 1] == ShiftKind::Morning {
            emit(Location::Boundary(day));
        }
    }
}

#[inline]
pub(crate) fn h1_row_violated(instance: &Instance, row: &[ShiftKind]) -> bool {
    countable_rest_days(row, instance.rules.strict_sleep) < instance.g_min
}

/// Violations of the enabled row-local families (H1, H2, H4, H5) for one nurse.
pub(crate) fn row_violation_count(instance: &Instance, nurse: usize, row: &[ShiftKind]) -> u32 {
    let rules = &instance.rules;
    let mut count = 0u32;
    if rules.is_enabled(ConstraintId::H1) && h1_row_violated(instance, row) {
        count += 1;
    }
    if rules.is_enabled(ConstraintId::H2) {
        for_each_h2(row, instance.k_max, |_| count += 1);
    }
    if rules.is_enabled(ConstraintId::H4) {
        for_each_h4(instance, nurse, row, |_| count += 1);
    }
    if rules.is_enabled(ConstraintId::H5) {
        for_each_h5(row, |_| count += 1);
    }
    count
}

/// Head count of nurses skilled for `ward` working `shift` on `day`.
pub fn coverage(roster: &Roster, instance: &Instance, shift: ShiftKind, ward: usize, day: usize) -> u32 {
    (0..roster.nurses())
        .filter(|&i| instance.skilled(i, ward) && roster.get(i, day) == shift)
        .count() as u32
}

/// Size of each family's constraint-instance universe, indexed by `ConstraintId::index`.
pub fn universe(instance: &Instance) -> [usize; 5] {
    let n = instance.nurses();
    let d = instance.days();
    let rules = &instance.rules;
    let mut sizes = [0usize; 5];
    if rules.is_enabled(ConstraintId::H1) {
        sizes[0] = n;
    }
    if rules.is_enabled(ConstraintId::H2) {
        let windows = d.saturating_sub(instance.k_max) + 1;
        sizes[1] = n * (windows + d);
    }
    if rules.is_enabled(ConstraintId::H3) {
        let mut cells = 0;
        for shift in ShiftKind::WORKING {
            for t in 0..instance.wards() {
                for j in 0..d {
                    if instance.demand(shift, t, j) > 0 {
                        cells += 1;
                    }
                }
            }
        }
        sizes[2] = cells;
    }
    if rules.is_enabled(ConstraintId::H4) {
        sizes[3] = (0..n).map(|i| instance.leave_days(i)).sum();
    }
    if rules.is_enabled(ConstraintId::H5) {
        sizes[4] = n * d.saturating_sub(1);
    }
    sizes
}

pub fn total_count(instance: &Instance) -> usize {
    universe(instance).iter().sum()
}

// --- public checkers ------------------------------------------------------

fn assert_shape(roster: &Roster, instance: &Instance) {
    assert!(
        roster.matches(instance),
        "roster is {}x{}, instance is {}x{}",
        roster.nurses(),
        roster.days(),
        instance.nurses(),
        instance.days()
    );
}

/// Minimum countable rest days. One violation per offending nurse.
pub fn check_h1(roster: &Roster, instance: &Instance) -> Vec<Violation> {
    assert_shape(roster, instance);
    let strict = instance.rules.strict_sleep;
    let mut out = Vec::new();
    for (i, row) in roster.rows().enumerate() {
        let rest = countable_rest_days(row, strict);
        if rest < instance.g_min {
            out.push(Violation {
                constraint: ConstraintId::H1,
                nurse: Some(i),
                location: Location::Horizon,
                detail: format!("{} countable rest days, need {}", rest, instance.g_min),
            });
        }
    }
    out
}

/// Consecutive working days and rest after night runs.
pub fn check_h2(roster: &Roster, instance: &Instance) -> Vec<Violation> {
    assert_shape(roster, instance);
    let mut out = Vec::new();
    for (i, row) in roster.rows().enumerate() {
        for_each_h2(row, instance.k_max, |location| {
            let detail = match location {
                Location::Window { len, .. } => format!("{} consecutive working days", len),
                Location::NightRun { len, .. } => match required_rest_after_nights(len) {
                    Some(need) => format!("{} nights not followed by {} rest days", len, need),
                    None => format!("{} consecutive nights", len),
                },
                _ => unreachable!(),
            };
            out.push(Violation {
                constraint: ConstraintId::H2,
                nurse: Some(i),
                location,
                detail,
            });
        });
    }
    out
}

/// Skilled coverage per (shift, ward, day).
pub fn check_h3(roster: &Roster, instance: &Instance) -> Vec<Violation> {
    assert_shape(roster, instance);
    let mut out = Vec::new();
    for shift in ShiftKind::WORKING {
        for ward in 0..instance.wards() {
            for day in 0..instance.days() {
                let need = instance.demand(shift, ward, day);
                if need == 0 {
                    continue;
                }
                let have = coverage(roster, instance, shift, ward, day);
                if have < need {
                    out.push(Violation {
                        constraint: ConstraintId::H3,
                        nurse: None,
                        location: Location::Cell {
                            shift: shift.code(),
                            ward,
                            day,
                        },
                        detail: format!("{} skilled nurses on {}, need {}", have, shift, need),
                    });
                }
            }
        }
    }
    out
}

/// No work on leave days.
pub fn check_h4(roster: &Roster, instance: &Instance) -> Vec<Violation> {
    assert_shape(roster, instance);
    let mut out = Vec::new();
    for (i, row) in roster.rows().enumerate() {
        for_each_h4(instance, i, row, |location| {
            let day = match location {
                Location::Day(d) => d,
                _ => unreachable!(),
            };
            out.push(Violation {
                constraint: ConstraintId::H4,
                nurse: Some(i),
                location,
                detail: format!("assigned {} on a leave day", row[day]),
            });
        });
    }
    out
}

/// Night followed by Morning. Same-day pairs cannot occur with one shift per cell.
pub fn check_h5(roster: &Roster, instance: &Instance) -> Vec<Violation> {
    assert_shape(roster, instance);
    let mut out = Vec::new();
    for (i, row) in roster.rows().enumerate() {
        for_each_h5(row, |location| {
            out.push(Violation {
                constraint: ConstraintId::H5,
                nurse: Some(i),
                location,
                detail: "night shift followed by morning shift".to_string(),
            });
        });
    }
    out
}

pub fn check(id: ConstraintId, roster: &Roster, instance: &Instance) -> Vec<Violation> {
    match id {
        ConstraintId::H1 => check_h1(roster, instance),
        ConstraintId::H2 => check_h2(roster, instance),
        ConstraintId::H3 => check_h3(roster, instance),
        ConstraintId::H4 => check_h4(roster, instance),
        ConstraintId::H5 => check_h5(roster, instance),
    }
}

/// Evaluates every enabled family and returns the satisfied fraction with the report.
pub fn feasibility(roster: &Roster, instance: &Instance) -> (f64, ViolationReport) {
    let mut entries = Vec::new();
    for id in instance.rules.enabled_ids() {
        entries.extend(check(id, roster, instance));
    }
    let total_count = total_count(instance);
    let report = ViolationReport {
        satisfied_count: total_count - entries.len(),
        total_count,
        entries,
    };
    (report.fraction(), report)
}

/// Total violation count of the enabled families, without building details.
pub fn violation_count(roster: &Roster, instance: &Instance) -> usize {
    let mut count = 0usize;
    for (i, row) in roster.rows().enumerate() {
        count += row_violation_count(instance, i, row) as usize;
    }
    if instance.rules.is_enabled(ConstraintId::H3) {
        count += check_h3(roster, instance).len();
    }
    count
}

pub fn is_feasible(roster: &Roster, instance: &Instance) -> bool {
    violation_count(roster, instance) == 0
}
