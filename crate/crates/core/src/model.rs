//! Problem and solution data model.
//!
//! An [`Instance`] holds everything the solver reads: the nurse/day/ward
//! dimensions, skill and leave matrices, the coverage demand tensor, the
//! hard-rule parameters and the preference cost table. A [`Roster`] is the
//! dense nurse-by-day grid of [`ShiftKind`] values.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::ConstraintId;
use crate::penalty::PenaltyTable;

pub const DEFAULT_PHASE1_ITER_CAP: u64 = 1_000_000;
pub const DEFAULT_PHASE2_ITER_CAP: u64 = 10_000;
pub const DEFAULT_G_MIN: usize = 2;
pub const DEFAULT_K_MAX: usize = 6;

/// What a nurse does on a given day. The numeric codes are the grid encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum ShiftKind {
    Rest = 0,
    Morning = 1,
    Afternoon = 2,
    Night = 3,
}

impl ShiftKind {
    pub const ALL: [ShiftKind; 4] = [
        ShiftKind::Rest,
        ShiftKind::Morning,
        ShiftKind::Afternoon,
        ShiftKind::Night,
    ];

    /// The three working shifts, in round-robin order.
    pub const WORKING: [ShiftKind; 3] = [ShiftKind::Morning, ShiftKind::Afternoon, ShiftKind::Night];

    #[inline]
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(ShiftKind::Rest),
            1 => Some(ShiftKind::Morning),
            2 => Some(ShiftKind::Afternoon),
            3 => Some(ShiftKind::Night),
            _ => None,
        }
    }

    #[inline]
    pub fn is_working(self) -> bool {
        self != ShiftKind::Rest
    }

    /// Index into the working-shift axis of the demand tensor (Morning = 0).
    #[inline]
    pub fn working_index(self) -> Option<usize> {
        match self {
            ShiftKind::Rest => None,
            s => Some(s as usize - 1),
        }
    }
}

impl fmt::Display for ShiftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ShiftKind::Rest => "RD",
            ShiftKind::Morning => "AM",
            ShiftKind::Afternoon => "PM",
            ShiftKind::Night => "N",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("{0} must be at least 1")]
    ZeroDimension(&'static str),
    #[error("k_max must satisfy 1 <= k_max <= D (k_max={k_max}, D={days})")]
    KMaxOutOfRange { k_max: usize, days: usize },
    #[error("{0} must be positive")]
    ZeroIterCap(&'static str),
    #[error("{what} has {found} entries, expected {expected}")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("demand for shift {shift} ward {ward} day {day} is negative ({value})")]
    NegativeDemand {
        shift: usize,
        ward: usize,
        day: usize,
        value: i64,
    },
    #[error("penalty pattern {pattern} is longer than the horizon ({days} days)")]
    PatternTooLong { pattern: String, days: usize },
    #[error("penalty override refers to nurse {nurse}, but there are only {nurses} nurses")]
    OverrideNurse { nurse: usize, nurses: usize },
}

/// Which hard constraints are active and how the sleep-day rule is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardRules {
    enabled: [bool; 5],
    /// Only the rest day right after a run of three or more nights is a sleep
    /// day. When false, any rest day right after a night is a sleep day.
    pub strict_sleep: bool,
}

impl Default for HardRules {
    fn default() -> Self {
        HardRules {
            enabled: [true; 5],
            strict_sleep: false,
        }
    }
}

impl HardRules {
    pub fn only(ids: &[ConstraintId]) -> Self {
        let mut enabled = [false; 5];
        for id in ids {
            enabled[id.index()] = true;
        }
        HardRules {
            enabled,
            strict_sleep: false,
        }
    }

    #[inline]
    pub fn is_enabled(&self, id: ConstraintId) -> bool {
        self.enabled[id.index()]
    }

    pub fn set_enabled(&mut self, id: ConstraintId, on: bool) {
        self.enabled[id.index()] = on;
    }

    pub fn enabled_ids(&self) -> Vec<ConstraintId> {
        ConstraintId::ALL
            .into_iter()
            .filter(|id| self.is_enabled(*id))
            .collect()
    }

    pub fn all_enabled(&self) -> bool {
        self.enabled.iter().all(|e| *e)
    }
}

/// A complete problem definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    nurses: usize,
    days: usize,
    wards: usize,
    /// nurses × wards, row-major.
    skills: Vec<bool>,
    /// 3 × wards × days, indexed by working shift, then ward, then day.
    demand: Vec<u32>,
    /// nurses × days, row-major.
    leave: Vec<bool>,
    pub g_min: usize,
    pub k_max: usize,
    pub phase1_iter_cap: u64,
    pub phase2_iter_cap: u64,
    pub rules: HardRules,
    pub penalty: PenaltyTable,
}

impl Instance {
    /// An instance with every nurse skilled for every ward, no demand and no leave.
    pub fn new(nurses: usize, days: usize, wards: usize) -> Result<Self, ValidationError> {
        let inst = Instance {
            nurses,
            days,
            wards,
            skills: vec![true; nurses * wards],
            demand: vec![0; 3 * wards * days],
            leave: vec![false; nurses * days],
            g_min: DEFAULT_G_MIN.min(days),
            k_max: DEFAULT_K_MAX.min(days),
            phase1_iter_cap: DEFAULT_PHASE1_ITER_CAP,
            phase2_iter_cap: DEFAULT_PHASE2_ITER_CAP,
            rules: HardRules::default(),
            penalty: PenaltyTable::default_for_horizon(days),
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Builds an instance from raw matrices. `demand` entries are signed so
    /// that negative values from external input surface as validation errors.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        nurses: usize,
        days: usize,
        wards: usize,
        skills: Vec<bool>,
        demand: Vec<i64>,
        leave: Vec<bool>,
        g_min: usize,
        k_max: usize,
        penalty: PenaltyTable,
    ) -> Result<Self, ValidationError> {
        check_dims(nurses, days, wards)?;
        expect_len("skills", nurses * wards, skills.len())?;
        expect_len("demand", 3 * wards * days, demand.len())?;
        expect_len("leave", nurses * days, leave.len())?;
        let mut checked = Vec::with_capacity(demand.len());
        for (idx, &value) in demand.iter().enumerate() {
            if value < 0 {
                return Err(ValidationError::NegativeDemand {
                    shift: idx / (wards * days) + 1,
                    ward: (idx / days) % wards,
                    day: idx % days,
                    value,
                });
            }
            checked.push(value.min(u32::MAX as i64) as u32);
        }
        let inst = Instance {
            nurses,
            days,
            wards,
            skills,
            demand: checked,
            leave,
            g_min,
            k_max,
            phase1_iter_cap: DEFAULT_PHASE1_ITER_CAP,
            phase2_iter_cap: DEFAULT_PHASE2_ITER_CAP,
            rules: HardRules::default(),
            penalty,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        check_dims(self.nurses, self.days, self.wards)?;
        if self.k_max < 1 || self.k_max > self.days {
            return Err(ValidationError::KMaxOutOfRange {
                k_max: self.k_max,
                days: self.days,
            });
        }
        if self.phase1_iter_cap == 0 {
            return Err(ValidationError::ZeroIterCap("phase1_iter_cap"));
        }
        if self.phase2_iter_cap == 0 {
            return Err(ValidationError::ZeroIterCap("phase2_iter_cap"));
        }
        expect_len("skills", self.nurses * self.wards, self.skills.len())?;
        expect_len("demand", 3 * self.wards * self.days, self.demand.len())?;
        expect_len("leave", self.nurses * self.days, self.leave.len())?;
        self.penalty.validate(self.nurses, self.days)
    }

    #[inline]
    pub fn nurses(&self) -> usize {
        self.nurses
    }

    #[inline]
    pub fn days(&self) -> usize {
        self.days
    }

    #[inline]
    pub fn wards(&self) -> usize {
        self.wards
    }

    #[inline]
    pub fn skilled(&self, nurse: usize, ward: usize) -> bool {
        self.skills[nurse * self.wards + ward]
    }

    pub fn set_skilled(&mut self, nurse: usize, ward: usize, skilled: bool) {
        self.skills[nurse * self.wards + ward] = skilled;
    }

    #[inline]
    pub fn on_leave(&self, nurse: usize, day: usize) -> bool {
        self.leave[nurse * self.days + day]
    }

    pub fn set_leave(&mut self, nurse: usize, day: usize, on_leave: bool) {
        self.leave[nurse * self.days + day] = on_leave;
    }

    pub fn leave_days(&self, nurse: usize) -> usize {
        self.leave[nurse * self.days..(nurse + 1) * self.days]
            .iter()
            .filter(|l| **l)
            .count()
    }

    /// Required head count for `shift` in `ward` on `day`. Rest has no demand.
    #[inline]
    pub fn demand(&self, shift: ShiftKind, ward: usize, day: usize) -> u32 {
        match shift.working_index() {
            Some(s) => self.demand[self.demand_index(s, ward, day)],
            None => 0,
        }
    }

    pub fn set_demand(&mut self, shift: ShiftKind, ward: usize, day: usize, value: u32) {
        let s = shift
            .working_index()
            .expect("demand is only defined for working shifts");
        let idx = self.demand_index(s, ward, day);
        self.demand[idx] = value;
    }

    #[inline]
    fn demand_index(&self, s: usize, ward: usize, day: usize) -> usize {
        (s * self.wards + ward) * self.days + day
    }

    pub fn total_demand(&self) -> u64 {
        self.demand.iter().map(|d| *d as u64).sum()
    }
}

fn check_dims(nurses: usize, days: usize, wards: usize) -> Result<(), ValidationError> {
    if nurses == 0 {
        return Err(ValidationError::ZeroDimension("n"));
    }
    if days == 0 {
        return Err(ValidationError::ZeroDimension("D"));
    }
    if wards == 0 {
        return Err(ValidationError::ZeroDimension("wards"));
    }
    Ok(())
}

fn expect_len(what: &'static str, expected: usize, found: usize) -> Result<(), ValidationError> {
    if expected != found {
        return Err(ValidationError::Shape { what, expected, found });
    }
    Ok(())
}

/// Nurse-by-day assignment grid. One shift per nurse per day.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Roster {
    nurses: usize,
    days: usize,
    cells: Vec<ShiftKind>,
}

impl Roster {
    pub fn filled(nurses: usize, days: usize, shift: ShiftKind) -> Self {
        Roster {
            nurses,
            days,
            cells: vec![shift; nurses * days],
        }
    }

    pub fn from_rows(rows: Vec<Vec<ShiftKind>>) -> Result<Self, ValidationError> {
        let nurses = rows.len();
        if nurses == 0 {
            return Err(ValidationError::ZeroDimension("n"));
        }
        let days = rows[0].len();
        if days == 0 {
            return Err(ValidationError::ZeroDimension("D"));
        }
        let mut cells = Vec::with_capacity(nurses * days);
        for row in rows {
            expect_len("roster row", days, row.len())?;
            cells.extend(row);
        }
        Ok(Roster { nurses, days, cells })
    }

    /// Convenience constructor from numeric codes; panics on codes outside 0..=3.
    pub fn from_codes(rows: &[&[u8]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| ShiftKind::from_code(*c).expect("shift code must be 0..=3"))
                    .collect()
            })
            .collect();
        Roster::from_rows(rows).expect("rows must be non-empty and rectangular")
    }

    #[inline]
    pub fn nurses(&self) -> usize {
        self.nurses
    }

    #[inline]
    pub fn days(&self) -> usize {
        self.days
    }

    #[inline]
    pub fn get(&self, nurse: usize, day: usize) -> ShiftKind {
        self.cells[nurse * self.days + day]
    }

    #[inline]
    pub fn set(&mut self, nurse: usize, day: usize, shift: ShiftKind) {
        self.cells[nurse * self.days + day] = shift;
    }

    #[inline]
    pub fn row(&self, nurse: usize) -> &[ShiftKind] {
        &self.cells[nurse * self.days..(nurse + 1) * self.days]
    }

    pub fn row_mut(&mut self, nurse: usize) -> &mut [ShiftKind] {
        &mut self.cells[nurse * self.days..(nurse + 1) * self.days]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[ShiftKind]> {
        self.cells.chunks(self.days)
    }

    /// Exchanges two cells, which may belong to different nurses.
    #[inline]
    pub fn exchange(&mut self, a: (usize, usize), b: (usize, usize)) {
        let ia = a.0 * self.days + a.1;
        let ib = b.0 * self.days + b.1;
        self.cells.swap(ia, ib);
    }

    pub fn matches(&self, instance: &Instance) -> bool {
        self.nurses == instance.nurses() && self.days == instance.days()
    }

    pub fn check_shape(&self, instance: &Instance) -> Result<(), ValidationError> {
        expect_len("roster rows", instance.nurses(), self.nurses)?;
        expect_len("roster columns", instance.days(), self.days)
    }
}

impl fmt::Display for Roster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let mut first = true;
            for cell in row {
                if !first {
                    f.write_str(",")?;
                }
                write!(f, "{}", cell.code())?;
                first = false;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
