//! Preference cost model.
//!
//! A roster row is read as a string of day classes (`AM`, `PM`, `N`, `RD`)
//! and every rule pattern is matched at every offset. All matches count,
//! including overlapping and nested ones, so `N-N-PM` also pays for the
//! `N-PM` it contains. Costs are signed: a negative cost expresses a liked
//! pattern.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{Roster, ShiftKind, ValidationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DayClass {
    AM,
    PM,
    N,
    RD,
    /// Any working shift. Only valid inside patterns.
    W,
}

impl DayClass {
    #[inline]
    pub fn of(shift: ShiftKind) -> DayClass {
        match shift {
            ShiftKind::Rest => DayClass::RD,
            ShiftKind::Morning => DayClass::AM,
            ShiftKind::Afternoon => DayClass::PM,
            ShiftKind::Night => DayClass::N,
        }
    }

    #[inline]
    pub fn matches(self, shift: ShiftKind) -> bool {
        match self {
            DayClass::W => shift.is_working(),
            c => c == DayClass::of(shift),
        }
    }
}

impl fmt::Display for DayClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DayClass::AM => "AM",
            DayClass::PM => "PM",
            DayClass::N => "N",
            DayClass::RD => "RD",
            DayClass::W => "W",
        };
        f.write_str(s)
    }
}

impl FromStr for DayClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "AM" => Ok(DayClass::AM),
            "PM" => Ok(DayClass::PM),
            "N" => Ok(DayClass::N),
            "RD" => Ok(DayClass::RD),
            "W" => Ok(DayClass::W),
            other => Err(format!("unknown day class `{}`", other)),
        }
    }
}

/// A dash-separated sequence of day classes, at least two long.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern(Vec<DayClass>);

impl Pattern {
    pub fn new(tokens: Vec<DayClass>) -> Result<Self, String> {
        if tokens.len() < 2 {
            return Err("a pattern needs at least two day classes".to_string());
        }
        Ok(Pattern(tokens))
    }

    pub fn tokens(&self) -> &[DayClass] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn matches_at(&self, row: &[ShiftKind], start: usize) -> bool {
        start + self.0.len() <= row.len()
            && self
                .0
                .iter()
                .zip(&row[start..])
                .all(|(class, shift)| class.matches(*shift))
    }

    fn is_rest_pair(&self) -> bool {
        self.0 == [DayClass::RD, DayClass::RD]
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("-")?;
            }
            write!(f, "{}", t)?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tokens = s.split('-').map(DayClass::from_str).collect::<Result<Vec<_>, _>>()?;
        Pattern::new(tokens)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub pattern: Pattern,
    pub cost: i64,
}

impl Rule {
    pub fn parse(pattern: &str, cost: i64) -> Result<Self, String> {
        Ok(Rule {
            pattern: pattern.parse()?,
            cost,
        })
    }
}

/// When an `RD-RD` match is waived as mandated rest after night duty.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RestExemption {
    /// The day before the pair is a night.
    #[default]
    AfterNight,
    /// The four days before the pair are all nights.
    AfterFourNights,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyTable {
    pub rules: Vec<Rule>,
    /// Per-nurse rules. A pattern listed here replaces the base cost of the
    /// same pattern for that nurse; other patterns are added.
    pub overrides: BTreeMap<usize, Vec<Rule>>,
    pub rest_exemption: RestExemption,
}

impl Default for PenaltyTable {
    fn default() -> Self {
        PenaltyTable::default_table()
    }
}

impl PenaltyTable {
    pub fn empty() -> Self {
        PenaltyTable {
            rules: Vec::new(),
            overrides: BTreeMap::new(),
            rest_exemption: RestExemption::AfterNight,
        }
    }

    /// The published preference costs plus `RD-W-RD` for an isolated working day.
    pub fn default_table() -> Self {
        let rules = [
            ("N-N-PM", 500),
            ("N-N-RD", 50),
            ("N-PM", 25),
            ("N-RD", 25),
            ("PM-AM", 10),
            ("RD-RD", 10),
            ("N-N-N", 5000),
            ("RD-W-RD", 10),
        ]
        .into_iter()
        .map(|(p, c)| Rule::parse(p, c).expect("built-in pattern"))
        .collect();
        PenaltyTable {
            rules,
            overrides: BTreeMap::new(),
            rest_exemption: RestExemption::AfterNight,
        }
    }

    /// The default table without patterns longer than the horizon, which could never match.
    pub fn default_for_horizon(days: usize) -> Self {
        let mut table = PenaltyTable::default_table();
        table.rules.retain(|r| r.pattern.len() <= days);
        table
    }

    /// Cost of the first base rule with this pattern.
    pub fn lookup(&self, pattern: &str) -> Option<i64> {
        let p: Pattern = pattern.parse().ok()?;
        self.rules.iter().find(|r| r.pattern == p).map(|r| r.cost)
    }

    pub fn validate(&self, nurses: usize, days: usize) -> Result<(), ValidationError> {
        let too_long = |r: &Rule| r.pattern.len() > days;
        let all = self.rules.iter().chain(self.overrides.values().flatten());
        if let Some(r) = all.into_iter().find(|r| too_long(r)) {
            return Err(ValidationError::PatternTooLong {
                pattern: r.pattern.to_string(),
                days,
            });
        }
        if let Some(&nurse) = self.overrides.keys().find(|n| **n >= nurses) {
            return Err(ValidationError::OverrideNurse { nurse, nurses });
        }
        Ok(())
    }

    /// The rules that apply to `nurse`.
    pub fn rules_for(&self, nurse: usize) -> impl Iterator<Item = &Rule> {
        let own = self.overrides.get(&nurse).map(Vec::as_slice).unwrap_or(&[]);
        self.rules
            .iter()
            .filter(move |r| !own.iter().any(|o| o.pattern == r.pattern))
            .chain(own.iter())
    }

    /// Whether no achievable objective can go below zero.
    pub fn is_nonnegative(&self) -> bool {
        self.rules
            .iter()
            .chain(self.overrides.values().flatten())
            .all(|r| r.cost >= 0)
    }

    fn rest_pair_exempt(&self, row: &[ShiftKind], start: usize) -> bool {
        let nights_before = match self.rest_exemption {
            RestExemption::AfterNight => 1,
            RestExemption::AfterFourNights => 4,
        };
        start >= nights_before && row[start - nights_before..start].iter().all(|s| *s == ShiftKind::Night)
    }
}

/// Cost of one nurse's row: every (rule, offset) match adds the rule's cost.
pub fn nurse_penalty(row: &[ShiftKind], table: &PenaltyTable, nurse: usize) -> i64 {
    let mut total = 0i64;
    for rule in table.rules_for(nurse) {
        let len = rule.pattern.len();
        if len > row.len() {
            continue;
        }
        let rest_pair = rule.pattern.is_rest_pair();
        for start in 0..=row.len() - len {
            if rule.pattern.matches_at(row, start) && !(rest_pair && table.rest_pair_exempt(row, start)) {
                total += rule.cost;
            }
        }
    }
    total
}

pub fn objective(roster: &Roster, table: &PenaltyTable) -> i64 {
    roster
        .rows()
        .enumerate()
        .map(|(i, row)| nurse_penalty(row, table, i))
        .sum()
}

/// Nurses by descending penalty; equal penalties keep ascending nurse order.
pub fn rank_nurses_by_penalty(roster: &Roster, table: &PenaltyTable) -> Vec<(usize, i64)> {
    let mut ranked: Vec<(usize, i64)> = roster
        .rows()
        .enumerate()
        .map(|(i, row)| (i, nurse_penalty(row, table, i)))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}
