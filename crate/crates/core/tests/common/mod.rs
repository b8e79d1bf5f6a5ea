//! Shared generators and naive reference evaluators for the integration tests.
//!
//! The naive checkers are deliberately written cell by cell from the rule
//! statements, without sharing any code with the library.

#![allow(dead_code)]

use nurse_roster::constraints::ConstraintId;
use nurse_roster::penalty::{DayClass, PenaltyTable, RestExemption};
use nurse_roster::{Instance, Roster, ShiftKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RD: u8 = 0;
pub const AM: u8 = 1;
pub const PM: u8 = 2;
pub const N: u8 = 3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn shift(code: u8) -> ShiftKind {
    ShiftKind::from_code(code).unwrap()
}

/// Shifts drawn with extra weight on nights so that long night runs show up.
pub fn random_shift(rng: &mut ChaCha8Rng) -> ShiftKind {
    match rng.gen_range(0..10u32) {
        0..=2 => ShiftKind::Rest,
        3 | 4 => ShiftKind::Morning,
        5 | 6 => ShiftKind::Afternoon,
        _ => ShiftKind::Night,
    }
}

pub fn random_roster(rng: &mut ChaCha8Rng, nurses: usize, days: usize) -> Roster {
    let rows = (0..nurses)
        .map(|_| (0..days).map(|_| random_shift(rng)).collect())
        .collect();
    Roster::from_rows(rows).unwrap()
}

/// Any small instance: random dimensions, skills, leave, demand, rule set.
pub fn random_instance(rng: &mut ChaCha8Rng, max_nurses: usize, max_days: usize) -> Instance {
    let nurses = rng.gen_range(1..=max_nurses as u32) as usize;
    let days = rng.gen_range(1..=max_days as u32) as usize;
    let wards = rng.gen_range(1..=2u32) as usize;
    let mut inst = Instance::new(nurses, days, wards).unwrap();
    inst.k_max = rng.gen_range(1..=days as u32) as usize;
    inst.g_min = rng.gen_range(0..=days as u32) as usize;
    for i in 0..nurses {
        for t in 0..wards {
            inst.set_skilled(i, t, rng.gen_bool(0.7));
        }
        for j in 0..days {
            inst.set_leave(i, j, rng.gen_bool(0.15));
        }
    }
    for s in ShiftKind::WORKING {
        for t in 0..wards {
            for j in 0..days {
                if rng.gen_bool(0.3) {
                    inst.set_demand(s, t, j, rng.gen_range(1..=2u32));
                }
            }
        }
    }
    for id in ConstraintId::ALL {
        inst.rules.set_enabled(id, rng.gen_bool(0.8));
    }
    inst.rules.strict_sleep = rng.gen_bool(0.3);
    inst
}

// --- naive hard-constraint evaluator ---------------------------------------

fn cell(r: &Roster, i: usize, j: usize) -> u8 {
    r.get(i, j).code()
}

/// Per family, the number of violated constraint instances.
pub fn naive_counts(r: &Roster, inst: &Instance) -> [usize; 5] {
    let n = inst.nurses();
    let d = inst.days();
    let mut out = [0usize; 5];

    // minimum rest days, sleep days excluded
    for i in 0..n {
        let mut rest = 0;
        for j in 0..d {
            if cell(r, i, j) != RD {
                continue;
            }
            let sleep = if inst.rules.strict_sleep {
                j >= 3 && (j - 3..j).all(|k| cell(r, i, k) == N)
            } else {
                j >= 1 && cell(r, i, j - 1) == N
            };
            if !sleep {
                rest += 1;
            }
        }
        if rest < inst.g_min {
            out[0] += 1;
        }
    }

    // working windows and rest after night runs
    for i in 0..n {
        if inst.k_max <= d {
            for start in 0..=(d - inst.k_max) {
                if (start..start + inst.k_max).all(|j| cell(r, i, j) != RD) {
                    out[1] += 1;
                }
            }
        }
        for start in 0..d {
            let begins_run = cell(r, i, start) == N && (start == 0 || cell(r, i, start - 1) != N);
            if !begins_run {
                continue;
            }
            let mut len = 0;
            while start + len < d && cell(r, i, start + len) == N {
                len += 1;
            }
            let bad = match len {
                1 | 2 => false,
                3 | 4 => {
                    let need = if len == 3 { 2 } else { 3 };
                    (0..need).any(|k| {
                        let j = start + len + k;
                        j < d && cell(r, i, j) != RD
                    })
                }
                _ => true,
            };
            if bad {
                out[1] += 1;
            }
        }
    }

    // skilled coverage
    for s in 1..=3u8 {
        for t in 0..inst.wards() {
            for j in 0..d {
                let need = inst.demand(shift(s), t, j);
                let mut have = 0;
                for i in 0..n {
                    if inst.skilled(i, t) && cell(r, i, j) == s {
                        have += 1;
                    }
                }
                if have < need {
                    out[2] += 1;
                }
            }
        }
    }

    // leave
    for i in 0..n {
        for j in 0..d {
            if inst.on_leave(i, j) && cell(r, i, j) != RD {
                out[3] += 1;
            }
        }
    }

    // night followed by morning
    for i in 0..n {
        for j in 1..d {
            if cell(r, i, j - 1) == N && cell(r, i, j) == AM {
                out[4] += 1;
            }
        }
    }

    for id in ConstraintId::ALL {
        if !inst.rules.is_enabled(id) {
            out[id.index()] = 0;
        }
    }
    out
}

pub fn naive_violations(r: &Roster, inst: &Instance) -> usize {
    naive_counts(r, inst).iter().sum()
}

// --- naive penalty ---------------------------------------------------------

fn token_matches(token: DayClass, code: u8) -> bool {
    match token {
        DayClass::AM => code == AM,
        DayClass::PM => code == PM,
        DayClass::N => code == N,
        DayClass::RD => code == RD,
        DayClass::W => code != RD,
    }
}

/// Every (rule, offset) pair checked independently; per-nurse rules with the
/// same pattern shadow the base rule.
pub fn naive_row_penalty(row: &[ShiftKind], table: &PenaltyTable, nurse: usize) -> i64 {
    let codes: Vec<u8> = row.iter().map(|s| s.code()).collect();
    let own = table.overrides.get(&nurse).cloned().unwrap_or_default();
    let mut rules: Vec<_> = table
        .rules
        .iter()
        .filter(|r| !own.iter().any(|o| o.pattern == r.pattern))
        .cloned()
        .collect();
    rules.extend(own);

    let mut total = 0;
    for rule in &rules {
        let tokens = rule.pattern.tokens();
        for offset in 0..codes.len() {
            if offset + tokens.len() > codes.len() {
                break;
            }
            let hit = tokens
                .iter()
                .enumerate()
                .all(|(k, t)| token_matches(*t, codes[offset + k]));
            if !hit {
                continue;
            }
            let rest_pair = tokens == [DayClass::RD, DayClass::RD];
            let before = match table.rest_exemption {
                RestExemption::AfterNight => 1,
                RestExemption::AfterFourNights => 4,
            };
            let exempt = rest_pair && offset >= before && (offset - before..offset).all(|k| codes[k] == N);
            if !exempt {
                total += rule.cost;
            }
        }
    }
    total
}

pub fn naive_objective(r: &Roster, table: &PenaltyTable) -> i64 {
    (0..r.nurses()).map(|i| naive_row_penalty(r.row(i), table, i)).sum()
}

/// Every roster of the instance, checked with the naive evaluator. Only for
/// very small grids.
pub fn naive_optimum(inst: &Instance) -> Option<i64> {
    let cells = inst.nurses() * inst.days();
    let mut best: Option<i64> = None;
    let mut codes = vec![0u8; cells];
    loop {
        let rows: Vec<Vec<ShiftKind>> = codes
            .chunks(inst.days())
            .map(|c| c.iter().map(|&x| shift(x)).collect())
            .collect();
        let r = Roster::from_rows(rows).unwrap();
        if naive_violations(&r, inst) == 0 {
            let cost = naive_objective(&r, &inst.penalty);
            best = Some(best.map_or(cost, |b: i64| b.min(cost)));
        }
        let mut k = 0;
        loop {
            if k == cells {
                return best;
            }
            codes[k] += 1;
            if codes[k] < 4 {
                break;
            }
            codes[k] = 0;
            k += 1;
        }
    }
}

/// Tiny instances for the oracle comparison: one ward, everyone skilled,
/// sparse 0/1 demand, rare leave, default costs, and a rest minimum that
/// leaves room for one rest day per working window.
pub fn random_tiny_instance(rng: &mut ChaCha8Rng) -> Instance {
    let nurses = rng.gen_range(2..=3u32) as usize;
    let days = rng.gen_range(2..=(12 / nurses) as u32) as usize;
    let mut inst = Instance::new(nurses, days, 1).unwrap();
    inst.k_max = rng.gen_range(2.min(days) as u32..=days as u32) as usize;
    // enough rest days to break every working window of length k_max
    inst.g_min = (rng.gen_range(0..=1u32) as usize).max(days / inst.k_max);
    for s in ShiftKind::WORKING {
        for j in 0..days {
            if rng.gen_bool(0.25) {
                inst.set_demand(s, 0, j, 1);
            }
        }
    }
    for i in 0..nurses {
        for j in 0..days {
            if rng.gen_bool(0.08) {
                inst.set_leave(i, j, true);
            }
        }
    }
    inst
}
