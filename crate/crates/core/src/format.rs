//! Text formats for instances and rosters.
//!
//! Instance files are line oriented: `key=value` header lines followed by
//! bracketed blocks. `#` starts a comment.
//!
//! ```text
//! n=2
//! D=3
//! wards=1
//! g_min=1
//! k_max=3
//! [skills]
//! 1
//! 1
//! [leave]
//! 0,0,0
//! 0,1,0
//! [demand shift=1 ward=0]
//! 1,1,1
//! [penalty]
//! N-N-PM,500
//! @1 N-RD,-5
//! ```
//!
//! Roster files are one line per nurse with comma-separated shift codes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::constraints::ConstraintId;
use crate::model::{
    HardRules, Instance, Roster, ShiftKind, ValidationError, DEFAULT_PHASE1_ITER_CAP, DEFAULT_PHASE2_ITER_CAP,
};
use crate::penalty::{PenaltyTable, RestExemption, Rule};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Invalid(#[from] ValidationError),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> FormatError {
    FormatError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub const BUNDLED: [(&str, &str); 3] = [
    ("simple-6x5", include_str!("../fixtures/simple-6x5.txt")),
    ("full-15x14", include_str!("../fixtures/full-15x14.txt")),
    ("infeasible-demand", include_str!("../fixtures/infeasible-demand.txt")),
];

/// Text of a fixture shipped with the crate.
pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, FormatError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_instance(&text)
}

#[derive(Debug)]
enum Block {
    Header,
    Skills,
    Leave,
    Demand { shift: usize, ward: usize },
    Penalty,
}

struct Row<'a> {
    line: usize,
    text: &'a str,
}

fn split_values<'a>(row: &Row<'a>) -> Vec<&'a str> {
    row.text.split(',').map(str::trim).collect()
}

fn parse_binary_matrix(rows: &[Row], what: &str, height: usize, width: usize) -> Result<Vec<bool>, FormatError> {
    let last_line = rows.last().map(|r| r.line).unwrap_or(0);
    if rows.len() != height {
        return Err(parse_err(
            last_line,
            format!("[{}] has {} rows, expected {}", what, rows.len(), height),
        ));
    }
    let mut out = Vec::with_capacity(height * width);
    for row in rows {
        let values = split_values(row);
        if values.len() != width {
            return Err(parse_err(
                row.line,
                format!("[{}] row has {} values, expected {}", what, values.len(), width),
            ));
        }
        for v in values {
            match v {
                "0" => out.push(false),
                "1" => out.push(true),
                _ => return Err(parse_err(row.line, format!("[{}] value `{}` is not 0 or 1", what, v))),
            }
        }
    }
    Ok(out)
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize, FormatError> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("{} must be a non-negative integer, got `{}`", key, value)))
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool, FormatError> {
    match value {
        "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        _ => Err(parse_err(
            line,
            format!("{} must be true or false, got `{}`", key, value),
        )),
    }
}

fn parse_block_header(line: usize, inner: &str) -> Result<Block, FormatError> {
    let mut parts = inner.split_whitespace();
    let name = parts.next().unwrap_or("");
    match name {
        "skills" => Ok(Block::Skills),
        "leave" => Ok(Block::Leave),
        "penalty" => Ok(Block::Penalty),
        "demand" => {
            let mut shift = None;
            let mut ward = None;
            for attr in parts {
                let (k, v) = attr
                    .split_once('=')
                    .ok_or_else(|| parse_err(line, format!("malformed demand attribute `{}`", attr)))?;
                match k {
                    "shift" => shift = Some(parse_usize(line, "shift", v)?),
                    "ward" => ward = Some(parse_usize(line, "ward", v)?),
                    _ => return Err(parse_err(line, format!("unknown demand attribute `{}`", k))),
                }
            }
            let shift = shift.ok_or_else(|| parse_err(line, "demand block needs shift="))?;
            let ward = ward.ok_or_else(|| parse_err(line, "demand block needs ward="))?;
            if !(1..=3).contains(&shift) {
                return Err(parse_err(
                    line,
                    format!("demand shift must be 1, 2 or 3, got {}", shift),
                ));
            }
            Ok(Block::Demand { shift, ward })
        }
        _ => Err(parse_err(line, format!("unknown block [{}]", inner))),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut headers: Vec<(usize, String, String)> = Vec::new();
    let mut blocks: Vec<(usize, Block, Vec<Row>)> = Vec::new();
    let mut current = Block::Header;
    let mut current_line = 0;
    let mut rows: Vec<Row> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(inner) = content.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line, "unterminated block header"))?;
            let next = parse_block_header(line, inner.trim())?;
            let prev = std::mem::replace(&mut current, next);
            if !matches!(prev, Block::Header) {
                blocks.push((current_line, prev, std::mem::take(&mut rows)));
            }
            current_line = line;
            continue;
        }
        match current {
            Block::Header => {
                let (k, v) = content
                    .split_once('=')
                    .ok_or_else(|| parse_err(line, format!("expected key=value, got `{}`", content)))?;
                headers.push((line, k.trim().to_string(), v.trim().to_string()));
            }
            _ => rows.push(Row { line, text: content }),
        }
    }
    if !matches!(current, Block::Header) {
        blocks.push((current_line, current, rows));
    }

    let mut nurses = None;
    let mut days = None;
    let mut wards = None;
    let mut g_min = None;
    let mut k_max = None;
    let mut phase1 = DEFAULT_PHASE1_ITER_CAP;
    let mut phase2 = DEFAULT_PHASE2_ITER_CAP;
    let mut rules = HardRules::default();
    let mut rest_exemption = RestExemption::AfterNight;
    for (line, key, value) in &headers {
        let line = *line;
        match key.as_str() {
            "n" => nurses = Some(parse_usize(line, key, value)?),
            "D" => days = Some(parse_usize(line, key, value)?),
            "wards" => wards = Some(parse_usize(line, key, value)?),
            "g_min" => g_min = Some(parse_usize(line, key, value)?),
            "k_max" => k_max = Some(parse_usize(line, key, value)?),
            "phase1_iter_cap" => phase1 = parse_usize(line, key, value)? as u64,
            "phase2_iter_cap" => phase2 = parse_usize(line, key, value)? as u64,
            "hard" => {
                let mut ids = Vec::new();
                for tok in value.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                    ids.push(
                        ConstraintId::parse(tok)
                            .ok_or_else(|| parse_err(line, format!("unknown hard constraint `{}`", tok)))?,
                    );
                }
                let strict = rules.strict_sleep;
                rules = HardRules::only(&ids);
                rules.strict_sleep = strict;
            }
            "strict_sleep" => rules.strict_sleep = parse_bool(line, key, value)?,
            "rest_exemption" => {
                rest_exemption = match value.as_str() {
                    "after-night" => RestExemption::AfterNight,
                    "after-four-nights" => RestExemption::AfterFourNights,
                    _ => {
                        return Err(parse_err(
                            line,
                            format!(
                                "rest_exemption must be after-night or after-four-nights, got `{}`",
                                value
                            ),
                        ))
                    }
                }
            }
            _ => return Err(parse_err(line, format!("unknown header `{}`", key))),
        }
    }
    let require = |v: Option<usize>, key: &str| v.ok_or_else(|| parse_err(0, format!("missing header {}=", key)));
    let nurses = require(nurses, "n")?;
    let days = require(days, "D")?;
    let wards = require(wards, "wards")?;
    let g_min = require(g_min, "g_min")?;
    let k_max = require(k_max, "k_max")?;
    if nurses == 0 || days == 0 || wards == 0 {
        let what = if nurses == 0 {
            "n"
        } else if days == 0 {
            "D"
        } else {
            "wards"
        };
        return Err(ValidationError::ZeroDimension(what).into());
    }

    let mut skills = vec![true; nurses * wards];
    let mut leave = vec![false; nurses * days];
    let mut demand = vec![0i64; 3 * wards * days];
    let mut penalty: Option<PenaltyTable> = None;
    let mut seen_demand = Vec::new();

    for (line, block, rows) in blocks {
        match block {
            Block::Header => unreachable!(),
            Block::Skills => skills = parse_binary_matrix(&rows, "skills", nurses, wards)?,
            Block::Leave => leave = parse_binary_matrix(&rows, "leave", nurses, days)?,
            Block::Demand { shift, ward } => {
                if ward >= wards {
                    return Err(parse_err(line, format!("ward {} out of range (wards={})", ward, wards)));
                }
                if seen_demand.contains(&(shift, ward)) {
                    return Err(parse_err(
                        line,
                        format!("duplicate demand block shift={} ward={}", shift, ward),
                    ));
                }
                seen_demand.push((shift, ward));
                if rows.len() != 1 {
                    return Err(parse_err(
                        line,
                        format!("demand block must have exactly one row, found {}", rows.len()),
                    ));
                }
                let values = split_values(&rows[0]);
                if values.len() != days {
                    return Err(parse_err(
                        rows[0].line,
                        format!("demand row has {} values, expected {}", values.len(), days),
                    ));
                }
                for (day, v) in values.iter().enumerate() {
                    let value: i64 = v
                        .parse()
                        .map_err(|_| parse_err(rows[0].line, format!("demand value `{}` is not an integer", v)))?;
                    demand[((shift - 1) * wards + ward) * days + day] = value;
                }
            }
            Block::Penalty => {
                let mut table = PenaltyTable::empty();
                for row in &rows {
                    let (nurse, body) = match row.text.strip_prefix('@') {
                        Some(rest) => {
                            let (idx, body) = rest
                                .split_once(char::is_whitespace)
                                .ok_or_else(|| parse_err(row.line, "override needs `@<nurse> PATTERN,cost`"))?;
                            (Some(parse_usize(row.line, "override nurse", idx)?), body.trim())
                        }
                        None => (None, row.text),
                    };
                    let (pattern, cost) = body
                        .split_once(',')
                        .ok_or_else(|| parse_err(row.line, "penalty rule needs `PATTERN,cost`"))?;
                    let cost: i64 = cost.trim().parse().map_err(|_| {
                        parse_err(row.line, format!("penalty cost `{}` is not an integer", cost.trim()))
                    })?;
                    let rule = Rule::parse(pattern.trim(), cost).map_err(|m| parse_err(row.line, m))?;
                    match nurse {
                        Some(i) => table.overrides.entry(i).or_default().push(rule),
                        None => table.rules.push(rule),
                    }
                }
                penalty = Some(table);
            }
        }
    }

    let mut penalty = penalty.unwrap_or_else(|| PenaltyTable::default_for_horizon(days));
    penalty.rest_exemption = rest_exemption;
    let mut inst = Instance::from_parts(nurses, days, wards, skills, demand, leave, g_min, k_max, penalty)?;
    inst.phase1_iter_cap = phase1;
    inst.phase2_iter_cap = phase2;
    inst.rules = rules;
    inst.validate()?;
    Ok(inst)
}

fn join_bits(bits: impl Iterator<Item = bool>) -> String {
    bits.map(|b| if b { "1" } else { "0" }).collect::<Vec<_>>().join(",")
}

/// Canonical text form; `parse_instance` of the result equals `instance`.
pub fn format_instance(instance: &Instance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n={}", instance.nurses());
    let _ = writeln!(s, "D={}", instance.days());
    let _ = writeln!(s, "wards={}", instance.wards());
    let _ = writeln!(s, "g_min={}", instance.g_min);
    let _ = writeln!(s, "k_max={}", instance.k_max);
    let _ = writeln!(s, "phase1_iter_cap={}", instance.phase1_iter_cap);
    let _ = writeln!(s, "phase2_iter_cap={}", instance.phase2_iter_cap);
    if !instance.rules.all_enabled() {
        let ids: Vec<String> = instance.rules.enabled_ids().iter().map(|id| id.to_string()).collect();
        let _ = writeln!(s, "hard={}", ids.join(","));
    }
    if instance.rules.strict_sleep {
        let _ = writeln!(s, "strict_sleep=true");
    }
    if instance.penalty.rest_exemption == RestExemption::AfterFourNights {
        let _ = writeln!(s, "rest_exemption=after-four-nights");
    }
    let _ = writeln!(s, "[skills]");
    for i in 0..instance.nurses() {
        let _ = writeln!(
            s,
            "{}",
            join_bits((0..instance.wards()).map(|t| instance.skilled(i, t)))
        );
    }
    let _ = writeln!(s, "[leave]");
    for i in 0..instance.nurses() {
        let _ = writeln!(
            s,
            "{}",
            join_bits((0..instance.days()).map(|j| instance.on_leave(i, j)))
        );
    }
    for shift in ShiftKind::WORKING {
        for t in 0..instance.wards() {
            let row: Vec<u32> = (0..instance.days()).map(|j| instance.demand(shift, t, j)).collect();
            if row.iter().all(|v| *v == 0) {
                continue;
            }
            let _ = writeln!(s, "[demand shift={} ward={}]", shift.code(), t);
            let _ = writeln!(s, "{}", row.iter().map(u32::to_string).collect::<Vec<_>>().join(","));
        }
    }
    let _ = writeln!(s, "[penalty]");
    for rule in &instance.penalty.rules {
        let _ = writeln!(s, "{},{}", rule.pattern, rule.cost);
    }
    for (nurse, rules) in &instance.penalty.overrides {
        for rule in rules {
            let _ = writeln!(s, "@{} {},{}", nurse, rule.pattern, rule.cost);
        }
    }
    s
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let path = path.as_ref();
    fs::write(path, format_instance(instance)).map_err(|e| io_err(path, e))
}

pub fn parse_roster(text: &str) -> Result<Roster, FormatError> {
    let mut rows = Vec::new();
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for v in content.split(',').map(str::trim) {
            let shift = v
                .parse::<u8>()
                .ok()
                .and_then(ShiftKind::from_code)
                .ok_or_else(|| parse_err(line, format!("shift code `{}` is not one of 0,1,2,3", v)))?;
            row.push(shift);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(parse_err(line, format!("row has {} values, expected {}", row.len(), w)))
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(0, "roster is empty"));
    }
    Ok(Roster::from_rows(rows)?)
}

pub fn format_roster(roster: &Roster) -> String {
    roster.to_string()
}

pub fn load_roster(path: impl AsRef<Path>) -> Result<Roster, FormatError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_roster(&text)
}

pub fn write_roster(roster: &Roster, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let path = path.as_ref();
    fs::write(path, format_roster(roster)).map_err(|e| io_err(path, e))
}
