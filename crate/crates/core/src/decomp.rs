//! Pooled-sample and missing-subgroup decomposition over a table of groups.
//!
//! Without a pooled reference every input group is a subgroup and the
//! synthesized row is `--pooled--`. With one, the referenced group is the
//! pooled sample, the rest are pooled into an intermediate group, and the
//! intermediate is subtracted from the pooled sample to give `--other--`.
//! All output is truncated to the highest order every group supplies.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bridge::{
    from_power_sums, to_power_sums, GroupDescriptor, MomentConventions, PartialSums,
};
use crate::error::{Error, Result};
use crate::power_sums::PowerSums;

pub const POOLED_LABEL: &str = "--pooled--";
pub const OTHER_LABEL: &str = "--other--";

/// Relative disagreement between an input row and its round-tripped echo
/// above which the echo is reported.
const ECHO_TOLERANCE: f64 = 1e-9;

/// A group reference: 1-based position or group name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupRef {
    Index(usize),
    Name(String),
}

impl FromStr for GroupRef {
    type Err = std::convert::Infallible;

    /// Integers are positions; anything else is a name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s.parse::<usize>() {
            Ok(i) => GroupRef::Index(i),
            Err(_) => GroupRef::Name(s.to_string()),
        })
    }
}

impl fmt::Display for GroupRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupRef::Index(i) => write!(f, "{i}"),
            GroupRef::Name(n) => write!(f, "{n:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecompRequest {
    pub groups: Vec<GroupDescriptor>,
    pub conventions: MomentConventions,
    pub pooled: Option<GroupRef>,
    pub include_sd: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Input,
    Other,
    Pooled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompRow {
    pub label: String,
    pub kind: RowKind,
    pub stats: GroupDescriptor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompTable {
    pub rows: Vec<DecompRow>,
    /// Common moment order of the output (0 = sizes only).
    pub order: usize,
    pub include_sd: bool,
    /// Non-fatal findings: echo mismatches, Cauchy–Schwarz breaches.
    pub warnings: Vec<String>,
}

impl DecompTable {
    pub fn row(&self, label: &str) -> Option<&DecompRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoGroups,
    TooFewGroups { found: usize },
    PooledOutOfRange { index: usize, groups: usize },
    PooledNameNotFound(String),
    DuplicateName(String),
    MomentChain { group: String, gap: String },
    NonPositiveN { group: String },
    NoRemainder { pooled: u64, known: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoGroups => f.write_str("no groups supplied"),
            Violation::TooFewGroups { found } => write!(
                f,
                "a pooled group needs at least one subgroup beside it ({found} group(s) supplied)"
            ),
            Violation::PooledOutOfRange { index, groups } => write!(
                f,
                "pooled reference out of range: {index} with {groups} group(s)"
            ),
            Violation::PooledNameNotFound(name) => {
                write!(f, "pooled reference not found: no group named {name:?}")
            }
            Violation::DuplicateName(name) => {
                write!(f, "duplicate group name {name:?} used as a reference")
            }
            Violation::MomentChain { group, gap } => {
                write!(f, "moment chain broken in group {group}: {gap}")
            }
            Violation::NonPositiveN { group } => write!(f, "group {group} has n = 0"),
            Violation::NoRemainder { pooled, known } => write!(
                f,
                "no remainder group: pooled n = {pooled} but the subgroups total {known}"
            ),
        }
    }
}

fn label_of(groups: &[GroupDescriptor], i: usize) -> String {
    groups[i]
        .name
        .clone()
        .unwrap_or_else(|| (i + 1).to_string())
}

/// Resolves the pooled reference to a 0-based index, or reports why not.
fn resolve(groups: &[GroupDescriptor], r: &GroupRef) -> std::result::Result<usize, Violation> {
    match r {
        GroupRef::Index(i) if *i >= 1 && *i <= groups.len() => Ok(i - 1),
        GroupRef::Index(i) => Err(Violation::PooledOutOfRange {
            index: *i,
            groups: groups.len(),
        }),
        GroupRef::Name(name) => {
            let hits: Vec<usize> = groups
                .iter()
                .enumerate()
                .filter(|(_, g)| g.name.as_deref() == Some(name.as_str()))
                .map(|(i, _)| i)
                .collect();
            match hits.as_slice() {
                [i] => Ok(*i),
                [] => Err(Violation::PooledNameNotFound(name.clone())),
                _ => Err(Violation::DuplicateName(name.clone())),
            }
        }
    }
}

/// Lists everything wrong with `req` without computing anything.
pub fn validate_request(req: &DecompRequest) -> Vec<Violation> {
    let mut out = Vec::new();
    if req.groups.is_empty() {
        out.push(Violation::NoGroups);
        return out;
    }
    for (i, g) in req.groups.iter().enumerate() {
        let group = label_of(&req.groups, i);
        if g.n == 0 {
            out.push(Violation::NonPositiveN {
                group: group.clone(),
            });
        }
        if let Some(gap) = g.chain_gap() {
            out.push(Violation::MomentChain { group, gap });
        }
    }
    if let Some(r) = &req.pooled {
        if req.groups.len() < 2 {
            out.push(Violation::TooFewGroups {
                found: req.groups.len(),
            });
        }
        match resolve(&req.groups, r) {
            Ok(p) => {
                let known: u64 = req
                    .groups
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != p)
                    .map(|(_, g)| g.n)
                    .sum();
                if req.groups.len() >= 2 && req.groups[p].n <= known {
                    out.push(Violation::NoRemainder {
                        pooled: req.groups[p].n,
                        known,
                    });
                }
            }
            Err(v) => out.push(v),
        }
    }
    out
}

fn echo(
    groups: &[GroupDescriptor],
    parts: &[PartialSums],
    i: usize,
    req: &DecompRequest,
    order: usize,
    warnings: &mut Vec<String>,
) -> GroupDescriptor {
    let label = label_of(groups, i);
    let mut out = from_power_sums(&parts[i].sums, &req.conventions, order, req.include_sd);
    out.name = groups[i].name.clone();
    let input = &groups[i];
    let pairs = [
        ("mean", input.mean, out.mean),
        ("var", input.variance_value(), out.variance),
        ("skew", input.skewness, out.skewness),
        ("kurt", input.kurtosis, out.kurtosis),
    ];
    for (field, given, back) in pairs.into_iter().take(order) {
        if let (Some(a), Some(b)) = (given, back) {
            if (a - b).abs() > ECHO_TOLERANCE * a.abs().max(b.abs()) {
                warnings.push(format!("group {label}: {field} {a} round-trips to {b}"));
            }
        }
    }
    out
}

/// Computes the pooled sample, or the missing subgroup when `req.pooled` is set.
pub fn sample_decomp(req: &DecompRequest) -> Result<DecompTable> {
    if let Some(v) = validate_request(req).into_iter().next() {
        return Err(match v {
            Violation::NoRemainder { pooled, known } => Error::NoRemainder { pooled, known },
            Violation::MomentChain { gap, .. } => Error::MomentChain(gap),
            other => Error::InvalidRequest(other.to_string()),
        });
    }
    let groups = &req.groups;
    let parts = groups
        .iter()
        .map(|g| to_power_sums(g, &req.conventions))
        .collect::<Result<Vec<_>>>()?;
    let order = parts.iter().map(|p| p.order).min().unwrap_or(0);
    let mut warnings = Vec::new();
    let conv = &req.conventions;

    let pooled_idx = match &req.pooled {
        // validate_request has already vouched for the reference
        Some(r) => Some(resolve(groups, r).map_err(|v| Error::InvalidRequest(v.to_string()))?),
        None => None,
    };

    let mut rows = Vec::with_capacity(groups.len() + 2);
    for i in (0..groups.len()).filter(|i| Some(*i) != pooled_idx) {
        rows.push(DecompRow {
            label: label_of(groups, i),
            kind: RowKind::Input,
            stats: echo(groups, &parts, i, req, order, &mut warnings),
        });
    }

    match pooled_idx {
        None => {
            let pooled = PowerSums::pool(parts.iter().map(|p| &p.sums));
            rows.push(DecompRow {
                label: POOLED_LABEL.to_string(),
                kind: RowKind::Pooled,
                stats: from_power_sums(&pooled, conv, order, req.include_sd)
                    .with_name(POOLED_LABEL),
            });
        }
        Some(p) => {
            let known = PowerSums::pool(
                parts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != p)
                    .map(|(_, part)| &part.sums),
            );
            let (other, warning) = parts[p].sums.subtract_upto(&known, order)?;
            if let Some(w) = warning {
                warnings.push(format!("{OTHER_LABEL}: {w}"));
            }
            rows.push(DecompRow {
                label: OTHER_LABEL.to_string(),
                kind: RowKind::Other,
                stats: from_power_sums(&other, conv, order, req.include_sd).with_name(OTHER_LABEL),
            });
            let mut pooled_row = echo(groups, &parts, p, req, order, &mut warnings);
            pooled_row.name = Some(POOLED_LABEL.to_string());
            rows.push(DecompRow {
                label: POOLED_LABEL.to_string(),
                kind: RowKind::Pooled,
                stats: pooled_row,
            });
        }
    }
    Ok(DecompTable {
        rows,
        order,
        include_sd: req.include_sd,
        warnings,
    })
}
