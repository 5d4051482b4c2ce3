//! Conversions between descriptive statistics and [`PowerSums`].
//!
//! With `m_k = SP^k / n` the three skewness families are
//!
//! * fisher-pearson: `g₁ = m₃ / m₂^{3/2}`
//! * moment: `b₁ = g₁ ((n-1)/n)^{3/2}` (scaled by the Bessel-corrected sd)
//! * adjusted fisher-pearson: `G₁ = g₁ √(n(n-1)) / (n-2)`
//!
//! and the kurtosis families are `g₂ = m₄ / m₂²`, `b₂ = g₂ ((n-1)/n)²` and the
//! excess statistic `G₂ = ((n+1)(g₂-3) + 6)(n-1) / ((n-2)(n-3))`. The
//! `kurt_excess` flag decides whether kurtosis is reported minus 3; the
//! adjusted family is natively excess, so its raw form is `G₂ + 3`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::power_sums::PowerSums;

/// Relative slack for the Cauchy–Schwarz checks on incoming statistics.
const INPUT_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatType {
    Moment,
    FisherPearson,
    AdjustedFisherPearson,
}

impl StatType {
    pub fn name(self) -> &'static str {
        match self {
            StatType::Moment => "moment",
            StatType::FisherPearson => "fisher-pearson",
            StatType::AdjustedFisherPearson => "adjusted-fisher-pearson",
        }
    }

    fn skew_min_n(self) -> u64 {
        match self {
            StatType::AdjustedFisherPearson => 3,
            _ => 2,
        }
    }

    fn kurt_min_n(self) -> u64 {
        match self {
            StatType::AdjustedFisherPearson => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for StatType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn normalize(name: &str) -> String {
    name.trim()
        .to_ascii_lowercase()
        .chars()
        .map(|c| {
            if c == ' ' || c == '_' || c == '.' {
                '-'
            } else {
                c
            }
        })
        .collect()
}

/// Statistical packages and the family and excess flag they report.
const SOFTWARE: &[(&str, StatType, bool)] = &[
    ("spss", StatType::AdjustedFisherPearson, true),
    ("sas", StatType::AdjustedFisherPearson, true),
    ("excel", StatType::AdjustedFisherPearson, true),
    ("minitab", StatType::Moment, true),
    ("bmdp", StatType::Moment, true),
    ("stata", StatType::FisherPearson, false),
    ("r-e1071", StatType::Moment, true),
];

impl FromStr for StatType {
    type Err = Error;

    /// Accepts the canonical names in any case, with spaces, underscores or
    /// hyphens, plus the package aliases in the table above.
    fn from_str(s: &str) -> Result<Self> {
        let key = normalize(s);
        let found = match key.as_str() {
            "moment" | "b" => Some(StatType::Moment),
            "fisher-pearson" | "fisherpearson" | "g" => Some(StatType::FisherPearson),
            "adjusted-fisher-pearson" | "adjustedfisherpearson" | "adjusted" => {
                Some(StatType::AdjustedFisherPearson)
            }
            _ => SOFTWARE
                .iter()
                .find(|(alias, _, _)| *alias == key)
                .map(|(_, t, _)| *t),
        };
        found.ok_or_else(|| Error::UnknownConvention(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentConventions {
    pub skew_type: StatType,
    pub kurt_type: StatType,
    pub kurt_excess: bool,
}

impl Default for MomentConventions {
    fn default() -> Self {
        MomentConventions {
            skew_type: StatType::FisherPearson,
            kurt_type: StatType::FisherPearson,
            kurt_excess: false,
        }
    }
}

impl MomentConventions {
    pub fn new(skew_type: StatType, kurt_type: StatType, kurt_excess: bool) -> Self {
        MomentConventions {
            skew_type,
            kurt_type,
            kurt_excess,
        }
    }

    /// Full conventions for a named statistics package, e.g. `"spss"`.
    pub fn for_software(name: &str) -> Result<Self> {
        let key = normalize(name);
        SOFTWARE
            .iter()
            .find(|(alias, _, _)| *alias == key)
            .map(|&(_, t, excess)| MomentConventions::new(t, t, excess))
            .ok_or_else(|| Error::UnknownConvention(name.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stat {
    Mean,
    Variance,
    Skewness,
    Kurtosis,
}

impl fmt::Display for Stat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stat::Mean => "mean",
            Stat::Variance => "variance",
            Stat::Skewness => "skewness",
            Stat::Kurtosis => "kurtosis",
        })
    }
}

/// Why a statistic could not be formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "reason")]
pub enum Undefined {
    ZeroVariance,
    InsufficientN { needed: u64 },
}

impl fmt::Display for Undefined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Undefined::ZeroVariance => f.write_str("zero variance"),
            Undefined::InsufficientN { needed } => {
                write!(f, "insufficient n, needs at least {needed}")
            }
        }
    }
}

fn undefined(stat: Stat, reason: Undefined) -> Error {
    Error::Undefined { stat, reason }
}

/// One row of descriptive statistics. Absent statistics are `None`; those
/// that were asked for but could not be formed are listed in `undefined`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub name: Option<String>,
    pub n: u64,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub variance: Option<f64>,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<(Stat, Undefined)>,
}

impl GroupDescriptor {
    pub fn new(n: u64) -> Self {
        GroupDescriptor {
            n,
            ..Default::default()
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_mean(mut self, mean: f64) -> Self {
        self.mean = Some(mean);
        self
    }

    pub fn with_variance(mut self, variance: f64) -> Self {
        self.variance = Some(variance);
        self
    }

    pub fn with_sd(mut self, sd: f64) -> Self {
        self.sd = Some(sd);
        self
    }

    pub fn with_skewness(mut self, skewness: f64) -> Self {
        self.skewness = Some(skewness);
        self
    }

    pub fn with_kurtosis(mut self, kurtosis: f64) -> Self {
        self.kurtosis = Some(kurtosis);
        self
    }

    /// Variance, taken from `variance` or else from `sd²`.
    pub fn variance_value(&self) -> Option<f64> {
        self.variance.or(self.sd.map(|s| s * s))
    }

    /// Number of consecutive statistics present from the mean upward.
    pub fn order(&self) -> usize {
        let chain = [
            self.mean.is_some(),
            self.variance_value().is_some(),
            self.skewness.is_some(),
            self.kurtosis.is_some(),
        ];
        chain.iter().take_while(|p| **p).count()
    }

    /// Describes the first gap in the mean → variance → skewness → kurtosis
    /// chain, if any.
    pub fn chain_gap(&self) -> Option<String> {
        let present = [
            ("mean", self.mean.is_some()),
            ("var", self.variance_value().is_some()),
            ("skew", self.skewness.is_some()),
            ("kurt", self.kurtosis.is_some()),
        ];
        let top = present.iter().rposition(|(_, p)| *p)?;
        let missing: Vec<&str> = present[..top]
            .iter()
            .filter(|(_, p)| !p)
            .map(|(name, _)| *name)
            .collect();
        if missing.is_empty() {
            None
        } else {
            Some(format!("{} without {}", present[top].0, missing.join("/")))
        }
    }

    pub fn reason(&self, stat: Stat) -> Option<Undefined> {
        self.undefined
            .iter()
            .find(|(s, _)| *s == stat)
            .map(|(_, r)| *r)
    }
}

/// A [`PowerSums`] together with the highest order that is actually known.
/// Sums above `order` are zero placeholders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSums {
    pub sums: PowerSums,
    pub order: usize,
}

/// Sample variance with Bessel's correction.
pub fn variance_of(ps: &PowerSums) -> Result<f64> {
    if ps.n() < 2 {
        return Err(undefined(
            Stat::Variance,
            Undefined::InsufficientN { needed: 2 },
        ));
    }
    Ok(ps.ss() / (ps.n() - 1) as f64)
}

fn shape_preconditions(ps: &PowerSums, stat: Stat, min_n: u64) -> Result<(f64, f64)> {
    if ps.n() < min_n {
        return Err(undefined(stat, Undefined::InsufficientN { needed: min_n }));
    }
    if ps.ss() <= 0.0 {
        return Err(undefined(stat, Undefined::ZeroVariance));
    }
    let n = ps.n() as f64;
    Ok((n, ps.ss() / n))
}

pub fn skew_of(ps: &PowerSums, conv: &MomentConventions) -> Result<f64> {
    let (n, m2) = shape_preconditions(ps, Stat::Skewness, conv.skew_type.skew_min_n())?;
    let g1 = (ps.sc() / n) / m2.powf(1.5);
    Ok(match conv.skew_type {
        StatType::FisherPearson => g1,
        StatType::Moment => g1 * ((n - 1.0) / n).powf(1.5),
        StatType::AdjustedFisherPearson => g1 * (n * (n - 1.0)).sqrt() / (n - 2.0),
    })
}

pub fn kurt_of(ps: &PowerSums, conv: &MomentConventions) -> Result<f64> {
    let (n, m2) = shape_preconditions(ps, Stat::Kurtosis, conv.kurt_type.kurt_min_n())?;
    let g2 = (ps.sq() / n) / (m2 * m2);
    let raw = match conv.kurt_type {
        StatType::FisherPearson => g2,
        StatType::Moment => g2 * ((n - 1.0) / n).powi(2),
        StatType::AdjustedFisherPearson => {
            ((n + 1.0) * (g2 - 3.0) + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0)) + 3.0
        }
    };
    Ok(if conv.kurt_excess { raw - 3.0 } else { raw })
}

fn g1_from_skew(skew: f64, n: f64, t: StatType) -> f64 {
    match t {
        StatType::FisherPearson => skew,
        StatType::Moment => skew * (n / (n - 1.0)).powf(1.5),
        StatType::AdjustedFisherPearson => skew * (n - 2.0) / (n * (n - 1.0)).sqrt(),
    }
}

fn g2_from_kurt(kurt: f64, n: f64, conv: &MomentConventions) -> f64 {
    let raw = if conv.kurt_excess { kurt + 3.0 } else { kurt };
    match conv.kurt_type {
        StatType::FisherPearson => raw,
        StatType::Moment => raw * (n / (n - 1.0)).powi(2),
        StatType::AdjustedFisherPearson => {
            (raw - 3.0) * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n - 1.0)) - 6.0 / (n + 1.0) + 3.0
        }
    }
}

fn require_n(n: u64, needed: u64, stat: Stat) -> Result<()> {
    if n < needed {
        Err(undefined(stat, Undefined::InsufficientN { needed }))
    } else {
        Ok(())
    }
}

/// Inverts [`variance_of`], [`skew_of`] and [`kurt_of`] for one descriptor.
///
/// A group with zero variance (or a single value) has every higher sum
/// equal to zero, so its known order is 4 whatever else is supplied.
pub fn to_power_sums(desc: &GroupDescriptor, conv: &MomentConventions) -> Result<PartialSums> {
    if desc.n == 0 {
        return Err(Error::InconsistentStatistics(
            "group size must be positive".to_string(),
        ));
    }
    if let Some(gap) = desc.chain_gap() {
        return Err(Error::MomentChain(gap));
    }
    let name = desc.name.as_deref().unwrap_or("group");
    if let (Some(var), Some(sd)) = (desc.variance, desc.sd) {
        if (sd * sd - var).abs() > 1e-9 * var.abs().max(sd * sd) {
            return Err(Error::InconsistentStatistics(format!(
                "{name}: sd² = {} but var = {var}",
                sd * sd
            )));
        }
    }

    let order = desc.order();
    let n = desc.n as f64;
    let mean = desc.mean.unwrap_or(0.0);
    let mut ss = 0.0;
    let mut sc = 0.0;
    let mut sq = 0.0;

    let mut known = order;
    if desc.n == 1 && order >= 1 {
        known = 4;
    }
    if let Some(var) = desc.variance_value() {
        require_n(desc.n, 2, Stat::Variance)?;
        if !var.is_finite() || var < 0.0 {
            return Err(Error::InconsistentStatistics(format!(
                "{name}: variance must be a finite non-negative number, got {var}"
            )));
        }
        ss = var * (n - 1.0);
        if ss == 0.0 {
            known = 4;
        }
    }
    if let Some(skew) = desc.skewness {
        require_n(desc.n, conv.skew_type.skew_min_n(), Stat::Skewness)?;
        if !skew.is_finite() {
            return Err(Error::NonFinite(skew));
        }
        if ss > 0.0 {
            let m2 = ss / n;
            sc = g1_from_skew(skew, n, conv.skew_type) * n * m2.powf(1.5);
        }
    }
    if let Some(kurt) = desc.kurtosis {
        require_n(desc.n, conv.kurt_type.kurt_min_n(), Stat::Kurtosis)?;
        if !kurt.is_finite() {
            return Err(Error::NonFinite(kurt));
        }
        if ss > 0.0 {
            sq = g2_from_kurt(kurt, n, conv) * ss * ss / n;
            if n * sq < ss * ss * (1.0 - INPUT_SLACK) {
                return Err(Error::InconsistentStatistics(format!(
                    "{name}: kurtosis {kurt} implies n·SQ < SS²"
                )));
            }
            if sc * sc > ss * sq * (1.0 + INPUT_SLACK) {
                return Err(Error::InconsistentStatistics(format!(
                    "{name}: skewness {} and kurtosis {kurt} imply SC² > SS·SQ",
                    desc.skewness.unwrap_or_default()
                )));
            }
        }
    }
    let sums = PowerSums::from_parts(desc.n, mean, ss, sc, sq.max(0.0))?;
    Ok(PartialSums { sums, order: known })
}

/// Descriptive statistics of `ps` up to `order` (0 = size only, 4 = through
/// kurtosis). Statistics that cannot be formed are left out and recorded in
/// [`GroupDescriptor::undefined`].
pub fn from_power_sums(
    ps: &PowerSums,
    conv: &MomentConventions,
    order: usize,
    include_sd: bool,
) -> GroupDescriptor {
    let mut desc = GroupDescriptor::new(ps.n());
    let note = |d: &mut GroupDescriptor, r: Result<f64>| -> Option<f64> {
        match r {
            Ok(v) => Some(v),
            Err(Error::Undefined { stat, reason }) => {
                d.undefined.push((stat, reason));
                None
            }
            Err(_) => None,
        }
    };
    if order >= 1 {
        if ps.n() == 0 {
            desc.undefined
                .push((Stat::Mean, Undefined::InsufficientN { needed: 1 }));
        } else {
            desc.mean = Some(ps.mean());
        }
    }
    if order >= 2 {
        desc.variance = note(&mut desc, variance_of(ps));
        if include_sd {
            desc.sd = desc.variance.map(f64::sqrt);
        }
    }
    if order >= 3 {
        desc.skewness = note(&mut desc, skew_of(ps, conv));
    }
    if order >= 4 {
        desc.kurtosis = note(&mut desc, kurt_of(ps, conv));
    }
    desc
}
