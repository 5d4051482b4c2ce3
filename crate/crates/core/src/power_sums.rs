//! Order-4 centered power sums: the mergeable sketch.
//!
//! A [`PowerSums`] holds the count, the mean and the centered sums
//! `SS = Σ(x-x̄)²`, `SC = Σ(x-x̄)³`, `SQ = Σ(x-x̄)⁴` of one group. Groups can be
//! streamed one value at a time, merged, pooled k at a time, and a known
//! subgroup can be subtracted from a pooled group to recover the remainder.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to clamp rounding-level negatives after subtraction.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-9;

/// Relative slack for the warning-level `SC² ≤ SS·SQ` check after subtraction.
pub const CAUCHY_SCHWARZ_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PowerSums {
    n: u64,
    mean: f64,
    ss: f64,
    sc: f64,
    sq: f64,
}

/// A non-fatal finding reported by [`PowerSums::subtract_upto`].
#[derive(Debug, Clone, PartialEq)]
pub struct Inconsistency {
    pub message: String,
}

impl std::fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn check_finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(x))
    }
}

impl PowerSums {
    /// The empty group; identity of [`merge`](Self::merge).
    pub const fn empty() -> Self {
        PowerSums {
            n: 0,
            mean: 0.0,
            ss: 0.0,
            sc: 0.0,
            sq: 0.0,
        }
    }

    pub fn from_value(x: f64) -> Result<Self> {
        Ok(PowerSums {
            n: 1,
            mean: check_finite(x)?,
            ..Self::empty()
        })
    }

    /// Builds a value from its fields, checking the structural invariants:
    /// finite fields, `ss ≥ 0`, `sq ≥ 0`, and all-zero sums for `n ≤ 1`
    /// (plus a zero mean for `n = 0`).
    pub fn from_parts(n: u64, mean: f64, ss: f64, sc: f64, sq: f64) -> Result<Self> {
        for v in [mean, ss, sc, sq] {
            check_finite(v)?;
        }
        if ss < 0.0 || sq < 0.0 {
            return Err(Error::InconsistentStatistics(format!(
                "even-order sums must be non-negative (ss = {ss}, sq = {sq})"
            )));
        }
        if n <= 1 && (ss != 0.0 || sc != 0.0 || sq != 0.0) {
            return Err(Error::InconsistentStatistics(format!(
                "a group of {n} value(s) has zero central sums"
            )));
        }
        if n == 0 && mean != 0.0 {
            return Err(Error::InconsistentStatistics(
                "an empty group has mean 0".to_string(),
            ));
        }
        Ok(PowerSums {
            n,
            mean,
            ss,
            sc,
            sq,
        })
    }

    pub(crate) fn raw(n: u64, mean: f64, ss: f64, sc: f64, sq: f64) -> Self {
        PowerSums {
            n,
            mean,
            ss,
            sc,
            sq,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sum of squared deviations.
    pub fn ss(&self) -> f64 {
        self.ss
    }

    /// Sum of cubed deviations.
    pub fn sc(&self) -> f64 {
        self.sc
    }

    /// Sum of fourth-power deviations.
    pub fn sq(&self) -> f64 {
        self.sq
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Adds one observation using the single-point update
    /// (mean first, then SQ, SC, SS, all from the old state).
    pub fn push(&self, x: f64) -> Result<Self> {
        check_finite(x)?;
        Ok(self.push_unchecked(x))
    }

    pub(crate) fn push_unchecked(&self, x: f64) -> Self {
        let n = self.n as f64;
        let n1 = n + 1.0;
        let d = self.mean - x;
        let d2 = d * d;
        PowerSums {
            n: self.n + 1,
            mean: (n * self.mean + x) / n1,
            ss: self.ss + n / n1 * d2,
            sc: self.sc + 3.0 * self.ss / n1 * d - n * (n - 1.0) / (n1 * n1) * d2 * d,
            sq: self.sq
                + 4.0 * self.sc / n1 * d
                + 6.0 * self.ss / (n1 * n1) * d2
                + n * (1.0 + n * n * n) / (n1 * n1 * n1 * n1) * d2 * d2,
        }
    }

    /// One-pass summary of `xs`.
    ///
    /// The fold runs on `x - xs[0]` and the pivot is added back to the mean at
    /// the end, so the sums do not depend on the location of the data.
    pub fn from_sequence(xs: &[f64]) -> Result<Self> {
        let mut acc = Accumulator::new();
        for &x in xs {
            acc.push(x)?;
        }
        Ok(acc.sums())
    }

    /// Summary of the concatenation of two groups.
    pub fn merge(&self, other: &PowerSums) -> PowerSums {
        if other.n == 0 {
            return *self;
        }
        if self.n == 0 {
            return *other;
        }
        let (n1, n2) = (self.n as f64, other.n as f64);
        let n = n1 + n2;
        let d = self.mean - other.mean;
        let d2 = d * d;

        let mean = (n1 * self.mean + n2 * other.mean) / n;
        let ss = self.ss + other.ss + n1 * n2 / n * d2;
        let sc = self.sc
            + other.sc
            + 3.0 * (n2 * self.ss - n1 * other.ss) / n * d
            + (n1 * n2.powi(3) - n2 * n1.powi(3)) / n.powi(3) * d2 * d;
        let sq = self.sq
            + other.sq
            + 4.0 * (n2 * self.sc - n1 * other.sc) / n * d
            + 6.0 * (n2 * n2 * self.ss + n1 * n1 * other.ss) / (n * n) * d2
            + (n1 * n2.powi(4) + n2 * n1.powi(4)) / n.powi(4) * d2 * d2;

        PowerSums {
            n: self.n + other.n,
            mean,
            ss: ss.max(0.0),
            sc,
            sq: sq.max(0.0),
        }
    }

    /// Recovers the remainder group: `a.merge(&b).subtract(&b) ≈ a`.
    pub fn subtract(&self, known: &PowerSums) -> Result<PowerSums> {
        self.subtract_upto(known, 4).map(|(sums, _)| sums)
    }

    /// Like [`subtract`](Self::subtract), but only orders `≤ order` are
    /// checked and kept (higher sums of the result are zero). Also returns a
    /// warning when the remainder breaks `SC² ≤ SS·SQ`.
    pub fn subtract_upto(
        &self,
        known: &PowerSums,
        order: usize,
    ) -> Result<(PowerSums, Option<Inconsistency>)> {
        if self.n <= known.n {
            return Err(Error::NoRemainder {
                pooled: self.n,
                known: known.n,
            });
        }
        if known.n == 0 {
            return Ok((self.truncated(order), None));
        }

        let np = self.n as f64;
        let n2 = known.n as f64;
        let nr = np - n2;
        let e = known.mean - self.mean;
        let e2 = e * e;

        let mean = (np * self.mean - n2 * known.mean) / nr;
        let ss = self.ss - known.ss - n2 * np / nr * e2;
        let sc = self.sc
            - known.sc
            - 3.0 * (np * known.ss - n2 * self.ss) / nr * e
            - (np * n2 * n2 + n2 * np * np) / (nr * nr) * e2 * e;
        let sq = self.sq
            - known.sq
            - 4.0 * (np * known.sc - n2 * self.sc) / nr * e
            - 6.0 * (np * np * known.ss - n2 * n2 * self.ss) / (nr * nr) * e2
            - (n2 * np.powi(3) + n2 * n2 * np * np + n2.powi(3) * np) / nr.powi(3) * e2 * e2;

        let singleton = self.n - known.n == 1;
        let ss = if order >= 2 {
            clamp_even(ss, self.ss + known.ss, 2, singleton)?
        } else {
            0.0
        };
        let sc = if order >= 3 && !singleton { sc } else { 0.0 };
        let sq = if order >= 4 {
            clamp_even(sq, self.sq + known.sq, 4, singleton)?
        } else {
            0.0
        };

        let warning = (order >= 4 && sc * sc > ss * sq * (1.0 + CAUCHY_SCHWARZ_SLACK)).then(|| {
            Inconsistency {
                message: format!(
                    "remainder violates SC² ≤ SS·SQ (sc = {sc:e}, ss = {ss:e}, sq = {sq:e})"
                ),
            }
        });

        Ok((
            PowerSums {
                n: self.n - known.n,
                mean,
                ss,
                sc,
                sq,
            },
            warning,
        ))
    }

    /// One-step pooling of any number of groups.
    ///
    /// Every moment is pooled through the offsets `x̄ᵢ - x̄`; empty groups are
    /// skipped and an empty list gives [`PowerSums::empty`].
    pub fn pool<'a, I>(groups: I) -> PowerSums
    where
        I: IntoIterator<Item = &'a PowerSums>,
    {
        let groups: Vec<&PowerSums> = groups.into_iter().filter(|g| g.n > 0).collect();
        match groups.len() {
            0 => return PowerSums::empty(),
            1 => return *groups[0],
            _ => {}
        }
        let n: u64 = groups.iter().map(|g| g.n).sum();
        let nf = n as f64;
        let mean = groups.iter().map(|g| g.n as f64 * g.mean).sum::<f64>() / nf;

        let (mut ss, mut sc, mut sq) = (0.0, 0.0, 0.0);
        for g in &groups {
            let ng = g.n as f64;
            let d = g.mean - mean;
            let d2 = d * d;
            ss += g.ss + ng * d2;
            sc += g.sc + 3.0 * g.ss * d + ng * d2 * d;
            sq += g.sq + 4.0 * g.sc * d + 6.0 * g.ss * d2 + ng * d2 * d2;
        }
        PowerSums {
            n,
            mean,
            ss: ss.max(0.0),
            sc,
            sq: sq.max(0.0),
        }
    }

    /// Shifts every observation by `c`; only the mean changes.
    pub fn translate(&self, c: f64) -> PowerSums {
        if self.n == 0 {
            return *self;
        }
        PowerSums {
            mean: self.mean + c,
            ..*self
        }
    }

    /// Zeroes the sums above `order` (1 = mean only).
    pub fn truncated(&self, order: usize) -> PowerSums {
        PowerSums {
            ss: if order >= 2 { self.ss } else { 0.0 },
            sc: if order >= 3 { self.sc } else { 0.0 },
            sq: if order >= 4 { self.sq } else { 0.0 },
            mean: if order >= 1 { self.mean } else { 0.0 },
            n: self.n,
        }
    }
}

fn clamp_even(value: f64, reference: f64, order: usize, singleton: bool) -> Result<f64> {
    let tolerance = NEGATIVITY_TOLERANCE * reference.max(1.0);
    if value < -tolerance || (singleton && value > tolerance) {
        return Err(Error::InconsistentGroups {
            order,
            value,
            tolerance,
        });
    }
    Ok(if singleton { 0.0 } else { value.max(0.0) })
}

/// Streaming builder for [`PowerSums`] that folds around the first value seen.
///
/// Memory use is constant. Two accumulators over disjoint parts of a stream
/// can be combined with [`PowerSums::merge`] on their [`sums`](Self::sums).
#[derive(Debug, Clone, Default)]
pub struct Accumulator {
    pivot: Option<f64>,
    shifted: PowerSums,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) -> Result<()> {
        check_finite(x)?;
        let pivot = *self.pivot.get_or_insert(x);
        self.shifted = self.shifted.push_unchecked(x - pivot);
        Ok(())
    }

    pub fn len(&self) -> u64 {
        self.shifted.n
    }

    pub fn is_empty(&self) -> bool {
        self.shifted.n == 0
    }

    pub fn sums(&self) -> PowerSums {
        self.shifted.translate(self.pivot.unwrap_or(0.0))
    }
}
