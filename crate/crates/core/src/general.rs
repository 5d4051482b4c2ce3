//! Centered power sums of arbitrary order.
//!
//! [`PowerSumsN`] stores `SP^p = Σ(x-x̄)^p` for `p = 2..=P`. Pooling uses the
//! binomial expansion of `(x - x̄ₗ + x̄ₗ - x̄)^p` over every group; subtraction
//! inverts that expansion one order at a time, since the remainder's own
//! `SP^p` enters it with coefficient one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::power_sums::{PowerSums, NEGATIVITY_TOLERANCE};

pub const MIN_ORDER: usize = 2;
/// Highest supported order; `C(16, s)` and the offset powers stay well inside f64.
pub const MAX_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSumsN {
    n: u64,
    mean: f64,
    // sp[i] = SP^(i + 2)
    sp: Vec<f64>,
}

fn check_order(order: usize) -> Result<()> {
    if (MIN_ORDER..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange(order))
    }
}

/// `C(p, s)` for `p ≤ 16`, computed exactly in integers.
pub fn binomial(p: usize, s: usize) -> f64 {
    if s > p {
        return 0.0;
    }
    let s = s.min(p - s);
    let mut c: u64 = 1;
    for i in 0..s {
        c = c * (p - i) as u64 / (i + 1) as u64;
    }
    c as f64
}

struct Binomials {
    rows: Vec<Vec<f64>>,
}

impl Binomials {
    fn new(order: usize) -> Self {
        Binomials {
            rows: (0..=order)
                .map(|p| (0..=p).map(|s| binomial(p, s)).collect())
                .collect(),
        }
    }

    fn get(&self, p: usize, s: usize) -> f64 {
        self.rows[p][s]
    }
}

fn powers(d: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut acc = 1.0;
    for _ in 0..=order {
        out.push(acc);
        acc *= d;
    }
    out
}

impl PowerSumsN {
    pub fn empty(order: usize) -> Result<Self> {
        check_order(order)?;
        Ok(PowerSumsN {
            n: 0,
            mean: 0.0,
            sp: vec![0.0; order - 1],
        })
    }

    pub fn singleton(x: f64, order: usize) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        check_order(order)?;
        Ok(PowerSumsN {
            n: 1,
            mean: x,
            sp: vec![0.0; order - 1],
        })
    }

    /// `sums[i]` is `SP^(i+2)`; the maximum order is `sums.len() + 1`.
    pub fn from_parts(n: u64, mean: f64, sums: Vec<f64>) -> Result<Self> {
        check_order(sums.len() + 1)?;
        if let Some(bad) = std::iter::once(mean)
            .chain(sums.iter().copied())
            .find(|v| !v.is_finite())
        {
            return Err(Error::NonFinite(bad));
        }
        if let Some((i, v)) = sums
            .iter()
            .enumerate()
            .find(|(i, v)| (i + 2) % 2 == 0 && **v < 0.0)
        {
            return Err(Error::InconsistentStatistics(format!(
                "order-{} sum is negative ({v})",
                i + 2
            )));
        }
        if n <= 1 && sums.iter().any(|v| *v != 0.0) {
            return Err(Error::InconsistentStatistics(format!(
                "a group of {n} value(s) has zero central sums"
            )));
        }
        Ok(PowerSumsN { n, mean, sp: sums })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn max_order(&self) -> usize {
        self.sp.len() + 1
    }

    /// `SP^p`, with the conventions `SP⁰ = n` and `SP¹ = 0`.
    pub fn sp(&self, p: usize) -> f64 {
        match p {
            0 => self.n as f64,
            1 => 0.0,
            _ => self.sp[p - 2],
        }
    }

    /// `SP²..=SP^P`.
    pub fn sums(&self) -> &[f64] {
        &self.sp
    }

    /// Drops orders above 4, or pads missing ones with zeros.
    pub fn to_power_sums(&self) -> PowerSums {
        let get = |p: usize| {
            if p <= self.max_order() {
                self.sp(p)
            } else {
                0.0
            }
        };
        PowerSums::raw(self.n, self.mean, get(2), get(3), get(4))
    }

    pub fn from_power_sums(ps: &PowerSums) -> PowerSumsN {
        PowerSumsN {
            n: ps.n(),
            mean: ps.mean(),
            sp: vec![ps.ss(), ps.sc(), ps.sq()],
        }
    }

    pub fn translate(&self, c: f64) -> PowerSumsN {
        if self.n == 0 {
            return self.clone();
        }
        PowerSumsN {
            mean: self.mean + c,
            ..self.clone()
        }
    }

    /// Pools any number of groups of the same order.
    pub fn merge(groups: &[PowerSumsN]) -> Result<PowerSumsN> {
        let first = groups
            .first()
            .ok_or_else(|| Error::InvalidRequest("no groups to merge".to_string()))?;
        let order = first.max_order();
        for g in groups {
            if g.max_order() != order {
                return Err(Error::MismatchedOrder {
                    expected: order,
                    found: g.max_order(),
                });
            }
        }
        let live: Vec<&PowerSumsN> = groups.iter().filter(|g| g.n > 0).collect();
        let n: u64 = live.iter().map(|g| g.n).sum();
        if n == 0 {
            return PowerSumsN::empty(order);
        }
        if live.len() == 1 {
            return Ok(live[0].clone());
        }
        let mean = live.iter().map(|g| g.n as f64 * g.mean).sum::<f64>() / n as f64;
        let binom = Binomials::new(order);
        let offsets: Vec<Vec<f64>> = live.iter().map(|g| powers(g.mean - mean, order)).collect();

        let sp = (2..=order)
            .map(|p| {
                let mut total = 0.0;
                for s in 0..=p {
                    let inner: f64 = live
                        .iter()
                        .zip(&offsets)
                        .map(|(g, d)| g.sp(p - s) * d[s])
                        .sum();
                    total += binom.get(p, s) * inner;
                }
                if p % 2 == 0 {
                    total.max(0.0)
                } else {
                    total
                }
            })
            .collect();
        Ok(PowerSumsN { n, mean, sp })
    }

    pub fn push(&self, x: f64) -> Result<PowerSumsN> {
        let single = PowerSumsN::singleton(x, self.max_order())?;
        PowerSumsN::merge(&[self.clone(), single])
    }

    /// Pivoted one-pass fold of [`push`](Self::push) over `xs`.
    pub fn from_sequence(xs: &[f64], order: usize) -> Result<PowerSumsN> {
        let mut acc = AccumulatorN::new(order)?;
        for &x in xs {
            acc.push(x)?;
        }
        Ok(acc.sums())
    }

    /// Recovers the single group that, pooled with `known`, gives `self`.
    pub fn subtract(&self, known: &[PowerSumsN]) -> Result<PowerSumsN> {
        let order = self.max_order();
        for g in known {
            if g.max_order() != order {
                return Err(Error::MismatchedOrder {
                    expected: order,
                    found: g.max_order(),
                });
            }
        }
        let known_n: u64 = known.iter().map(|g| g.n).sum();
        if self.n <= known_n {
            return Err(Error::NoRemainder {
                pooled: self.n,
                known: known_n,
            });
        }
        let rem_n = self.n - known_n;
        let known_mass: f64 = known.iter().map(|g| g.n as f64 * g.mean).sum();
        let rem_mean = (self.n as f64 * self.mean - known_mass) / rem_n as f64;

        let binom = Binomials::new(order);
        let known_offsets: Vec<Vec<f64>> = known
            .iter()
            .map(|g| powers(g.mean - self.mean, order))
            .collect();
        let rem_offsets = powers(rem_mean - self.mean, order);

        // rem[p] = SP^p of the remainder, seeded with SP⁰ = n and SP¹ = 0.
        let mut rem = vec![0.0; order + 1];
        rem[0] = rem_n as f64;
        for p in 2..=order {
            let mut known_part = 0.0;
            let mut reference = self.sp(p);
            for (g, d) in known.iter().zip(&known_offsets) {
                reference += g.sp(p);
                for (s, ds) in d.iter().enumerate().take(p + 1) {
                    known_part += binom.get(p, s) * g.sp(p - s) * ds;
                }
            }
            let lower: f64 = (1..=p)
                .map(|s| binom.get(p, s) * rem[p - s] * rem_offsets[s])
                .sum();
            let mut value = self.sp(p) - known_part - lower;

            let tolerance = NEGATIVITY_TOLERANCE * reference.abs().max(1.0);
            if p % 2 == 0 {
                if value < -tolerance || (rem_n == 1 && value > tolerance) {
                    return Err(Error::InconsistentGroups {
                        order: p,
                        value,
                        tolerance,
                    });
                }
                value = value.max(0.0);
            }
            rem[p] = if rem_n == 1 { 0.0 } else { value };
        }
        Ok(PowerSumsN {
            n: rem_n,
            mean: rem_mean,
            sp: rem[2..].to_vec(),
        })
    }
}

/// Streaming builder for [`PowerSumsN`] that folds around the first value seen.
#[derive(Debug, Clone)]
pub struct AccumulatorN {
    pivot: Option<f64>,
    shifted: PowerSumsN,
    binom: Vec<Vec<f64>>,
}

impl AccumulatorN {
    pub fn new(order: usize) -> Result<Self> {
        let shifted = PowerSumsN::empty(order)?;
        Ok(AccumulatorN {
            pivot: None,
            shifted,
            binom: Binomials::new(order).rows,
        })
    }

    pub fn max_order(&self) -> usize {
        self.shifted.max_order()
    }

    pub fn len(&self) -> u64 {
        self.shifted.n
    }

    pub fn is_empty(&self) -> bool {
        self.shifted.n == 0
    }

    /// Same arithmetic as [`PowerSumsN::push`], without the per-call allocations.
    pub fn push(&mut self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        let pivot = *self.pivot.get_or_insert(x);
        let y = x - pivot;
        let acc = &mut self.shifted;
        let order = acc.sp.len() + 1;
        let n = acc.n as f64;
        let n1 = n + 1.0;
        let mean = (n * acc.mean + y) / n1;
        // Offsets of the old group and of the new point from the new mean.
        let d_old = acc.mean - mean;
        let d_new = y - mean;

        let mut next = vec![0.0; order - 1];
        let mut pow_old = vec![1.0; order + 1];
        let mut pow_new = vec![1.0; order + 1];
        for s in 1..=order {
            pow_old[s] = pow_old[s - 1] * d_old;
            pow_new[s] = pow_new[s - 1] * d_new;
        }
        for p in 2..=order {
            let row = &self.binom[p];
            let mut total = pow_new[p];
            for s in 0..=p {
                total += row[s] * acc.sp(p - s) * pow_old[s];
            }
            next[p - 2] = if p % 2 == 0 { total.max(0.0) } else { total };
        }
        acc.n += 1;
        acc.mean = mean;
        acc.sp = next;
        Ok(())
    }

    pub fn sums(&self) -> PowerSumsN {
        self.shifted.translate(self.pivot.unwrap_or(0.0))
    }
}
