//! Shared helpers for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use moment_decomp::oracle::direct_power_sums;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Mersenne Twister seeded and scaled exactly as R's default generator, with
/// inversion normals, so `RNorm::new(1)` replays `set.seed(1); rnorm(...)`.
pub struct RNorm {
    mt: [u32; 624],
    mti: usize,
}

impl RNorm {
    pub fn new(seed: u32) -> Self {
        let mut s = seed;
        for _ in 0..50 {
            s = s.wrapping_mul(69069).wrapping_add(1);
        }
        let mut mt = [0u32; 624];
        // R fills 625 slots; the first is the generator position, overwritten.
        s = s.wrapping_mul(69069).wrapping_add(1);
        for slot in mt.iter_mut() {
            s = s.wrapping_mul(69069).wrapping_add(1);
            *slot = s;
        }
        RNorm { mt, mti: 624 }
    }

    fn next_u32(&mut self) -> u32 {
        const N: usize = 624;
        const M: usize = 397;
        const MAG: [u32; 2] = [0, 0x9908_b0df];
        if self.mti >= N {
            let mt = &mut self.mt;
            for kk in 0..N {
                let y = (mt[kk] & 0x8000_0000) | (mt[(kk + 1) % N] & 0x7fff_ffff);
                mt[kk] = mt[(kk + M) % N] ^ (y >> 1) ^ MAG[(y & 1) as usize];
            }
            self.mti = 0;
        }
        let mut y = self.mt[self.mti];
        self.mti += 1;
        y ^= y >> 11;
        y ^= (y << 7) & 0x9d2c_5680;
        y ^= (y << 15) & 0xefc6_0000;
        y ^= y >> 18;
        y
    }

    pub fn unif(&mut self) -> f64 {
        const I2_32M1: f64 = 2.328306437080797e-10;
        let v = self.next_u32() as f64 * 2.3283064365386963e-10;
        if v <= 0.0 {
            0.5 * I2_32M1
        } else if 1.0 - v <= 0.0 {
            1.0 - 0.5 * I2_32M1
        } else {
            v
        }
    }

    pub fn norm(&mut self) -> f64 {
        const BIG: f64 = 134_217_728.0;
        let u = (BIG * self.unif()).trunc() + self.unif();
        qnorm(u / BIG)
    }

    pub fn norms(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.norm()).collect()
    }
}

/// Wichura's AS241 normal quantile.
#[allow(clippy::excessive_precision)]
fn qnorm(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r
                + 67265.770927008700853)
                * r
                + 45921.953931549871457)
                * r
                + 13731.693765509461125)
                * r
                + 1971.5909503065514427)
                * r
                + 133.14166789178437745)
                * r
                + 3.387132872796366608)
            / (((((((r * 5226.495278852545925 + 28729.085735721942674) * r
                + 39307.89580009271061)
                * r
                + 21213.794301586595867)
                * r
                + 5394.1960214247511077)
                * r
                + 687.1870074920579083)
                * r
                + 42.313330701600911252)
                * r
                + 1.0);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r
            + 0.24178072517745061177)
            * r
            + 1.27045825245236838258)
            * r
            + 3.64784832476320460504)
            * r
            + 5.7694972214606914055)
            * r
            + 4.6303378461565452959)
            * r
            + 1.42343711074968357734)
            / (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r
                + 0.0151986665636164571966)
                * r
                + 0.14810397642748007459)
                * r
                + 0.68976733498510000455)
                * r
                + 1.6763848301838038494)
                * r
                + 2.05319162663775882187)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r
            + 0.0012426609473880784386)
            * r
            + 0.026532189526576123093)
            * r
            + 0.29656057182850489123)
            * r
            + 1.7848265399172913358)
            * r
            + 5.4637849111641143699)
            * r
            + 6.6579046435011037772)
            / (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r
                + 1.8463183175100546818e-5)
                * r
                + 7.868691311456132591e-4)
                * r
                + 0.0148753612908506148525)
                * r
                + 0.13692988092273580531)
                * r
                + 0.59983220655588793769)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

pub const GROUP_SIZES: [usize; 3] = [28, 44, 51];

/// The three mock subgroups of the worked example.
pub fn example_groups() -> Vec<Vec<f64>> {
    let mut rng = RNorm::new(1);
    GROUP_SIZES.iter().map(|&n| rng.norms(n)).collect()
}

/// (n, mean, var, fisher-pearson skew, raw kurtosis) computed directly.
pub fn describe(xs: &[f64]) -> (u64, f64, f64, f64, f64) {
    let d = direct_power_sums(xs, 4).unwrap();
    let n = xs.len() as f64;
    let m2 = d.sp(2) / n;
    (
        d.n(),
        d.mean(),
        d.sp(2) / (n - 1.0),
        d.sp(3) / n / m2.powf(1.5),
        d.sp(4) / n / (m2 * m2),
    )
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Deterministic "standard-normal-like" values on a 2^-20 grid, so adding
/// 1e9 is exact in f64.
pub fn quantized_normals(seed: u32, n: usize) -> Vec<f64> {
    let mut rng = RNorm::new(seed);
    let grid = (1u64 << 20) as f64;
    (0..n).map(|_| (rng.norm() * grid).round() / grid).collect()
}

/// Seeded generator for bulk random cases.
pub struct Cases(StdRng);

impl Cases {
    pub fn new(seed: u64) -> Self {
        Cases(StdRng::seed_from_u64(seed))
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.random_range(lo..hi)
    }

    /// Uniform integer in lo..=hi.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        self.0.random_range(lo..=hi)
    }

    pub fn values(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| self.range(lo, hi)).collect()
    }
}
