//! Reference computations that share no code with the update formulas, and
//! a field-by-field comparison with tolerances suited to central sums.

use crate::error::{Error, Result};
use crate::general::PowerSumsN;
use crate::power_sums::PowerSums;

/// Neumaier-compensated sum.
fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

/// Two passes: the mean (refined once), then `Σ(x - x̄)^p` for every order.
pub fn direct_power_sums(xs: &[f64], order: usize) -> Result<PowerSumsN> {
    if xs.is_empty() {
        return PowerSumsN::empty(order);
    }
    if let Some(bad) = xs.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(*bad));
    }
    let n = xs.len() as f64;
    let rough = sum(xs.iter().copied()) / n;
    let mean = rough + sum(xs.iter().map(|x| x - rough)) / n;
    let sums = (2..=order)
        .map(|p| sum(xs.iter().map(|x| (x - mean).powi(p as i32))))
        .collect();
    PowerSumsN::from_parts(xs.len() as u64, mean, sums)
}

/// Textbook one-pass raw moments `Σx^k` converted to central sums. Loses
/// everything to cancellation once the mean dwarfs the spread; kept as the
/// counter-example for stability tests.
pub fn naive_raw_moments(xs: &[f64]) -> PowerSums {
    let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
    for &x in xs {
        let x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
    }
    if xs.is_empty() {
        return PowerSums::empty();
    }
    let n = xs.len() as f64;
    let m = s1 / n;
    let ss = s2 - n * m * m;
    let sc = s3 - 3.0 * m * s2 + 2.0 * n * m.powi(3);
    let sq = s4 - 4.0 * m * s3 + 6.0 * m * m * s2 - 3.0 * n * m.powi(4);
    PowerSums::raw(xs.len() as u64, m, ss, sc, sq)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSpec {
    pub relative: f64,
    /// Allowed absolute error as a fraction of the field's natural scale.
    pub absolute_floor: f64,
}

impl ToleranceSpec {
    pub fn relative(relative: f64) -> Self {
        ToleranceSpec {
            relative,
            absolute_floor: relative,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldComparison {
    pub field: String,
    pub left: f64,
    pub right: f64,
    /// `|left - right| / max(|left|, |right|)`, or 0 when both are negligible.
    pub relative_error: f64,
    /// Error over the allowance; at most 1 when the field passes.
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub fields: Vec<FieldComparison>,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn worst(&self) -> &FieldComparison {
        self.fields
            .iter()
            .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
            .expect("at least one field")
    }

    /// Largest relative error over all fields.
    pub fn disparity(&self) -> f64 {
        self.fields
            .iter()
            .map(|f| f.relative_error)
            .fold(0.0, f64::max)
    }
}

fn field(name: String, a: f64, b: f64, scale: f64, tol: &ToleranceSpec) -> FieldComparison {
    let diff = (a - b).abs();
    let big = a.abs().max(b.abs());
    if big <= 1e-9 * scale || diff == 0.0 {
        return FieldComparison {
            field: name,
            left: a,
            right: b,
            relative_error: 0.0,
            ratio: 0.0,
            pass: true,
        };
    }
    let allowance = (tol.relative * big).max(tol.absolute_floor * scale);
    let ratio = if allowance > 0.0 {
        diff / allowance
    } else {
        f64::INFINITY
    };
    FieldComparison {
        field: name,
        left: a,
        right: b,
        relative_error: diff / big,
        ratio,
        pass: diff <= allowance,
    }
}

fn field_name(p: usize) -> String {
    match p {
        2 => "ss".into(),
        3 => "sc".into(),
        4 => "sq".into(),
        _ => format!("SP{p}"),
    }
}

/// Compares two summaries field by field. Even orders scale by their own
/// magnitude; odd orders by the geometric mean of their even neighbours,
/// so a near-zero third sum is judged against the spread that produced it.
pub fn compare(a: &PowerSumsN, b: &PowerSumsN, tol: &ToleranceSpec) -> Result<ComparisonReport> {
    if a.max_order() != b.max_order() {
        return Err(Error::MismatchedOrder {
            expected: a.max_order(),
            found: b.max_order(),
        });
    }
    let order = a.max_order();
    let mut fields = vec![FieldComparison {
        field: "n".to_string(),
        left: a.n() as f64,
        right: b.n() as f64,
        relative_error: if a.n() == b.n() { 0.0 } else { 1.0 },
        ratio: if a.n() == b.n() { 0.0 } else { f64::INFINITY },
        pass: a.n() == b.n(),
    }];
    let n = a.n().max(b.n()).max(1) as f64;
    let even = |p: usize| a.sp(p).abs().max(b.sp(p).abs());
    let m2 = even(2) / n;

    let mean_scale = a.mean().abs().max(b.mean().abs()).max(m2.sqrt());
    fields.push(field("mean".into(), a.mean(), b.mean(), mean_scale, tol));
    for p in 2..=order {
        let scale = if p % 2 == 0 {
            even(p)
        } else if p < order {
            (even(p - 1) * even(p + 1)).sqrt()
        } else {
            n * m2.powf(p as f64 / 2.0)
        };
        fields.push(field(field_name(p), a.sp(p), b.sp(p), scale, tol));
    }
    let pass = fields.iter().all(|f| f.pass);
    Ok(ComparisonReport { fields, pass })
}

pub fn compare_sums(a: &PowerSums, b: &PowerSums, tol: &ToleranceSpec) -> ComparisonReport {
    compare(
        &PowerSumsN::from_power_sums(a),
        &PowerSumsN::from_power_sums(b),
        tol,
    )
    .expect("both summaries are order 4")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_sums_of_small_set() {
        let d = direct_power_sums(&[1.0, 3.0, 5.0], 4).unwrap();
        assert_eq!((d.n(), d.mean()), (3, 3.0));
        assert_eq!(d.sums(), &[8.0, 0.0, 32.0]);
        assert!(direct_power_sums(&[1.0, f64::NAN], 4).is_err());
        assert_eq!(direct_power_sums(&[], 3).unwrap().n(), 0);
    }

    #[test]
    fn direct_sums_edge_cases() {
        let c = direct_power_sums(&[2.5], 5).unwrap();
        assert!(c.sums().iter().all(|v| *v == 0.0));
        assert_eq!(direct_power_sums(&[0.0, 3.0, 6.0], 2).unwrap().sp(2), 18.0);
        let high = direct_power_sums(&[1.0, 3.0, 5.0], 7).unwrap();
        assert_eq!(high.sp(6), 128.0);
        assert_eq!(high.sp(7), 0.0);
    }

    #[test]
    fn report_examples() {
        let a = PowerSums::from_parts(5, 1.0, 4.0, 1.0, 9.0).unwrap();
        let same = compare_sums(&a, &a, &ToleranceSpec::relative(1e-12));
        assert!(same.pass);
        assert_eq!(same.disparity(), 0.0);

        let nudged = PowerSums::from_parts(5, 1.0, 4.0 + 4e-15, 1.0, 9.0).unwrap();
        assert!(compare_sums(&a, &nudged, &ToleranceSpec::relative(1e-12)).pass);

        let off = PowerSums::from_parts(5, 1.0, 4.0, 1.1, 9.0).unwrap();
        let r = compare_sums(&a, &off, &ToleranceSpec::relative(1e-12));
        assert!(!r.pass);
        assert_eq!(r.worst().field, "sc");
        assert!((r.disparity() - 0.1 / 1.1).abs() < 1e-12);
    }

    #[test]
    fn naive_moments_agree_on_benign_data() {
        let xs = [1.0, 3.0, 5.0, 10.0];
        let naive = naive_raw_moments(&xs);
        let direct = direct_power_sums(&xs, 4).unwrap().to_power_sums();
        assert!(compare_sums(&naive, &direct, &ToleranceSpec::relative(1e-12)).pass);
    }

    #[test]
    fn naive_moments_fail_when_shifted() {
        let xs: Vec<f64> = (0..1000).map(|i| 1e9 + (i % 7) as f64 * 0.125).collect();
        let naive = naive_raw_moments(&xs);
        let direct = direct_power_sums(&xs, 4).unwrap().to_power_sums();
        let report = compare_sums(&naive, &direct, &ToleranceSpec::relative(1e-6));
        assert!(!report.pass);
        assert!(["ss", "sc", "sq"].contains(&report.worst().field.as_str()));
    }

    #[test]
    fn odd_orders_use_neighbour_scale() {
        let a = PowerSumsN::from_parts(10, 0.0, vec![10.0, 1e-14, 30.0]).unwrap();
        let b = PowerSumsN::from_parts(10, 0.0, vec![10.0, -1e-14, 30.0]).unwrap();
        assert!(
            compare(&a, &b, &ToleranceSpec::relative(1e-12))
                .unwrap()
                .pass
        );
        let c = PowerSumsN::from_parts(10, 0.0, vec![10.0, 1e-3, 30.0]).unwrap();
        let r = compare(&a, &c, &ToleranceSpec::relative(1e-12)).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst().field, "sc");
    }

    #[test]
    fn mismatched_orders_and_sizes() {
        let a = PowerSumsN::empty(4).unwrap();
        let b = PowerSumsN::empty(5).unwrap();
        assert!(compare(&a, &b, &ToleranceSpec::relative(1e-9)).is_err());
        let x = PowerSumsN::singleton(1.0, 4).unwrap();
        let r = compare(&a, &x, &ToleranceSpec::relative(1e-9)).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst().field, "n");
    }
}
