mod common;

use common::{example_groups, read_fixture, rel};
use moment_decomp::bridge::{GroupDescriptor, Stat, Undefined};
use moment_decomp::decomp::{RowKind, OTHER_LABEL, POOLED_LABEL};
use moment_decomp::io::{parse_stats_input, InputFormat};
use moment_decomp::{
    sample_decomp, DecompRequest, Error, GroupRef, MomentConventions, PowerSums, StatType,
};

fn groups(name: &str) -> Vec<GroupDescriptor> {
    parse_stats_input(read_fixture(name).as_bytes(), InputFormat::Csv).unwrap()
}

fn values(d: &GroupDescriptor) -> [f64; 4] {
    [
        d.mean.unwrap(),
        d.variance.unwrap(),
        d.skewness.unwrap(),
        d.kurtosis.unwrap(),
    ]
}

#[test]
fn pooled_row_equals_the_statistics_of_the_concatenation() {
    let t = sample_decomp(&DecompRequest {
        groups: groups("pooled_full.csv"),
        ..Default::default()
    })
    .unwrap();
    let pooled = &t.row(POOLED_LABEL).unwrap().stats;
    let (n, mean, var, skew, kurt) = common::describe(&example_groups().concat());
    assert_eq!(pooled.n, n);
    for (a, b) in values(pooled).into_iter().zip([mean, var, skew, kurt]) {
        assert!(rel(a, b) < 1e-13, "{a} vs {b}");
    }
}

#[test]
fn other_row_recovers_the_third_group() {
    let full = groups("pooled_full.csv");
    let t = sample_decomp(&DecompRequest {
        groups: groups("missing_full.csv"),
        pooled: Some(GroupRef::Index(3)),
        ..Default::default()
    })
    .unwrap();
    let other = t.row(OTHER_LABEL).unwrap();
    assert_eq!(other.kind, RowKind::Other);
    assert_eq!(other.stats.n, 51);
    for (a, b) in values(&other.stats).into_iter().zip(values(&full[2])) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn printed_inputs_land_within_rounding_of_the_printed_outputs() {
    let t = sample_decomp(&DecompRequest {
        groups: groups("pooled_printed.csv"),
        ..Default::default()
    })
    .unwrap();
    let expected = [0.11209600, 0.7743711, 0.04697463, 2.951960];
    for (a, b) in values(&t.row(POOLED_LABEL).unwrap().stats)
        .into_iter()
        .zip(expected)
    {
        assert!(rel(a, b) < 5e-7, "{a} vs {b}");
    }
}

#[test]
fn pooled_reference_by_name() {
    let mut gs = groups("missing_full.csv");
    gs[2].name = Some("all".into());
    let t = sample_decomp(&DecompRequest {
        groups: gs,
        pooled: Some("all".parse().unwrap()),
        ..Default::default()
    })
    .unwrap();
    assert_eq!(t.row(OTHER_LABEL).unwrap().stats.n, 51);
}

#[test]
fn conventions_carry_through() {
    let xs: Vec<Vec<f64>> = example_groups();
    for conv in [
        MomentConventions::new(StatType::Moment, StatType::Moment, true),
        MomentConventions::new(
            StatType::AdjustedFisherPearson,
            StatType::AdjustedFisherPearson,
            true,
        ),
        MomentConventions::for_software("stata").unwrap(),
    ] {
        let gs: Vec<GroupDescriptor> = xs
            .iter()
            .map(|g| {
                moment_decomp::bridge::from_power_sums(
                    &PowerSums::from_sequence(g).unwrap(),
                    &conv,
                    4,
                    false,
                )
            })
            .collect();
        let t = sample_decomp(&DecompRequest {
            groups: gs,
            conventions: conv,
            ..Default::default()
        })
        .unwrap();
        let direct = moment_decomp::bridge::from_power_sums(
            &PowerSums::from_sequence(&xs.concat()).unwrap(),
            &conv,
            4,
            false,
        );
        let pooled = &t.row(POOLED_LABEL).unwrap().stats;
        // excess kurtosis can sit near zero, so judge it on the unit scale
        for (a, b) in values(pooled).into_iter().zip(values(&direct)) {
            assert!(
                (a - b).abs() < 1e-12 * a.abs().max(1.0),
                "{conv:?}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn missing_moments_truncate_every_row() {
    let mut gs = groups("pooled_full.csv");
    gs[1].kurtosis = None;
    let t = sample_decomp(&DecompRequest {
        groups: gs.clone(),
        ..Default::default()
    })
    .unwrap();
    assert_eq!(t.order, 3);
    assert!(t
        .rows
        .iter()
        .all(|r| r.stats.kurtosis.is_none() && r.stats.skewness.is_some()));

    gs[0].skewness = None;
    gs[0].kurtosis = None;
    let t = sample_decomp(&DecompRequest {
        groups: gs,
        ..Default::default()
    })
    .unwrap();
    assert_eq!(t.order, 2);
}

#[test]
fn zero_variance_groups_keep_full_order() {
    let gs = vec![
        GroupDescriptor::new(5).with_mean(2.0).with_variance(0.0),
        GroupDescriptor::new(5)
            .with_mean(4.0)
            .with_variance(0.0)
            .with_skewness(0.0)
            .with_kurtosis(0.0),
    ];
    let t = sample_decomp(&DecompRequest {
        groups: gs,
        ..Default::default()
    })
    .unwrap();
    assert_eq!(t.order, 4);
    let pooled = &t.row(POOLED_LABEL).unwrap().stats;
    // ten values, half 2 and half 4
    assert_eq!(pooled.mean, Some(3.0));
    assert!((pooled.variance.unwrap() - 10.0 / 9.0).abs() < 1e-15);
    assert_eq!(pooled.skewness, Some(0.0));
    assert!((pooled.kurtosis.unwrap() - 1.0).abs() < 1e-15);
    let first = &t.rows[0].stats;
    assert_eq!(first.skewness, None);
    assert_eq!(first.reason(Stat::Skewness), Some(Undefined::ZeroVariance));
}

#[test]
fn subtraction_errors_are_typed() {
    let gs = groups("missing_full.csv");
    let mut wrong = gs.clone();
    wrong[2].n = 60;
    let err = sample_decomp(&DecompRequest {
        groups: wrong,
        pooled: Some(GroupRef::Index(3)),
        ..Default::default()
    })
    .unwrap_err();
    assert!(
        matches!(
            err,
            Error::NoRemainder {
                pooled: 60,
                known: 72
            }
        ),
        "{err}"
    );

    let mut shrunk = gs;
    shrunk[2].variance = Some(0.01);
    let err = sample_decomp(&DecompRequest {
        groups: shrunk,
        pooled: Some(GroupRef::Index(3)),
        ..Default::default()
    })
    .unwrap_err();
    assert!(
        matches!(err, Error::InconsistentGroups { order: 2, .. }),
        "{err}"
    );
}

#[test]
fn sd_column_is_optional() {
    let t = sample_decomp(&DecompRequest {
        groups: groups("pooled_full.csv"),
        include_sd: true,
        ..Default::default()
    })
    .unwrap();
    for row in &t.rows {
        let sd = row.stats.sd.unwrap();
        assert!(rel(sd * sd, row.stats.variance.unwrap()) < 1e-15);
    }
}
