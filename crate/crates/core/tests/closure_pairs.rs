//! Admissible pairs, the closure solver and monotonicity of `I(d)`.

use std::f64::consts::{PI, SQRT_2};

use bicon_core::closure::{admissible_n_range, is_admissible};
use bicon_core::{critical_d, enumerate_pairs, progression_angle, solve_closure, sweep, Error};
use proptest::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Direct floating-point reading of `π < 2πn/m < √2 π`, `gcd = 1`.
fn brute_force(m_max: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for m in 1..=m_max {
        for n in 1..=m {
            let target = 2.0 * PI * n as f64 / m as f64;
            if gcd(m, n) == 1 && target > PI && target < SQRT_2 * PI {
                out.push((m, n));
            }
        }
    }
    out
}

#[test]
fn enumeration_matches_brute_force() {
    assert_eq!(enumerate_pairs(200), brute_force(200));
}

#[test]
fn small_pairs() {
    assert_eq!(enumerate_pairs(9), vec![(3, 2), (5, 3), (7, 4), (8, 5), (9, 5)]);
    assert!(enumerate_pairs(2).is_empty());
}

#[test]
fn n_one_never_admissible_up_to_a_million() {
    for m in 1..=1_000_000u64 {
        let range = admissible_n_range(m);
        assert!(range.is_empty() || *range.start() >= 2, "m = {m} admits n = 1");
        assert!(!is_admissible(m, 1));
    }
}

#[test]
fn admissible_range_is_exact_in_integers() {
    for m in 1..=5000u64 {
        for n in admissible_n_range(m) {
            assert!(m < 2 * n && 2 * n * n < m * m, "({m}, {n})");
        }
        let range = admissible_n_range(m);
        let below = if range.is_empty() { m / 2 } else { *range.start() - 1 };
        assert!(!(m < 2 * below && 2 * below * below < m * m));
    }
}

#[test]
fn three_two_closes() {
    let sol = solve_closure(3, 2, 1e-10).unwrap();
    assert!((sol.i_value - 4.0 * PI / 3.0).abs() < 1e-10);
    assert!(sol.residual < 1e-10);
    assert!(sol.d > critical_d(1.0).unwrap());
    assert!((progression_angle(sol.d).unwrap() - 4.0 * PI / 3.0).abs() < 1e-10);
}

#[test]
fn every_small_pair_solves() {
    for (m, n) in enumerate_pairs(30) {
        let sol = solve_closure(m, n, 1e-10).unwrap();
        assert!(sol.residual < 1e-10, "({m}, {n}): residual {}", sol.residual);
    }
}

#[test]
fn inadmissible_pairs_are_explained() {
    match solve_closure(2, 1, 1e-10) {
        Err(Error::Inadmissible { note, .. }) => assert!(note.contains("n = 1")),
        other => panic!("expected an inadmissible-pair error, got {other:?}"),
    }
    match solve_closure(6, 4, 1e-10) {
        Err(Error::Inadmissible { note, .. }) => assert!(note.contains("gcd")),
        other => panic!("expected an inadmissible-pair error, got {other:?}"),
    }
    assert!(solve_closure(7, 5, 1e-10).is_err());
    assert!(solve_closure(0, 0, 1e-10).is_err());
}

#[test]
fn sweep_is_monotone_and_bounded() {
    let report = sweep(0.57, 50.0, 200).unwrap();
    assert_eq!(report.grid.len(), 200);
    assert!(report.monotone_decreasing);
    assert!(report.in_bounds);
    assert!(report.max_angle < SQRT_2 * PI && report.min_angle > PI);
}

#[test]
fn sweep_rejects_bad_ranges() {
    assert!(sweep(0.5, 2.0, 10).is_err());
    assert!(sweep(1.0, 0.9, 10).is_err());
    assert!(sweep(1.0, 2.0, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn progression_angle_decreases(a in 0.575f64..60.0, b in 0.575f64..60.0) {
        prop_assume!((a - b).abs() > 1e-6 * a.max(b));
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (i_lo, i_hi) = (progression_angle(lo).unwrap(), progression_angle(hi).unwrap());
        prop_assert!(i_lo > i_hi);
        prop_assert!(i_hi > PI && i_lo < SQRT_2 * PI);
    }

    #[test]
    fn admissible_pairs_are_coprime_and_bracketed(m in 1u64..100_000, k in 0u64..1000) {
        let range = admissible_n_range(m);
        if !range.is_empty() {
            let n = range.start() + k % (range.end() - range.start() + 1);
            prop_assert_eq!(is_admissible(m, n), gcd(m, n) == 1);
        }
    }
}
