//! Independent checks of the curvature profile, its period and the
//! progression angle against a direct RK4 integration of
//! `w'' = 3 w^{-5/3} − c w`, `w = κ^{-3/4}`.

use bicon_core::{classify_orbit, critical_d, curvature_profile, period, progression_angle, OrbitClass};

/// Larger root of `16 d u³ − 9u⁴ − c` by bisection on `[4d/3, 16d/9]`.
fn u_max(d: f64, c: f64) -> f64 {
    let q = |u: f64| 16.0 * d * u.powi(3) - 9.0 * u.powi(4) - c;
    let (mut lo, mut hi) = (4.0 * d / 3.0, 16.0 * d / 9.0);
    assert!(q(lo) > 0.0 && q(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn rhs(c: f64, y: [f64; 2]) -> [f64; 2] {
    [y[1], 3.0 * y[0].powf(-5.0 / 3.0) - c * y[0]]
}

fn rk4(c: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let add = |a: [f64; 2], b: [f64; 2], k: f64| [a[0] + k * b[0], a[1] + k * b[1]];
    let k1 = rhs(c, y);
    let k2 = rhs(c, add(y, k1, h / 2.0));
    let k3 = rhs(c, add(y, k2, h / 2.0));
    let k4 = rhs(c, add(y, k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Starts at maximum curvature and returns the time at which `w'` next
/// crosses zero upwards, i.e. one full period.
fn rk4_period(d: f64, c: f64, h: f64) -> f64 {
    let mut y = [u_max(d, c).powf(-1.5), 0.0];
    let mut t = 0.0;
    let mut seen_negative = false;
    loop {
        let next = rk4(c, y, h);
        if next[1] < 0.0 {
            seen_negative = true;
        }
        if seen_negative && y[1] < 0.0 && next[1] >= 0.0 {
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if rk4(c, y, mid)[1] < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return t + 0.5 * (lo + hi);
        }
        y = next;
        t += h;
        assert!(t < 1e3, "no period found");
    }
}

/// `κ` at `n` uniform times over `[0, rho)`, with `sub` RK4 steps between samples.
fn rk4_kappa(d: f64, c: f64, rho: f64, n: usize, sub: usize) -> Vec<f64> {
    let mut y = [u_max(d, c).powf(-1.5), 0.0];
    let h = rho / (n * sub) as f64;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(y[0].powf(-4.0 / 3.0));
        for _ in 0..sub {
            y = rk4(c, y, h);
        }
    }
    out
}

/// `I(d)` by composite Simpson over one period of the RK4 trajectory.
fn rk4_progression_angle(d: f64, steps: usize) -> f64 {
    let rho = rk4_period(d, 1.0, 1e-4);
    let kappa = rk4_kappa(d, 1.0, rho, steps, 4);
    let integrand = |k: f64| 12.0 * k.powf(1.75) * d.sqrt() / (16.0 * d * k.powf(1.5) - 1.0);
    // Closing the periodic grid gives an even number of intervals.
    let h = rho / steps as f64;
    let mut sum = 0.0;
    for (i, &k) in kappa.iter().chain(std::iter::once(&kappa[0])).enumerate() {
        let w = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * integrand(k);
    }
    sum * h / 3.0
}

#[test]
fn critical_value_matches_closed_form() {
    let ds = critical_d(1.0).unwrap();
    assert!((ds - 27f64.powf(0.25) / 4.0).abs() < 1e-15);
    let q_max = 256.0 * ds.powi(4) / 27.0 - 1.0;
    assert!(q_max.abs() < 1e-14);
}

#[test]
fn orbit_classification_around_threshold() {
    let ds = critical_d(1.0).unwrap();
    assert_eq!(classify_orbit(ds * 0.9, 1.0).unwrap(), OrbitClass::NonPeriodic);
    assert!(matches!(classify_orbit(ds, 1.0).unwrap(), OrbitClass::Degenerate { .. }));
    match classify_orbit(ds * 1.2, 1.0).unwrap() {
        OrbitClass::Oscillatory { u1, u2 } => {
            assert!(0.0 < u1 && u1 < u2);
            assert!((u2 - u_max(ds * 1.2, 1.0)).abs() < 1e-12);
        }
        other => panic!("expected an oscillatory orbit, got {other:?}"),
    }
    assert!(classify_orbit(0.0, 1.0).is_err());
}

#[test]
fn period_agrees_with_rk4_at_d_one() {
    let rho = period(1.0, 1.0).unwrap();
    let oracle = rk4_period(1.0, 1.0, 1e-4);
    assert!((rho - oracle).abs() < 1e-6, "rho = {rho}, rk4 = {oracle}");
}

#[test]
fn period_agrees_with_rk4_across_d() {
    for &d in &[0.6, 0.8, 2.0, 5.0] {
        let rho = period(d, 1.0).unwrap();
        let oracle = rk4_period(d, 1.0, 2e-5);
        assert!((rho - oracle).abs() < 1e-6 * rho.max(1.0), "d = {d}: rho = {rho}, rk4 = {oracle}");
    }
}

#[test]
fn profile_matches_rk4_pointwise() {
    for &d in &[0.7, 1.0, 3.0] {
        let profile = curvature_profile(d, 1.0, 128).unwrap();
        let oracle = rk4_kappa(d, 1.0, profile.rho, 128, 64);
        for (p, k) in profile.samples.iter().zip(&oracle) {
            assert!((p.kappa - k).abs() < 1e-7 * profile.kappa_max(), "d = {d}, s = {}: {} vs {k}", p.s, p.kappa);
        }
    }
}

#[test]
fn profile_invariants() {
    let profile = curvature_profile(0.9, 1.0, 200).unwrap();
    let n = profile.samples.len();
    assert_eq!(profile.samples[0].kappa, profile.u2 * profile.u2);
    for i in 1..n / 2 {
        let (a, b) = (profile.samples[i].kappa, profile.samples[n - i].kappa);
        assert!((a - b).abs() < 1e-12 * profile.kappa_max(), "not even about s = 0 at {i}");
    }
    assert!((profile.samples[n / 2].kappa - profile.u1 * profile.u1).abs() < 1e-12);
    assert!(profile.prime_residual < 1e-8);
    assert!(profile.euler_lagrange_residual().unwrap() < 1e-4);
}

#[test]
fn progression_angle_agrees_with_rk4_simpson() {
    for &d in &[0.65, 1.0, 3.0] {
        let i = progression_angle(d).unwrap();
        let oracle = rk4_progression_angle(d, 20_000);
        assert!((i - oracle).abs() < 1e-7, "d = {d}: {i} vs {oracle}");
    }
}

#[test]
fn degenerate_parameters_are_rejected() {
    let ds = critical_d(1.0).unwrap();
    assert!(curvature_profile(ds * 0.99, 1.0, 64).is_err());
    assert!(curvature_profile(ds, 1.0, 64).is_err());
    assert!(curvature_profile(1.0, 1.0, 4).is_err());
    assert!(period(f64::NAN, 1.0).is_err());
}
