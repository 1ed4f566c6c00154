//! Progression angle of the profile curve on the unit sphere and the search
//! for rationally closing curvature constants.
//!
//! Over one period of the curvature the profile curve advances about the
//! pole of its Killing field by
//!
//! ```text
//! I(d) = ∫₀^ρ 12 κ^{7/4} √d / (16 d κ^{3/2} − 1) ds.
//! ```
//!
//! `I` decreases strictly from `√2 π` (as `d → d*`) to `π` (as `d → ∞`), so
//! every coprime `(m, n)` with `m < 2n < √2 m` has a unique `d` with
//! `I(d) = 2πn/m`; the curve then closes after `m` periods, having turned
//! `n` times about the pole. Everything here is for the unit sphere, `c = 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::curvature::{critical_d, Orbit, QUADRATURE_REL_TOL};
use crate::error::{Error, Result};
use crate::numeric::{self, BrentOptions, Integral, QuadOptions};

/// Slack allowed when checking `π < I(d) < √2 π` on sampled values.
pub const BOUND_SLACK: f64 = 1e-8;

/// `I(d)` with its quadrature error estimate.
pub fn progression_angle_integral(d: f64) -> Result<Integral> {
    let orbit = Orbit::new(d, 1.0)?;
    let sd = d.sqrt();
    let integrand = |psi: f64| {
        let u = orbit.u_at(psi);
        u * u * u.sqrt() / ((16.0 * d * u * u * u - 1.0) * orbit.deflated(u).sqrt())
    };
    let half = numeric::integrate(integrand, 0.0, PI, QuadOptions::default())?;
    Ok(Integral { value: 36.0 * sd * half.value, abs_error: 36.0 * sd * half.abs_error })
}

/// Progression angle `I(d)` on the unit sphere.
pub fn progression_angle(d: f64) -> Result<f64> {
    let i = progression_angle_integral(d)?;
    if i.abs_error > QUADRATURE_REL_TOL * i.value {
        return Err(Error::Quadrature { estimate: i.abs_error, tolerance: QUADRATURE_REL_TOL * i.value });
    }
    Ok(i.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// `(d, I(d))` on a strictly increasing grid.
    pub grid: Vec<(f64, f64)>,
    pub monotone_decreasing: bool,
    pub in_bounds: bool,
    pub min_angle: f64,
    pub max_angle: f64,
}

/// Evaluates `I` on `steps` equally spaced points of `[d_min, d_max]`.
pub fn sweep(d_min: f64, d_max: f64, steps: usize) -> Result<SweepReport> {
    let d_star = critical_d(1.0)?;
    if !(d_min > d_star) {
        return Err(Error::InvalidParameter { name: "d_min", value: d_min, reason: "must exceed d* = (27)^{1/4}/4" });
    }
    if !(d_max > d_min) || !d_max.is_finite() {
        return Err(Error::InvalidParameter { name: "d_max", value: d_max, reason: "must exceed d_min" });
    }
    if steps < 2 {
        return Err(Error::InvalidParameter { name: "steps", value: steps as f64, reason: "need at least two grid points" });
    }
    let ds: Vec<f64> = (0..steps)
        .map(|k| if k + 1 == steps { d_max } else { d_min + (d_max - d_min) * k as f64 / (steps - 1) as f64 })
        .collect();
    let angles = ds.par_iter().map(|&d| progression_angle(d)).collect::<Result<Vec<_>>>()?;
    let grid: Vec<(f64, f64)> = ds.into_iter().zip(angles).collect();

    let monotone_decreasing = grid.windows(2).all(|w| w[1].1 < w[0].1);
    let min_angle = grid.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_angle = grid.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let in_bounds = min_angle > PI - BOUND_SLACK && max_angle < SQRT_2 * PI + BOUND_SLACK;
    Ok(SweepReport { grid, monotone_decreasing, in_bounds, min_angle, max_angle })
}

impl SweepReport {
    pub fn csv_rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.grid.iter().map(|&(d, i)| vec![d, i])
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Largest `k` with `k² <= x`.
fn isqrt(x: u128) -> u128 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).sqrt() as u128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Integers `n` with `m < 2n < √2 m`, ignoring coprimality. The upper bound
/// is the integer test `2n² < m²`.
pub fn admissible_n_range(m: u64) -> std::ops::RangeInclusive<u64> {
    let lo = m / 2 + 1;
    let m2 = (m as u128) * (m as u128);
    let hi = if m2 == 0 { 0 } else { isqrt((m2 - 1) / 2) as u64 };
    lo..=hi
}

/// `gcd(m, n) = 1` and `m < 2n < √2 m`, in exact integer arithmetic.
pub fn is_admissible(m: u64, n: u64) -> bool {
    let (m2, n2) = ((m as u128) * (m as u128), (n as u128) * (n as u128));
    m > 0 && n > 0 && gcd(m, n) == 1 && m < 2 * n && 4 * n2 < 2 * m2
}

/// Lazily enumerates admissible pairs with `m <= m_max`, sorted by `m` then `n`.
pub fn admissible_pairs(m_max: u64) -> impl Iterator<Item = (u64, u64)> {
    (1..=m_max).flat_map(|m| admissible_n_range(m).filter(move |&n| gcd(m, n) == 1).map(move |n| (m, n)))
}

/// All admissible `(m, n)` with `m <= m_max`; empty below `m = 3`.
pub fn enumerate_pairs(m_max: u64) -> Vec<(u64, u64)> {
    admissible_pairs(m_max).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureSolution {
    pub m: u64,
    pub n: u64,
    pub d: f64,
    pub rho: f64,
    pub i_value: f64,
    pub i_error: f64,
    /// `|I(d) − 2πn/m|`.
    pub residual: f64,
    /// Root-finder brackets `(d_lo, d_hi)`, one per iteration.
    #[serde(skip)]
    pub brackets: Vec<(f64, f64)>,
}

fn inadmissible(m: u64, n: u64) -> Error {
    let target = if m == 0 { f64::INFINITY } else { 2.0 * PI * n as f64 / m as f64 };
    let reason = if m > 0 && n > 0 && gcd(m, n) != 1 && m < 2 * n && 2 * n * n < m * m {
        "; gcd(m, n) must be 1".to_string()
    } else if n == 1 {
        ": a profile closing in a single round (n = 1) would need π < 2π/m < √2π, which is not possible, \
         so no such surface is embedded"
            .to_string()
    } else {
        String::new()
    };
    Error::Inadmissible { m, n, target, lo: PI, hi: SQRT_2 * PI, note: reason }
}

/// Finds `d > d*` with `|I(d) − 2πn/m| < tol`.
pub fn solve_closure(m: u64, n: u64, tol: f64) -> Result<ClosureSolution> {
    if !is_admissible(m, n) {
        return Err(inadmissible(m, n));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", value: tol, reason: "must be positive" });
    }
    let target = 2.0 * PI * n as f64 / m as f64;
    let d_star = critical_d(1.0)?;
    let mut samples = Vec::new();

    let mut eps = 1e-4;
    let (d_lo, i_lo) = loop {
        let d = d_star * (1.0 + eps);
        let i = progression_angle(d)?;
        samples.push((d, i));
        if i > target {
            break (d, i);
        }
        eps /= 10.0;
        if eps < 10.0 * crate::curvature::DEGENERATE_GUARD {
            return Err(Error::BracketSearch { target, samples });
        }
    };
    let mut d_hi = d_star + 1.0;
    let i_hi = loop {
        let i = progression_angle(d_hi)?;
        samples.push((d_hi, i));
        if i < target {
            break i;
        }
        d_hi = d_star + 2.0 * (d_hi - d_star);
        if samples.len() > 80 {
            return Err(Error::BracketSearch { target, samples });
        }
    };

    let mut f = |d: f64| progression_angle(d).map(|i| i - target).unwrap_or(f64::NAN);
    let opts = BrentOptions { xtol: 0.0, rtol: 2.0 * f64::EPSILON, ftol: 0.25 * tol, max_iter: 200 };
    let root = numeric::roots::brent_with_values(&mut f, d_lo, i_lo - target, d_hi, i_hi - target, opts)?;

    let d = root.x;
    let i = progression_angle_integral(d)?;
    let residual = (i.value - target).abs();
    if residual >= tol {
        return Err(Error::NoConvergence { what: "closure root", iterations: root.iterations });
    }
    let rho = Orbit::new(d, 1.0)?.period_integral()?.value;
    Ok(ClosureSolution {
        m,
        n,
        d,
        rho,
        i_value: i.value,
        i_error: i.abs_error,
        residual,
        brackets: root.brackets,
    })
}
