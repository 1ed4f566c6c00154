//! Curvature of the profile curve: the first integral of the bending-energy
//! Euler–Lagrange equation, its orbit classification and periodic solution.
//!
//! With `u = √κ` the first integral reads `u_s² = (4/9) u² Q(u)` where
//! `Q(u) = 16 d u³ − 9 u⁴ − c`. For `c > 0` and `d > d*` the quartic has two
//! positive simple roots `u1 < u2` and `κ` oscillates between `u1²` and `u2²`.
//!
//! Instead of integrating across the inverse square-root singularities at
//! the turning points, everything here is written in a phase variable `ψ`
//! with `u(ψ) = u1 + (u2 − u1)(1 + cos ψ)/2`, the `sin²` substitution in
//! disguise. Factoring `Q = (u − u1)(u2 − u) P(u)` turns the first integral
//! into the regular ODE `ψ_s = (2/3) u √P(u)`; one curvature period is one
//! turn of `ψ`, and `ψ = 0` sits at maximum curvature.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::{self, fd, BrentOptions, Integral, QuadOptions};
use crate::output;

/// Relative distance to `d*` below which an orbit is treated as degenerate.
pub const DEGENERATE_GUARD: f64 = 1e-6;

/// Ambient 3-dimensional space form of constant sectional curvature `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceForm {
    pub c: f64,
}

impl SpaceForm {
    pub const SPHERE: SpaceForm = SpaceForm { c: 1.0 };
    pub const EUCLIDEAN: SpaceForm = SpaceForm { c: 0.0 };
    pub const HYPERBOLIC: SpaceForm = SpaceForm { c: -1.0 };

    pub fn new(c: f64) -> Self {
        Self { c }
    }

    /// Threshold `d*` above which the curvature is periodic.
    pub fn critical_d(&self) -> Result<f64> {
        critical_d(self.c)
    }
}

/// `Q(u) = 16 d u³ − 9 u⁴ − c`.
pub fn q_poly(u: f64, d: f64, c: f64) -> f64 {
    16.0 * d * u * u * u - 9.0 * u * u * u * u - c
}

/// `d* = (27 c)^{1/4} / 4`; the maximum of `Q` (at `u = 4d/3`) vanishes there.
pub fn critical_d(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter {
            name: "c",
            value: c,
            reason: "critical d is only defined for c > 0 (no oscillatory orbit otherwise)",
        });
    }
    Ok((27.0 * c).powf(0.25) / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum OrbitClass {
    /// Periodic curvature between the turning points `u1² < u2²`.
    Oscillatory { u1: f64, u2: f64 },
    /// `Q` has a double root: constant curvature (the CMC case).
    Degenerate { u_double: f64 },
    NonPeriodic,
}

impl OrbitClass {
    fn label(&self) -> &'static str {
        match self {
            OrbitClass::Oscillatory { .. } => "oscillatory",
            OrbitClass::Degenerate { .. } => "degenerate",
            OrbitClass::NonPeriodic => "non-periodic",
        }
    }
}

fn check_d(d: f64) -> Result<()> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidParameter {
            name: "d",
            value: d,
            reason: "the first-integral constant must be positive",
        });
    }
    Ok(())
}

/// Classifies the orbit of the first integral for the constant `d`.
pub fn classify_orbit(d: f64, c: f64) -> Result<OrbitClass> {
    check_d(d)?;
    if !(c > 0.0) {
        return Ok(OrbitClass::NonPeriodic);
    }
    let d_star = critical_d(c)?;
    let rel = (d - d_star) / d_star;
    if rel.abs() < DEGENERATE_GUARD {
        return Ok(OrbitClass::Degenerate { u_double: 4.0 * d / 3.0 });
    }
    if rel < 0.0 {
        return Ok(OrbitClass::NonPeriodic);
    }
    let peak = 4.0 * d / 3.0;
    let q = |u: f64| q_poly(u, d, c);
    let opts = BrentOptions::default();
    // Q(0) = -c < 0, Q(peak) > 0, and Q < 0 beyond 16d/9.
    let u1 = numeric::brent(q, 0.0, peak, opts)?.x;
    let u2 = numeric::brent(q, peak, 16.0 * d / 9.0, opts)?.x;
    Ok(OrbitClass::Oscillatory { u1, u2 })
}

/// A periodic orbit of the first integral, evaluated through the phase `ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orbit {
    pub d: f64,
    pub c: f64,
    pub u1: f64,
    pub u2: f64,
    // Q(u) = (u - u1)(u2 - u)(9u² - lin·u - cst)
    lin: f64,
    cst: f64,
}

impl Orbit {
    pub fn new(d: f64, c: f64) -> Result<Self> {
        match classify_orbit(d, c)? {
            OrbitClass::Oscillatory { u1, u2 } => Ok(Self::from_roots(d, c, u1, u2)),
            other => Err(Error::NoPeriodicOrbit { d, c, class: other.label().into() }),
        }
    }

    pub fn from_roots(d: f64, c: f64, u1: f64, u2: f64) -> Self {
        let sum = u1 + u2;
        let lin = 16.0 * d - 9.0 * sum;
        let cst = lin * sum + 9.0 * u1 * u2;
        Self { d, c, u1, u2, lin, cst }
    }

    /// `P(u) = Q(u) / ((u − u1)(u2 − u))`, positive on `[u1, u2]`.
    pub fn deflated(&self, u: f64) -> f64 {
        9.0 * u * u - self.lin * u - self.cst
    }

    pub fn u_at(&self, phase: f64) -> f64 {
        self.u1 + (self.u2 - self.u1) * 0.5 * (1.0 + phase.cos())
    }

    /// `dψ/ds`.
    pub fn phase_rate(&self, phase: f64) -> f64 {
        let u = self.u_at(phase);
        2.0 / 3.0 * u * self.deflated(u).sqrt()
    }

    /// `(κ, dκ/ds)` at the given phase.
    pub fn curvature(&self, phase: f64) -> (f64, f64) {
        let u = self.u_at(phase);
        let rate = 2.0 / 3.0 * u * self.deflated(u).sqrt();
        (u * u, -u * (self.u2 - self.u1) * phase.sin() * rate)
    }

    /// Arclength from maximum curvature to the phase `ψ ∈ [0, π]` (or a
    /// sub-interval, when `from > 0`).
    pub fn arclength_between(&self, from: f64, to: f64) -> Result<Integral> {
        numeric::integrate(|p| 1.0 / self.phase_rate(p), from, to, QuadOptions::default())
    }

    /// Period `ρ` of the curvature together with its quadrature error.
    pub fn period_integral(&self) -> Result<Integral> {
        let half = self.arclength_between(0.0, PI)?;
        Ok(Integral { value: 2.0 * half.value, abs_error: 2.0 * half.abs_error })
    }
}

/// Relative quadrature accuracy demanded of `ρ` and `I(d)`.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;

/// Period `ρ = 3 ∫_{u1}^{u2} du / (u √Q(u))` of the curvature.
pub fn period(d: f64, c: f64) -> Result<f64> {
    let orbit = Orbit::new(d, c)?;
    let rho = orbit.period_integral()?;
    if rho.abs_error > QUADRATURE_REL_TOL * rho.value {
        return Err(Error::Quadrature { estimate: rho.abs_error, tolerance: QUADRATURE_REL_TOL * rho.value });
    }
    Ok(rho.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub s: f64,
    pub kappa: f64,
    pub kappa_s: f64,
    pub phase: f64,
}

/// One period of the curvature on a uniform arclength grid `s_i = i ρ / n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub d: f64,
    pub c: f64,
    pub u1: f64,
    pub u2: f64,
    pub rho: f64,
    pub rho_error: f64,
    pub samples: Vec<ProfileSample>,
    /// Largest first-integral residual relative to the size of its terms.
    pub prime_residual: f64,
}

/// Samples one period of `κ(s)`, starting at maximum curvature.
pub fn curvature_profile(d: f64, c: f64, n_samples: usize) -> Result<CurvatureProfile> {
    if n_samples < 16 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            value: n_samples as f64,
            reason: "at least 16 samples per period are required",
        });
    }
    let orbit = Orbit::new(d, c)?;
    let rho_int = orbit.period_integral()?;
    let rho = rho_int.value;
    let n = n_samples;
    let h = rho / n as f64;

    // Invert s(ψ) on the first half period, marching in s.
    let half = n / 2;
    let mut phases = vec![0.0; n];
    let (mut psi_prev, mut s_prev) = (0.0, 0.0);
    for (i, slot) in phases.iter_mut().enumerate().take(half + 1).skip(1) {
        let target = i as f64 * h;
        let mut psi = (psi_prev + (target - s_prev) * orbit.phase_rate(psi_prev)).min(PI);
        let mut converged = false;
        for _ in 0..50 {
            let s_here = s_prev + orbit.arclength_between(psi_prev, psi)?.value;
            let step = (s_here - target) * orbit.phase_rate(psi);
            let next = (psi - step).clamp(psi_prev, PI);
            let done = (next - psi).abs() <= 1e-15 * PI;
            psi = next;
            if done {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { what: "arclength inversion", iterations: 50 });
        }
        s_prev += orbit.arclength_between(psi_prev, psi)?.value;
        psi_prev = psi;
        *slot = psi;
    }
    for i in (half + 1)..n {
        phases[i] = 2.0 * PI - phases[n - i];
    }

    let samples: Vec<ProfileSample> = phases
        .iter()
        .enumerate()
        .map(|(i, &phase)| {
            let (kappa, kappa_s) = orbit.curvature(phase);
            ProfileSample { s: i as f64 * h, kappa, kappa_s, phase }
        })
        .collect();

    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for p in &samples {
        let k = p.kappa;
        let rhs = 16.0 / 9.0 * k * k * (16.0 * d * k.powf(1.5) - 9.0 * k * k - c);
        worst = worst.max((p.kappa_s * p.kappa_s - rhs).abs());
        scale = scale.max(16.0 / 9.0 * k * k * (16.0 * d * k.powf(1.5) + 9.0 * k * k + c.abs()));
    }

    Ok(CurvatureProfile {
        d,
        c,
        u1: orbit.u1,
        u2: orbit.u2,
        rho,
        rho_error: rho_int.abs_error,
        samples,
        prime_residual: worst / scale,
    })
}

/// Fourth-order differences of sharply peaked profiles need fine grids.
/// Doubles the sample count from `min_samples` until the Euler–Lagrange
/// residual drops below `el_tol` or `max_samples` is reached, and returns
/// the last profile with its residual.
pub fn resolved_profile(
    d: f64,
    c: f64,
    min_samples: usize,
    max_samples: usize,
    el_tol: f64,
) -> Result<(CurvatureProfile, f64)> {
    let mut n = min_samples;
    loop {
        let profile = curvature_profile(d, c, n)?;
        let el = profile.euler_lagrange_residual()?;
        if el < el_tol || n >= max_samples {
            return Ok((profile, el));
        }
        n = (2 * n).min(max_samples);
    }
}

impl CurvatureProfile {
    pub fn orbit(&self) -> Orbit {
        Orbit::from_roots(self.d, self.c, self.u1, self.u2)
    }

    pub fn kappa_max(&self) -> f64 {
        self.samples.iter().map(|p| p.kappa).fold(f64::MIN, f64::max)
    }

    pub fn kappa_min(&self) -> f64 {
        self.samples.iter().map(|p| p.kappa).fold(f64::MAX, f64::min)
    }

    /// Residual of `κ^{3/4} (κ^{-3/4})'' − 3κ² + c = 0` with the second
    /// derivative from periodic fourth-order differences, relative to `max κ²`.
    pub fn euler_lagrange_residual(&self) -> Result<f64> {
        let h = self.rho / self.samples.len() as f64;
        let w: Vec<f64> = self.samples.iter().map(|p| p.kappa.powf(-0.75)).collect();
        let w2 = fd::deriv2(&w, h, true)?;
        let kmax = self.kappa_max();
        Ok(self
            .samples
            .iter()
            .zip(&w2)
            .map(|(p, w2)| (p.kappa.powf(0.75) * w2 - 3.0 * p.kappa * p.kappa + self.c).abs())
            .fold(0.0, f64::max)
            / (kmax * kmax))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        output::write_csv(path, &["s", "kappa"], self.samples.iter().map(|p| vec![p.s, p.kappa]))
    }
}
