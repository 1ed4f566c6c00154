//! Reconstruction of profile curves from their curvature.
//!
//! On the unit sphere the curve solves the Frenet system
//! `γ' = T`, `T' = −γ + κ(s) γ×T`, with the curvature evaluated through the
//! orbit phase so that no interpolation of sampled data is involved. The
//! rotation axis is recovered a posteriori from the Killing field along the
//! curve and the curve is then rotated so that the axis becomes `e₃`.
//!
//! Planar profiles in `R³` live in the `xz`-plane: points are `(x, 0, z)`.

use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::curvature::{CurvatureProfile, Orbit};
use crate::error::{Error, Result};
use crate::numeric::{self, Dopri5, QuadOptions};
use crate::output;

/// Local tolerance of the Frenet integrator.
pub const FRENET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ambient {
    /// Unit sphere in `R³`.
    Sphere2,
    /// The `xz`-plane of `R³`.
    Plane2,
}

/// Samples of a regular curve together with its unit tangent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    pub ambient: Ambient,
    /// Grid parameter; uniform, and equal to arclength on the sphere.
    pub params: Vec<f64>,
    pub arclengths: Vec<f64>,
    pub points: Vec<[f64; 3]>,
    pub tangents: Vec<[f64; 3]>,
    /// Geodesic curvature `κ > 0` and `dκ/ds` (sphere curves only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curvature: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curvature_rate: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phases: Vec<f64>,
    /// True once the rotation axis has been moved to `e₃`.
    pub aligned: bool,
}

/// Curvature as a function of a phase variable with known rate `dψ/ds`.
pub trait CurvatureLaw: Sync {
    fn phase_rate(&self, phase: f64) -> f64;
    /// `(κ, dκ/ds)`.
    fn curvature(&self, phase: f64) -> (f64, f64);
}

impl CurvatureLaw for Orbit {
    fn phase_rate(&self, phase: f64) -> f64 {
        Orbit::phase_rate(self, phase)
    }

    fn curvature(&self, phase: f64) -> (f64, f64) {
        Orbit::curvature(self, phase)
    }
}

/// Constant geodesic curvature; zero gives a great circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCurvature(pub f64);

impl CurvatureLaw for ConstantCurvature {
    fn phase_rate(&self, _: f64) -> f64 {
        0.0
    }

    fn curvature(&self, _: f64) -> (f64, f64) {
        (self.0, 0.0)
    }
}

/// Point, tangent and orbit phase at one arclength value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereState {
    pub gamma: [f64; 3],
    pub tangent: [f64; 3],
    pub phase: f64,
}

impl SphereState {
    /// `γ = e₁`, `T = e₂`, at maximum curvature.
    pub const START: SphereState = SphereState { gamma: [1.0, 0.0, 0.0], tangent: [0.0, 1.0, 0.0], phase: 0.0 };
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Integrates the Frenet system through the grid `s_grid` (strictly
/// monotone, either direction), starting from `start` at `s_grid[0]`.
pub fn integrate_law_on_sphere<L: CurvatureLaw>(law: &L, start: SphereState, s_grid: &[f64]) -> Result<SampledCurve> {
    if s_grid.len() < 2 {
        return Err(Error::EmptyDomain("arclength grid needs at least two points".into()));
    }
    let dir = (s_grid[1] - s_grid[0]).signum();
    if dir == 0.0 || s_grid.windows(2).any(|w| (w[1] - w[0]) * dir <= 0.0) {
        return Err(Error::InvalidParameter { name: "s_grid", value: s_grid[0], reason: "grid must be strictly monotone" });
    }

    let rhs = |_: f64, y: &[f64; 7]| {
        let g = [y[0], y[1], y[2]];
        let t = [y[3], y[4], y[5]];
        let (k, _) = law.curvature(y[6]);
        let n = cross(g, t);
        [t[0], t[1], t[2], -g[0] + k * n[0], -g[1] + k * n[1], -g[2] + k * n[2], law.phase_rate(y[6])]
    };
    let project = |y: &mut [f64; 7]| {
        let gn = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        for v in &mut y[0..3] {
            *v /= gn;
        }
        let gt = y[0] * y[3] + y[1] * y[4] + y[2] * y[5];
        for i in 0..3 {
            y[3 + i] -= gt * y[i];
        }
        let tn = (y[3] * y[3] + y[4] * y[4] + y[5] * y[5]).sqrt();
        for v in &mut y[3..6] {
            *v /= tn;
        }
    };

    let mut y = [
        start.gamma[0],
        start.gamma[1],
        start.gamma[2],
        start.tangent[0],
        start.tangent[1],
        start.tangent[2],
        start.phase,
    ];
    project(&mut y);
    let mut solver = Dopri5::new(FRENET_TOL, FRENET_TOL);
    let n = s_grid.len();
    let mut curve = SampledCurve {
        ambient: Ambient::Sphere2,
        params: s_grid.to_vec(),
        arclengths: s_grid.to_vec(),
        points: Vec::with_capacity(n),
        tangents: Vec::with_capacity(n),
        curvature: Vec::with_capacity(n),
        curvature_rate: Vec::with_capacity(n),
        phases: Vec::with_capacity(n),
        aligned: false,
    };
    for (k, &s) in s_grid.iter().enumerate() {
        if k > 0 {
            solver.integrate(&rhs, s_grid[k - 1], &mut y, s, project)?;
        }
        let (kappa, kappa_s) = law.curvature(y[6]);
        curve.points.push([y[0], y[1], y[2]]);
        curve.tangents.push([y[3], y[4], y[5]]);
        curve.curvature.push(kappa);
        curve.curvature_rate.push(kappa_s);
        curve.phases.push(y[6]);
    }
    Ok(curve)
}

fn uniform_grid(length: f64, n_intervals: usize) -> Vec<f64> {
    (0..=n_intervals).map(|k| length * k as f64 / n_intervals as f64).collect()
}

/// Reconstructs `n_periods` periods of the profile on the unit sphere,
/// sampled at `samples_per_period` intervals per period. The returned curve
/// includes both endpoints, so it has `n_periods · samples_per_period + 1`
/// samples.
pub fn integrate_on_sphere(
    profile: &CurvatureProfile,
    n_periods: usize,
    samples_per_period: usize,
) -> Result<SampledCurve> {
    if profile.c != 1.0 {
        return Err(Error::Unsupported(format!("sphere reconstruction needs c = 1, got c = {}", profile.c)));
    }
    if n_periods == 0 {
        return Err(Error::InvalidParameter { name: "n_periods", value: 0.0, reason: "must be at least 1" });
    }
    if samples_per_period < 4 {
        return Err(Error::InvalidParameter {
            name: "samples_per_period",
            value: samples_per_period as f64,
            reason: "must be at least 4",
        });
    }
    let grid = uniform_grid(profile.rho * n_periods as f64, n_periods * samples_per_period);
    integrate_law_on_sphere(&profile.orbit(), SphereState::START, &grid)
}

/// Like [`integrate_on_sphere`], but sampled uniformly in the orbit phase
/// `ψ` instead of arclength: `params` holds `ψ` and the samples cluster
/// where the curvature is large. The arclength of each sample comes from
/// quadrature of `ds/dψ`.
pub fn integrate_on_sphere_by_phase(
    profile: &CurvatureProfile,
    n_periods: usize,
    samples_per_period: usize,
) -> Result<SampledCurve> {
    if profile.c != 1.0 {
        return Err(Error::Unsupported(format!("sphere reconstruction needs c = 1, got c = {}", profile.c)));
    }
    if n_periods == 0 || samples_per_period < 4 {
        return Err(Error::InvalidParameter {
            name: "samples_per_period",
            value: samples_per_period as f64,
            reason: "need at least one period and four samples per period",
        });
    }
    let orbit = profile.orbit();
    let step = 2.0 * PI / samples_per_period as f64;
    let mut within = vec![0.0; samples_per_period + 1];
    for k in 1..=samples_per_period {
        within[k] = within[k - 1] + orbit.arclength_between((k - 1) as f64 * step, k as f64 * step)?.value;
    }
    let rho = within[samples_per_period];
    let total = n_periods * samples_per_period;
    let grid: Vec<f64> = (0..=total)
        .map(|k| (k / samples_per_period) as f64 * rho + within[k % samples_per_period])
        .collect();
    let mut curve = integrate_law_on_sphere(&orbit, SphereState::START, &grid)?;
    curve.params = (0..=total).map(|k| k as f64 * step).collect();
    Ok(curve)
}

/// Circle of constant geodesic curvature `k0` through `e₁` with tangent `e₂`.
pub fn integrate_constant_on_sphere(k0: f64, length: f64, n_intervals: usize) -> Result<SampledCurve> {
    if !(length > 0.0) || n_intervals == 0 {
        return Err(Error::EmptyDomain(format!("length {length} with {n_intervals} intervals")));
    }
    integrate_law_on_sphere(&ConstantCurvature(k0), SphereState::START, &uniform_grid(length, n_intervals))
}

impl SampledCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn end_state(&self) -> Option<SphereState> {
        let k = self.len().checked_sub(1)?;
        Some(SphereState { gamma: self.points[k], tangent: self.tangents[k], phase: *self.phases.get(k)? })
    }

    /// `max ||γ| − 1|` and `max |⟨γ, T⟩|` (sphere), plus `max ||T| − 1|`.
    pub fn constraint_drift(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.tangents)
            .map(|(&g, &t)| {
                let radial = if self.ambient == Ambient::Sphere2 { (norm(g) - 1.0).abs().max(dot(g, t).abs()) } else { 0.0 };
                radial.max((norm(t) - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }

    /// `|γ(end) − γ(0)| + |T(end) − T(0)|`.
    pub fn closure_defect(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(&p0), Some(&p1)) => {
                norm(sub(p1, p0)) + norm(sub(*self.tangents.last().unwrap(), self.tangents[0]))
            }
            _ => f64::NAN,
        }
    }

    /// Rotates the curve so that `axis` (unit) becomes `e₃` and the first
    /// point lands in the half-plane `y = 0, x > 0`.
    pub fn aligned_to(&self, axis: [f64; 3]) -> Result<SampledCurve> {
        let a = Vector3::from(axis).normalize();
        let p0 = Vector3::from(self.points[0]);
        let mut e1 = p0 - a * a.dot(&p0);
        if e1.norm() < 1e-12 {
            e1 = a.cross(&Vector3::x());
            if e1.norm() < 1e-12 {
                e1 = a.cross(&Vector3::y());
            }
        }
        let e1 = e1.normalize();
        let e2 = a.cross(&e1);
        let rot = Matrix3::from_rows(&[e1.transpose(), e2.transpose(), a.transpose()]);
        let apply = |v: &[f64; 3]| {
            let w = rot * Vector3::from(*v);
            [w.x, w.y, w.z]
        };
        let mut out = self.clone();
        out.points = self.points.iter().map(apply).collect();
        out.tangents = self.tangents.iter().map(apply).collect();
        out.aligned = true;
        Ok(out)
    }

    /// Unwrapped azimuth about `e₃`.
    pub fn azimuth(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let mut prev: Option<f64> = None;
        for p in &self.points {
            let raw = p[1].atan2(p[0]);
            let value = match prev {
                None => raw,
                Some(q) => {
                    let mut step = raw - q.rem_euclid(2.0 * PI);
                    step -= 2.0 * PI * (step / (2.0 * PI)).round();
                    q + step
                }
            };
            out.push(value);
            prev = Some(value);
        }
        out
    }

    /// CSV with columns `s, x, y, z, Tx, Ty, Tz`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        output::write_csv(
            path,
            &["s", "x", "y", "z", "Tx", "Ty", "Tz"],
            self.arclengths
                .iter()
                .zip(&self.points)
                .zip(&self.tangents)
                .map(|((&s, p), t)| vec![s, p[0], p[1], p[2], t[0], t[1], t[2]]),
        )
    }
}

/// Rotation axis fitted to the Killing field along a sphere curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KillingFit {
    /// Unit axis; the curve turns positively about it.
    pub axis: [f64; 3],
    /// `|a|`, equal to `√d` for biconservative profiles.
    pub strength: f64,
    /// `max |J − a×γ| / max |J|`.
    pub residual: f64,
}

/// `J = −¾ κ^{1/4} T − (3/16) κ^{−7/4} κ_s N` with `N = γ×T`.
pub fn killing_field(gamma: [f64; 3], tangent: [f64; 3], kappa: f64, kappa_s: f64) -> [f64; 3] {
    let n = cross(gamma, tangent);
    let a = -0.75 * kappa.powf(0.25);
    let b = -3.0 / 16.0 * kappa.powf(-1.75) * kappa_s;
    [a * tangent[0] + b * n[0], a * tangent[1] + b * n[1], a * tangent[2] + b * n[2]]
}

/// Least-squares fit of a constant `a` with `J(sᵢ) ≈ a × γ(sᵢ)`.
pub fn fit_rotation(points: &[[f64; 3]], fields: &[[f64; 3]]) -> Result<([f64; 3], f64)> {
    let mut m = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for (&g, &j) in points.iter().zip(fields) {
        let gv = Vector3::from(g);
        m += Matrix3::identity() - gv * gv.transpose();
        rhs += gv.cross(&Vector3::from(j));
    }
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    if !(svd.singular_values.min() > 1e-10 * smax) {
        return Err(Error::AxisAmbiguous("least-squares system for the rotation vector is singular"));
    }
    let a = svd.solve(&rhs, 0.0).map_err(|_| Error::AxisAmbiguous("least-squares solve failed"))?;
    let jmax = fields.iter().map(|&j| norm(j)).fold(0.0, f64::max);
    let worst = points
        .iter()
        .zip(fields)
        .map(|(&g, &j)| (Vector3::from(j) - a.cross(&Vector3::from(g))).norm())
        .fold(0.0, f64::max);
    Ok(([a.x, a.y, a.z], if jmax > 0.0 { worst / jmax } else { worst }))
}

pub fn killing_axis(curve: &SampledCurve) -> Result<KillingFit> {
    if curve.ambient != Ambient::Sphere2 || curve.curvature.len() != curve.len() {
        return Err(Error::Unsupported("Killing fit needs a sphere curve with curvature samples".into()));
    }
    if curve.curvature.iter().any(|&k| !(k > 0.0)) {
        return Err(Error::AxisAmbiguous("curvature vanishes somewhere (geodesic arc)"));
    }
    let fields: Vec<[f64; 3]> = (0..curve.len())
        .map(|i| killing_field(curve.points[i], curve.tangents[i], curve.curvature[i], curve.curvature_rate[i]))
        .collect();
    let (a, residual) = fit_rotation(&curve.points, &fields)?;
    let strength = norm(a);
    if !(strength > 0.0) {
        return Err(Error::AxisAmbiguous("vanishing rotation vector"));
    }
    Ok(KillingFit { axis: [-a[0] / strength, -a[1] / strength, -a[2] / strength], strength, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureDiagnostics {
    pub defect: f64,
    pub winding: i64,
    /// Total unwrapped azimuth increase about the axis.
    pub delta_theta: f64,
    /// `|Δθ/2π − winding|`.
    pub winding_error: f64,
    pub axis: [f64; 3],
    pub killing_residual: f64,
}

/// Fits the axis, aligns it to `e₃` and measures closure and winding.
pub fn closure_diagnostics(curve: &SampledCurve) -> Result<ClosureDiagnostics> {
    if curve.ambient != Ambient::Sphere2 {
        return Err(Error::Unsupported("closure diagnostics need a sphere curve".into()));
    }
    let fit = killing_axis(curve)?;
    let aligned = curve.aligned_to(fit.axis)?;
    let theta = aligned.azimuth();
    let delta_theta = theta.last().unwrap() - theta[0];
    let turns = delta_theta / (2.0 * PI);
    let winding = turns.round() as i64;
    Ok(ClosureDiagnostics {
        defect: curve.closure_defect(),
        winding,
        delta_theta,
        winding_error: (turns - winding as f64).abs(),
        axis: fit.axis,
        killing_residual: fit.residual,
    })
}

/// Which slope law to use for the Euclidean profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileLaw {
    /// `dz/dx = C x^{1/3} / √(x^{2/3} − C²)`.
    #[default]
    AsStated,
    /// `dz/dx = C / √(x^{2/3} − C²)`, whose surface of revolution satisfies
    /// `3λ₁ + λ₂ = 0`.
    Weingarten,
}

/// `dz/dx` at `x > C³`.
pub fn profile_slope(law: ProfileLaw, c: f64, x: f64) -> f64 {
    let root = (x.cbrt().powi(2) - c * c).sqrt();
    match law {
        ProfileLaw::AsStated => c * x.cbrt() / root,
        ProfileLaw::Weingarten => c / root,
    }
}

/// Planar curve `t ↦ (x(t), 0, z(t))` sampled at `n` uniform parameter
/// values on `[t0, t1]`; `eval` returns `(x, z, x', z')`.
pub fn planar_curve(t0: f64, t1: f64, n: usize, eval: impl Fn(f64) -> (f64, f64, f64, f64)) -> Result<SampledCurve> {
    if n < 2 || !(t1 > t0) {
        return Err(Error::EmptyDomain(format!("parameter interval [{t0}, {t1}] with {n} samples")));
    }
    let params: Vec<f64> = (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect();
    let speed = |t: f64| {
        let (_, _, xp, zp) = eval(t);
        xp.hypot(zp)
    };
    let mut arclengths = vec![0.0; n];
    for k in 1..n {
        arclengths[k] = arclengths[k - 1] + numeric::integrate(speed, params[k - 1], params[k], QuadOptions::default())?.value;
    }
    let mut points = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    for &t in &params {
        let (x, z, xp, zp) = eval(t);
        let v = xp.hypot(zp);
        if !(v > 0.0) {
            return Err(Error::InvalidParameter { name: "t", value: t, reason: "parametrization is singular" });
        }
        points.push([x, 0.0, z]);
        tangents.push([xp / v, 0.0, zp / v]);
    }
    Ok(SampledCurve {
        ambient: Ambient::Plane2,
        params,
        arclengths,
        points,
        tangents,
        curvature: Vec::new(),
        curvature_rate: Vec::new(),
        phases: Vec::new(),
        aligned: true,
    })
}

/// Profile `(x, z(x))` for `x ∈ [C³, x_max]` with `z(C³) = 0`, sampled
/// uniformly in `t` where `x = (C² + t²)^{3/2}`; `z` is integrated
/// numerically in `t`, where the vertical tangent at `x = C³` is regular.
pub fn euclidean_profile_with(law: ProfileLaw, c: f64, x_max: f64, n_samples: usize) -> Result<SampledCurve> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter { name: "C", value: c, reason: "must be positive" });
    }
    if !(x_max > c * c * c) {
        return Err(Error::EmptyDomain(format!("x_max = {x_max} must exceed C³ = {}", c * c * c)));
    }
    if n_samples < 2 {
        return Err(Error::InvalidParameter { name: "n_samples", value: n_samples as f64, reason: "need at least two" });
    }
    let t_max = (x_max.cbrt().powi(2) - c * c).sqrt();
    let dz = move |t: f64| {
        let w = (c * c + t * t).sqrt();
        match law {
            ProfileLaw::AsStated => 3.0 * c * w * w,
            ProfileLaw::Weingarten => 3.0 * c * w,
        }
    };
    let params: Vec<f64> = (0..n_samples).map(|k| t_max * k as f64 / (n_samples - 1) as f64).collect();
    let mut z = vec![0.0; n_samples];
    for k in 1..n_samples {
        z[k] = z[k - 1] + numeric::integrate(dz, params[k - 1], params[k], QuadOptions::default())?.value;
    }
    let mut curve = planar_curve(0.0, t_max, n_samples, |t| {
        let w = (c * c + t * t).sqrt();
        (w * w * w, 0.0, 3.0 * t * w, dz(t))
    })?;
    curve.params = params;
    for (p, zk) in curve.points.iter_mut().zip(z) {
        p[2] = zk;
    }
    Ok(curve)
}

/// The profile with the slope law as stated, `dz/dx = C x^{1/3}/√(x^{2/3} − C²)`.
pub fn euclidean_profile(c: f64, x_max: f64, n_samples: usize) -> Result<SampledCurve> {
    euclidean_profile_with(ProfileLaw::AsStated, c, x_max, n_samples)
}
