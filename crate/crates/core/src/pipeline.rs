//! End-to-end construction of the closed surface for an admissible `(m, n)`,
//! and reference surfaces with known curvature for validating the certifier.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::closure::{solve_closure, ClosureSolution};
use crate::curvature::{curvature_profile, CurvatureProfile};
use crate::curve::{
    closure_diagnostics, integrate_constant_on_sphere, integrate_on_sphere, integrate_on_sphere_by_phase, planar_curve,
    ClosureDiagnostics, SampledCurve,
};
use crate::error::{Error, Result};
use crate::surface::{revolve_in_r3, revolve_in_s3, SurfaceMesh};

/// How the closed profile is sampled along the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Uniform in the orbit phase; concentrates samples where `κ` is large.
    #[default]
    Phase,
    /// Uniform in arclength.
    Arclength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceOptions {
    pub tol: f64,
    pub sampling: Sampling,
    pub samples_per_period: usize,
    pub n_theta: usize,
    /// Samples of the stored one-period profile.
    pub profile_samples: usize,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        Self { tol: 1e-10, sampling: Sampling::Phase, samples_per_period: 128, n_theta: 256, profile_samples: 256 }
    }
}

#[derive(Debug, Clone)]
pub struct ClosedSurface {
    pub solution: ClosureSolution,
    pub profile: CurvatureProfile,
    pub diagnostics: ClosureDiagnostics,
    /// Closed profile with the rotation axis moved to `e₃`.
    pub curve: SampledCurve,
    pub mesh: SurfaceMesh,
}

/// Solves the closure condition, reconstructs `m` periods of the profile on
/// the unit sphere and rotates it into a closed mesh in `S³`.
pub fn closed_surface(m: u64, n: u64, opts: &SurfaceOptions) -> Result<ClosedSurface> {
    let solution = solve_closure(m, n, opts.tol)?;
    let profile = curvature_profile(solution.d, 1.0, opts.profile_samples)?;
    let periods = usize::try_from(m).map_err(|_| Error::Unsupported(format!("m = {m} is too large")))?;
    let raw = match opts.sampling {
        Sampling::Phase => integrate_on_sphere_by_phase(&profile, periods, opts.samples_per_period)?,
        Sampling::Arclength => integrate_on_sphere(&profile, periods, opts.samples_per_period)?,
    };
    let diagnostics = closure_diagnostics(&raw)?;
    let curve = raw.aligned_to(diagnostics.axis)?;
    let mut mesh = revolve_in_s3(&curve, opts.n_theta, true)?;
    mesh.metadata.insert("d".into(), serde_json::json!(solution.d));
    mesh.metadata.insert("c".into(), serde_json::json!(1.0));
    mesh.metadata.insert("m".into(), serde_json::json!(m));
    mesh.metadata.insert("n".into(), serde_json::json!(n));
    Ok(ClosedSurface { solution, profile, diagnostics, curve, mesh })
}

/// Round sphere of radius `r` in `R³`, without polar caps of angle `cap`.
pub fn sphere_r3(r: f64, cap: f64, n_s: usize, n_theta: usize) -> Result<SurfaceMesh> {
    let curve = planar_curve(cap, PI - cap, n_s, |t| (r * t.sin(), r * t.cos(), r * t.cos(), -r * t.sin()))?;
    revolve_in_r3(&curve, n_theta)
}

/// The cone `(z − 1)² = x² + y²` for `x² + y² ∈ [ρ₀², ρ₁²]`.
pub fn cone_r3(rho0: f64, rho1: f64, n_s: usize, n_theta: usize) -> Result<SurfaceMesh> {
    let curve = planar_curve(rho0, rho1, n_s, |t| (t, 1.0 - t, 1.0, -1.0))?;
    revolve_in_r3(&curve, n_theta)
}

/// Flat torus in `S³` swept by a circle of geodesic curvature `k0 > 0`; its
/// distance to the rotation plane is `1/√(1 + k0²)`. `k0 = 1` is the minimal
/// Clifford torus.
pub fn flat_torus_s3(k0: f64, n_s: usize, n_theta: usize) -> Result<SurfaceMesh> {
    if !(k0 > 0.0) {
        return Err(Error::InvalidParameter { name: "k0", value: k0, reason: "must be positive" });
    }
    let length = 2.0 * PI / (1.0 + k0 * k0).sqrt();
    let circle = integrate_constant_on_sphere(k0, length, n_s)?;
    let diag = closure_diagnostics(&circle)?;
    revolve_in_s3(&circle.aligned_to(diag.axis)?, n_theta, true)
}
