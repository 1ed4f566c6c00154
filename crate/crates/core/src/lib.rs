//! Closed non-CMC biconservative surfaces in the round 3-sphere.
//!
//! The pipeline goes from the curvature of the profile curve to a certified
//! surface mesh:
//!
//! 1. [`curvature`]: periodic solutions `κ(s)` of the first integral of the
//!    bending-energy Euler–Lagrange equation, and their period `ρ`.
//! 2. [`closure`]: the progression angle `I(d)` and the search for `d`
//!    with `I(d) = 2πn/m`, which closes the profile curve after `m` periods.
//! 3. [`curve`]: Frenet integration of the profile on the unit 2-sphere,
//!    closure and winding diagnostics, and the rotation axis recovered from
//!    the Killing field along the curve.
//! 4. [`surface`]: rotation of the profile in `S³ ⊂ R⁴` (or `R³`),
//!    stereographic projection and OBJ/CSV/JSON export.
//! 5. [`certify`]: finite-difference fundamental forms and residuals of the
//!    biconservative equation, the Weingarten relation `3λ₁ + λ₂ = 0`, the
//!    Hopf-function identity and the stress-bienergy tensor.
//! 6. [`canonical`]: closed-form checks of the classical biharmonic
//!    hypersurfaces in spheres.
//!
//! [`pipeline`] chains steps 2–4 for a given `(m, n)` and provides reference
//! surfaces (sphere, cone, flat tori) for validating the certifier.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod certify;
pub mod closure;
pub mod curvature;
pub mod curve;
pub mod error;
pub mod numeric;
pub mod output;
pub mod pipeline;
pub mod surface;

pub use canonical::{
    biharmonic_check, spectrum_b1, spectrum_b2, spectrum_lawson, BiharmonicReport, CurvatureSpectrum, Verdict,
};
pub use certify::{certify, fundamental_forms, CertConfig, CertReport, GeometrySamples};
pub use closure::{enumerate_pairs, progression_angle, solve_closure, sweep, ClosureSolution, SweepReport};
pub use curvature::{
    classify_orbit, critical_d, curvature_profile, period, q_poly, resolved_profile, CurvatureProfile, Orbit, OrbitClass, SpaceForm,
};
pub use curve::{
    closure_diagnostics, euclidean_profile, euclidean_profile_with, integrate_on_sphere, killing_axis, Ambient,
    ClosureDiagnostics, KillingFit, ProfileLaw, SampledCurve,
};
pub use error::{Error, Result};
pub use pipeline::{closed_surface, ClosedSurface, Sampling, SurfaceOptions};
pub use surface::{export_mesh, revolve_in_r3, revolve_in_s3, stereographic_project, MeshFormat, SurfaceMesh};
