use std::path::PathBuf;

/// Errors produced by the construction and certification pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("no periodic orbit at d = {d}, c = {c} ({class})")]
    NoPeriodicOrbit { d: f64, c: f64, class: String },

    #[error(
        "pair (m, n) = ({m}, {n}) is not admissible: target 2πn/m = {target:.12} is not strictly \
         inside (π, √2π) = ({lo:.12}, {hi:.12}){note}"
    )]
    Inadmissible {
        m: u64,
        n: u64,
        target: f64,
        lo: f64,
        hi: f64,
        note: String,
    },

    #[error("root not bracketed: f({a}) = {fa}, f({b}) = {fb}")]
    NotBracketed { a: f64, fa: f64, b: f64, fb: f64 },

    #[error("bracket search failed for target {target}; sampled (d, I(d)) = {samples:?}")]
    BracketSearch {
        target: f64,
        samples: Vec<(f64, f64)>,
    },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("rotation axis is ambiguous: {0}")]
    AxisAmbiguous(&'static str),

    #[error("curve is not aligned with the third coordinate axis; run closure diagnostics and align first")]
    NotAligned,

    #[error("curve does not close: defect {defect:e}")]
    NotClosed { defect: f64 },

    #[error("vertex {index} (grid {i}, {j}) collides with the projection pole")]
    PoleCollision { index: usize, i: usize, j: usize },

    #[error("degenerate metric at grid vertex ({i}, {j})")]
    DegenerateMetric { i: usize, j: usize },

    #[error("profile touches the rotation axis at sample {index} (radius {radius:e})")]
    AxisCollision { index: usize, radius: f64 },

    #[error("empty domain: {0}")]
    EmptyDomain(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
