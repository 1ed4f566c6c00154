//! Finite-difference certification of surfaces on an `(s, θ)` grid.
//!
//! All derivatives are fourth-order differences, periodic across closed
//! seams and one-sided at open edges. Vectors are reported in the
//! orthonormal frame `e₁ = X_s/|X_s|`, `e₂ ⟂ e₁`. With `b` the second
//! fundamental form for the chosen unit normal `η` and `A` the shape
//! operator, `f = tr A / 2` and the normal is flipped so that `f ≥ 0`.
//!
//! Residuals:
//! - biconservative: `|A(∇f) + f∇f| / Λ³`, `Λ = max |λ|`;
//! - Weingarten: `|3λ₁ + λ₂| / max(|λ₁|, |λ₂|)` where `∇f` is significant,
//!   with `λ₁` the principal curvature along `∇f`;
//! - Hopf: `4∂_z̄ Q` against `λ²(⟨A∇f, ∂x⟩ − i⟨A∇f, ∂y⟩)` in isothermal
//!   coordinates `x = ∫√(E/G) ds`, `y = θ` of a rotational surface;
//! - stress: `S₂ = −2f² g + 4f b`, its trace against `4f²`, and its
//!   divergence through the Christoffel symbols of the discrete metric;
//! - Gauss: intrinsic `K` (Brioschi) against `λ₁λ₂ + c`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Grid2;
use crate::output;
use crate::surface::SurfaceMesh;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertConfig {
    /// Generic finite-difference tolerance (Gauss, self-adjointness, stress
    /// divergence, vanishing of `∂_z̄ Q`).
    pub fd_tol: f64,
    pub biconservative_tol: f64,
    pub weingarten_tol: f64,
    pub hopf_mismatch_tol: f64,
    pub trace_tol: f64,
    /// Largest angle (radians) between `∇f` and the `λ₁` direction.
    pub alignment_tol: f64,
    /// `∇f` is significant where `|∇f| ≥ max(rel · max|∇f|, abs · Λ²)`.
    pub grad_mask_rel: f64,
    pub grad_mask_abs: f64,
}

impl Default for CertConfig {
    fn default() -> Self {
        Self {
            fd_tol: 1e-3,
            biconservative_tol: 1e-3,
            weingarten_tol: 1e-3,
            hopf_mismatch_tol: 1e-2,
            trace_tol: 1e-12,
            alignment_tol: 1e-2,
            grad_mask_rel: 1e-3,
            grad_mask_abs: 1e-4,
        }
    }
}

impl CertConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("fd_tol", self.fd_tol),
            ("biconservative_tol", self.biconservative_tol),
            ("weingarten_tol", self.weingarten_tol),
            ("hopf_mismatch_tol", self.hopf_mismatch_tol),
            ("trace_tol", self.trace_tol),
            ("alignment_tol", self.alignment_tol),
            ("grad_mask_rel", self.grad_mask_rel),
            ("grad_mask_abs", self.grad_mask_abs),
        ];
        for (name, value) in all {
            if !(value > 0.0) {
                return Err(Error::InvalidParameter { name, value, reason: "tolerances must be positive" });
            }
        }
        Ok(())
    }
}

/// Per-vertex differential geometry, row-major over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySamples {
    pub n_s: usize,
    pub n_theta: usize,
    /// Sectional curvature of the ambient space.
    pub c: f64,
    /// `(E, F, G)`.
    pub metric: Vec<[f64; 3]>,
    /// `(e, f₂, g₂)` for the oriented normal.
    pub second: Vec<[f64; 3]>,
    /// `|⟨X_sθ − X_θs, η⟩|` from the two orders of differentiation.
    pub mixed_asymmetry: Vec<f64>,
    /// Shape operator in the orthonormal frame.
    pub shape: Vec<[[f64; 2]; 2]>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    /// Unit `λ₁` eigendirection in the orthonormal frame.
    pub dir1: Vec<[f64; 2]>,
    pub mean: Vec<f64>,
    /// `(∂_s f, ∂_θ f)`.
    pub grad_param: Vec<[f64; 2]>,
    /// `∇f` in the orthonormal frame.
    pub grad: Vec<[f64; 2]>,
    /// Whether `∇f` is significant at the vertex.
    pub unmasked: Vec<bool>,
    /// Angle between `∇f` and the `λ₁` direction (NaN where masked).
    pub alignment: Vec<f64>,
    /// Intrinsic Gauss curvature.
    pub gauss: Vec<f64>,
    /// `Γ^l_{ij}` indexed `[l][i][j]`.
    pub christoffel: Vec<[[[f64; 2]; 2]; 2]>,
    /// `Λ = max |λ|`.
    pub scale: f64,
    /// `max |∇f|`.
    pub grad_max: f64,
    pub hs: f64,
    pub ht: f64,
    pub periodic_s: bool,
    pub periodic_t: bool,
}

impl GeometrySamples {
    pub fn grid(&self) -> Grid2 {
        Grid2 {
            ns: self.n_s,
            nt: self.n_theta,
            hs: self.hs,
            ht: self.ht,
            periodic_s: self.periodic_s,
            periodic_t: self.periodic_t,
        }
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Fraction of vertices where `∇f` is masked.
    pub fn masked_fraction(&self) -> f64 {
        self.unmasked.iter().filter(|u| !**u).count() as f64 / self.len().max(1) as f64
    }
}

fn uniform_step(values: &[f64], name: &'static str) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::EmptyDomain(format!("{name} grid has fewer than two values")));
    }
    let h = (values[values.len() - 1] - values[0]) / (values.len() - 1) as f64;
    let ok = values.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    if !ok || !(h > 0.0) {
        return Err(Error::InvalidParameter { name, value: h, reason: "grid must be uniform and increasing" });
    }
    Ok(h)
}

fn dotn(a: &[f64; 4], b: &[f64; 4], n: usize) -> f64 {
    (0..n).map(|k| a[k] * b[k]).sum()
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Unit normal orthogonal to the given vectors (two in `R³`, three in `R⁴`).
fn normal(vectors: &[[f64; 4]], dim: usize) -> [f64; 4] {
    let mut n = [0.0; 4];
    if dim == 3 {
        let (a, b) = (vectors[0], vectors[1]);
        n[0] = a[1] * b[2] - a[2] * b[1];
        n[1] = a[2] * b[0] - a[0] * b[2];
        n[2] = a[0] * b[1] - a[1] * b[0];
    } else {
        for (k, slot) in n.iter_mut().enumerate() {
            let cols: Vec<usize> = (0..4).filter(|&c| c != k).collect();
            let m = [0, 1, 2].map(|r| [0, 1, 2].map(|c| vectors[r][cols[c]]));
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *slot = sign * det3(m);
        }
    }
    let len = dotn(&n, &n, dim).sqrt();
    n.map(|x| x / len)
}

/// Symmetric 2×2 eigen-decomposition: `(λ₋, λ₊, v₊)`.
fn eig_sym(m: [[f64; 2]; 2]) -> (f64, f64, [f64; 2]) {
    let mid = 0.5 * (m[0][0] + m[1][1]);
    let half = 0.5 * (m[0][0] - m[1][1]);
    let disc = half.hypot(m[0][1]);
    let phi = 0.5 * (2.0 * m[0][1]).atan2(m[0][0] - m[1][1]);
    (mid - disc, mid + disc, [phi.cos(), phi.sin()])
}

/// Fundamental forms, principal curvatures, `f`, `∇f`, `K` and the
/// Christoffel symbols of the mesh. `c = 0` for meshes in `R³`, `c = 1` for
/// meshes on `S³ ⊂ R⁴`.
pub fn fundamental_forms(mesh: &SurfaceMesh, config: &CertConfig) -> Result<GeometrySamples> {
    config.validate()?;
    let dim = mesh.ambient_dim;
    if dim != 3 && dim != 4 {
        return Err(Error::Unsupported(format!("ambient dimension {dim}")));
    }
    let c = if dim == 4 { 1.0 } else { 0.0 };
    let (ns, nt) = (mesh.n_s, mesh.n_theta);
    let hs = uniform_step(&mesh.s_values, "s_values")?;
    let ht = uniform_step(&mesh.theta_values, "theta_values")?;
    if mesh.closed_theta && ((nt as f64) * ht - 2.0 * std::f64::consts::PI).abs() > 1e-9 {
        return Err(Error::InvalidParameter { name: "theta_values", value: ht, reason: "closed θ grid must span 2π" });
    }
    let grid = Grid2 { ns, nt, hs, ht, periodic_s: mesh.closed_s, periodic_t: mesh.closed_theta };
    let n = grid.len();

    // Coordinate derivatives, one component at a time.
    let mut xs = vec![[0.0; 4]; n];
    let mut xt = vec![[0.0; 4]; n];
    let mut xss = vec![[0.0; 4]; n];
    let mut xtt = vec![[0.0; 4]; n];
    let mut xst = vec![[0.0; 4]; n];
    let mut xts = vec![[0.0; 4]; n];
    let mut pos = vec![[0.0; 4]; n];
    for k in 0..dim {
        let comp: Vec<f64> = mesh.vertices.iter().skip(k).step_by(dim).copied().collect();
        let ds = grid.ds(&comp)?;
        let dt = grid.dt(&comp)?;
        let dss = grid.dss(&comp)?;
        let dtt = grid.dtt(&comp)?;
        let dst = grid.ds(&dt)?;
        let dts = grid.dt(&ds)?;
        for v in 0..n {
            pos[v][k] = comp[v];
            xs[v][k] = ds[v];
            xt[v][k] = dt[v];
            xss[v][k] = dss[v];
            xtt[v][k] = dtt[v];
            xst[v][k] = dst[v];
            xts[v][k] = dts[v];
        }
    }

    struct Local {
        metric: [f64; 3],
        second: [f64; 3],
        asym: f64,
        chris: [[[f64; 2]; 2]; 2],
    }
    let locals: Vec<Local> = (0..n)
        .into_par_iter()
        .map(|v| {
            let (e_, f_, g_) = (dotn(&xs[v], &xs[v], dim), dotn(&xs[v], &xt[v], dim), dotn(&xt[v], &xt[v], dim));
            let det = e_ * g_ - f_ * f_;
            if !(det > 1e-14 * e_ * g_) || !(e_ > 0.0) || !(g_ > 0.0) {
                return Err(Error::DegenerateMetric { i: v / nt, j: v % nt });
            }
            let nv = if dim == 3 { normal(&[xs[v], xt[v]], 3) } else { normal(&[pos[v], xs[v], xt[v]], 4) };
            let b_st = dotn(&xst[v], &nv, dim);
            let b_ts = dotn(&xts[v], &nv, dim);
            let second = [dotn(&xss[v], &nv, dim), 0.5 * (b_st + b_ts), dotn(&xtt[v], &nv, dim)];
            // First-kind symbols ⟨X_ij, X_m⟩, raised with the inverse metric.
            let xij = [[xss[v], xst[v]], [xst[v], xtt[v]]];
            let tang = [xs[v], xt[v]];
            let ginv = [[g_ / det, -f_ / det], [-f_ / det, e_ / det]];
            let mut chris = [[[0.0; 2]; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    let first = [dotn(&xij[i][j], &tang[0], dim), dotn(&xij[i][j], &tang[1], dim)];
                    for l in 0..2 {
                        chris[l][i][j] = ginv[l][0] * first[0] + ginv[l][1] * first[1];
                    }
                }
            }
            Ok(Local { metric: [e_, f_, g_], second, asym: (b_st - b_ts).abs(), chris })
        })
        .collect::<Result<_>>()?;

    let metric: Vec<[f64; 3]> = locals.iter().map(|l| l.metric).collect();
    let mut second: Vec<[f64; 3]> = locals.iter().map(|l| l.second).collect();
    let mixed_asymmetry: Vec<f64> = locals.iter().map(|l| l.asym).collect();
    let christoffel: Vec<_> = locals.iter().map(|l| l.chris).collect();

    // Orthonormal frame e₁ = a11 ∂s, e₂ = a21 ∂s + a22 ∂θ.
    let frame = |m: [f64; 3]| {
        let (e_, f_, g_) = (m[0], m[1], m[2]);
        let w = (g_ - f_ * f_ / e_).sqrt();
        (1.0 / e_.sqrt(), -(f_ / e_) / w, 1.0 / w)
    };
    let on_shape = |m: [f64; 3], b: [f64; 3]| {
        let (a11, a21, a22) = frame(m);
        let b11 = a11 * a11 * b[0];
        let b12 = a11 * (a21 * b[0] + a22 * b[1]);
        let b22 = a21 * a21 * b[0] + 2.0 * a21 * a22 * b[1] + a22 * a22 * b[2];
        [[b11, b12], [b12, b22]]
    };

    let mut shape: Vec<[[f64; 2]; 2]> = metric.iter().zip(&second).map(|(&m, &b)| on_shape(m, b)).collect();
    let mut mean: Vec<f64> = shape.iter().map(|a| 0.5 * (a[0][0] + a[1][1])).collect();
    if mean.iter().sum::<f64>() < 0.0 {
        for v in 0..n {
            second[v] = second[v].map(|x| -x);
            shape[v] = shape[v].map(|r| r.map(|x| -x));
            mean[v] = -mean[v];
        }
    }

    let f_s = grid.ds(&mean)?;
    let f_t = grid.dt(&mean)?;
    let grad_param: Vec<[f64; 2]> = f_s.iter().zip(&f_t).map(|(&a, &b)| [a, b]).collect();
    let grad: Vec<[f64; 2]> = metric
        .iter()
        .zip(&grad_param)
        .map(|(&m, g)| {
            let (a11, a21, a22) = frame(m);
            [a11 * g[0], a21 * g[0] + a22 * g[1]]
        })
        .collect();

    let eigs: Vec<(f64, f64, [f64; 2])> = shape.iter().map(|&a| eig_sym(a)).collect();
    let scale = eigs.iter().map(|e| e.0.abs().max(e.1.abs())).fold(0.0, f64::max);
    let grad_max = grad.iter().map(|g| g[0].hypot(g[1])).fold(0.0, f64::max);
    let threshold = (config.grad_mask_rel * grad_max).max(config.grad_mask_abs * scale * scale);

    let mut lambda1 = Vec::with_capacity(n);
    let mut lambda2 = Vec::with_capacity(n);
    let mut dir1 = Vec::with_capacity(n);
    let mut unmasked = Vec::with_capacity(n);
    let mut alignment = Vec::with_capacity(n);
    for (v, &(lo, hi, vhi)) in eigs.iter().enumerate() {
        let vlo = [-vhi[1], vhi[0]];
        let g = grad[v];
        let gn = g[0].hypot(g[1]);
        let keep = gn >= threshold && gn > 0.0;
        unmasked.push(keep);
        if keep {
            let c_hi = (vhi[0] * g[0] + vhi[1] * g[1]).abs() / gn;
            let c_lo = (vlo[0] * g[0] + vlo[1] * g[1]).abs() / gn;
            let (l1, l2, d1, cos) = if c_hi > c_lo { (hi, lo, vhi, c_hi) } else { (lo, hi, vlo, c_lo) };
            lambda1.push(l1);
            lambda2.push(l2);
            dir1.push(d1);
            alignment.push(cos.min(1.0).acos());
        } else {
            lambda1.push(lo);
            lambda2.push(hi);
            dir1.push(vlo);
            alignment.push(f64::NAN);
        }
    }

    // Brioschi formula for the intrinsic curvature.
    let field = |k: usize| metric.iter().map(|m| m[k]).collect::<Vec<f64>>();
    let (ef, ff, gf) = (field(0), field(1), field(2));
    let (e_s, e_t, e_tt) = (grid.ds(&ef)?, grid.dt(&ef)?, grid.dtt(&ef)?);
    let (f_s2, f_t2) = (grid.ds(&ff)?, grid.dt(&ff)?);
    let f_st = grid.ds(&f_t2)?;
    let (g_s, g_t, g_ss) = (grid.ds(&gf)?, grid.dt(&gf)?, grid.dss(&gf)?);
    let gauss: Vec<f64> = (0..n)
        .map(|v| {
            let (e_, f_, g_) = (ef[v], ff[v], gf[v]);
            let m1 = [
                [-0.5 * e_tt[v] + f_st[v] - 0.5 * g_ss[v], 0.5 * e_s[v], f_s2[v] - 0.5 * e_t[v]],
                [f_t2[v] - 0.5 * g_s[v], e_, f_],
                [0.5 * g_t[v], f_, g_],
            ];
            let m2 = [[0.0, 0.5 * e_t[v], 0.5 * g_s[v]], [0.5 * e_t[v], e_, f_], [0.5 * g_s[v], f_, g_]];
            let det = e_ * g_ - f_ * f_;
            (det3(m1) - det3(m2)) / (det * det)
        })
        .collect();

    Ok(GeometrySamples {
        n_s: ns,
        n_theta: nt,
        c,
        metric,
        second,
        mixed_asymmetry,
        shape,
        lambda1,
        lambda2,
        dir1,
        mean,
        grad_param,
        grad,
        unmasked,
        alignment,
        gauss,
        christoffel,
        scale,
        grad_max,
        hs,
        ht,
        periodic_s: mesh.closed_s,
        periodic_t: mesh.closed_theta,
    })
}

/// `A(∇f) + f∇f` in the orthonormal frame.
pub fn biconservative_field(geom: &GeometrySamples) -> Vec<[f64; 2]> {
    (0..geom.len())
        .map(|v| {
            let (a, g, f) = (geom.shape[v], geom.grad[v], geom.mean[v]);
            [a[0][0] * g[0] + a[0][1] * g[1] + f * g[0], a[1][0] * g[0] + a[1][1] * g[1] + f * g[1]]
        })
        .collect()
}

/// `|A(∇f) + f∇f| / Λ³` per vertex.
pub fn biconservative_residual(geom: &GeometrySamples) -> Vec<f64> {
    let s3 = geom.scale.powi(3).max(f64::MIN_POSITIVE);
    biconservative_field(geom).iter().map(|b| b[0].hypot(b[1]) / s3).collect()
}

/// `|3λ₁ + λ₂| / max(|λ₁|, |λ₂|)`, NaN where `∇f` is masked.
pub fn weingarten_residual(geom: &GeometrySamples) -> Vec<f64> {
    (0..geom.len())
        .map(|v| {
            if !geom.unmasked[v] {
                return f64::NAN;
            }
            let (l1, l2) = (geom.lambda1[v], geom.lambda2[v]);
            (3.0 * l1 + l2).abs() / l1.abs().max(l2.abs())
        })
        .collect()
}

/// `4∂_z̄ Q` and the right-hand side, as `(re, im)` pairs, with the
/// per-vertex normalization `G^{3/2} Λ³`, which does not depend on how the
/// profile is parametrized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfFields {
    pub lhs: Vec<[f64; 2]>,
    pub rhs: Vec<[f64; 2]>,
    pub scale: Vec<f64>,
    /// `max |lhs| / scale`.
    pub lhs_max: f64,
    /// `max |lhs − rhs| / scale`.
    pub diff_max: f64,
    /// `diff_max / max(lhs_max, fd_tol)`.
    pub mismatch: f64,
}

pub fn hopf_q_residual(mesh: &SurfaceMesh, geom: &GeometrySamples, fd_tol: f64) -> Result<HopfFields> {
    if !mesh.rotational {
        return Err(Error::Unsupported("Hopf check needs a surface of revolution".into()));
    }
    let grid = geom.grid();
    let n = geom.len();
    let mut q_re = vec![0.0; n];
    let mut q_im = vec![0.0; n];
    for v in 0..n {
        let [e_, _, g_] = geom.metric[v];
        let [b11, b12, b22] = geom.second[v];
        let ratio = (g_ / e_).sqrt();
        let f = geom.mean[v];
        q_re[v] = 0.25 * f * (g_ / e_ * b11 - b22);
        q_im[v] = -0.5 * f * ratio * b12;
    }
    let (qs_re, qs_im) = (grid.ds(&q_re)?, grid.ds(&q_im)?);
    let (qt_re, qt_im) = (grid.dt(&q_re)?, grid.dt(&q_im)?);
    let s3 = geom.scale.powi(3).max(f64::MIN_POSITIVE);
    let mut out = HopfFields {
        lhs: Vec::with_capacity(n),
        rhs: Vec::with_capacity(n),
        scale: Vec::with_capacity(n),
        lhs_max: 0.0,
        diff_max: 0.0,
        mismatch: 0.0,
    };
    for v in 0..n {
        let [e_, f_, g_] = geom.metric[v];
        let [b11, b12, b22] = geom.second[v];
        let ratio = (g_ / e_).sqrt();
        let lhs = [2.0 * (ratio * qs_re[v] - qt_im[v]), 2.0 * (ratio * qs_im[v] + qt_re[v])];
        let det = e_ * g_ - f_ * f_;
        let [fs, ft] = geom.grad_param[v];
        let (up_s, up_t) = ((g_ * fs - f_ * ft) / det, (e_ * ft - f_ * fs) / det);
        let b_s = b11 * up_s + b12 * up_t;
        let b_t = b12 * up_s + b22 * up_t;
        let rhs = [g_ * ratio * b_s, -g_ * b_t];
        let scale = g_.powf(1.5) * s3;
        out.lhs_max = out.lhs_max.max(lhs[0].hypot(lhs[1]) / scale);
        out.diff_max = out.diff_max.max((lhs[0] - rhs[0]).hypot(lhs[1] - rhs[1]) / scale);
        out.lhs.push(lhs);
        out.rhs.push(rhs);
        out.scale.push(scale);
    }
    out.mismatch = out.diff_max / out.lhs_max.max(fd_tol);
    Ok(out)
}

/// Stress-bienergy tensor `S₂ = −2f² g + 4f b` in the orthonormal frame.
pub fn stress_tensor(geom: &GeometrySamples) -> Vec<[[f64; 2]; 2]> {
    (0..geom.len())
        .map(|v| {
            let (a, f) = (geom.shape[v], geom.mean[v]);
            let mut s = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    s[i][j] = 4.0 * f * a[i][j] - if i == j { 2.0 * f * f } else { 0.0 };
                }
            }
            s
        })
        .collect()
}

/// `|tr S₂ − 4f²| / Λ²` per vertex; no differentiation involved.
pub fn stress_trace_residual(geom: &GeometrySamples) -> Vec<f64> {
    let s2 = (geom.scale * geom.scale).max(f64::MIN_POSITIVE);
    stress_tensor(geom)
        .iter()
        .zip(&geom.mean)
        .map(|(s, &f)| (s[0][0] + s[1][1] - 4.0 * f * f).abs() / s2)
        .collect()
}

/// Covariant divergence of `S₂` as a 1-form `(div_s, div_θ)`.
#[allow(clippy::needless_range_loop)]
pub fn stress_divergence(geom: &GeometrySamples) -> Result<Vec<[f64; 2]>> {
    let grid = geom.grid();
    let n = geom.len();
    let comp = |i: usize, j: usize| -> Vec<f64> {
        (0..n)
            .map(|v| {
                let f = geom.mean[v];
                let m = geom.metric[v];
                let b = geom.second[v];
                let (g_ij, b_ij) = match (i, j) {
                    (0, 0) => (m[0], b[0]),
                    (1, 1) => (m[2], b[2]),
                    _ => (m[1], b[1]),
                };
                -2.0 * f * f * g_ij + 4.0 * f * b_ij
            })
            .collect()
    };
    let s = [[comp(0, 0), comp(0, 1)], [comp(0, 1), comp(1, 1)]];
    let ds = [[grid.ds(&s[0][0])?, grid.ds(&s[0][1])?], [grid.ds(&s[0][1])?, grid.ds(&s[1][1])?]];
    let dt = [[grid.dt(&s[0][0])?, grid.dt(&s[0][1])?], [grid.dt(&s[0][1])?, grid.dt(&s[1][1])?]];
    Ok((0..n)
        .map(|v| {
            let [e_, f_, g_] = geom.metric[v];
            let det = e_ * g_ - f_ * f_;
            let ginv = [[g_ / det, -f_ / det], [-f_ / det, e_ / det]];
            let gam = &geom.christoffel[v];
            let sv = |i: usize, j: usize| s[i][j][v];
            let d = |k: usize, i: usize, j: usize| if k == 0 { ds[i][j][v] } else { dt[i][j][v] };
            let mut out = [0.0; 2];
            for (j, slot) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i in 0..2 {
                    for k in 0..2 {
                        let mut cov = d(k, i, j);
                        for l in 0..2 {
                            cov -= gam[l][k][i] * sv(l, j) + gam[l][k][j] * sv(i, l);
                        }
                        acc += ginv[i][k] * cov;
                    }
                }
                *slot = acc;
            }
            out
        })
        .collect())
}

/// `|div S₂|_g / (4Λ³)` per vertex, comparable with the biconservative residual.
pub fn stress_divergence_residual(geom: &GeometrySamples) -> Result<Vec<f64>> {
    let s3 = 4.0 * geom.scale.powi(3).max(f64::MIN_POSITIVE);
    Ok(stress_divergence(geom)?
        .iter()
        .zip(&geom.metric)
        .map(|(w, m)| {
            let det = m[0] * m[2] - m[1] * m[1];
            let q = (m[2] * w[0] * w[0] - 2.0 * m[1] * w[0] * w[1] + m[0] * w[1] * w[1]) / det;
            q.max(0.0).sqrt() / s3
        })
        .collect())
}

/// `|K − (λ₁λ₂ + c)| / Λ²` per vertex.
pub fn gauss_residual(geom: &GeometrySamples) -> Vec<f64> {
    let s2 = (geom.scale * geom.scale).max(f64::MIN_POSITIVE);
    (0..geom.len())
        .map(|v| (geom.gauss[v] - (geom.lambda1[v] * geom.lambda2[v] + geom.c)).abs() / s2)
        .collect()
}

/// `|b(∂s,∂θ) − b(∂θ,∂s)|` from the two differentiation orders, in the
/// orthonormal frame and relative to `Λ`.
pub fn self_adjoint_residual(geom: &GeometrySamples) -> Vec<f64> {
    let s = geom.scale.max(f64::MIN_POSITIVE);
    (0..geom.len())
        .map(|v| {
            let m = geom.metric[v];
            geom.mixed_asymmetry[v] / (m[0] * m[2]).sqrt() / s
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max: f64,
    pub rms: f64,
    pub tolerance: f64,
    /// Number of vertices entering the check.
    pub evaluated: usize,
    pub passed: bool,
}

impl Check {
    fn below(name: &str, values: &[f64], tolerance: f64) -> Check {
        let used: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
        let max = used.iter().copied().fold(0.0, f64::max);
        let rms = if used.is_empty() { 0.0 } else { (used.iter().map(|x| x * x).sum::<f64>() / used.len() as f64).sqrt() };
        Check { name: name.into(), max, rms, tolerance, evaluated: used.len(), passed: max < tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfSummary {
    pub lhs_max: f64,
    pub diff_max: f64,
    pub mismatch: f64,
    /// `lhs_max` below the finite-difference tolerance.
    pub holomorphic: bool,
}

/// Per-vertex residual fields, written as CSV keyed by `(i, j)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualFields {
    pub n_theta: usize,
    pub mean: Vec<f64>,
    pub grad_norm: Vec<f64>,
    pub biconservative: Vec<f64>,
    pub weingarten: Vec<f64>,
    pub stress_trace: Vec<f64>,
    pub stress_div: Vec<f64>,
    pub gauss: Vec<f64>,
    pub self_adjoint: Vec<f64>,
    pub hopf_lhs: Vec<f64>,
    pub hopf_diff: Vec<f64>,
}

impl ResidualFields {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from(
            "i,j,f,grad_f,biconservative,weingarten,stress_trace,stress_div,gauss,self_adjoint,hopf_lhs,hopf_diff\n",
        );
        let nt = self.n_theta.max(1);
        let cell = |f: &Vec<f64>, v: usize| f.get(v).map(|x| output::csv_f64(*x)).unwrap_or_default();
        for v in 0..self.mean.len() {
            let _ = write!(out, "{},{}", v / nt, v % nt);
            for f in [
                &self.mean,
                &self.grad_norm,
                &self.biconservative,
                &self.weingarten,
                &self.stress_trace,
                &self.stress_div,
                &self.gauss,
                &self.self_adjoint,
                &self.hopf_lhs,
                &self.hopf_diff,
            ] {
                let _ = write!(out, ",{}", cell(f, v));
            }
            out.push('\n');
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub ambient_dim: usize,
    pub c: f64,
    pub n_s: usize,
    pub n_theta: usize,
    /// `Λ = max |λ|`.
    pub scale: f64,
    pub grad_max: f64,
    pub masked_fraction: f64,
    pub hopf: Option<HopfSummary>,
    pub checks: Vec<Check>,
    pub config: CertConfig,
    pub passed: bool,
    #[serde(skip)]
    pub fields: ResidualFields,
}

impl CertReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs every check on the mesh.
pub fn certify(mesh: &SurfaceMesh, config: &CertConfig) -> Result<CertReport> {
    let geom = fundamental_forms(mesh, config)?;
    let bicon = biconservative_residual(&geom);
    let wein = weingarten_residual(&geom);
    let trace = stress_trace_residual(&geom);
    let div = stress_divergence_residual(&geom)?;
    let gauss = gauss_residual(&geom);
    let adj = self_adjoint_residual(&geom);
    let align = geom.alignment.clone();
    let orientation: Vec<f64> = geom.mean.iter().map(|&f| (-f).max(0.0) / geom.scale.max(f64::MIN_POSITIVE)).collect();

    let mut checks = vec![
        Check::below("self_adjoint", &adj, config.fd_tol),
        Check::below("gauss", &gauss, config.fd_tol),
        Check::below("orientation", &orientation, config.fd_tol),
        Check::below("biconservative", &bicon, config.biconservative_tol),
        Check::below("weingarten", &wein, config.weingarten_tol),
        Check::below("eigen_alignment", &align, config.alignment_tol),
        Check::below("stress_trace", &trace, config.trace_tol),
        Check::below("stress_div", &div, config.fd_tol),
    ];
    let (hopf, hopf_lhs, hopf_diff) = if mesh.rotational {
        let h = hopf_q_residual(mesh, &geom, config.fd_tol)?;
        checks.push(Check {
            name: "hopf_identity".into(),
            max: h.mismatch,
            rms: h.mismatch,
            tolerance: config.hopf_mismatch_tol,
            evaluated: geom.len(),
            passed: h.mismatch < config.hopf_mismatch_tol,
        });
        let lhs: Vec<f64> = h.lhs.iter().zip(&h.scale).map(|(l, s)| l[0].hypot(l[1]) / s).collect();
        let diff: Vec<f64> =
            (0..geom.len()).map(|v| (h.lhs[v][0] - h.rhs[v][0]).hypot(h.lhs[v][1] - h.rhs[v][1]) / h.scale[v]).collect();
        let summary =
            HopfSummary { lhs_max: h.lhs_max, diff_max: h.diff_max, mismatch: h.mismatch, holomorphic: h.lhs_max < config.fd_tol };
        (Some(summary), lhs, diff)
    } else {
        (None, Vec::new(), Vec::new())
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(CertReport {
        ambient_dim: mesh.ambient_dim,
        c: geom.c,
        n_s: geom.n_s,
        n_theta: geom.n_theta,
        scale: geom.scale,
        grad_max: geom.grad_max,
        masked_fraction: geom.masked_fraction(),
        hopf,
        checks,
        config: *config,
        passed,
        fields: ResidualFields {
            n_theta: geom.n_theta,
            mean: geom.mean.clone(),
            grad_norm: geom.grad.iter().map(|g| g[0].hypot(g[1])).collect(),
            biconservative: bicon,
            weingarten: wein,
            stress_trace: trace,
            stress_div: div,
            gauss,
            self_adjoint: adj,
            hopf_lhs,
            hopf_diff,
        },
    })
}
