//! Rotational surfaces on an `(s, θ)` grid, stereographic projection and
//! mesh export.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curve::{Ambient, SampledCurve};
use crate::error::{Error, Result};
use crate::output;

/// Largest tolerated closure defect when a sphere profile is closed up.
pub const CLOSE_TOL: f64 = 1e-6;

/// Radius below which a profile sample is treated as lying on the axis.
pub const AXIS_TOL: f64 = 1e-9;

/// Vertex grid indexed by `(i, j)` = (profile sample, rotation angle),
/// stored row-major with index `i * n_theta + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub ambient_dim: usize,
    pub n_s: usize,
    pub n_theta: usize,
    pub s_values: Vec<f64>,
    pub theta_values: Vec<f64>,
    /// The last row connects back to the first.
    pub closed_s: bool,
    /// The last column connects back to the first.
    pub closed_theta: bool,
    /// True for surfaces obtained by rotating a profile.
    pub rotational: bool,
    /// Flat coordinates, `ambient_dim` per vertex.
    pub vertices: Vec<f64>,
    /// Rows whose profile point lies on the rotation axis.
    #[serde(default)]
    pub axis_rows: Vec<usize>,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Csv,
    Json,
}

impl std::str::FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(Self::Obj),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Unsupported(format!("unknown mesh format `{other}`"))),
        }
    }
}

fn theta_grid(n_theta: usize) -> Result<Vec<f64>> {
    if n_theta < 8 {
        return Err(Error::InvalidParameter {
            name: "n_theta",
            value: n_theta as f64,
            reason: "at least 8 rotation steps are required",
        });
    }
    Ok((0..n_theta).map(|j| 2.0 * PI * j as f64 / n_theta as f64).collect())
}

/// Rotates an axis-aligned sphere profile inside `S³ ⊂ R⁴`.
///
/// The profile sphere is identified with the great 2-sphere through the
/// rotation plane: the distance to the rotation 2-plane is `r = γ₃`, the
/// component along the fitted axis, and
/// `v(i, j) = (r cos θ, r sin θ, γ₁, γ₂)`. With `close = true` the final
/// sample, which must coincide with the first, is dropped and the `s`
/// direction becomes periodic.
pub fn revolve_in_s3(curve: &SampledCurve, n_theta: usize, close: bool) -> Result<SurfaceMesh> {
    if curve.ambient != Ambient::Sphere2 {
        return Err(Error::Unsupported("revolve_in_s3 needs a sphere profile".into()));
    }
    if !curve.aligned {
        return Err(Error::NotAligned);
    }
    let theta = theta_grid(n_theta)?;
    let mut rows = curve.len();
    if close {
        let defect = curve.closure_defect();
        if !(defect < CLOSE_TOL) {
            return Err(Error::NotClosed { defect });
        }
        rows -= 1;
    }
    if rows < 2 {
        return Err(Error::EmptyDomain("profile has fewer than two samples".into()));
    }
    let mut vertices = Vec::with_capacity(rows * n_theta * 4);
    let mut axis_rows = Vec::new();
    for (i, p) in curve.points.iter().take(rows).enumerate() {
        let r = p[2];
        if r.abs() < AXIS_TOL {
            axis_rows.push(i);
        }
        for &t in &theta {
            vertices.extend_from_slice(&[r * t.cos(), r * t.sin(), p[0], p[1]]);
        }
    }
    Ok(SurfaceMesh {
        ambient_dim: 4,
        n_s: rows,
        n_theta,
        s_values: curve.params[..rows].to_vec(),
        theta_values: theta,
        closed_s: close,
        closed_theta: true,
        rotational: true,
        vertices,
        axis_rows,
        metadata: BTreeMap::new(),
    })
}

/// Rotates a planar `(x, 0, z)` profile about the `z`-axis:
/// `v(i, j) = (xᵢ cos θⱼ, xᵢ sin θⱼ, zᵢ)`.
pub fn revolve_in_r3(planar: &SampledCurve, n_theta: usize) -> Result<SurfaceMesh> {
    if planar.ambient != Ambient::Plane2 {
        return Err(Error::Unsupported("revolve_in_r3 needs a planar profile".into()));
    }
    if planar.len() < 2 {
        return Err(Error::EmptyDomain("profile has fewer than two samples".into()));
    }
    let theta = theta_grid(n_theta)?;
    if let Some((index, p)) = planar.points.iter().enumerate().find(|(_, p)| !(p[0] > AXIS_TOL)) {
        return Err(Error::AxisCollision { index, radius: p[0] });
    }
    let mut vertices = Vec::with_capacity(planar.len() * n_theta * 3);
    for p in &planar.points {
        for &t in &theta {
            vertices.extend_from_slice(&[p[0] * t.cos(), p[0] * t.sin(), p[2]]);
        }
    }
    Ok(SurfaceMesh {
        ambient_dim: 3,
        n_s: planar.len(),
        n_theta,
        s_values: planar.params.clone(),
        theta_values: theta,
        closed_s: false,
        closed_theta: true,
        rotational: true,
        vertices,
        axis_rows: Vec::new(),
        metadata: BTreeMap::new(),
    })
}

/// Projection pole `sign · e_axis` on `S³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub axis: usize,
    pub sign: f64,
}

impl Default for Pole {
    /// `(0, 0, 0, −1)`.
    fn default() -> Self {
        Pole { axis: 3, sign: -1.0 }
    }
}

/// Stereographic image of a point of `S³` from `pole`.
pub fn project_point(x: &[f64], pole: Pole) -> Option<[f64; 3]> {
    let denom = 1.0 - pole.sign * x[pole.axis];
    if denom < 1e-12 {
        return None;
    }
    let mut out = [0.0; 3];
    let mut k = 0;
    for (i, &xi) in x.iter().enumerate().take(4) {
        if i != pole.axis {
            out[k] = xi / denom;
            k += 1;
        }
    }
    Some(out)
}

/// Inverse of [`project_point`].
pub fn unproject_point(y: [f64; 3], pole: Pole) -> [f64; 4] {
    let rho2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    let mut out = [0.0; 4];
    let mut k = 0;
    for (i, slot) in out.iter_mut().enumerate() {
        if i == pole.axis {
            *slot = pole.sign * (rho2 - 1.0) / (1.0 + rho2);
        } else {
            *slot = 2.0 * y[k] / (1.0 + rho2);
            k += 1;
        }
    }
    out
}

/// Stereographic projection from `(0, 0, 0, −1)`:
/// `(x₁, x₂, x₃, x₄) ↦ (x₁, x₂, x₃) / (1 + x₄)`.
pub fn stereographic_project(mesh: &SurfaceMesh) -> Result<SurfaceMesh> {
    stereographic_project_from(mesh, Pole::default())
}

pub fn stereographic_project_from(mesh: &SurfaceMesh, pole: Pole) -> Result<SurfaceMesh> {
    if mesh.ambient_dim != 4 {
        return Err(Error::Unsupported("stereographic projection needs a mesh in R⁴".into()));
    }
    if pole.axis > 3 || pole.sign.abs() != 1.0 {
        return Err(Error::InvalidParameter { name: "pole", value: pole.axis as f64, reason: "must be ±e_k, k < 4" });
    }
    let mut vertices = Vec::with_capacity(mesh.vertices.len() / 4 * 3);
    for (index, v) in mesh.vertices.chunks(4).enumerate() {
        let p = project_point(v, pole).ok_or(Error::PoleCollision {
            index,
            i: index / mesh.n_theta,
            j: index % mesh.n_theta,
        })?;
        vertices.extend_from_slice(&p);
    }
    let mut out = mesh.clone();
    out.ambient_dim = 3;
    out.vertices = vertices;
    out.metadata.insert("projection_pole".into(), serde_json::json!({"axis": pole.axis, "sign": pole.sign}));
    Ok(out)
}

impl SurfaceMesh {
    pub fn vertex_count(&self) -> usize {
        self.n_s * self.n_theta
    }

    pub fn vertex(&self, i: usize, j: usize) -> &[f64] {
        let k = (i * self.n_theta + j) * self.ambient_dim;
        &self.vertices[k..k + self.ambient_dim]
    }

    /// Quads as corner vertex indices, with seams identified where closed.
    pub fn faces(&self) -> Vec<[usize; 4]> {
        let rows = if self.closed_s { self.n_s } else { self.n_s.saturating_sub(1) };
        let cols = if self.closed_theta { self.n_theta } else { self.n_theta.saturating_sub(1) };
        let idx = |i: usize, j: usize| (i % self.n_s) * self.n_theta + j % self.n_theta;
        let mut out = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                out.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        out
    }

    pub fn face_count(&self) -> usize {
        let rows = if self.closed_s { self.n_s } else { self.n_s.saturating_sub(1) };
        let cols = if self.closed_theta { self.n_theta } else { self.n_theta.saturating_sub(1) };
        rows * cols
    }

    /// `max ||v| − 1|` over all vertices.
    pub fn max_norm_defect(&self) -> f64 {
        self.vertices
            .chunks(self.ambient_dim)
            .map(|v| (v.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_obj(&self) -> Result<String> {
        if self.ambient_dim != 3 {
            return Err(Error::Unsupported("OBJ export needs a mesh in R³; project it first".into()));
        }
        let mut out = String::new();
        for v in self.vertices.chunks(3) {
            let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
        }
        for f in self.faces() {
            let _ = writeln!(out, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
        }
        Ok(out)
    }

    /// CSV with columns `i, j, s, theta` followed by the coordinates.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,s,theta");
        for k in 1..=self.ambient_dim {
            let _ = write!(out, ",x{k}");
        }
        out.push('\n');
        for i in 0..self.n_s {
            for j in 0..self.n_theta {
                let _ = write!(
                    out,
                    "{i},{j},{},{}",
                    output::csv_f64(self.s_values[i]),
                    output::csv_f64(self.theta_values[j])
                );
                for x in self.vertex(i, j) {
                    let _ = write!(out, ",{}", output::csv_f64(*x));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn export(&self, format: MeshFormat, path: &Path) -> Result<()> {
        match format {
            MeshFormat::Obj => fs::write(path, self.to_obj()?).map_err(|e| Error::io(path, e)),
            MeshFormat::Csv => fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e)),
            MeshFormat::Json => output::write_json(path, self),
        }
    }

    pub fn import_json(path: &Path) -> Result<SurfaceMesh> {
        output::read_json(path)
    }
}

pub fn export_mesh(mesh: &SurfaceMesh, format: MeshFormat, path: &Path) -> Result<()> {
    mesh.export(format, path)
}
