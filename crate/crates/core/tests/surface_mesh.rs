//! Surface construction in `S³` and `R³`, projection and export.

use bicon_core::pipeline::flat_torus_s3;
use bicon_core::surface::{project_point, unproject_point, Pole};
use bicon_core::{
    closed_surface, curvature_profile, export_mesh, integrate_on_sphere, revolve_in_s3, stereographic_project, Error,
    MeshFormat, Sampling, SurfaceMesh, SurfaceOptions,
};
use proptest::prelude::*;

fn three_two(n_theta: usize) -> SurfaceMesh {
    let opts = SurfaceOptions { samples_per_period: 64, n_theta, sampling: Sampling::Arclength, ..Default::default() };
    closed_surface(3, 2, &opts).unwrap().mesh
}

#[test]
fn vertices_lie_on_the_three_sphere() {
    let mesh = three_two(32);
    assert_eq!(mesh.ambient_dim, 4);
    assert!(mesh.max_norm_defect() < 1e-12);
}

#[test]
fn rotation_maps_rows_to_themselves() {
    let mesh = three_two(48);
    for i in (0..mesh.n_s).step_by(7) {
        let base = mesh.vertex(i, 0).to_vec();
        for j in 0..mesh.n_theta {
            let t = mesh.theta_values[j];
            let (c, s) = (t.cos(), t.sin());
            let expect = [c * base[0] - s * base[1], s * base[0] + c * base[1], base[2], base[3]];
            let v = mesh.vertex(i, j);
            for k in 0..4 {
                assert!((v[k] - expect[k]).abs() < 1e-14, "row {i}, column {j}");
            }
        }
    }
}

#[test]
fn closed_mesh_drops_duplicate_row() {
    let opts = SurfaceOptions { samples_per_period: 40, n_theta: 16, sampling: Sampling::Arclength, ..Default::default() };
    let built = closed_surface(3, 2, &opts).unwrap();
    assert_eq!(built.curve.len(), 121);
    assert_eq!(built.mesh.n_s, 120);
    assert!(built.mesh.closed_s && built.mesh.closed_theta);
    assert_eq!(built.mesh.face_count(), 120 * 16);
}

#[test]
fn unaligned_or_open_profiles_are_rejected() {
    let profile = curvature_profile(0.8, 1.0, 64).unwrap();
    let curve = integrate_on_sphere(&profile, 1, 64).unwrap();
    assert!(matches!(revolve_in_s3(&curve, 16, false), Err(Error::NotAligned)));
    let aligned = curve.aligned_to(bicon_core::closure_diagnostics(&curve).unwrap().axis).unwrap();
    assert!(matches!(revolve_in_s3(&aligned, 16, true), Err(Error::NotClosed { .. })));
    assert!(revolve_in_s3(&aligned, 16, false).is_ok());
    assert!(revolve_in_s3(&aligned, 4, false).is_err());
}

#[test]
fn torus_obj_has_expected_counts() {
    let mesh = flat_torus_s3(1.0, 24, 16).unwrap();
    let projected = stereographic_project(&mesh).unwrap();
    let obj = projected.to_obj().unwrap();
    let vertices = obj.lines().filter(|l| l.starts_with("v ")).count();
    let faces: Vec<&str> = obj.lines().filter(|l| l.starts_with("f ")).collect();
    assert_eq!(vertices, 24 * 16);
    assert_eq!(faces.len(), 24 * 16);
    // Euler characteristic of a torus: V − E + F = 0 with E = 2F for quads.
    assert_eq!(vertices as i64 - 2 * faces.len() as i64 + faces.len() as i64, 0);
    for f in faces {
        for idx in f.split_whitespace().skip(1) {
            let k: usize = idx.parse().unwrap();
            assert!((1..=vertices).contains(&k));
        }
    }
}

#[test]
fn clifford_torus_has_equal_radii() {
    let mesh = flat_torus_s3(1.0, 32, 16).unwrap();
    for v in mesh.vertices.chunks(4) {
        let r1 = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let r2 = (v[2] * v[2] + v[3] * v[3]).sqrt();
        assert!((r1 - 0.5f64.sqrt()).abs() < 1e-10 && (r2 - 0.5f64.sqrt()).abs() < 1e-10);
    }
}

#[test]
fn json_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mesh.json");
    let mut mesh = three_two(16);
    mesh.metadata.insert("note".into(), serde_json::json!("round trip"));
    export_mesh(&mesh, MeshFormat::Json, &path).unwrap();
    let back = SurfaceMesh::import_json(&path).unwrap();
    assert_eq!(back, mesh);
    for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn csv_export_lists_every_vertex() {
    let mesh = flat_torus_s3(0.75, 10, 8).unwrap();
    let csv = mesh.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "i,j,s,theta,x1,x2,x3,x4");
    assert_eq!(lines.count(), 80);
}

#[test]
fn obj_needs_three_dimensions() {
    let mesh = flat_torus_s3(1.0, 10, 8).unwrap();
    assert!(mesh.to_obj().is_err());
}

#[test]
fn projection_from_the_surface_pole_is_rejected() {
    let mut mesh = flat_torus_s3(1.0, 16, 8).unwrap();
    let k = 3;
    mesh.vertices[k * 4..k * 4 + 4].copy_from_slice(&[0.0, 0.0, 0.0, -1.0]);
    assert!(matches!(stereographic_project(&mesh), Err(Error::PoleCollision { index: 3, .. })));
}

#[test]
fn projection_is_conformal() {
    let pole = Pole::default();
    let centre = [0.3, -0.2, 0.5, (1.0f64 - 0.09 - 0.04 - 0.25).sqrt()];
    let y0 = project_point(&centre, pole).unwrap();
    let h = 1e-6;
    let e = |k: usize| {
        let mut p = centre;
        p[k] += h;
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        let q: Vec<f64> = p.iter().map(|x| x / norm).collect();
        project_point(&q, pole).unwrap()
    };
    // Differential of projection scales all tangent directions equally.
    let scale = 1.0 / (1.0 + centre[3]);
    for k in 0..3 {
        let y = e(k);
        let moved: f64 = (0..3).map(|c| (y[c] - y0[c]).powi(2)).sum::<f64>().sqrt();
        let tangent = {
            let mut p = centre;
            p[k] += h;
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            p.iter().zip(&centre).map(|(a, b)| (a / norm - b).powi(2)).sum::<f64>().sqrt()
        };
        assert!((moved / tangent - scale).abs() < 1e-5, "direction {k}");
    }
}

proptest! {
    #[test]
    fn stereographic_inverse_round_trip(x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0, axis in 0usize..4, up in any::<bool>()) {
        let pole = Pole { axis, sign: if up { 1.0 } else { -1.0 } };
        let p = unproject_point([x, y, z], pole);
        let norm: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-14);
        let back = project_point(&p, pole).unwrap();
        let scale = 1.0 + x.abs().max(y.abs()).max(z.abs());
        prop_assert!((back[0] - x).abs() < 1e-13 * scale * scale);
        prop_assert!((back[1] - y).abs() < 1e-13 * scale * scale);
        prop_assert!((back[2] - z).abs() < 1e-13 * scale * scale);
    }
}
