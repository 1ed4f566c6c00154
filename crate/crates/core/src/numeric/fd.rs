//! Fourth-order finite differences on uniform 1-D lines and 2-D grids.
//!
//! Periodic directions use the centred five-point stencils; open directions
//! switch to one-sided fourth-order stencils on the two boundary rows.

use crate::error::{Error, Result};

/// First derivative of samples spaced `h` apart.
#[allow(clippy::needless_range_loop)]
pub fn deriv1(f: &[f64], h: f64, periodic: bool) -> Result<Vec<f64>> {
    let n = f.len();
    check_len(n, periodic)?;
    let mut out = vec![0.0; n];
    let c = 1.0 / (12.0 * h);
    let at = |i: isize| f[i.rem_euclid(n as isize) as usize];
    for i in 0..n {
        let k = i as isize;
        let interior = periodic || (i >= 2 && i + 2 < n);
        out[i] = if interior {
            (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k - 1) + at(k - 2)) * c
        } else if i == 0 {
            (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c
        } else if i == 1 {
            (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c
        } else if i == n - 1 {
            (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * c
        } else {
            (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * c
        };
    }
    Ok(out)
}

/// Second derivative of samples spaced `h` apart.
#[allow(clippy::needless_range_loop)]
pub fn deriv2(f: &[f64], h: f64, periodic: bool) -> Result<Vec<f64>> {
    let n = f.len();
    check_len(n, periodic)?;
    let mut out = vec![0.0; n];
    let c = 1.0 / (12.0 * h * h);
    let at = |i: isize| f[i.rem_euclid(n as isize) as usize];
    for i in 0..n {
        let k = i as isize;
        let interior = periodic || (i >= 2 && i + 2 < n);
        out[i] = if interior {
            (-at(k + 2) + 16.0 * at(k + 1) - 30.0 * at(k) + 16.0 * at(k - 1) - at(k - 2)) * c
        } else if i == 0 {
            (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) * c
        } else if i == 1 {
            (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) * c
        } else if i == n - 1 {
            (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4] + 61.0 * f[n - 5]
                - 10.0 * f[n - 6])
                * c
        } else {
            (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] - 6.0 * f[n - 5]
                + f[n - 6])
                * c
        };
    }
    Ok(out)
}

fn check_len(n: usize, periodic: bool) -> Result<()> {
    let need = if periodic { 5 } else { 6 };
    if n < need {
        return Err(Error::EmptyDomain(format!(
            "finite differences need at least {need} samples, got {n}"
        )));
    }
    Ok(())
}

/// Rectangular `(s, θ)` grid; fields are stored row-major, index `i * nt + j`.
#[derive(Debug, Clone, Copy)]
pub struct Grid2 {
    pub ns: usize,
    pub nt: usize,
    pub hs: f64,
    pub ht: f64,
    pub periodic_s: bool,
    pub periodic_t: bool,
}

impl Grid2 {
    pub fn len(&self) -> usize {
        self.ns * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn along_s(&self, f: &[f64], op: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
        let mut out = vec![0.0; f.len()];
        let mut line = vec![0.0; self.ns];
        for j in 0..self.nt {
            for i in 0..self.ns {
                line[i] = f[i * self.nt + j];
            }
            for (i, v) in op(&line)?.into_iter().enumerate() {
                out[i * self.nt + j] = v;
            }
        }
        Ok(out)
    }

    fn along_t(&self, f: &[f64], op: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(f.len());
        for row in f.chunks(self.nt) {
            out.extend(op(row)?);
        }
        Ok(out)
    }

    pub fn ds(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.along_s(f, |l| deriv1(l, self.hs, self.periodic_s))
    }

    pub fn dt(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.along_t(f, |l| deriv1(l, self.ht, self.periodic_t))
    }

    pub fn dss(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.along_s(f, |l| deriv2(l, self.hs, self.periodic_s))
    }

    pub fn dtt(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.along_t(f, |l| deriv2(l, self.ht, self.periodic_t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(x: f64) -> f64 {
        1.0 - 2.0 * x + 0.5 * x.powi(2) + 0.3 * x.powi(3) - 0.1 * x.powi(4)
    }

    #[test]
    fn quartic_is_differentiated_exactly_with_open_ends() {
        let h = 0.1;
        let xs: Vec<f64> = (0..12).map(|i| i as f64 * h).collect();
        let f: Vec<f64> = xs.iter().map(|&x| poly(x)).collect();
        let d1 = deriv1(&f, h, false).unwrap();
        let d2 = deriv2(&f, h, false).unwrap();
        for (k, &x) in xs.iter().enumerate() {
            let e1 = -2.0 + x + 0.9 * x * x - 0.4 * x.powi(3);
            let e2 = 1.0 + 1.8 * x - 1.2 * x * x;
            assert!((d1[k] - e1).abs() < 1e-11, "d1 at {k}");
            assert!((d2[k] - e2).abs() < 1e-9, "d2 at {k}");
        }
    }

    #[test]
    fn periodic_fourth_order_convergence() {
        let err = |n: usize| {
            let h = 2.0 * std::f64::consts::PI / n as f64;
            let f: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin().exp()).collect();
            let d = deriv1(&f, h, true).unwrap();
            (0..n)
                .map(|i| {
                    let x = i as f64 * h;
                    (d[i] - x.cos() * x.sin().exp()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(32) / err(64);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn grid_mixed_derivative() {
        let g = Grid2 { ns: 20, nt: 16, hs: 0.05, ht: 2.0 * std::f64::consts::PI / 16.0, periodic_s: false, periodic_t: true };
        let mut f = vec![0.0; g.len()];
        for i in 0..g.ns {
            for j in 0..g.nt {
                let (s, t) = (i as f64 * g.hs, j as f64 * g.ht);
                f[i * g.nt + j] = s * s * t.cos();
            }
        }
        let fst = g.ds(&g.dt(&f).unwrap()).unwrap();
        for i in 0..g.ns {
            for j in 0..g.nt {
                let (s, t) = (i as f64 * g.hs, j as f64 * g.ht);
                assert!((fst[i * g.nt + j] + 2.0 * s * t.sin()).abs() < 2e-3);
            }
        }
    }

    #[test]
    fn too_short_lines_are_rejected() {
        assert!(deriv2(&[1.0; 5], 0.1, false).is_err());
        assert!(deriv1(&[1.0; 5], 0.1, true).is_ok());
    }
}
