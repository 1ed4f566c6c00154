//! Bracketing root finder (Brent's method).
//!
//! Each iteration keeps a sign-changing bracket and tries an inverse
//! quadratic or secant step, falling back to bisection whenever the
//! interpolated step leaves the bracket or converges too slowly.

use crate::error::{Error, Result};

/// Outcome of a bracketed root search.
#[derive(Debug, Clone)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    /// Bracket `(lo, hi)` after every iteration, `lo < hi`, with a sign change.
    pub brackets: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct BrentOptions {
    /// Absolute tolerance on `x`.
    pub xtol: f64,
    /// Relative tolerance on `x`.
    pub rtol: f64,
    /// Stop as soon as `|f(x)| <= ftol`.
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for BrentOptions {
    fn default() -> Self {
        Self {
            xtol: 0.0,
            rtol: 4.0 * f64::EPSILON,
            ftol: 0.0,
            max_iter: 200,
        }
    }
}

/// Finds a root of `f` in `[a, b]`; `f(a)` and `f(b)` must differ in sign.
pub fn brent<F>(mut f: F, a: f64, b: f64, opts: BrentOptions) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let fa = f(a);
    let fb = f(b);
    brent_with_values(&mut f, a, fa, b, fb, opts)
}

/// Same as [`brent`] when the endpoint values are already known.
pub fn brent_with_values<F>(
    f: &mut F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    opts: BrentOptions,
) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, iterations: 0, brackets: vec![] });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, iterations: 0, brackets: vec![] });
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NotBracketed { a, fa, b, fb });
    }

    // b is the best estimate, c the contrapoint, a the previous iterate.
    let (mut a, mut fa, mut b, mut fb) = (a, fa, b, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    let mut brackets = Vec::new();

    for iter in 1..=opts.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        brackets.push((b.min(c), b.max(c)));

        let tol = 2.0 * opts.rtol * b.abs() + 0.5 * opts.xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 || fb.abs() <= opts.ftol {
            return Ok(Root { x: b, fx: fb, iterations: iter, brackets });
        }

        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NoConvergence { what: "brent (non-finite value)", iterations: iter });
        }
    }
    Err(Error::NoConvergence { what: "brent", iterations: opts.max_iter })
}
