//! Closed-form biharmonicity checks for hypersurfaces of the unit sphere
//! with constant principal curvatures.
//!
//! Each principal curvature is stored as `sign · √q` with `q` rational, so
//! `|A|² = Σ q · mult` is exact and `m f = Σ sign · mult · √q` is reduced to
//! a combination of square roots of distinct square-free integers, which
//! vanishes exactly when every coefficient does.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Q = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub lambda: f64,
    pub multiplicity: u64,
    /// `+1` or `−1`.
    pub sign: i8,
    /// `λ² = square[0] / square[1]`.
    pub square: [i128; 2],
}

impl SpectrumEntry {
    fn square(&self) -> Q {
        Q::new(self.square[0], self.square[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSpectrum {
    pub label: String,
    pub entries: Vec<SpectrumEntry>,
    pub m: u64,
    pub f: f64,
    pub a_norm_sq: f64,
}

/// `(s, r)` with `x = s² r` and `r` square-free.
fn square_free(mut x: i128) -> (i128, i128) {
    let mut s = 1;
    let mut k = 2;
    while k * k <= x {
        while x % (k * k) == 0 {
            x /= k * k;
            s *= k;
        }
        k += 1;
    }
    (s, x)
}

impl CurvatureSpectrum {
    /// Builds a spectrum from `(sign, λ², multiplicity)` triples.
    pub fn new(label: impl Into<String>, parts: &[(i8, Q, u64)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyDomain("spectrum has no entries".into()));
        }
        let mut entries = Vec::with_capacity(parts.len());
        for &(sign, sq, mult) in parts {
            if sign.abs() != 1 || sq < Q::from_integer(0) || mult == 0 {
                return Err(Error::InvalidParameter {
                    name: "spectrum",
                    value: mult as f64,
                    reason: "entries need sign ±1, λ² ≥ 0 and positive multiplicity",
                });
            }
            let lambda = f64::from(sign) * (*sq.numer() as f64 / *sq.denom() as f64).sqrt();
            entries.push(SpectrumEntry { lambda, multiplicity: mult, sign, square: [*sq.numer(), *sq.denom()] });
        }
        let mut s = CurvatureSpectrum { label: label.into(), entries, m: 0, f: 0.0, a_norm_sq: 0.0 };
        s.m = s.entries.iter().map(|e| e.multiplicity).sum();
        s.f = s.exact_f_value();
        s.a_norm_sq = s.exact_a_norm_sq_value();
        Ok(s)
    }

    /// `|A|²` as an exact rational.
    pub fn a_norm_sq_exact(&self) -> Q {
        self.entries.iter().map(|e| e.square() * Q::from_integer(e.multiplicity as i128)).sum()
    }

    /// `m f = Σ k_r √r` over square-free `r`, as a map `r ↦ k_r`.
    pub fn trace_radicals(&self) -> BTreeMap<i128, Q> {
        let mut out: BTreeMap<i128, Q> = BTreeMap::new();
        for e in &self.entries {
            // sign · mult · √(n/d) = sign · mult · √(n d) / d
            let sq = e.square();
            let (s, r) = square_free(sq.numer() * sq.denom());
            let coeff = Q::new(i128::from(e.sign) * e.multiplicity as i128 * s, *sq.denom());
            if r != 0 {
                *out.entry(r).or_insert_with(|| Q::from_integer(0)) += coeff;
            }
        }
        out.retain(|_, k| *k != Q::from_integer(0));
        out
    }

    /// True iff `f = 0` exactly.
    pub fn is_minimal(&self) -> bool {
        self.trace_radicals().is_empty()
    }

    fn exact_f_value(&self) -> f64 {
        let sum: f64 = self.trace_radicals().iter().map(|(r, k)| (*k.numer() as f64 / *k.denom() as f64) * (*r as f64).sqrt()).sum();
        sum / self.m as f64
    }

    fn exact_a_norm_sq_value(&self) -> f64 {
        let a = self.a_norm_sq_exact();
        *a.numer() as f64 / *a.denom() as f64
    }

    /// Stored `f` and `|A|²` agree with a recomputation from the entries.
    pub fn is_consistent(&self) -> bool {
        self.m == self.entries.iter().map(|e| e.multiplicity).sum::<u64>()
            && self.f.to_bits() == self.exact_f_value().to_bits()
            && self.a_norm_sq.to_bits() == self.exact_a_norm_sq_value().to_bits()
    }
}

/// Small hypersphere of radius `r` (`r² = r2`) in `Sⁿ`: all curvatures
/// `√(1 − r²)/r`, multiplicity `n − 1`.
pub fn spectrum_small_sphere(n: u64, r2: Q) -> Result<CurvatureSpectrum> {
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n", value: n as f64, reason: "must be at least 2" });
    }
    if !(r2 > Q::from_integer(0) && r2 < Q::from_integer(1)) {
        return Err(Error::InvalidParameter { name: "r2", value: *r2.numer() as f64 / *r2.denom() as f64, reason: "need 0 < r² < 1" });
    }
    let sq = (Q::from_integer(1) - r2) / r2;
    CurvatureSpectrum::new(format!("B1 n={n} r2={r2}"), &[(1, sq, n - 1)])
}

/// The hypersphere of radius `1/√2` in `Sⁿ`.
pub fn spectrum_b1(n: u64) -> Result<CurvatureSpectrum> {
    let mut s = spectrum_small_sphere(n, Q::new(1, 2))?;
    s.label = format!("B1 n={n}");
    Ok(s)
}

/// `S^{n1}(a) × S^{n2}(b)`, `a² = a2`, `b² = 1 − a2`: curvatures `b/a`
/// (multiplicity `n1`) and `−a/b` (multiplicity `n2`).
pub fn spectrum_product(n1: u64, n2: u64, a2: Q) -> Result<CurvatureSpectrum> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidParameter { name: "n1/n2", value: n1.min(n2) as f64, reason: "must be at least 1" });
    }
    if !(a2 > Q::from_integer(0) && a2 < Q::from_integer(1)) {
        return Err(Error::InvalidParameter { name: "a2", value: *a2.numer() as f64 / *a2.denom() as f64, reason: "need 0 < a² < 1" });
    }
    let b2 = Q::from_integer(1) - a2;
    CurvatureSpectrum::new(format!("product n1={n1} n2={n2} a2={a2}"), &[(1, b2 / a2, n1), (-1, a2 / b2, n2)])
}

/// `S^{n1}(1/√2) × S^{n2}(1/√2)`.
pub fn spectrum_b2(n1: u64, n2: u64) -> Result<CurvatureSpectrum> {
    let mut s = spectrum_product(n1, n2, Q::new(1, 2))?;
    s.label = format!("B2 n1={n1} n2={n2}");
    Ok(s)
}

/// `S^p(a) × S^q(b)` with `a² = p/(p+q)`, `b² = q/(p+q)`.
pub fn spectrum_lawson(p: u64, q: u64) -> Result<CurvatureSpectrum> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidParameter { name: "p/q", value: p.min(q) as f64, reason: "must be at least 1" });
    }
    let mut s = spectrum_product(p, q, Q::new(p as i128, (p + q) as i128))?;
    s.label = format!("Lawson p={p} q={q}");
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ProperBiharmonic,
    Minimal,
    NotBiharmonic,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::ProperBiharmonic => "proper biharmonic",
            Verdict::Minimal => "minimal",
            Verdict::NotBiharmonic => "not biharmonic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiharmonicReport {
    pub label: String,
    pub m: u64,
    pub f: f64,
    pub a_norm_sq: f64,
    /// `|A|² = m` in exact arithmetic.
    pub a_norm_sq_equals_m: bool,
    /// `(m − |A|²) f`; `Δf = 0` for constant spectra.
    pub normal_residual: f64,
    /// `2A(∇f) + m f ∇f`, identically zero since `∇f = 0`.
    pub tangential_residual: f64,
    pub verdict: Verdict,
}

pub fn biharmonic_check(spec: &CurvatureSpectrum) -> BiharmonicReport {
    let m = Q::from_integer(spec.m as i128);
    let a2 = spec.a_norm_sq_exact();
    let equal = a2 == m;
    let verdict = if spec.is_minimal() {
        Verdict::Minimal
    } else if equal {
        Verdict::ProperBiharmonic
    } else {
        Verdict::NotBiharmonic
    };
    let diff = m - a2;
    BiharmonicReport {
        label: spec.label.clone(),
        m: spec.m,
        f: spec.f,
        a_norm_sq: spec.a_norm_sq,
        a_norm_sq_equals_m: equal,
        normal_residual: (*diff.numer() as f64 / *diff.denom() as f64) * spec.f,
        tangential_residual: 0.0,
        verdict,
    }
}

/// The standard example set: B1 for `n = 2..=6`, B2 for `n1 ≠ n2 ≤ 3`,
/// Lawson for `p, q ≤ 3`, and a non-example.
pub fn standard_cases() -> Vec<CurvatureSpectrum> {
    let mut out = Vec::new();
    for n in 2..=6 {
        out.extend(spectrum_b1(n));
    }
    for n1 in 1..=3 {
        for n2 in 1..=3 {
            if n1 != n2 {
                out.extend(spectrum_b2(n1, n2));
            }
        }
    }
    for p in 1..=3 {
        for q in p..=3 {
            out.extend(spectrum_lawson(p, q));
        }
    }
    out.extend(CurvatureSpectrum::new("all curvatures 2, m=3", &[(1, Q::from_integer(4), 3)]));
    out
}

/// Text table of `(example, m, f, |A|², verdict)`.
pub fn format_table(reports: &[BiharmonicReport]) -> String {
    let width = reports.iter().map(|r| r.label.len()).max().unwrap_or(7).max(7);
    let mut out = format!("{:<width$}  {:>3}  {:>22}  {:>22}  verdict\n", "example", "m", "f", "|A|^2");
    for r in reports {
        let _ = writeln!(out, "{:<width$}  {:>3}  {:>22.16e}  {:>22.16e}  {}", r.label, r.m, r.f, r.a_norm_sq, r.verdict);
    }
    out
}
