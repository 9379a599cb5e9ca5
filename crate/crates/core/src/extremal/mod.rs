//! Symmetric spectra and the extremal operators `M^±_{λ,Λ}` and `P^±_λ`.

mod jacobi;
mod probe;

pub use probe::{subellipticity_probe, subellipticity_probe_with};

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtremalError {
    #[error("matrix is not symmetric (max asymmetry {asym:e}, norm {norm:e})")]
    NotSymmetric { asym: f64, norm: f64 },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("ellipticity needs 0 < lambda <= Lambda, got ({lambda}, {upper})")]
    Ellipticity { lambda: f64, upper: f64 },
    #[error("P66 parameter needs 0 < lam <= 1/m, got lam = {lam}, m = {m}")]
    Pucci66 { lam: f64, m: usize },
    #[error("P66 parameter built for m = {expected}, matrix is {got}x{got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector is not unit length (|v| = {0})")]
    NonUnit(f64),
}

/// Ellipticity constants `0 < λ ≤ Λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EllipticityJson", into = "EllipticityJson")]
pub struct Ellipticity {
    lambda: f64,
    upper: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
#[schemars(rename = "Ellipticity")]
struct EllipticityJson {
    lambda: f64,
    #[serde(rename = "Lambda")]
    upper: f64,
}

impl TryFrom<EllipticityJson> for Ellipticity {
    type Error = ExtremalError;

    fn try_from(j: EllipticityJson) -> Result<Self, ExtremalError> {
        Ellipticity::new(j.lambda, j.upper)
    }
}

impl From<Ellipticity> for EllipticityJson {
    fn from(e: Ellipticity) -> Self {
        EllipticityJson {
            lambda: e.lambda,
            upper: e.upper,
        }
    }
}

impl JsonSchema for Ellipticity {
    fn schema_name() -> String {
        EllipticityJson::schema_name()
    }

    fn json_schema(gen: &mut schemars::gen::SchemaGenerator) -> schemars::schema::Schema {
        EllipticityJson::json_schema(gen)
    }
}

impl Ellipticity {
    pub fn new(lambda: f64, upper: f64) -> Result<Self, ExtremalError> {
        if lambda > 0.0 && lambda <= upper && upper.is_finite() {
            Ok(Self { lambda, upper })
        } else {
            Err(ExtremalError::Ellipticity { lambda, upper })
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The upper constant `Λ`.
    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Both constants multiplied by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self, ExtremalError> {
        Self::new(self.lambda * t, self.upper * t)
    }
}

/// Parameter of the operators `P^±_λ`: `0 < λ ≤ 1/m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pucci66Param {
    lam: f64,
    m: usize,
}

impl Pucci66Param {
    pub fn new(lam: f64, m: usize) -> Result<Self, ExtremalError> {
        if m > 0 && lam > 0.0 && lam * m as f64 <= 1.0 + 1e-12 {
            Ok(Self { lam, m })
        } else {
            Err(ExtremalError::Pucci66 { lam, m })
        }
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            lam: self.lam * t,
            m: self.m,
        }
    }
}

/// Ascending eigenvalues plus the verification residual `max ‖Mv − ev‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub residual: f64,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<(), ExtremalError> {
    if !m.is_square() {
        return Err(ExtremalError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    let norm = m.norm();
    if asym > 1e-12 * norm {
        return Err(ExtremalError::NotSymmetric { asym, norm });
    }
    Ok(())
}

/// Eigenvalues and eigenvectors (columns) of a symmetric matrix, unsorted.
///
/// Both the closed forms and the Jacobi sweep are odd in `M`, so `−M` yields
/// exactly the negated eigenvalues.
fn eigen_sym(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    match n {
        0 => (Vec::new(), DMatrix::zeros(0, 0)),
        1 => (vec![m[(0, 0)]], DMatrix::identity(1, 1)),
        2 => {
            let (a, b, d) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
            let tr = a + d;
            let disc = (a - d).hypot(2.0 * b);
            let eig = [(tr - disc) / 2.0, (tr + disc) / 2.0];
            let mut vecs = DMatrix::zeros(2, 2);
            for (k, &e) in eig.iter().enumerate() {
                let v = if b == 0.0 {
                    if (e - a).abs() <= (e - d).abs() {
                        [1.0, 0.0]
                    } else {
                        [0.0, 1.0]
                    }
                } else {
                    let u = [b, e - a];
                    let w = [e - d, b];
                    if u[0].hypot(u[1]) >= w[0].hypot(w[1]) {
                        u
                    } else {
                        w
                    }
                };
                let nv = v[0].hypot(v[1]);
                vecs[(0, k)] = v[0] / nv;
                vecs[(1, k)] = v[1] / nv;
            }
            (eig.to_vec(), vecs)
        }
        _ => jacobi::jacobi_eigen(m),
    }
}

pub fn spectrum(m: &DMatrix<f64>) -> Result<Spectrum, ExtremalError> {
    check_symmetric(m)?;
    let (eig, vecs) = eigen_sym(m);
    let mut residual: f64 = 0.0;
    for (k, &e) in eig.iter().enumerate() {
        let v = vecs.column(k);
        residual = residual.max((m * v - v * e).norm());
    }
    let mut eigenvalues = eig;
    eigenvalues.sort_by(f64::total_cmp);
    Ok(Spectrum {
        eigenvalues,
        residual,
    })
}

/// Sums of the positive and negative eigenvalues outside the zero band,
/// accumulated in order of increasing magnitude.
fn signed_sums(eig: &[f64]) -> (f64, f64) {
    let norm = eig.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let band = 1e-12 * (1.0 + norm);
    let mut pos: Vec<f64> = eig.iter().copied().filter(|e| *e > band).collect();
    let mut neg: Vec<f64> = eig.iter().copied().filter(|e| *e < -band).collect();
    pos.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    neg.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    (pos.iter().sum(), neg.iter().sum())
}

/// `M⁺(M) = −λ Σ_{e>0} e − Λ Σ_{e<0} e`.
pub fn pucci_plus(ell: &Ellipticity, m: &DMatrix<f64>) -> Result<f64, ExtremalError> {
    check_symmetric(m)?;
    let (pos, neg) = signed_sums(&eigen_sym(m).0);
    Ok(-ell.lambda * pos - ell.upper * neg)
}

/// `M⁻(M) = −Λ Σ_{e>0} e − λ Σ_{e<0} e`.
pub fn pucci_minus(ell: &Ellipticity, m: &DMatrix<f64>) -> Result<f64, ExtremalError> {
    check_symmetric(m)?;
    let (pos, neg) = signed_sums(&eigen_sym(m).0);
    Ok(-ell.upper * pos - ell.lambda * neg)
}

fn pucci66_parts(p: &Pucci66Param, m: &DMatrix<f64>) -> Result<(f64, f64, f64), ExtremalError> {
    check_symmetric(m)?;
    if m.nrows() != p.m {
        return Err(ExtremalError::DimensionMismatch {
            expected: p.m,
            got: m.nrows(),
        });
    }
    let eig = eigen_sym(m).0;
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((m.trace(), lo, hi))
}

/// `P⁺(M) = −λ Tr M − (1 − mλ) e_min(M)`.
pub fn pucci66_plus(p: &Pucci66Param, m: &DMatrix<f64>) -> Result<f64, ExtremalError> {
    let (tr, lo, _) = pucci66_parts(p, m)?;
    Ok(-p.lam * tr - (1.0 - p.m as f64 * p.lam) * lo)
}

/// `P⁻(M) = −λ Tr M − (1 − mλ) e_max(M)`.
pub fn pucci66_minus(p: &Pucci66Param, m: &DMatrix<f64>) -> Result<f64, ExtremalError> {
    let (tr, _, hi) = pucci66_parts(p, m)?;
    Ok(-p.lam * tr - (1.0 - p.m as f64 * p.lam) * hi)
}

/// Closed-form spectrum of `sI + a v⊗v + b w⊗w + c(v⊗w + w⊗v)` for unit
/// `v`, `w` in dimension `m ≥ 2`.
pub fn rank2_eigenvalues(
    s: f64,
    a: f64,
    b: f64,
    c: f64,
    v: &[f64],
    w: &[f64],
) -> Result<Spectrum, ExtremalError> {
    let v = DVector::from_column_slice(v);
    let w = DVector::from_column_slice(w);
    for x in [&v, &w] {
        let n = x.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(ExtremalError::NonUnit(n));
        }
    }
    let m = v.len();
    let vw = v.dot(&w);
    let t = a + b + 2.0 * c * vw;
    let gap = 1.0 - vw * vw;
    let det = c * c - a * b;
    let scale = a.abs().max(b.abs()).max(c.abs()).max(1e-300);
    let mut eig = vec![s; m];
    if gap.abs() <= 1e-12 || det.abs() <= 1e-12 * scale * scale {
        eig[m - 1] = s + t;
    } else {
        let root = (t * t + 4.0 * gap * det).sqrt();
        eig[m - 2] = s + (t - root) / 2.0;
        eig[m - 1] = s + (t + root) / 2.0;
    }
    eig.sort_by(f64::total_cmp);

    let mut assembled = DMatrix::identity(m, m) * s;
    assembled.ger(a, &v, &v, 1.0);
    assembled.ger(b, &w, &w, 1.0);
    assembled.ger(c, &v, &w, 1.0);
    assembled.ger(c, &w, &v, 1.0);
    let mut residual: f64 = 0.0;
    for &e in &eig {
        let shifted = &assembled - DMatrix::identity(m, m) * e;
        let smallest = shifted
            .singular_values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        residual = residual.max(smallest);
    }
    Ok(Spectrum {
        eigenvalues: eig,
        residual,
    })
}
