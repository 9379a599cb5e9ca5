//! The five vector-field families: Heisenberg, the 7-dimensional H-type
//! group, free step-two groups, Grushin fields and Heisenberg-Greiner
//! fields.
//!
//! Coordinates are always laid out as `(x_H, x_V)`: the first-layer block
//! followed by the second-layer block. For Grushin fields the blocks are
//! `(x, y)` and for Heisenberg-Greiner fields `(x, t)`.

mod fields;
mod spec;

pub use fields::{dilate, gauge, gauge_generic, sigma, sigma_generic, HTYPE7_B};
pub use spec::{GeometryKind, GeometrySpec};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hcalc::Taylor2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point has {got} coordinates, geometry expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point has a non-finite coordinate at index {0}")]
    NonFinite(usize),
    #[error("invalid geometry parameter: {0}")]
    InvalidParam(String),
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("field index {index} out of range for horizontal rank {m}")]
    FieldIndex { index: usize, m: usize },
}

/// A point of the ambient space, validated against a geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(g: &GeometrySpec, coords: Vec<f64>) -> Result<Self, GeometryError> {
        g.validate(&coords)?;
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// First-layer coordinates.
    pub fn x_h<'a>(&'a self, g: &GeometrySpec) -> &'a [f64] {
        &self.coords[..g.layer_split()]
    }

    /// Second-layer coordinates.
    pub fn x_v<'a>(&'a self, g: &GeometrySpec) -> &'a [f64] {
        &self.coords[g.layer_split()..]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularKind {
    /// Only the origin.
    Origin,
    /// The vertical axis `{x_H = 0}` (for Grushin fields `{x = 0}`).
    HorizontalAxis,
}

/// Points where gauge or field formulas degenerate, thickened by `eps` in
/// gauge units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularSet {
    pub kind: SingularKind,
    pub eps: f64,
}

pub const DEFAULT_EPS_SING: f64 = 1e-3;

impl SingularSet {
    /// Scale-free distance to the set: `ρ` for the origin, `|x_H|/ρ` for the
    /// axis (which is invariant under dilations).
    pub fn distance(&self, g: &GeometrySpec, p: &[f64]) -> f64 {
        let rho = gauge(g, p);
        match self.kind {
            SingularKind::Origin => rho,
            SingularKind::HorizontalAxis => {
                if rho == 0.0 {
                    0.0
                } else {
                    g.xh_norm(p) / rho
                }
            }
        }
    }

    pub fn contains(&self, g: &GeometrySpec, p: &[f64]) -> bool {
        self.distance(g, p) < self.eps
    }
}

impl GeometrySpec {
    pub fn singular_set(&self, eps: f64) -> SingularSet {
        let kind = match self.kind() {
            GeometryKind::FreeStep2 { .. } => SingularKind::Origin,
            _ => SingularKind::HorizontalAxis,
        };
        SingularSet { kind, eps }
    }

    pub fn singular_description(&self) -> &'static str {
        match self.kind() {
            GeometryKind::FreeStep2 { .. } => "{0}",
            GeometryKind::Grushin { .. } => "{x = 0}",
            _ => "{x_H = 0}",
        }
    }

    pub fn validate(&self, p: &[f64]) -> Result<(), GeometryError> {
        if p.len() != self.d_amb() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.d_amb(),
                got: p.len(),
            });
        }
        if let Some(i) = p.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite(i));
        }
        Ok(())
    }

    pub fn xh_norm(&self, p: &[f64]) -> f64 {
        p[..self.layer_split()].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn xv_norm(&self, p: &[f64]) -> f64 {
        p[self.layer_split()..].iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Euclidean derivative of every σ column: `out[j]` is the d×d Jacobian of
/// column `j` (row = component, column = coordinate).
pub fn sigma_jacobians(g: &GeometrySpec, p: &[f64]) -> Vec<DMatrix<f64>> {
    let d = g.d_amb();
    let cols = sigma_generic(g, &Taylor2::seed(p));
    cols.iter()
        .map(|col| {
            let mut jac = DMatrix::zeros(d, d);
            for (r, entry) in col.iter().enumerate() {
                jac.row_mut(r).copy_from(&entry.grad.transpose());
            }
            jac
        })
        .collect()
}

/// Coefficient vector of `[X_i, X_j]` at `p`.
pub fn lie_bracket(
    g: &GeometrySpec,
    i: usize,
    j: usize,
    p: &[f64],
) -> Result<DVector<f64>, GeometryError> {
    g.validate(p)?;
    let m = g.m();
    for index in [i, j] {
        if index >= m {
            return Err(GeometryError::FieldIndex { index, m });
        }
    }
    let s = sigma(g, p);
    let jac = sigma_jacobians(g, p);
    Ok(bracket_from(&s, &jac, i, j))
}

fn bracket_from(s: &DMatrix<f64>, jac: &[DMatrix<f64>], i: usize, j: usize) -> DVector<f64> {
    &jac[j] * s.column(i) - &jac[i] * s.column(j)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HormanderRank {
    pub rank: usize,
    /// True when fields plus first brackets fail to span the ambient space.
    pub needs_higher_brackets: bool,
}

/// Numerical rank of the span of the fields and their first brackets.
pub fn hormander_rank(g: &GeometrySpec, p: &[f64]) -> Result<HormanderRank, GeometryError> {
    g.validate(p)?;
    let d = g.d_amb();
    let m = g.m();
    let s = sigma(g, p);
    let jac = sigma_jacobians(g, p);
    let mut cols: Vec<DVector<f64>> = (0..m).map(|j| s.column(j).into_owned()).collect();
    for i in 0..m {
        for j in (i + 1)..m {
            cols.push(bracket_from(&s, &jac, i, j));
        }
    }
    let mat = DMatrix::from_columns(&cols);
    let sv = mat.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let tol = 1e-10 * top.max(1.0);
    let rank = sv.iter().filter(|&&v| v > tol).count().min(d);
    Ok(HormanderRank {
        rank,
        needs_higher_brackets: rank < d,
    })
}
