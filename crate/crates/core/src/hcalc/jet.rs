use nalgebra::{DMatrix, DVector};

use super::{HcalcError, Taylor2};
use crate::expr::{Expr, PointEnv};
use crate::geometry::{gauge_generic, sigma, sigma_jacobians, GeometrySpec};

/// Horizontal gradient `D_X u` and symmetrized horizontal Hessian
/// `(D²_X u)*` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalJet {
    pub hgrad: DVector<f64>,
    pub hhess: DMatrix<f64>,
}

impl HorizontalJet {
    pub fn laplacian(&self) -> f64 {
        self.hhess.trace()
    }
}

/// A scalar function that can produce its second-order Taylor expansion.
pub trait ScalarField: Sync {
    fn taylor(&self, g: &GeometrySpec, p: &[f64]) -> Result<Taylor2, HcalcError>;

    fn value(&self, g: &GeometrySpec, p: &[f64]) -> Result<f64, HcalcError> {
        Ok(self.taylor(g, p)?.value)
    }
}

/// A point-scope expression with its singular-band width.
#[derive(Clone, Debug)]
pub struct ExprField {
    pub expr: Expr,
    pub eps_sing: f64,
}

impl ExprField {
    pub fn new(expr: Expr, eps_sing: f64) -> Self {
        Self { expr, eps_sing }
    }
}

impl ScalarField for ExprField {
    fn taylor(&self, g: &GeometrySpec, p: &[f64]) -> Result<Taylor2, HcalcError> {
        let out = self.expr.eval(&PointEnv::taylor(g, p, self.eps_sing))?;
        Ok(out.value)
    }

    fn value(&self, g: &GeometrySpec, p: &[f64]) -> Result<f64, HcalcError> {
        Ok(self.expr.eval(&PointEnv::plain(g, p, self.eps_sing))?.value)
    }
}

/// `f(ρ)` for a radial profile, differentiated through the gauge.
pub struct Radial<'a, P: super::RadialProfile + ?Sized>(pub &'a P);

impl<P: super::RadialProfile + ?Sized> ScalarField for Radial<'_, P> {
    fn taylor(&self, g: &GeometrySpec, p: &[f64]) -> Result<Taylor2, HcalcError> {
        let rho = gauge_generic(g, &Taylor2::seed(p));
        if rho.value <= 0.0 {
            return Err(HcalcError::ZeroGauge);
        }
        let (f0, f1, f2) = self.0.eval(rho.value)?;
        let t = rho.compose(f0, f1, f2);
        if !t.is_finite() {
            return Err(HcalcError::NonFinite);
        }
        Ok(t)
    }

    fn value(&self, g: &GeometrySpec, p: &[f64]) -> Result<f64, HcalcError> {
        let rho = crate::geometry::gauge(g, p);
        if rho <= 0.0 {
            return Err(HcalcError::ZeroGauge);
        }
        Ok(self.0.eval(rho)?.0)
    }
}

/// `g_ij = ((Dσ^j σ^i + Dσ^i σ^j)/2) · q`.
pub fn correction(g: &GeometrySpec, p: &[f64], q: &[f64]) -> DMatrix<f64> {
    let s = sigma(g, p);
    let jac = sigma_jacobians(g, p);
    correction_from(&s, &jac, q)
}

fn correction_from(s: &DMatrix<f64>, jac: &[DMatrix<f64>], q: &[f64]) -> DMatrix<f64> {
    let m = s.ncols();
    let q = DVector::from_column_slice(q);
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = &jac[j] * s.column(i) + &jac[i] * s.column(j);
            let gij = 0.5 * v.dot(&q);
            out[(i, j)] = gij;
            out[(j, i)] = gij;
        }
    }
    out
}

/// `D_X u = σᵀ Du`, `(D²_X u)* = sym(σᵀ D²u σ + g(p, Du))`.
pub fn jet_from_taylor(g: &GeometrySpec, p: &[f64], t: &Taylor2) -> HorizontalJet {
    let s = sigma(g, p);
    let jac = sigma_jacobians(g, p);
    let hgrad = s.transpose() * &t.grad;
    let raw = s.transpose() * &t.hess * &s + correction_from(&s, &jac, t.grad.as_slice());
    let hhess = (&raw + raw.transpose()) * 0.5;
    HorizontalJet { hgrad, hhess }
}

pub fn horizontal_jet(
    g: &GeometrySpec,
    u: &(impl ScalarField + ?Sized),
    p: &[f64],
) -> Result<HorizontalJet, HcalcError> {
    g.validate(p)?;
    let t = u.taylor(g, p)?;
    Ok(jet_from_taylor(g, p, &t))
}
