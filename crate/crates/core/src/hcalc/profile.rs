use crate::expr::{EvalError, Expr, ProfileEnv, Scope};
use crate::hcalc::{HcalcError, Taylor2};

/// A one-dimensional function `f(ρ)` with its first two derivatives.
pub trait RadialProfile: Sync {
    /// `(f, f', f'')` at `rho`.
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64), HcalcError>;
}

/// `ρ^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Power(pub f64);

impl RadialProfile for Power {
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64), HcalcError> {
        let k = self.0;
        Ok((
            rho.powf(k),
            k * rho.powf(k - 1.0),
            k * (k - 1.0) * rho.powf(k - 2.0),
        ))
    }
}

/// `log ρ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Log;

impl RadialProfile for Log {
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64), HcalcError> {
        if rho <= 0.0 {
            return Err(HcalcError::ZeroGauge);
        }
        Ok((rho.ln(), 1.0 / rho, -1.0 / (rho * rho)))
    }
}

/// `a·f + b` for another profile.
pub struct Affine<P> {
    pub inner: P,
    pub a: f64,
    pub b: f64,
}

impl<P: RadialProfile> RadialProfile for Affine<P> {
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64), HcalcError> {
        let (f0, f1, f2) = self.inner.eval(rho)?;
        Ok((self.a * f0 + self.b, self.a * f1, self.a * f2))
    }
}

/// A profile written in the expression language over the variable `rho`.
#[derive(Clone, Debug)]
pub struct ExprProfile(Expr);

impl ExprProfile {
    pub fn parse(src: &str) -> Result<Self, crate::expr::ParseError> {
        Ok(Self(Expr::parse(src, Scope::Profile)?))
    }
}

impl RadialProfile for ExprProfile {
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64), HcalcError> {
        let t = self.0.eval(&ProfileEnv {
            rho: Taylor2::variable(rho, 0, 1),
        })?;
        let v = t.value;
        Ok((v.value, v.grad[0], v.hess[(0, 0)]))
    }
}

/// A profile from closures.
pub struct FnProfile<F>(pub F);

impl<F> RadialProfile for FnProfile<F>
where
    F: Fn(f64) -> (f64, f64, f64) + Sync,
{
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64), HcalcError> {
        let out = (self.0)(rho);
        if out.0.is_finite() && out.1.is_finite() && out.2.is_finite() {
            Ok(out)
        } else {
            Err(HcalcError::Eval(EvalError::NonFinite))
        }
    }
}

/// Largest relative disagreement between the coded derivatives and central
/// differences (step `1e-4·ρ`) over `grid`.
pub fn derivative_consistency(prof: &dyn RadialProfile, grid: &[f64]) -> Result<f64, HcalcError> {
    let mut worst: f64 = 0.0;
    for &r in grid {
        let h = 1e-4 * r;
        let (f0, f1, f2) = prof.eval(r)?;
        let fp = prof.eval(r + h)?.0;
        let fm = prof.eval(r - h)?.0;
        let d1 = (fp - fm) / (2.0 * h);
        let d2 = (fp - 2.0 * f0 + fm) / (h * h);
        let scale1 = 1.0 + f1.abs().max(f0.abs() / r);
        let scale2 = 1.0 + f2.abs().max(f0.abs() / (r * r));
        worst = worst.max((d1 - f1).abs() / scale1).max((d2 - f2).abs() / scale2);
    }
    Ok(worst)
}
