use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::operator::{pde_residual_parts, OperatorSpec};
use super::LiouvilleError;
use crate::expr::{EvalError, Expr};
use crate::geometry::GeometrySpec;
use crate::hcalc::{Affine, ExprField, HcalcError, Log, Power, Radial, ScalarField, Taylor2};
use crate::report::{Aggregation, Assembly, CheckReport, Outcome};
use crate::sampling::{salt, sample_shells, SamplePlan};

/// Which side of zero the residual must stay on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    /// Supersolution: residual ≥ 0.
    Positive,
    /// Subsolution: residual ≤ 0.
    Negative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "shape", deny_unknown_fields)]
pub enum CandidateJson {
    LogRho,
    RhoSquared,
    NegLogRho,
    Custom { expr: String, sign: Sign },
}

/// Exhaustion function `w` (positive) or `W` (negative).
#[derive(Clone, Debug)]
pub enum LyapunovCandidate {
    LogRho,
    RhoSquared,
    NegLogRho,
    Custom { field: ExprField, sign: Sign },
}

impl LyapunovCandidate {
    pub fn from_json(j: &CandidateJson, g: &GeometrySpec, eps_sing: f64) -> Result<Self, LiouvilleError> {
        Ok(match j {
            CandidateJson::LogRho => Self::LogRho,
            CandidateJson::RhoSquared => Self::RhoSquared,
            CandidateJson::NegLogRho => Self::NegLogRho,
            CandidateJson::Custom { expr, sign } => Self::Custom {
                field: ExprField::new(
                    Expr::for_geometry(expr, g).map_err(|e| LiouvilleError::Parse(format!("candidate: {e}")))?,
                    eps_sing,
                ),
                sign: *sign,
            },
        })
    }

    pub fn sign(&self) -> Sign {
        match self {
            Self::LogRho | Self::RhoSquared => Sign::Positive,
            Self::NegLogRho => Sign::Negative,
            Self::Custom { sign, .. } => *sign,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::LogRho => "log(rho)".into(),
            Self::RhoSquared => "rho^2".into(),
            Self::NegLogRho => "-log(rho)".into(),
            Self::Custom { field, .. } => field.expr.to_string(),
        }
    }
}

impl ScalarField for LyapunovCandidate {
    fn taylor(&self, g: &GeometrySpec, p: &[f64]) -> Result<Taylor2, HcalcError> {
        match self {
            Self::LogRho => Radial(&Log).taylor(g, p),
            Self::RhoSquared => Radial(&Power(2.0)).taylor(g, p),
            Self::NegLogRho => Radial(&Affine {
                inner: Log,
                a: -1.0,
                b: 0.0,
            })
            .taylor(g, p),
            Self::Custom { field, .. } => field.taylor(g, p),
        }
    }
}

fn exclusion(e: &LiouvilleError) -> Option<String> {
    match e {
        LiouvilleError::Eval(EvalError::Singular { .. })
        | LiouvilleError::Hcalc(HcalcError::Eval(EvalError::Singular { .. }))
        | LiouvilleError::Hcalc(HcalcError::Singular)
        | LiouvilleError::Hcalc(HcalcError::ZeroGauge) => Some(e.to_string()),
        _ => None,
    }
}

/// Samples `shells` and checks the sign of the residual of `u` under `op`.
///
/// Samples in the singular band of an expression, or with some `c^α < 0`,
/// are excluded; any other evaluation failure is returned as an error.
pub fn residual_sign_check(
    check: &str,
    g: &GeometrySpec,
    op: &OperatorSpec,
    u: &(impl ScalarField + ?Sized),
    sign: Sign,
    shells: Vec<(f64, f64)>,
    plan: &SamplePlan,
) -> Result<CheckReport, LiouvilleError> {
    plan.validate().map_err(LiouvilleError::InvalidParam)?;
    let samples = sample_shells(g, plan, salt(check), &shells, plan.per_rung);
    let outcomes = samples
        .par_iter()
        .map(|s| -> Result<Outcome, LiouvilleError> {
            let Some(p) = &s.point else {
                return Ok(Outcome::Excluded("no admissible draw".into()));
            };
            let vals = op.coeffs.eval(g, p, plan.eps_sing);
            match vals {
                Ok(v) if v.min_c() < 0.0 => {
                    return Ok(Outcome::Excluded("negative zero-order coefficient".into()))
                }
                Err(e) => {
                    let e = LiouvilleError::from(e);
                    return exclusion(&e).map(Outcome::Excluded).ok_or(e);
                }
                _ => {}
            }
            let res = match pde_residual_parts(g, op, u, p, plan.eps_sing) {
                Ok(r) => r,
                Err(e) => return exclusion(&e).map(Outcome::Excluded).ok_or(e),
            };
            let allowance = plan.tolerances.allowance(res.scale());
            let total = res.total();
            let out = match sign {
                Sign::Positive => Outcome::le(0.0, total, allowance),
                Sign::Negative => Outcome::le(total, 0.0, allowance),
            };
            Ok(out.with("residual", vec![total]))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Assembly {
        check,
        geometry: g.name(),
        plan,
        shells,
        aggregation: Aggregation::Everywhere,
    }
    .finish(&samples, outcomes))
}

/// Checks that `cand` is a super- (positive) or subsolution (negative) of
/// `op` on the annulus `R0 ≤ ρ ≤ R1`, split into `plan.rungs` pieces.
pub fn verify_lyapunov(
    g: &GeometrySpec,
    op: &OperatorSpec,
    cand: &LyapunovCandidate,
    (r0, r1): (f64, f64),
    plan: &SamplePlan,
) -> Result<CheckReport, LiouvilleError> {
    if !(r0 > 0.0 && r1 > r0 && r1.is_finite()) {
        return Err(LiouvilleError::InvalidParam(format!(
            "annulus needs 0 < R0 < R1, got [{r0}, {r1}]"
        )));
    }
    let shells = plan.annulus(r0, r1);
    let mut report = residual_sign_check("verify_lyapunov", g, op, cand, cand.sign(), shells, plan)?;
    report.notes.push(format!("candidate {}", cand.name()));
    Ok(report)
}
