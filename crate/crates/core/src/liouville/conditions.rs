//! Sufficient conditions for `log ρ` to be a Lyapunov function, evaluated
//! pointwise on a radius ladder.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::coeffs::{dot, CoefficientValues, Mode};
use super::lyapunov::{verify_lyapunov, LyapunovCandidate};
use super::operator::{OperatorSpec, SecondOrder};
use super::LiouvilleError;
use crate::expr::DriftFrame;
use crate::extremal::{pucci_plus, Ellipticity, Pucci66Param};
use crate::geometry::{GeometryKind, GeometrySpec};
use crate::hcalc::{
    free_eta, gauge_jet, greiner_eta, grushin_plane_eta, htype7_mu, radial_horizontal_hessian, Log,
};
use crate::report::{Aggregation, Assembly, CheckReport, Outcome, Verdict};
use crate::sampling::{salt, sample_shells, SamplePlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
pub enum ConditionId {
    #[serde(rename = "condgen")]
    CondGen,
    #[serde(rename = "condH")]
    CondH,
    #[serde(rename = "condHimp")]
    CondHImp,
    #[serde(rename = "liohad_gate")]
    LiohadGate,
    #[serde(rename = "OUtype")]
    OuType,
    #[serde(rename = "c_a_sign_order")]
    CaSignOrder,
    #[serde(rename = "condcor1free")]
    CondCor1Free,
    #[serde(rename = "condcor1freepucci")]
    CondCor1FreePucci,
    #[serde(rename = "Grucond")]
    GruCond,
    #[serde(rename = "condcor1grushin")]
    CondCor1Grushin,
    #[serde(rename = "condcor1")]
    CondCor1,
}

impl ConditionId {
    pub const ALL: [ConditionId; 11] = [
        Self::CondGen,
        Self::CondH,
        Self::CondHImp,
        Self::LiohadGate,
        Self::OuType,
        Self::CaSignOrder,
        Self::CondCor1Free,
        Self::CondCor1FreePucci,
        Self::GruCond,
        Self::CondCor1Grushin,
        Self::CondCor1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CondGen => "condgen",
            Self::CondH => "condH",
            Self::CondHImp => "condHimp",
            Self::LiohadGate => "liohad_gate",
            Self::OuType => "OUtype",
            Self::CaSignOrder => "c_a_sign_order",
            Self::CondCor1Free => "condcor1free",
            Self::CondCor1FreePucci => "condcor1freepucci",
            Self::GruCond => "Grucond",
            Self::CondCor1Grushin => "condcor1grushin",
            Self::CondCor1 => "condcor1",
        }
    }

    pub fn applies_to(self, g: &GeometrySpec) -> bool {
        match (self, g.kind()) {
            (Self::CondGen, GeometryKind::FreeStep2 { r }) => *r < 3,
            (Self::CondGen | Self::LiohadGate, _) => true,
            (Self::CondH | Self::OuType | Self::CaSignOrder, k) => *k == GeometryKind::HType7,
            (Self::CondHImp, k) => matches!(k, GeometryKind::HType7 | GeometryKind::Heisenberg { .. }),
            (Self::CondCor1Free | Self::CondCor1FreePucci, k) => matches!(k, GeometryKind::FreeStep2 { .. }),
            (Self::GruCond, k) => matches!(k, GeometryKind::Grushin { .. }),
            (Self::CondCor1Grushin, _) => g.is_grushin_plane(),
            (Self::CondCor1, k) => {
                matches!(k, GeometryKind::HeisenbergGreiner { .. } | GeometryKind::Heisenberg { .. })
            }
        }
    }

    /// Frame in which the drift entries are read.
    pub fn drift_frame(self) -> DriftFrame {
        match self {
            Self::OuType | Self::CaSignOrder => DriftFrame::Euclidean,
            _ => DriftFrame::Horizontal,
        }
    }

    /// Whether the inequality only has to hold beyond an onset radius.
    pub fn aggregation(self) -> Aggregation {
        match self {
            Self::LiohadGate => Aggregation::Everywhere,
            _ => Aggregation::Onset,
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionId {
    type Err = LiouvilleError;

    fn from_str(s: &str) -> Result<Self, LiouvilleError> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| LiouvilleError::UnknownId(s.to_string()))
    }
}

/// Extra inputs some conditions need.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ConditionParams {
    /// Rates `γ_i` of the linear drift used by `OUtype`; all 1 when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
}

struct Constants {
    lambda: f64,
    upper: f64,
    p66: Option<Pucci66Param>,
    gammas: Vec<f64>,
}

fn constants(
    id: ConditionId,
    g: &GeometrySpec,
    op: &OperatorSpec,
    params: &ConditionParams,
) -> Result<Constants, LiouvilleError> {
    let (lambda, upper, p66) = match &op.second_order {
        SecondOrder::MMinus(e) | SecondOrder::MPlus(e) => (e.lambda(), e.upper(), None),
        SecondOrder::P66Minus(q) | SecondOrder::P66Plus(q) => (q.lam(), q.lam(), Some(*q)),
        SecondOrder::NegTraceA(_) => {
            return Err(LiouvilleError::InvalidParam(format!(
                "{id} needs Pucci constants, got a NegTraceA operator"
            )))
        }
    };
    if id == ConditionId::CondCor1FreePucci && p66.is_none() {
        return Err(LiouvilleError::InvalidParam(
            "condcor1freepucci needs a P66Minus operator".into(),
        ));
    }
    let gammas = match &params.gammas {
        None => vec![1.0; g.d_amb()],
        Some(v) if v.len() != g.d_amb() => {
            return Err(LiouvilleError::Arity {
                what: "gammas",
                expected: g.d_amb(),
                got: v.len(),
            })
        }
        Some(v) if v.iter().any(|&x| !(x > 0.0)) => {
            return Err(LiouvilleError::InvalidParam("gammas must be positive".into()))
        }
        Some(v) => v.clone(),
    };
    Ok(Constants {
        lambda,
        upper,
        p66,
        gammas,
    })
}

/// `(extremum of value, largest scale)` over the index set.
fn extremum_scaled(vals: &CoefficientValues, mode: Mode, f: impl Fn(&[f64], f64) -> (f64, f64)) -> (f64, f64) {
    let mut best: Option<f64> = None;
    let mut scale: f64 = 0.0;
    for (b, &c) in vals.b.iter().zip(&vals.c) {
        let (v, s) = f(b, c);
        scale = scale.max(s);
        best = Some(match (best, mode) {
            (None, _) => v,
            (Some(x), Mode::Sup) => x.max(v),
            (Some(x), Mode::Inf) => x.min(v),
        });
    }
    (best.unwrap_or(0.0), scale)
}

fn le(lhs: (f64, f64), rhs: f64, rhs_scale: f64, plan: &SamplePlan) -> Outcome {
    let allowance = plan.tolerances.allowance(lhs.1 + rhs_scale);
    Outcome::le(lhs.0, rhs, allowance)
}

fn evaluate(
    id: ConditionId,
    g: &GeometrySpec,
    k: &Constants,
    vals: &CoefficientValues,
    p: &[f64],
    plan: &SamplePlan,
) -> Result<Outcome, LiouvilleError> {
    let gj = gauge_jet(g, p)?;
    let rho = gj.rho;
    let q = g.q();
    let log = rho.ln();
    let xh2 = g.xh_norm(p).powi(2);
    let drho = gj.drho.as_slice();
    let (lambda, upper) = (k.lambda, k.upper);
    Ok(match id {
        ConditionId::CondGen => {
            let lhs = extremum_scaled(vals, Mode::Sup, |b, c| {
                let (t1, t2) = (rho * dot(b, drho), c * rho * rho * log);
                (t1 - t2, t1.abs() + t2.abs())
            });
            let rhs = -lambda * (q - 2.0) * gj.drho_sq;
            le(lhs, rhs, rhs.abs(), plan)
        }
        ConditionId::CondH | ConditionId::CondHImp => {
            let mu: Vec<f64> = match g.kind() {
                GeometryKind::Heisenberg { d } => greiner_eta(*d, 1, p),
                _ => htype7_mu(p).to_vec(),
            };
            let r4 = rho.powi(4) * log;
            let term = |b: &[f64], c: f64| {
                let (t1, t2) = (dot(b, &mu) / xh2, c * r4 / xh2);
                (t1 - t2, t1.abs() + t2.abs())
            };
            let (lhs, rhs) = if id == ConditionId::CondH {
                (extremum_scaled(vals, Mode::Sup, term), lambda - upper * (q - 1.0))
            } else {
                (extremum_scaled(vals, Mode::Inf, term), upper - lambda * (q - 1.0))
            };
            le(lhs, rhs, lambda + upper * (q - 1.0), plan).with("mu", mu)
        }
        ConditionId::LiohadGate => {
            let jet = radial_horizontal_hessian(g, &Log, p)?;
            let ell = Ellipticity::new(lambda, upper)?;
            let val = pucci_plus(&ell, &jet.hhess)?;
            let scale = upper * jet.hhess.iter().map(|v| v.abs()).sum::<f64>();
            Outcome::le(0.0, val, plan.tolerances.allowance(scale)).with("mplus_log_rho", vec![val])
        }
        ConditionId::OuType => {
            let split = g.layer_split();
            let dr = euclid_drho_htype(p, rho);
            let r3 = rho.powi(3);
            let linear: f64 = (0..p.len()).map(|i| k.gammas[i] * p[i] * dr[i]).sum::<f64>() * r3;
            let gamma0 = k.gammas.iter().copied().fold(f64::INFINITY, f64::min);
            let c1 = upper * (q - 1.0) - lambda;
            let xv2: f64 = p[split..].iter().map(|v| v * v).sum();
            let (sup_b, sup_scale) = extremum_scaled(vals, Mode::Sup, |b, _| {
                let t = r3 * dot(b, &dr);
                (t, t.abs())
            });
            let lhs = sup_b + linear;
            let rhs = xh2 * (gamma0 * xh2 - c1) + 0.5 * gamma0 * xv2;
            let rhs_scale = gamma0 * xh2 * xh2 + c1 * xh2 + 0.5 * gamma0 * xv2;
            le((lhs, sup_scale + linear.abs()), rhs, rhs_scale, plan)
                .with("drift_excess", vec![lhs])
        }
        ConditionId::CaSignOrder => {
            let dr = euclid_drho_htype(p, rho);
            let c1 = upper * (q - 1.0) - lambda;
            let (sign, _) = extremum_scaled(vals, Mode::Sup, |b, _| (dot(b, &dr), 0.0));
            let c_a = vals.c.iter().copied().fold(f64::INFINITY, f64::min) * log;
            let order = vals.max_b_norm() / rho;
            let lhs = c1 * xh2 / rho.powi(4) + sign.max(0.0) / rho;
            let allowance = plan.tolerances.allowance(lhs.abs() + c_a.abs());
            let pass = c_a - lhs >= -allowance && c_a > 0.0;
            Outcome::Evaluated {
                lhs,
                rhs: c_a,
                pass,
                quantities: Default::default(),
            }
            .with("sign", vec![sign])
            .with("order", vec![order])
            .with("c_a", vec![c_a])
        }
        ConditionId::CondCor1Free => {
            let GeometryKind::FreeStep2 { r } = g.kind() else { unreachable!() };
            let lhs = extremum_scaled(vals, Mode::Sup, |b, c| {
                let (t1, t2) = (dot(b, drho) / rho, c * log);
                (t1 - t2, t1.abs() + t2.abs())
            });
            let a = 4.0 * lambda * gj.drho_sq / (rho * rho);
            let bterm = 3.0 * upper * *r as f64 * xh2 / rho.powi(4);
            le(lhs, a - bterm, a + bterm, plan).with("eta", free_eta(*r, p))
        }
        ConditionId::CondCor1FreePucci => {
            let GeometryKind::FreeStep2 { r } = g.kind() else { unreachable!() };
            let lam = k.p66.expect("checked in constants").lam();
            let eta = free_eta(*r, p);
            let r4 = rho.powi(4) * log;
            let lhs = extremum_scaled(vals, Mode::Sup, |b, c| {
                let (t1, t2) = (dot(b, &eta), c * r4);
                (t1 - t2, t1.abs() + t2.abs())
            });
            let a = 4.0 * lam * rho * rho * gj.drho_sq;
            le(lhs, -3.0 * xh2 + a, 3.0 * xh2 + a, plan).with("eta_bar", eta)
        }
        ConditionId::GruCond => {
            let GeometryKind::Grushin { gamma, .. } = g.kind() else { unreachable!() };
            let ax2g = g.xh_norm(p).powf(2.0 * gamma);
            let f = rho.powf(2.0 * gamma + 1.0) / ax2g;
            let qv: Vec<f64> = drho.iter().map(|v| v * f).collect();
            let lhs = extremum_scaled(vals, Mode::Sup, |b, c| {
                let (t1, t2) = (dot(b, &qv), c * f * rho * log);
                (t1 - t2, t1.abs() + t2.abs())
            });
            le(lhs, -(q - 2.0), q - 2.0, plan).with("q", qv)
        }
        ConditionId::CondCor1Grushin => {
            let (x, y) = (p[0], p[1]);
            let eta = grushin_plane_eta(p);
            let r4 = rho.powi(4) * log;
            let (v, s) = extremum_scaled(vals, Mode::Sup, |b, c| {
                let (t1, t2) = (dot(b, &eta), c * r4);
                (t1 - t2, t1.abs() + t2.abs())
            });
            let root = (9.0 * x.powi(4) + 4.0 * y * y).sqrt();
            let rhs = (-upper - lambda) * x * x + (lambda - upper) * root;
            le((2.0 * v, 2.0 * s), rhs, (upper + lambda) * (x * x + root), plan).with("eta_tilde", eta.to_vec())
        }
        ConditionId::CondCor1 => {
            let (d, delta) = match g.kind() {
                GeometryKind::Heisenberg { d } => (*d, 1),
                GeometryKind::HeisenbergGreiner { d, delta } => (*d, *delta),
                _ => unreachable!(),
            };
            let eta = greiner_eta(d, delta, p);
            let denom = xh2.powi(2 * delta as i32 - 1);
            let n4 = rho.powi(4 * delta as i32) * log;
            let lhs = extremum_scaled(vals, Mode::Sup, |b, c| {
                let (t1, t2) = (dot(b, &eta) / denom, c * n4 / denom);
                (t1 - t2, t1.abs() + t2.abs())
            });
            le(lhs, -(q - 2.0), q - 2.0, plan).with("eta", eta)
        }
    })
}

/// Euclidean gradient of the H-type gauge: `(2|x_H|² x_H, x_V) / (2ρ³)`.
fn euclid_drho_htype(p: &[f64], rho: f64) -> Vec<f64> {
    let xh2: f64 = p[..4].iter().map(|v| v * v).sum();
    let r3 = 2.0 * rho.powi(3);
    p.iter()
        .enumerate()
        .map(|(i, &v)| if i < 4 { 2.0 * xh2 * v / r3 } else { v / r3 })
        .collect()
}

/// Evaluates condition `id` on the ladder `plan.r0 · 2^j`.
pub fn check_condition(
    id: ConditionId,
    g: &GeometrySpec,
    op: &OperatorSpec,
    params: &ConditionParams,
    plan: &SamplePlan,
) -> Result<CheckReport, LiouvilleError> {
    if !id.applies_to(g) {
        return Err(LiouvilleError::Incompatible {
            id: id.to_string(),
            geometry: g.name(),
        });
    }
    if op.coeffs.frame != id.drift_frame() {
        return Err(LiouvilleError::InvalidParam(format!(
            "{id} reads the drift in the {:?} frame",
            id.drift_frame()
        )));
    }
    plan.validate().map_err(LiouvilleError::InvalidParam)?;
    let k = constants(id, g, op, params)?;
    let shells = plan.ladder();
    let samples = sample_shells(g, plan, salt(id.as_str()), &shells, plan.per_rung);
    let outcomes = samples
        .par_iter()
        .map(|s| -> Result<Outcome, LiouvilleError> {
            let Some(p) = &s.point else {
                return Ok(Outcome::Excluded("no admissible draw".into()));
            };
            let vals = op.coeffs.eval(g, p, plan.eps_sing)?;
            if vals.min_c() < 0.0 {
                return Ok(Outcome::Excluded("negative zero-order coefficient".into()));
            }
            evaluate(id, g, &k, &vals, p, plan)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = Assembly {
        check: id.as_str(),
        geometry: g.name(),
        plan,
        shells,
        aggregation: id.aggregation(),
    }
    .finish(&samples, outcomes);
    report.details.insert("Q".into(), g.q());
    report.details.insert("lambda".into(), k.lambda);
    report.details.insert("Lambda".into(), k.upper);
    if id == ConditionId::LiohadGate {
        let bound = k.upper / k.lambda + 1.0;
        report.details.insert("Lambda_over_lambda_plus_one".into(), bound);
        report.notes.push(format!(
            "Q = {} {} Lambda/lambda + 1 = {bound}",
            g.q(),
            if g.q() <= bound { "<=" } else { ">" }
        ));
    }
    if id == ConditionId::OuType {
        let gamma0 = k.gammas.iter().copied().fold(f64::INFINITY, f64::min);
        report.details.insert("gamma0".into(), gamma0);
        report.details.insert("C1".into(), k.upper * (g.q() - 1.0) - k.lambda);
    }
    Ok(report)
}

/// The operator and candidate whose supersolution property condition `id`
/// guarantees.
pub fn paired_check(
    id: ConditionId,
    g: &GeometrySpec,
    op: &OperatorSpec,
) -> Result<(OperatorSpec, LyapunovCandidate), LiouvilleError> {
    let k = constants(id, g, op, &ConditionParams::default())?;
    let ell = |l: f64, u: f64| -> Result<Ellipticity, LiouvilleError> { Ok(Ellipticity::new(l, u)?) };
    let second_order = match id {
        ConditionId::CondGen => SecondOrder::MMinus(ell(k.lambda, k.lambda)?),
        ConditionId::CondHImp | ConditionId::LiohadGate => SecondOrder::MPlus(ell(k.lambda, k.upper)?),
        ConditionId::CondCor1FreePucci => SecondOrder::P66Minus(k.p66.expect("checked in constants")),
        ConditionId::GruCond | ConditionId::CondCor1 => SecondOrder::MMinus(ell(1.0, 1.0)?),
        _ => SecondOrder::MMinus(ell(k.lambda, k.upper)?),
    };
    let paired = if id == ConditionId::LiohadGate {
        OperatorSpec::pure(second_order, g)
    } else {
        let mode = second_order.paired_mode().unwrap_or(Mode::Inf);
        OperatorSpec {
            second_order,
            coeffs: op.coeffs.clone().with_mode(mode),
        }
    };
    Ok((paired, LyapunovCandidate::LogRho))
}

/// A condition report together with the Lyapunov check on `[R*, 4R*]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub condition: CheckReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lyapunov: Option<CheckReport>,
}

impl Consistency {
    /// Holds when the condition holds and the follow-up check agrees.
    pub fn verdict(&self) -> Verdict {
        match (&self.condition.verdict, &self.lyapunov) {
            (Verdict::Holds, Some(l)) => l.verdict,
            (v, _) => *v,
        }
    }
}

/// Runs the condition and, when it holds with onset `R*`, the paired
/// Lyapunov check on `[R*, 4R*]`.
pub fn check_with_lyapunov(
    id: ConditionId,
    g: &GeometrySpec,
    op: &OperatorSpec,
    params: &ConditionParams,
    plan: &SamplePlan,
) -> Result<Consistency, LiouvilleError> {
    let condition = check_condition(id, g, op, params, plan)?;
    let lyapunov = match (condition.verdict, condition.onset_radius) {
        (Verdict::Holds, Some(r)) => {
            let (paired, cand) = paired_check(id, g, op)?;
            Some(verify_lyapunov(g, &paired, &cand, (r, 4.0 * r), plan)?)
        }
        _ => None,
    };
    Ok(Consistency { condition, lyapunov })
}
