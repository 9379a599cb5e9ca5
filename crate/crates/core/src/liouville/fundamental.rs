use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::operator::SecondOrder;
use super::LiouvilleError;
use crate::extremal::Ellipticity;
use crate::geometry::{GeometryKind, GeometrySpec};
use crate::hcalc::{horizontal_jet, HcalcError, Radial, RadialProfile};
use crate::report::{Aggregation, Assembly, CheckReport, Outcome};
use crate::sampling::{salt, sample_shells, SamplePlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub enum FundamentalKind {
    Phi1,
    Phi2,
    Psi1,
    Psi2,
    Kaplan,
}

/// Radial solutions of `M^±_{λ,Λ}(D²u) = 0` off the origin on H-type
/// groups, and `ρ^{2−Q}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FundamentalProfile {
    pub kind: FundamentalKind,
    pub alpha: f64,
    pub beta: f64,
    pub q: f64,
    pub c1: f64,
    pub c2: f64,
}

/// `α = (λ/Λ)(Q−1)+1`, `β = (Λ/λ)(Q−1)+1`.
pub fn fundamental_profile(
    kind: FundamentalKind,
    ell: &Ellipticity,
    q: f64,
    c1: f64,
    c2: f64,
) -> Result<FundamentalProfile, LiouvilleError> {
    if !(c1 > 0.0) {
        return Err(LiouvilleError::InvalidParam(format!("C1 must be positive, got {c1}")));
    }
    if !(q > 2.0) {
        return Err(LiouvilleError::InvalidParam(format!("Q must exceed 2, got {q}")));
    }
    let (l, u) = (ell.lambda(), ell.upper());
    Ok(FundamentalProfile {
        kind,
        alpha: l / u * (q - 1.0) + 1.0,
        beta: u / l * (q - 1.0) + 1.0,
        q,
        c1,
        c2,
    })
}

impl FundamentalProfile {
    fn phi1(&self, rho: f64) -> (f64, f64, f64) {
        let (a, c1, c2) = (self.alpha, self.c1, self.c2);
        if a == 2.0 {
            return (c1 * rho.ln() + c2, c1 / rho, -c1 / (rho * rho));
        }
        let s = if a < 2.0 { c1 } else { -c1 };
        let e = 2.0 - a;
        (
            s * rho.powf(e) + c2,
            s * e * rho.powf(e - 1.0),
            s * e * (e - 1.0) * rho.powf(e - 2.0),
        )
    }

    fn power(&self, e: f64, rho: f64) -> (f64, f64, f64) {
        let c1 = self.c1;
        (
            c1 * rho.powf(e) + self.c2,
            c1 * e * rho.powf(e - 1.0),
            c1 * e * (e - 1.0) * rho.powf(e - 2.0),
        )
    }
}

impl RadialProfile for FundamentalProfile {
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64), HcalcError> {
        if rho <= 0.0 {
            return Err(HcalcError::ZeroGauge);
        }
        let neg = |(a, b, c): (f64, f64, f64)| (-a, -b, -c);
        Ok(match self.kind {
            FundamentalKind::Phi1 => self.phi1(rho),
            FundamentalKind::Phi2 => self.power(2.0 - self.beta, rho),
            FundamentalKind::Psi1 => neg(self.power(2.0 - self.beta, rho)),
            FundamentalKind::Psi2 => neg(self.phi1(rho)),
            FundamentalKind::Kaplan => {
                let e = 2.0 - self.q;
                (rho.powf(e), e * rho.powf(e - 1.0), e * (e - 1.0) * rho.powf(e - 2.0))
            }
        })
    }
}

impl FundamentalProfile {
    /// The operator this profile solves: `M⁺` for `Φ`, `M⁻` for `Ψ`, `−Δ` for Kaplan.
    pub fn operator(&self, ell: &Ellipticity) -> SecondOrder {
        match self.kind {
            FundamentalKind::Phi1 | FundamentalKind::Phi2 => SecondOrder::MPlus(*ell),
            FundamentalKind::Psi1 | FundamentalKind::Psi2 => SecondOrder::MMinus(*ell),
            FundamentalKind::Kaplan => SecondOrder::MMinus(Ellipticity::new(1.0, 1.0).expect("valid")),
        }
    }
}

/// Relative tolerance of the zero-residual check.
pub const FUNDAMENTAL_REL_TOL: f64 = 1e-8;

fn fundamental_applies(kind: FundamentalKind, g: &GeometrySpec) -> bool {
    match kind {
        FundamentalKind::Kaplan => !matches!(g.kind(), GeometryKind::FreeStep2 { .. }),
        _ => matches!(g.kind(), GeometryKind::HType7 | GeometryKind::Heisenberg { .. }),
    }
}

/// Checks `F(D²_X u) = 0` for the profile on the gauge annulus `[R0, R1]`.
///
/// The allowance is `1e−8 · Λ Σ|(D²_X u)*_{ij}|` plus the zero band of the
/// eigenvalue split.
pub fn check_fundamental(
    g: &GeometrySpec,
    prof: &FundamentalProfile,
    ell: &Ellipticity,
    (r_lo, r_hi): (f64, f64),
    plan: &SamplePlan,
) -> Result<CheckReport, LiouvilleError> {
    if !(r_lo > 0.0 && r_hi > r_lo) {
        return Err(LiouvilleError::InvalidParam(format!("annulus needs 0 < R0 < R1, got [{r_lo}, {r_hi}]")));
    }
    if !fundamental_applies(prof.kind, g) {
        return Err(LiouvilleError::Incompatible {
            id: format!("{:?}", prof.kind),
            geometry: g.name(),
        });
    }
    if prof.q != g.q() {
        return Err(LiouvilleError::InvalidParam(format!(
            "profile built for Q = {}, geometry has Q = {}",
            prof.q,
            g.q()
        )));
    }
    plan.validate().map_err(LiouvilleError::InvalidParam)?;
    let so = prof.operator(ell);
    let upper = match &so {
        SecondOrder::MPlus(e) | SecondOrder::MMinus(e) => e.upper(),
        _ => 1.0,
    };
    let shells = plan.annulus(r_lo, r_hi);
    let samples = sample_shells(g, plan, salt("fundamental"), &shells, plan.per_rung);
    let outcomes = samples
        .par_iter()
        .map(|s| {
            let Some(p) = &s.point else {
                return Ok(Outcome::Excluded("no admissible draw".into()));
            };
            let jet = horizontal_jet(g, &Radial(prof), p)?;
            let res = so.apply(g, p, &jet.hhess, plan.eps_sing)?;
            let scale = upper * jet.hhess.iter().map(|v| v.abs()).sum::<f64>();
            let band = upper * jet.hhess.nrows() as f64 * 1e-12 * (1.0 + jet.hhess.norm());
            let allow = plan.tolerances.abs + FUNDAMENTAL_REL_TOL * scale + band;
            Ok(Outcome::le(res.abs(), 0.0, allow).with("residual", vec![res]))
        })
        .collect::<Result<Vec<_>, LiouvilleError>>()?;
    let mut report = Assembly {
        check: "fundamental",
        geometry: g.name(),
        plan,
        shells,
        aggregation: Aggregation::Everywhere,
    }
    .finish(&samples, outcomes);
    report.details.insert("alpha".into(), prof.alpha);
    report.details.insert("beta".into(), prof.beta);
    report.details.insert("Q".into(), prof.q);
    report.notes.push(format!("{:?} under {}", prof.kind, so.name()));
    Ok(report)
}
