//! Explicit non-constant sub- and supersolutions.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::LiouvilleError;
use crate::extremal::{pucci_plus, Ellipticity};
use crate::geometry::{GeometryKind, GeometrySpec};
use crate::hcalc::{gauge_jet, horizontal_jet, HcalcError, Radial, RadialProfile};
use crate::report::{Aggregation, Assembly, CheckReport, Outcome, Verdict};
use crate::sampling::{salt, sample_shells, SamplePlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleId {
    NonexU1,
    GrushinUbar,
    HgSubsolution,
    OptimalityDrift,
}

impl CounterexampleId {
    pub const ALL: [CounterexampleId; 4] = [
        Self::NonexU1,
        Self::GrushinUbar,
        Self::HgSubsolution,
        Self::OptimalityDrift,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::NonexU1 => "nonex_u1",
            Self::GrushinUbar => "grushin_ubar",
            Self::HgSubsolution => "hg_subsolution",
            Self::OptimalityDrift => "optimality_drift",
        }
    }

    pub fn applies_to(self, g: &GeometrySpec) -> bool {
        match self {
            Self::NonexU1 => g.is_step2_group(),
            Self::GrushinUbar => g.is_grushin_plane(),
            Self::HgSubsolution => matches!(
                g.kind(),
                GeometryKind::HeisenbergGreiner { .. } | GeometryKind::Heisenberg { .. }
            ),
            Self::OptimalityDrift => matches!(g.kind(), GeometryKind::HType7 | GeometryKind::Heisenberg { .. }),
        }
    }

    /// The geometry used when none is given.
    pub fn default_geometry(self) -> GeometrySpec {
        match self {
            Self::NonexU1 | Self::OptimalityDrift => GeometrySpec::htype7(),
            Self::GrushinUbar => GeometrySpec::grushin_plane(),
            Self::HgSubsolution => GeometrySpec::heisenberg_greiner(1, 2).expect("valid"),
        }
    }
}

impl fmt::Display for CounterexampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CounterexampleId {
    type Err = LiouvilleError;

    fn from_str(s: &str) -> Result<Self, LiouvilleError> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| LiouvilleError::UnknownId(s.to_string()))
    }
}

/// Right-hand side used for the drift example.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `βλδ |D_X ρ|² (1+ρ²)^{−δ/2−2}`.
    #[default]
    Corrected,
    /// `βλδ (1+ρ²)^{−δ/2−2}`, without the `|D_X ρ|²` factor.
    Literal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CertifyOptions {
    /// Ellipticity for the drift example.
    #[serde(default = "default_ell")]
    pub ellipticity: Ellipticity,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub bound: Bound,
}

fn default_ell() -> Ellipticity {
    Ellipticity::new(1.0, 2.0).expect("valid")
}

fn default_delta() -> f64 {
    0.1
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            ellipticity: default_ell(),
            delta: default_delta(),
            bound: Bound::Corrected,
        }
    }
}

/// Favorable-side slack for the certificates.
const SLACK: f64 = 1e-12;

/// `(1 + ρ²)^{1−Q/2}`.
struct U1 {
    q: f64,
}

impl RadialProfile for U1 {
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64), HcalcError> {
        let k = self.q / 2.0 - 1.0;
        let s = 1.0 + rho * rho;
        let f = s.powf(-k);
        let f1 = -2.0 * k * rho * s.powf(-k - 1.0);
        let f2 = -2.0 * k * s.powf(-k - 1.0) + 4.0 * k * (k + 1.0) * rho * rho * s.powf(-k - 2.0);
        Ok((f, f1, f2))
    }
}

/// `−(1 + N²)^{−(Q−2)/2}`.
struct HgU {
    q: f64,
}

impl RadialProfile for HgU {
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64), HcalcError> {
        let (f, f1, f2) = U1 { q: self.q }.eval(rho)?;
        Ok((-f, -f1, -f2))
    }
}

/// `(15 − 10ρ² + 3ρ⁴)/8` inside the unit ball, `1/ρ` outside.
pub(crate) struct Ubar;

impl Ubar {
    pub(crate) fn inner(rho: f64) -> (f64, f64, f64) {
        let r2 = rho * rho;
        (
            (15.0 - 10.0 * r2 + 3.0 * r2 * r2) / 8.0,
            (-20.0 * rho + 12.0 * r2 * rho) / 8.0,
            (-20.0 + 36.0 * r2) / 8.0,
        )
    }

    pub(crate) fn outer(rho: f64) -> (f64, f64, f64) {
        (1.0 / rho, -1.0 / (rho * rho), 2.0 / (rho * rho * rho))
    }
}

impl RadialProfile for Ubar {
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64), HcalcError> {
        if rho <= 0.0 {
            return Err(HcalcError::ZeroGauge);
        }
        Ok(if rho <= 1.0 { Self::inner(rho) } else { Self::outer(rho) })
    }
}

/// `(1 + ρ²)^{−δ/2}`.
struct Drift {
    delta: f64,
}

impl RadialProfile for Drift {
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64), HcalcError> {
        let d = self.delta;
        let s = 1.0 + rho * rho;
        Ok((
            s.powf(-d / 2.0),
            -d * rho * s.powf(-d / 2.0 - 1.0),
            d * s.powf(-d / 2.0 - 2.0) * ((d + 1.0) * rho * rho - 1.0),
        ))
    }
}

fn evaluate(
    id: CounterexampleId,
    g: &GeometrySpec,
    opts: &CertifyOptions,
    p: &[f64],
) -> Result<Outcome, LiouvilleError> {
    let q = g.q();
    Ok(match id {
        CounterexampleId::NonexU1 => {
            let jet = horizontal_jet(g, &Radial(&U1 { q }), p)?;
            let lap = jet.laplacian();
            let gj = gauge_jet(g, p)?;
            let closed = -gj.drho_sq * q * (q - 2.0) * (1.0 + gj.rho * gj.rho).powf(-1.0 - q / 2.0);
            Outcome::le(lap, 0.0, SLACK).with("closed_form", vec![closed])
        }
        CounterexampleId::GrushinUbar => {
            let jet = horizontal_jet(g, &Radial(&Ubar), p)?;
            let lap = jet.laplacian();
            let (x, rho) = (p[0], crate::geometry::gauge(g, p));
            let mut out = Outcome::le(lap, 0.0, SLACK);
            if rho <= 1.0 {
                out = out.with("closed_form", vec![-7.5 * x * x * (1.0 - 1.0 / (rho * rho))]);
            }
            out
        }
        CounterexampleId::HgSubsolution => {
            let jet = horizontal_jet(g, &Radial(&HgU { q }), p)?;
            Outcome::le(0.0, jet.laplacian(), SLACK)
        }
        CounterexampleId::OptimalityDrift => {
            let ell = &opts.ellipticity;
            let (l, u, d) = (ell.lambda(), ell.upper(), opts.delta);
            let beta = u / l * (q - 1.0) + 1.0;
            let gj = gauge_jet(g, p)?;
            let rho = gj.rho;
            let s = 1.0 + rho * rho;
            let jet = horizontal_jet(g, &Radial(&Drift { delta: d }), p)?;
            let scale = l * (2.0 - beta + d) * rho / s;
            let b_du: f64 = gj.drho.iter().zip(jet.hgrad.iter()).map(|(a, b)| scale * a * b).sum();
            let lhs = pucci_plus(ell, &jet.hhess)? - b_du;
            let base = beta * l * d * s.powf(-d / 2.0 - 2.0);
            let bound = match opts.bound {
                Bound::Corrected => base * gj.drho_sq,
                Bound::Literal => base,
            };
            Outcome::le(bound, lhs, SLACK).with("drho_sq", vec![gj.drho_sq])
        }
    })
}

/// Checks the pointwise inequality of counterexample `id` at every sample.
///
/// `grushin_ubar` always samples from `ρ = 1/16` so both pieces are covered,
/// and reports the value and slope jumps at `ρ = 1`.
pub fn certify_counterexample(
    id: CounterexampleId,
    g: &GeometrySpec,
    plan: &SamplePlan,
    opts: &CertifyOptions,
) -> Result<CheckReport, LiouvilleError> {
    if !id.applies_to(g) {
        return Err(LiouvilleError::Incompatible {
            id: id.to_string(),
            geometry: g.name(),
        });
    }
    if !(opts.delta > 0.0) {
        return Err(LiouvilleError::InvalidParam("delta must be positive".into()));
    }
    plan.validate().map_err(LiouvilleError::InvalidParam)?;
    let shells = if id == CounterexampleId::GrushinUbar {
        SamplePlan {
            r0: plan.r0.min(1.0 / 16.0),
            ..plan.clone()
        }
        .ladder()
    } else {
        plan.ladder()
    };
    let samples = sample_shells(g, plan, salt(id.as_str()), &shells, plan.per_rung);
    let outcomes = samples
        .par_iter()
        .map(|s| match &s.point {
            None => Ok(Outcome::Excluded("no admissible draw".into())),
            Some(p) => evaluate(id, g, opts, p),
        })
        .collect::<Result<Vec<_>, LiouvilleError>>()?;
    let mut report = Assembly {
        check: id.as_str(),
        geometry: g.name(),
        plan,
        shells,
        aggregation: Aggregation::Everywhere,
    }
    .finish(&samples, outcomes);
    report.details.insert("Q".into(), g.q());
    match id {
        CounterexampleId::GrushinUbar => {
            let (a, da, _) = Ubar::inner(1.0);
            let (b, db, _) = Ubar::outer(1.0);
            let c0 = (a - b).abs();
            let c1 = (da - db).abs();
            report.details.insert("c0_gap".into(), c0);
            report.details.insert("c1_gap".into(), c1);
            report.details.insert("value_at_1".into(), a);
            report.details.insert("slope_at_1".into(), da);
            if c0 > SLACK || c1 > SLACK {
                report.verdict = Verdict::Violated;
                report.notes.push("profile is not C1 at rho = 1".into());
            }
        }
        CounterexampleId::NonexU1 => {
            if let GeometryKind::FreeStep2 { r } = g.kind() {
                if *r >= 3 {
                    report.notes.push(
                        "the free gauge is not adapted to the sub-Laplacian for r >= 3, so u1 need not be a supersolution"
                            .into(),
                    );
                }
            }
        }
        CounterexampleId::OptimalityDrift => {
            let (l, u) = (opts.ellipticity.lambda(), opts.ellipticity.upper());
            report.details.insert("beta".into(), u / l * (g.q() - 1.0) + 1.0);
            report.details.insert("delta".into(), opts.delta);
            report.notes.push(format!("bound: {:?}", opts.bound));
        }
        CounterexampleId::HgSubsolution => {}
    }
    Ok(report)
}
