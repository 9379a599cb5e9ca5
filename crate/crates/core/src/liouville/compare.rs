use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lyapunov::{residual_sign_check, verify_lyapunov, LyapunovCandidate, Sign};
use super::operator::OperatorSpec;
use super::LiouvilleError;
use crate::geometry::GeometrySpec;
use crate::hcalc::ScalarField;
use crate::report::{CheckReport, Verdict};
use crate::sampling::{salt, sample_shells, SamplePlan};

/// Growth of `(u − v)/w` along the ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthPremise {
    /// `sup (u−v)/w` per rung, over samples with `w > 0`.
    pub ratio_sup: Vec<Option<f64>>,
    /// `w` at the maximizer of each rung.
    pub w_at_sup: Vec<Option<f64>>,
    /// Least-squares fit `S ≈ a + b/W` over the last three rungs.
    pub fit_a: Option<f64>,
    pub fit_b: Option<f64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub geometry: String,
    pub subsolution: CheckReport,
    pub supersolution: CheckReport,
    pub lyapunov: CheckReport,
    pub growth: GrowthPremise,
    pub difference_min: Option<f64>,
    pub difference_max: Option<f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

fn fit(s: &[f64], w: &[f64]) -> Option<(f64, f64)> {
    let n = s.len() as f64;
    let x: Vec<f64> = w.iter().map(|v| 1.0 / v).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = s.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(s).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx <= 1e-300 {
        return Some((my, 0.0));
    }
    let b = sxy / sxx;
    Some((my - b * mx, b))
}

/// Premise check for "`u` sub, `v` super, `u − v` dominated by `w` at
/// infinity": reports each premise separately. Holds means every premise
/// passed on the samples; it says nothing beyond that.
pub fn comparison_verdict(
    g: &GeometrySpec,
    op: &OperatorSpec,
    u: &(impl ScalarField + ?Sized),
    v: &(impl ScalarField + ?Sized),
    cand: &LyapunovCandidate,
    plan: &SamplePlan,
) -> Result<CompareReport, LiouvilleError> {
    if !op.coeffs.c_identically_zero() {
        return Err(LiouvilleError::InvalidParam(
            "comparison needs every zero-order coefficient to be 0".into(),
        ));
    }
    plan.validate().map_err(LiouvilleError::InvalidParam)?;
    let shells = plan.ladder();
    let subsolution = residual_sign_check("compare_sub", g, op, u, Sign::Negative, shells.clone(), plan)?;
    let supersolution = residual_sign_check("compare_super", g, op, v, Sign::Positive, shells.clone(), plan)?;
    let r_hi = shells.last().map_or(2.0 * plan.r0, |s| s.1);
    let lyapunov = verify_lyapunov(g, op, cand, (plan.r0, r_hi), plan)?;

    let samples = sample_shells(g, plan, salt("compare_growth"), &shells, plan.per_rung);
    let rows: Vec<Option<(usize, f64, f64)>> = samples
        .par_iter()
        .map(|s| {
            let p = s.point.as_ref()?;
            let du = u.value(g, p).ok()? - v.value(g, p).ok()?;
            let w = cand.value(g, p).ok()?;
            Some((s.rung, du, w))
        })
        .collect();
    let mut ratio_sup = vec![None::<f64>; shells.len()];
    let mut w_at_sup = vec![None::<f64>; shells.len()];
    let (mut dmin, mut dmax) = (None::<f64>, None::<f64>);
    for (rung, du, w) in rows.into_iter().flatten() {
        dmin = Some(dmin.map_or(du, |m| m.min(du)));
        dmax = Some(dmax.map_or(du, |m| m.max(du)));
        if w > 0.0 {
            let ratio = du / w;
            if ratio_sup[rung].is_none_or(|s| ratio > s) {
                ratio_sup[rung] = Some(ratio);
                w_at_sup[rung] = Some(w);
            }
        }
    }
    let pairs: Vec<(f64, f64)> = ratio_sup
        .iter()
        .zip(&w_at_sup)
        .filter_map(|(s, w)| Some(((*s)?, (*w)?)))
        .collect();
    let (fit_a, fit_b, holds) = if pairs.len() >= 3 {
        let last = &pairs[pairs.len() - 3..];
        let s: Vec<f64> = last.iter().map(|p| p.0).collect();
        let w: Vec<f64> = last.iter().map(|p| p.1).collect();
        match fit(&s, &w) {
            Some((a, b)) => {
                let size = 1.0 + s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                (Some(a), Some(b), a <= 1e-3 * size)
            }
            None => (None, None, false),
        }
    } else {
        (None, None, false)
    };
    let growth = GrowthPremise {
        ratio_sup,
        w_at_sup,
        fit_a,
        fit_b,
        holds,
    };

    let mut notes = Vec::new();
    let all = [
        ("u subsolution", subsolution.verdict),
        ("v supersolution", supersolution.verdict),
        ("Lyapunov candidate", lyapunov.verdict),
    ];
    for (what, verdict) in all {
        if verdict != Verdict::Holds {
            notes.push(format!("{what}: {verdict:?}"));
        }
    }
    if !growth.holds {
        notes.push("limsup (u - v)/w <= 0 not supported by the ladder".into());
    }
    let verdict = if all.iter().all(|(_, v)| *v == Verdict::Holds) && growth.holds {
        notes.push("premises hold: u - v is expected to be constant".into());
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    Ok(CompareReport {
        geometry: g.name(),
        subsolution,
        supersolution,
        lyapunov,
        growth,
        difference_min: dmin,
        difference_max: dmax,
        verdict,
        notes,
    })
}
