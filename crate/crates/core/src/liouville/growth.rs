//! Suprema of `u − c` on dyadic annuli and their scaled trends.

use rand::Rng;
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::LiouvilleError;
use crate::geometry::{dilate, gauge, GeometrySpec};
use crate::hcalc::ScalarField;
use crate::sampling::{salt, sample_rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Bounded,
    Diverging,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GrowthOptions {
    pub c: f64,
    pub nu: f64,
    pub r0: f64,
    pub rungs: usize,
    pub per_rung: usize,
    pub seed: u64,
    #[serde(default = "default_rounds")]
    pub refine_rounds: usize,
    #[serde(default = "default_shrink")]
    pub shrink: f64,
}

fn default_rounds() -> usize {
    3
}

fn default_shrink() -> f64 {
    0.25
}

impl Default for GrowthOptions {
    fn default() -> Self {
        Self {
            c: 0.0,
            nu: 0.5,
            r0: 1.0,
            rungs: 8,
            per_rung: 256,
            seed: crate::sampling::DEFAULT_SEED,
            refine_rounds: default_rounds(),
            shrink: default_shrink(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRung {
    pub r: f64,
    pub sup: f64,
    /// `sup · r^{Q−2}`.
    pub scaled_q: f64,
    /// `sup · r^{(Q−2)/(1−ν)}`.
    pub scaled_nu: f64,
    pub samples: usize,
    pub argmax: Vec<f64>,
    pub overflow: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthProbeResult {
    pub geometry: String,
    pub q: f64,
    pub options: GrowthOptions,
    pub exponent_q: f64,
    pub exponent_nu: f64,
    pub rungs: Vec<GrowthRung>,
    pub trend_q: Trend,
    pub trend_nu: Trend,
}

/// Additive recurrence with the generalized golden ratio in dimension `n`.
fn rd_alphas(n: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (n as f64 + 1.0));
    }
    (1..=n).map(|i| phi.powi(-(i as i32)).fract()).collect()
}

fn rd_point(alphas: &[f64], shift: &[f64], k: usize) -> Vec<f64> {
    alphas
        .iter()
        .zip(shift)
        .map(|(a, s)| (s + a * (k as f64 + 1.0)).fract())
        .collect()
}

struct Candidate {
    unit: Vec<f64>,
    t: f64,
    point: Vec<f64>,
    value: f64,
}

fn place(g: &GeometrySpec, z: &[f64], t: f64, r: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = gauge(g, z);
    if !(n > 1e-6) {
        return None;
    }
    let unit = dilate(g, 1.0 / n, z).ok()?;
    let point = dilate(g, r * 2f64.powf(t), &unit).ok()?;
    Some((unit, point))
}

fn evaluate(g: &GeometrySpec, u: &(impl ScalarField + ?Sized), c: f64, unit: Vec<f64>, t: f64, r: f64) -> Candidate {
    let point = dilate(g, r * 2f64.powf(t), &unit).expect("positive scale");
    let value = u.value(g, &point).map(|v| v - c).unwrap_or(f64::NAN);
    Candidate { unit, t, point, value }
}

/// Ordered maximum: NaN ranks below everything, ties keep the lower index.
fn best(cands: Vec<Candidate>) -> Option<Candidate> {
    cands.into_iter().fold(None, |acc: Option<Candidate>, c| match acc {
        None => Some(c),
        Some(a) if c.value > a.value || (a.value.is_nan() && !c.value.is_nan()) => Some(c),
        Some(a) => Some(a),
    })
}

fn classify(vals: &[f64]) -> Trend {
    if vals.len() < 3 || vals.iter().any(|v| !v.is_finite()) {
        return Trend::Undetermined;
    }
    if vals.windows(2).all(|w| w[0] > 0.0 && w[1] > 2.0 * w[0]) {
        return Trend::Diverging;
    }
    let last = &vals[vals.len() - 3..];
    let hi = last.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = last.iter().copied().fold(f64::INFINITY, f64::min);
    let size = hi.abs().max(lo.abs());
    if size == 0.0 || (hi - lo) < 0.1 * size {
        Trend::Bounded
    } else {
        Trend::Undetermined
    }
}

fn probe_rung(
    g: &GeometrySpec,
    u: &(impl ScalarField + ?Sized),
    opts: &GrowthOptions,
    rung: usize,
    r: f64,
) -> (Option<Candidate>, usize, bool) {
    let d = g.d_amb();
    let alphas = rd_alphas(d + 1);
    let mut rng = sample_rng(opts.seed, salt("growth"), rung as u64, 0);
    let shift: Vec<f64> = (0..=d).map(|_| rng.random()).collect();
    // Draw enough of the sequence to land `per_rung` points in the gauge ball.
    let mut draws = Vec::with_capacity(opts.per_rung);
    let mut k = 0usize;
    while draws.len() < opts.per_rung && k < 10_000 * opts.per_rung {
        let x = rd_point(&alphas, &shift, k);
        k += 1;
        let z: Vec<f64> = x[..d].iter().map(|v| 2.0 * v - 1.0).collect();
        if gauge(g, &z) <= 1.0 {
            if let Some((unit, _)) = place(g, &z, x[d], r) {
                draws.push((unit, x[d]));
            }
        }
    }
    let cands: Vec<Candidate> = draws
        .into_par_iter()
        .map(|(unit, t)| evaluate(g, u, opts.c, unit, t, r))
        .collect();
    let mut count = cands.len();
    let mut top = best(cands);
    let refine = opts.per_rung.div_ceil(4).max(1);
    let mut h = opts.shrink;
    for round in 0..opts.refine_rounds {
        let Some(cur) = &top else { break };
        let base_unit = cur.unit.clone();
        let base_t = cur.t;
        let mut rr = sample_rng(opts.seed, salt("growth-refine"), rung as u64, round as u64 + 1);
        let local: Vec<(Vec<f64>, f64)> = (0..refine)
            .filter_map(|_| {
                let z: Vec<f64> = base_unit.iter().map(|v| v + h * rr.random_range(-1.0..1.0)).collect();
                let t = (base_t + h * rr.random_range(-1.0..1.0)).clamp(0.0, 1.0);
                place(g, &z, t, r).map(|(unit, _)| (unit, t))
            })
            .collect();
        let more: Vec<Candidate> = local
            .into_par_iter()
            .map(|(unit, t)| evaluate(g, u, opts.c, unit, t, r))
            .collect();
        count += more.len();
        let cur = top.take().expect("checked above");
        let mut all = vec![cur];
        all.extend(more);
        top = best(all);
        h *= opts.shrink;
    }
    let overflow = top.as_ref().is_none_or(|c| !c.value.is_finite());
    (top, count, overflow)
}

/// Per-rung suprema of `u − c` over `r_j ≤ ρ ≤ 2 r_j`, `r_j = r0·2^j`.
///
/// Points come from a shifted additive-recurrence sequence in the cube
/// (plus one coordinate for `log₂(ρ/r_j)`), kept when they fall in the
/// gauge ball, then refined around the running maximizer.
pub fn growth_probe(
    g: &GeometrySpec,
    u: &(impl ScalarField + ?Sized),
    opts: &GrowthOptions,
) -> Result<GrowthProbeResult, LiouvilleError> {
    if !(opts.nu > 0.0 && opts.nu < 1.0) {
        return Err(LiouvilleError::InvalidParam(format!("nu must lie in (0, 1), got {}", opts.nu)));
    }
    if !(opts.r0 > 0.0) || opts.rungs == 0 || opts.per_rung == 0 {
        return Err(LiouvilleError::InvalidParam("r0, rungs and per_rung must be positive".into()));
    }
    if !(opts.shrink > 0.0 && opts.shrink < 1.0) {
        return Err(LiouvilleError::InvalidParam("shrink must lie in (0, 1)".into()));
    }
    let q = g.q();
    let eq = q - 2.0;
    let enu = (q - 2.0) / (1.0 - opts.nu);
    let rungs: Vec<GrowthRung> = (0..opts.rungs)
        .map(|j| {
            let r = opts.r0 * 2f64.powi(j as i32);
            let (top, samples, overflow) = probe_rung(g, u, opts, j, r);
            let (sup, argmax) = top.map_or((f64::NAN, Vec::new()), |c| (c.value, c.point));
            GrowthRung {
                r,
                sup,
                scaled_q: sup * r.powf(eq),
                scaled_nu: sup * r.powf(enu),
                samples,
                argmax,
                overflow,
            }
        })
        .collect();
    let sq: Vec<f64> = rungs.iter().map(|r| r.scaled_q).collect();
    let snu: Vec<f64> = rungs.iter().map(|r| r.scaled_nu).collect();
    Ok(GrowthProbeResult {
        geometry: g.name(),
        q,
        options: opts.clone(),
        exponent_q: eq,
        exponent_nu: enu,
        trend_q: classify(&sq),
        trend_nu: classify(&snu),
        rungs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generalized_golden_ratio_in_one_dimension() {
        let a = rd_alphas(1);
        assert!((a[0] - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn classification_rules() {
        assert_eq!(classify(&[1.0, 1.02, 0.99, 1.01]), Trend::Bounded);
        assert_eq!(classify(&[1.0, 3.0, 9.0, 27.0]), Trend::Diverging);
        assert_eq!(classify(&[1.0, 1.5, 2.0, 2.5]), Trend::Undetermined);
        assert_eq!(classify(&[0.0, 0.0, 0.0]), Trend::Bounded);
    }
}
