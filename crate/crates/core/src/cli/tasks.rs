use rayon::prelude::*;
use serde::Serialize;

use super::{CliError, RunConfig, TaskConfig};
use crate::expr::Expr;
use crate::geometry::{gauge, hormander_rank, GeometrySpec, HormanderRank};
use crate::hcalc::ExprField;
use crate::liouville::{
    certify_counterexample, check_condition, check_fundamental, check_with_lyapunov, comparison_verdict,
    fundamental_profile, growth_probe, pde_residual_parts, verify_lyapunov, CompareReport, Consistency,
    FundamentalProfile, GrowthOptions, GrowthProbeResult, LiouvilleError, LyapunovCandidate, OperatorSpec,
};
use crate::report::{CheckReport, Verdict};
use crate::sampling::{salt, sample_shells, SamplePlan};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Description {
    pub name: String,
    /// Number of horizontal fields.
    pub m: usize,
    pub d: usize,
    #[serde(rename = "Q")]
    pub q: f64,
    pub layer_split: usize,
    pub singular_set: String,
    /// Rank of the fields and first brackets at `(1, …, 1)`.
    pub hormander: HormanderRank,
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualRow {
    pub point: Vec<f64>,
    pub rho: f64,
    pub residual: Option<f64>,
    pub second_order: Option<f64>,
    pub first_order: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualTable {
    pub expression: String,
    pub dimension: usize,
    pub rows: Vec<ResidualRow>,
    pub max_abs_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FundamentalPayload {
    pub profile: FundamentalProfile,
    pub report: CheckReport,
}

/// Result of one task.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Describe(Description),
    Residual(ResidualTable),
    VerifyLyapunov(CheckReport),
    Check(Consistency),
    Certify(CheckReport),
    Fundamental(FundamentalPayload),
    Growth(GrowthProbeResult),
    Compare(Box<CompareReport>),
}

impl Payload {
    /// `None` for tasks that only produce data.
    pub fn verdict(&self) -> Option<Verdict> {
        match self {
            Payload::Describe(_) | Payload::Residual(_) | Payload::Growth(_) => None,
            Payload::VerifyLyapunov(r) | Payload::Certify(r) => Some(r.verdict),
            Payload::Fundamental(f) => Some(f.report.verdict),
            Payload::Check(c) => Some(c.verdict()),
            Payload::Compare(c) => Some(c.verdict),
        }
    }
}

fn geometry(cfg: &RunConfig) -> Result<&GeometrySpec, CliError> {
    cfg.geometry
        .as_ref()
        .ok_or_else(|| CliError::Usage("no geometry: give one in the config or with --geometry".into()))
}

fn operator(cfg: &RunConfig, g: &GeometrySpec, task: &str) -> Result<OperatorSpec, CliError> {
    let j = cfg
        .operator
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("{task} needs an operator section in the config")))?;
    Ok(OperatorSpec::from_json(j, g)?)
}

fn field(src: &str, g: &GeometrySpec, eps: f64, what: &str) -> Result<ExprField, CliError> {
    let expr = Expr::for_geometry(src, g).map_err(|e| LiouvilleError::Parse(format!("{what}: {e}")))?;
    Ok(ExprField::new(expr, eps))
}

fn describe(g: &GeometrySpec) -> Result<Description, CliError> {
    let ones = vec![1.0; g.d_amb()];
    let hormander = hormander_rank(g, &ones).map_err(LiouvilleError::from)?;
    let singular_set = g.singular_description().to_string();
    Ok(Description {
        name: g.name(),
        m: g.m(),
        d: g.d_amb(),
        q: g.q(),
        layer_split: g.layer_split(),
        summary: format!("m={}, Q={}, singular set {}", g.m(), g.q(), singular_set),
        singular_set,
        hormander,
    })
}

fn residual_table(
    g: &GeometrySpec,
    op: &OperatorSpec,
    u: &ExprField,
    src: &str,
    points: Vec<Vec<f64>>,
) -> ResidualTable {
    let rows: Vec<ResidualRow> = points
        .into_par_iter()
        .map(|p| {
            let rho = if p.len() == g.d_amb() { gauge(g, &p) } else { f64::NAN };
            match pde_residual_parts(g, op, u, &p, u.eps_sing) {
                Ok(r) => ResidualRow {
                    rho,
                    residual: Some(r.total()),
                    second_order: Some(r.second_order),
                    first_order: Some(r.first_order),
                    error: None,
                    point: p,
                },
                Err(e) => ResidualRow {
                    rho,
                    residual: None,
                    second_order: None,
                    first_order: None,
                    error: Some(e.to_string()),
                    point: p,
                },
            }
        })
        .collect();
    let max_abs_residual = rows
        .iter()
        .filter_map(|r| r.residual)
        .map(f64::abs)
        .reduce(f64::max);
    ResidualTable {
        expression: src.to_string(),
        dimension: g.d_amb(),
        rows,
        max_abs_residual,
    }
}

fn ladder_range(plan: &SamplePlan) -> [f64; 2] {
    [plan.r0, plan.r0 * 2f64.powi(plan.rungs as i32)]
}

/// Runs the resolved task of `cfg`.
pub fn execute(cfg: &RunConfig) -> Result<Payload, CliError> {
    let task = cfg
        .task
        .as_ref()
        .ok_or_else(|| CliError::Usage("config has no task".into()))?;
    let plan = &cfg.sampling;
    let g = geometry(cfg)?;
    Ok(match task {
        TaskConfig::Describe => Payload::Describe(describe(g)?),
        TaskConfig::Residual { u, points } => {
            let op = operator(cfg, g, "residual")?;
            let field = field(u, g, plan.eps_sing, "u")?;
            let points = match points {
                Some(p) => p.clone(),
                None => sample_shells(g, plan, salt("residual"), &plan.ladder(), plan.per_rung)
                    .into_iter()
                    .filter_map(|s| s.point)
                    .collect(),
            };
            Payload::Residual(residual_table(g, &op, &field, u, points))
        }
        TaskConfig::VerifyLyapunov { candidate, annulus } => {
            let op = operator(cfg, g, "verify-lyapunov")?;
            let cand = LyapunovCandidate::from_json(candidate, g, plan.eps_sing)?;
            let [lo, hi] = annulus.unwrap_or_else(|| ladder_range(plan));
            Payload::VerifyLyapunov(verify_lyapunov(g, &op, &cand, (lo, hi), plan)?)
        }
        TaskConfig::Check {
            condition,
            params,
            lyapunov,
        } => {
            let op = operator(cfg, g, "check")?;
            Payload::Check(if *lyapunov {
                check_with_lyapunov(*condition, g, &op, params, plan)?
            } else {
                Consistency {
                    condition: check_condition(*condition, g, &op, params, plan)?,
                    lyapunov: None,
                }
            })
        }
        TaskConfig::Certify { id, options } => Payload::Certify(certify_counterexample(*id, g, plan, options)?),
        TaskConfig::Fundamental {
            profile,
            ellipticity,
            c1,
            c2,
            annulus,
        } => {
            let prof = fundamental_profile(*profile, ellipticity, g.q(), *c1, *c2)?;
            let [lo, hi] = annulus.unwrap_or_else(|| ladder_range(plan));
            let report = check_fundamental(g, &prof, ellipticity, (lo, hi), plan)?;
            Payload::Fundamental(FundamentalPayload { profile: prof, report })
        }
        TaskConfig::Growth {
            u,
            c,
            nu,
            refine_rounds,
            shrink,
        } => {
            let field = field(u, g, plan.eps_sing, "u")?;
            let defaults = GrowthOptions::default();
            let opts = GrowthOptions {
                c: *c,
                nu: *nu,
                r0: plan.r0,
                rungs: plan.rungs,
                per_rung: plan.per_rung,
                seed: plan.seed,
                refine_rounds: refine_rounds.unwrap_or(defaults.refine_rounds),
                shrink: shrink.unwrap_or(defaults.shrink),
            };
            Payload::Growth(growth_probe(g, &field, &opts)?)
        }
        TaskConfig::Compare { u, v, candidate } => {
            let op = operator(cfg, g, "compare")?;
            let fu = field(u, g, plan.eps_sing, "u")?;
            let fv = field(v, g, plan.eps_sing, "v")?;
            let cand = LyapunovCandidate::from_json(candidate, g, plan.eps_sing)?;
            Payload::Compare(Box::new(comparison_verdict(g, &op, &fu, &fv, &cand, plan)?))
        }
    })
}
