use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{pucci_minus, pucci_plus, Ellipticity};
use crate::expr::{EvalError, Expr, OperatorEnv, PointEnv};
use crate::geometry::GeometrySpec;
use crate::report::{Aggregation, Assembly, CheckReport, Outcome};
use crate::sampling::{salt, sample_rng, sample_shells, SamplePlan};

fn random_sym<R: Rng>(rng: &mut R, m: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v: f64 = rng.sample(StandardNormal);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// Checks `M⁻(M−N) ≤ G(x,r,p,M) − G(x,r,p,N) ≤ M⁺(M−N)` at seeded random
/// arguments, with `x` drawn from the plan's ladder.
pub fn subellipticity_probe_with<G>(
    g: &GeometrySpec,
    ell: &Ellipticity,
    plan: &SamplePlan,
    op: G,
) -> CheckReport
where
    G: Fn(&[f64], f64, &[f64], &DMatrix<f64>) -> Result<f64, EvalError> + Sync,
{
    let shells = plan.ladder();
    let samples = sample_shells(g, plan, salt("subellipticity"), &shells, plan.per_rung);
    let data_salt = salt("subellipticity-data");
    let m = g.m();
    let outcomes: Vec<Outcome> = samples
        .par_iter()
        .map(|s| {
            let Some(x) = &s.point else {
                return Outcome::Excluded("no point drawn".into());
            };
            let mut rng = sample_rng(plan.seed, data_salt, s.rung as u64, s.index as u64);
            let r: f64 = rng.sample(StandardNormal);
            let p: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            let mm = random_sym(&mut rng, m);
            let nn = random_sym(&mut rng, m);
            let diff = &mm - &nn;
            let (gm, gn) = match (op(x, r, &p, &mm), op(x, r, &p, &nn)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return Outcome::Excluded(e.to_string()),
            };
            let lo = pucci_minus(ell, &diff).expect("symmetric by construction");
            let hi = pucci_plus(ell, &diff).expect("symmetric by construction");
            let mid = gm - gn;
            let slack = (mid - lo).min(hi - mid);
            let scale = lo.abs().max(hi.abs()).max(gm.abs()).max(gn.abs());
            Outcome::le(0.0, slack, plan.tolerances.allowance(scale))
                .with("bounds", vec![lo, mid, hi])
        })
        .collect();
    Assembly {
        check: "subellipticity",
        geometry: g.name(),
        plan,
        shells,
        aggregation: Aggregation::Everywhere,
    }
    .finish(&samples, outcomes)
}

/// [`subellipticity_probe_with`] for an operator-scope expression.
pub fn subellipticity_probe(
    g: &GeometrySpec,
    op: &Expr,
    ell: &Ellipticity,
    plan: &SamplePlan,
) -> CheckReport {
    subellipticity_probe_with(g, ell, plan, |x, r, p, mm| {
        let env = OperatorEnv {
            point: PointEnv::plain(g, x, plan.eps_sing),
            r,
            p,
            m: mm,
        };
        op.eval(&env).map(|o| o.value)
    })
}
