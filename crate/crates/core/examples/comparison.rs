//! Premises of the comparison principle under an Ornstein-Uhlenbeck drift.

use subelliptic::expr::Expr;
use subelliptic::geometry::GeometrySpec;
use subelliptic::hcalc::ExprField;
use subelliptic::liouville::{comparison_verdict, LyapunovCandidate, OperatorJson, OperatorSpec};
use subelliptic::sampling::SamplePlan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GeometrySpec::htype7();
    let json = r#"{"second_order": {"kind": "MMinus", "lambda": 1, "Lambda": 1},
        "coefficients": {"drift_frame": "euclidean",
            "entries": [{"b": ["-x1", "-x2", "-x3", "-x4", "-x5", "-x6", "-x7"]}]}}"#;
    let op = OperatorSpec::from_json(&serde_json::from_str::<OperatorJson>(json)?, &g)?;
    let plan = SamplePlan::default().with_ladder(4.0, 5, 128);
    let f = |s: &str| -> Result<ExprField, Box<dyn std::error::Error>> {
        Ok(ExprField::new(Expr::for_geometry(s, &g)?, plan.eps_sing))
    };
    for (u, v) in [("0", "0"), ("1", "0"), ("log(rho)", "0")] {
        let r = comparison_verdict(&g, &op, &f(u)?, &f(v)?, &LyapunovCandidate::LogRho, &plan)?;
        println!(
            "u = {u:<9} v = {v}: {:?}, u - v in [{:?}, {:?}], fit a = {:?}",
            r.verdict, r.difference_min, r.difference_max, r.growth.fit_a
        );
        for n in &r.notes {
            println!("    {n}");
        }
    }
    Ok(())
}
