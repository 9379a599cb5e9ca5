//! Residual of `log ρ` under a Bellman operator, with and without a
//! zero-order term.

use subelliptic::geometry::GeometrySpec;
use subelliptic::liouville::{verify_lyapunov, LyapunovCandidate, OperatorJson, OperatorSpec};
use subelliptic::sampling::SamplePlan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GeometrySpec::htype7();
    let plan = SamplePlan::default().with_ladder(16.0, 2, 256);
    for c in ["0.5", "0"] {
        let json = format!(
            r#"{{"second_order": {{"kind": "MMinus", "lambda": 1, "Lambda": 2}},
                "coefficients": {{"entries": [{{"b": ["0", "0", "0", "0"], "c": "{c}"}}]}}}}"#
        );
        let op = OperatorSpec::from_json(&serde_json::from_str::<OperatorJson>(&json)?, &g)?;
        let r = verify_lyapunov(&g, &op, &LyapunovCandidate::LogRho, (16.0, 64.0), &plan)?;
        println!(
            "c = {c:<4} {:?}: {} samples, min margin {:?}, {} violations",
            r.verdict, r.evaluated, r.min_margin, r.violations
        );
    }
    Ok(())
}
