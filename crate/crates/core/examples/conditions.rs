//! Every condition of the catalog on its geometry, followed by the paired
//! Lyapunov check on `[R*, 4R*]`.

use subelliptic::geometry::GeometrySpec;
use subelliptic::liouville::{check_with_lyapunov, ConditionId, ConditionParams, OperatorJson, OperatorSpec};
use subelliptic::sampling::SamplePlan;

fn op(g: &GeometrySpec, second: &str, frame: &str, b: &[&str], c: &str) -> OperatorSpec {
    let b: Vec<String> = b.iter().map(|s| format!("\"{s}\"")).collect();
    let json = format!(
        r#"{{"second_order": {second}, "coefficients": {{"drift_frame": "{frame}",
            "entries": [{{"b": [{}], "c": "{c}"}}]}}}}"#,
        b.join(", ")
    );
    OperatorSpec::from_json(&serde_json::from_str::<OperatorJson>(&json).unwrap(), g).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m12 = r#"{"kind": "MMinus", "lambda": 1, "Lambda": 2}"#;
    let m11 = r#"{"kind": "MMinus", "lambda": 1, "Lambda": 1}"#;
    let h7 = GeometrySpec::htype7();
    let f3 = GeometrySpec::free_step2(3)?;
    let gr = GeometrySpec::grushin(2, 1, 2.0)?;
    let plane = GeometrySpec::grushin_plane();
    let hg = GeometrySpec::heisenberg_greiner(1, 2)?;
    let cases = [
        (ConditionId::CondH, op(&h7, m12, "horizontal", &["0"; 4], "0.5"), &h7),
        (ConditionId::CondHImp, op(&h7, m12, "horizontal", &["0"; 4], "0.5"), &h7),
        (ConditionId::CondGen, op(&h7, m11, "horizontal", &["0"; 4], "0.5"), &h7),
        (
            ConditionId::OuType,
            op(&h7, m12, "euclidean", &["-x1", "-x2", "-x3", "-x4", "-x5", "-x6", "-x7"], "0"),
            &h7,
        ),
        (ConditionId::CondCor1Free, op(&f3, m12, "horizontal", &["-x1", "-x2", "-x3"], "0.5"), &f3),
        (
            ConditionId::CondCor1FreePucci,
            op(&f3, r#"{"kind": "P66Minus", "lam": 0.25}"#, "horizontal", &["0"; 3], "0.5"),
            &f3,
        ),
        (ConditionId::GruCond, op(&gr, m11, "horizontal", &["0"; 3], "0.5"), &gr),
        (ConditionId::CondCor1Grushin, op(&plane, m12, "horizontal", &["0"; 2], "0.5"), &plane),
        (ConditionId::CondCor1, op(&hg, m11, "horizontal", &["0"; 2], "0.5"), &hg),
    ];
    let plan = SamplePlan::default().with_ladder(1.0, 7, 256);
    for (id, op, g) in &cases {
        let c = check_with_lyapunov(*id, g, op, &ConditionParams::default(), &plan)?;
        println!(
            "{:<18} {:<36} {:?} onset {:?}, Lyapunov {:?}",
            id.as_str(),
            g.name(),
            c.condition.verdict,
            c.condition.onset_radius,
            c.lyapunov.map(|l| l.verdict)
        );
    }
    Ok(())
}
