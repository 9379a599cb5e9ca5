//! The dimension gate `Q ≤ Λ/λ + 1` on HType7 as `Λ` crosses 9.

use subelliptic::extremal::Ellipticity;
use subelliptic::geometry::GeometrySpec;
use subelliptic::liouville::{check_condition, ConditionId, ConditionParams, OperatorSpec, SecondOrder};
use subelliptic::sampling::SamplePlan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GeometrySpec::htype7();
    let plan = SamplePlan::default().with_ladder(1.0, 4, 128);
    for upper in [8.0, 8.9, 9.0, 10.0] {
        let op = OperatorSpec::pure(SecondOrder::MPlus(Ellipticity::new(1.0, upper)?), &g);
        let r = check_condition(ConditionId::LiohadGate, &g, &op, &ConditionParams::default(), &plan)?;
        println!("Lambda = {upper:<4} {:?}  min margin {:?}", r.verdict, r.min_margin);
    }
    Ok(())
}
