//! The four explicit counterexamples on their default geometries.

use subelliptic::geometry::GeometrySpec;
use subelliptic::liouville::{certify_counterexample, Bound, CertifyOptions, CounterexampleId};
use subelliptic::sampling::SamplePlan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plan = SamplePlan::default().with_ladder(0.25, 8, 1250);
    let opts = CertifyOptions::default();
    for id in CounterexampleId::ALL {
        let g = id.default_geometry();
        let r = certify_counterexample(id, &g, &plan, &opts)?;
        println!("{:<18} {:<34} {:?} ({} samples, {} violations)", id.as_str(), g.name(), r.verdict, r.evaluated, r.violations);
    }
    let literal = CertifyOptions {
        bound: Bound::Literal,
        ..CertifyOptions::default()
    };
    let r = certify_counterexample(CounterexampleId::OptimalityDrift, &GeometrySpec::htype7(), &plan, &literal)?;
    println!("optimality_drift without |D_X rho|^2 in the bound: {:?}, {} violations", r.verdict, r.violations);
    let r = certify_counterexample(CounterexampleId::NonexU1, &GeometrySpec::free_step2(3)?, &plan, &opts)?;
    println!("nonex_u1 on FreeStep2(3): {:?} {:?}", r.verdict, r.notes);
    Ok(())
}
