//! Sampled check that a user operator is pinched between `M⁻` and `M⁺`.

use subelliptic::expr::{Expr, Scope};
use subelliptic::extremal::{subellipticity_probe, Ellipticity};
use subelliptic::geometry::GeometrySpec;
use subelliptic::sampling::SamplePlan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GeometrySpec::heisenberg(1)?;
    let ell = Ellipticity::new(1.0, 2.0)?;
    let plan = SamplePlan::default().with_ladder(1.0, 3, 64);
    let scope = Scope::Operator { d_amb: g.d_amb(), m: g.m() };
    for src in ["-(m1_1 + m2_2) - 0.5*m1_1", "-3*(m1_1 + m2_2)"] {
        let op = Expr::parse(src, scope)?;
        let r = subellipticity_probe(&g, &op, &ell, &plan);
        println!("{src:<26} {:?}, {} violations", r.verdict, r.violations);
    }
    Ok(())
}
