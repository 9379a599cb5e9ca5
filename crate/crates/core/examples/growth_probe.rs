//! Scaled suprema of `u₁ = (1+ρ²)^{1−Q/2}` on dyadic annuli of HType7.

use subelliptic::expr::Expr;
use subelliptic::geometry::GeometrySpec;
use subelliptic::hcalc::ExprField;
use subelliptic::liouville::{growth_probe, GrowthOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GeometrySpec::htype7();
    let u = ExprField::new(Expr::for_geometry("(1 + rho^2)^(-4)", &g)?, 1e-3);
    let opts = GrowthOptions {
        r0: 16.0,
        rungs: 7,
        ..GrowthOptions::default()
    };
    let r = growth_probe(&g, &u, &opts)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "r", "sup", "sup r^8", "sup r^16");
    for rung in &r.rungs {
        println!("{:>6} {:>12.4e} {:>12.6} {:>12.4e}", rung.r, rung.sup, rung.scaled_q, rung.scaled_nu);
    }
    println!("exponent {}: {:?}; exponent {}: {:?}", r.exponent_q, r.trend_q, r.exponent_nu, r.trend_nu);
    Ok(())
}
