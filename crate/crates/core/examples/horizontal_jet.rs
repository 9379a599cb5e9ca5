//! Horizontal gradient and symmetrized Hessian of `f(ρ)` two ways: Taylor
//! arithmetic through the expression, and the closed radial formula.

use subelliptic::expr::Expr;
use subelliptic::geometry::GeometrySpec;
use subelliptic::hcalc::{horizontal_jet, radial_horizontal_hessian, ExprField, Power};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GeometrySpec::htype7();
    let p = [0.7, -1.1, 0.4, 2.0, 0.3, -0.8, 1.5];
    let u = ExprField::new(Expr::for_geometry("rho^(-8)", &g)?, 1e-3);
    let ad = horizontal_jet(&g, &u, &p)?;
    let closed = radial_horizontal_hessian(&g, &Power(-8.0), &p)?;
    println!("D_X u      = {:.6e}", ad.hgrad.transpose());
    println!("(D2_X u)*  =\n{:.6e}", ad.hhess);
    println!("max |AD - closed form| = {:.3e}", (&ad.hhess - &closed.hhess).amax());
    println!("sub-Laplacian of rho^(2-Q) = {:.3e}", ad.laplacian());
    Ok(())
}
