//! Parsing and evaluating coefficient expressions, plain and with derivatives.

use subelliptic::expr::{Expr, PointEnv};
use subelliptic::geometry::GeometrySpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GeometrySpec::heisenberg(1)?;
    let p = [1.0, 2.0, 0.5];
    for src in ["x1 * x2 + x3", "log(rho)", "(1 + rho^2)^(-1)", "max(xh, 1) * exp(-x3^2)"] {
        let e = Expr::for_geometry(src, &g)?;
        let v = e.eval(&PointEnv::plain(&g, &p, 1e-3))?.value;
        let t = e.eval(&PointEnv::taylor(&g, &p, 1e-3))?.value;
        println!("{src:<28} -> {e:<28} = {v:.6}  grad = {:.4?}", t.grad.as_slice());
    }
    match Expr::for_geometry("x4 + 1", &g) {
        Err(err) => println!("rejected: {err}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
