//! Extremal operators on a symmetric matrix and on the Hessian of `log ρ`.

use nalgebra::DMatrix;
use subelliptic::extremal::{pucci66_minus, pucci66_plus, pucci_minus, pucci_plus, spectrum, Ellipticity, Pucci66Param};
use subelliptic::geometry::GeometrySpec;
use subelliptic::hcalc::{radial_horizontal_hessian, Log};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, -1.0, 0.5, 0.0, 0.5, -3.0]);
    let ell = Ellipticity::new(1.0, 2.0)?;
    let p66 = Pucci66Param::new(0.25, 3)?;
    println!("eigenvalues {:?}", spectrum(&m)?.eigenvalues);
    println!("M+ = {:.6}  M- = {:.6}", pucci_plus(&ell, &m)?, pucci_minus(&ell, &m)?);
    println!("P+ = {:.6}  P- = {:.6}", pucci66_plus(&p66, &m)?, pucci66_minus(&p66, &m)?);

    let g = GeometrySpec::htype7();
    let p = [1.0, 0.5, -0.3, 0.8, 2.0, -1.0, 0.4];
    let h = radial_horizontal_hessian(&g, &Log, &p)?.hhess;
    let xh2: f64 = p[..4].iter().map(|v| v * v).sum();
    let rho4 = subelliptic::geometry::gauge(&g, &p).powi(4);
    println!("spectrum of D2 log rho: {:?}", spectrum(&h)?.eigenvalues);
    println!(
        "M+(D2 log rho) = {:.6}, (Lambda - 9 lambda)|x_H|^2/rho^4 = {:.6}",
        pucci_plus(&ell, &h)?,
        (2.0 - 9.0) * xh2 / rho4
    );
    Ok(())
}
