//! Radial solutions of `M^±(D²_X u) = 0` on HType7 and their exponents.

use subelliptic::extremal::Ellipticity;
use subelliptic::geometry::GeometrySpec;
use subelliptic::liouville::{check_fundamental, fundamental_profile, FundamentalKind};
use subelliptic::sampling::SamplePlan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GeometrySpec::htype7();
    let plan = SamplePlan::default().with_ladder(1.0, 5, 64);
    for (l, u) in [(1.0, 1.0), (1.0, 2.0), (1.0, 9.0)] {
        let ell = Ellipticity::new(l, u)?;
        for kind in [FundamentalKind::Phi1, FundamentalKind::Phi2, FundamentalKind::Psi1, FundamentalKind::Psi2] {
            let prof = fundamental_profile(kind, &ell, g.q(), 1.0, 0.0)?;
            let r = check_fundamental(&g, &prof, &ell, (1.0, 100.0), &plan)?;
            println!(
                "({l},{u}) {kind:?}: alpha = {}, beta = {}, {:?}, min margin {:.2e}",
                prof.alpha,
                prof.beta,
                r.verdict,
                r.min_margin.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
