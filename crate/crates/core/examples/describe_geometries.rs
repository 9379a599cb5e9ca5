//! Dimensions, homogeneous dimension and bracket rank of every geometry.

use subelliptic::geometry::{gauge, hormander_rank, GeometrySpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let all = [
        GeometrySpec::heisenberg(1)?,
        GeometrySpec::htype7(),
        GeometrySpec::free_step2(3)?,
        GeometrySpec::grushin_plane(),
        GeometrySpec::grushin(2, 1, 2.0)?,
        GeometrySpec::heisenberg_greiner(1, 2)?,
    ];
    println!("{:<34} {:>3} {:>3} {:>6} {:>10} {:>5}", "geometry", "m", "d", "Q", "singular", "rank");
    for g in &all {
        let ones = vec![1.0; g.d_amb()];
        let rank = hormander_rank(g, &ones)?;
        println!(
            "{:<34} {:>3} {:>3} {:>6} {:>10} {:>5}{}",
            g.name(),
            g.m(),
            g.d_amb(),
            g.q(),
            g.singular_description(),
            rank.rank,
            if rank.needs_higher_brackets { " (+higher brackets)" } else { "" }
        );
        println!("    rho(1,...,1) = {:.6}", gauge(g, &ones));
    }
    Ok(())
}
