//! First-order gain from pushing a new vertex out of a facet.
//!
//!     cargo run --example facet_bump

use vpmax::constructions::{cross_polytope, cube, regular_polygon};
use vpmax::optimizer::{default_bump_grid, probe_facet_bump};

fn main() -> vpmax::Result<()> {
    for (name, p) in [("square", cube(2)?), ("hexagon", regular_polygon(6)?), ("octahedron", cross_polytope(3)?)] {
        let probe = probe_facet_bump(&p, 0, &default_bump_grid(&p))?;
        println!(
            "{name:<11} slope {:.6} predicted {:.6} polar loss ~ t^{:.3}",
            probe.slope,
            probe.predicted_slope,
            probe.loss_exponent.unwrap_or(f64::NAN)
        );
        for (t, vp) in probe.samples.iter().step_by(4) {
            println!("    t = {t:.3e}  vp = {vp:.15}");
        }
    }
    Ok(())
}
