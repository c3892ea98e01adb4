//! Move one vertex along a line and sample volume and polar volume.
//!
//!     cargo run --example shadow_system

use vpmax::constructions::{cube, simplex};
use vpmax::geometry::pt;
use vpmax::optimizer::shadow_convexity_probe;

fn main() -> vpmax::Result<()> {
    let ts: Vec<f64> = (0..21).map(|i| -0.5 + 0.05 * i as f64).collect();
    let sq = cube(2)?;
    let corner = sq.vertices().iter().position(|v| v[0] > 0.0 && v[1] > 0.0).unwrap();
    let probe = shadow_convexity_probe(&sq, corner, &pt(&[1.0, 1.0]), &ts)?;
    println!("square corner along the diagonal");
    for s in &probe.samples {
        println!("  t {:>5.2}  |K_t| {:.6}  1/|K_t^s| {:.6}  vp {:.6}", s.t, s.volume, s.inv_polar_volume, s.vp);
    }
    println!("  convex: volume {}, inverse polar {}", probe.volume_convex, probe.inv_polar_convex);

    // moving the apex of a triangle away from its base keeps |K_t| affine
    let tri = simplex(2)?;
    let apex = tri.vertices().iter().position(|v| v.norm() == 0.0).unwrap();
    let probe = shadow_convexity_probe(&tri, apex, &pt(&[-1.0, -1.0]), &ts)?;
    println!("triangle: volume affine {}, vp quasi-concave {:?}", probe.volume_affine, probe.vp_quasi_concave);
    Ok(())
}
