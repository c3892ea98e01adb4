//! Hull a point cloud, list its facets, and compute volume and polar.
//!
//!     cargo run --example hull_and_volume

use vpmax::geometry::{io, pt, Polytope, Tolerance};

fn main() -> vpmax::Result<()> {
    // a square with a redundant interior point
    let pts = [pt(&[-1.0, -1.0]), pt(&[1.0, -1.0]), pt(&[1.0, 1.0]), pt(&[-1.0, 1.0]), pt(&[0.2, 0.1])];
    let sq = Polytope::from_points(&pts, Tolerance::default())?;
    println!("{} vertices, {} facets", sq.num_vertices(), sq.facets().len());
    for (i, f) in sq.facets().iter().enumerate() {
        println!("  facet {i}: normal {:?} offset {} vertices {:?}", f.normal.as_slice(), f.offset, f.vertex_ids);
    }
    println!("volume {}", sq.volume());
    println!("centroid {:?}", sq.centroid().as_slice());

    let polar = sq.polar(&pt(&[0.0, 0.0]))?;
    println!("polar about the origin: {}", io::to_json_string(&polar));
    println!("polar volume {}", polar.volume());

    let cube = Polytope::from_points(
        &(0..8u32).map(|b| pt(&[f64::from(b & 1), f64::from(b >> 1 & 1), f64::from(b >> 2 & 1)])).collect::<Vec<_>>(),
        Tolerance::default(),
    )?;
    println!("unit cube: {} facets, simplicial: {}", cube.facets().len(), cube.is_simplicial());
    Ok(())
}
