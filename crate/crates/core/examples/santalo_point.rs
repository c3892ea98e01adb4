//! Santaló point and volume product of a polytope read from JSON.
//!
//!     cargo run --example santalo_point -- crates/core/data/remark.json

use vpmax::geometry::{io, Tolerance};
use vpmax::santalo::{stability_probe, volume_product};

fn main() -> vpmax::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/remark.json").into());
    let p = io::read_json(&path, Tolerance::default())?;
    let r = volume_product(&p)?;
    println!("{path}");
    println!("  |K|         {:.12}", r.volume);
    println!("  s(K)        {:?}", r.s.as_slice());
    println!("  |K^s(K)|    {:.12}", r.polar_volume);
    println!("  P(K)        {:.12}", r.vp);
    println!("  {} Newton iterations, residual {:.2e}", r.iterations, r.residual);

    // the polar volume at the old center is off only to second order in the
    // size of a perturbation
    let probe = stability_probe(&p, &[1e-2, 1e-3, 1e-4], 0, 1)?;
    for row in &probe.rows {
        println!("  d_H {:.3e}  gap {:.3e}", row.hausdorff, row.gap);
    }
    println!("  fitted exponent {:.3}", probe.slope.unwrap_or(f64::NAN));
    Ok(())
}
