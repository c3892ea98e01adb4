//! Multistart ascent over m-gons; the optimum is an affine regular polygon.
//!
//!     cargo run --release --example optimize_polygons -- 9

use vpmax::constructions::{affine_regularity_defect, closed_form_pm};
use vpmax::criticality::polygon_lambda_table;
use vpmax::optimizer::optimize_multistart;

fn main() -> vpmax::Result<()> {
    let top: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    println!("{:>3} {:>16} {:>16} {:>10} {:>10} {:>6}", "m", "estimate", "(m sin pi/m)^2", "spread", "defect", "iters");
    for m in 3..=top {
        let t = optimize_multistart(2, m, 16, 0)?;
        let p = &t.final_polytope;
        println!(
            "{m:>3} {:>16.12} {:>16.12} {:>10.2e} {:>10.2e} {:>6}",
            t.final_vp(),
            closed_form_pm(m)?.value,
            polygon_lambda_table(p)?.spread,
            affine_regularity_defect(p)? / p.diameter(),
            t.iterates.len() - 1
        );
    }
    Ok(())
}
