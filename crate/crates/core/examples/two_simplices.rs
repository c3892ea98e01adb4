//! Polytopes with n+2 vertices: convex hulls of two orthogonal simplices.
//!
//!     cargo run --release --example two_simplices

use vpmax::constructions::{conv_two_simplices, f_n_k};
use vpmax::optimizer::optimize_multistart;
use vpmax::santalo::volume_product;

fn main() -> vpmax::Result<()> {
    for n in 2..=5 {
        print!("n = {n}:");
        for k in 1..n {
            let vp = volume_product(&conv_two_simplices(n, k)?)?.vp;
            print!("  k={k} {vp:.9} (f = {:.9})", f_n_k(n, k)?.value);
        }
        println!();
    }
    for n in 3..=4 {
        let t = optimize_multistart(n, n + 2, 8, 0)?;
        println!(
            "ascent with {} vertices in R^{n}: {:.12}, simplicial {}",
            n + 2,
            t.final_vp(),
            t.final_polytope.is_simplicial()
        );
    }
    Ok(())
}
