//! Model bodies against their closed-form volume products.
//!
//!     cargo run --example closed_forms

use vpmax::constructions::*;
use vpmax::santalo::volume_product;

fn row(label: &str, computed: f64, exact: f64) {
    println!("{label:<24}{computed:>18.12}{exact:>18.12}{:>12.2e}", (computed - exact).abs() / exact);
}

fn main() -> vpmax::Result<()> {
    println!("{:<24}{:>18}{:>18}{:>12}", "body", "pipeline", "closed form", "rel err");
    for m in 3..=8 {
        row(&format!("P_{m}"), volume_product(&regular_polygon(m)?)?.vp, closed_form_pm(m)?.value);
    }
    row("sheared hexagon", volume_product(&affine_regular_polygon(6, 0.5, 2.0)?)?.vp, closed_form_pm(6)?.value);
    for n in 2..=4 {
        row(&format!("simplex_{n}"), volume_product(&simplex(n)?)?.vp, closed_form_simplex_vp(n)?.value);
        row(&format!("cube_{n}"), volume_product(&cube(n)?)?.vp, closed_form_symmetric_vp(n)?.value);
        row(&format!("cross_{n}"), volume_product(&cross_polytope(n)?)?.vp, closed_form_symmetric_vp(n)?.value);
    }
    for (n, k) in [(3, 1), (4, 2), (5, 2)] {
        row(&format!("conv(D_{k}, D_{})", n - k), volume_product(&conv_two_simplices(n, k)?)?.vp, f_n_k(n, k)?.value);
    }
    println!("planar limit pi^2 = {PLANAR_LIMIT:.12}");
    println!("counterexample vp = {:.12}", volume_product(&remark_counterexample())?.vp);
    Ok(())
}
