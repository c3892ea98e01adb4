//! Vertex conditions on a critical and a non-critical polygon.
//!
//!     cargo run --example criticality_report

use vpmax::constructions::{affine_regular_polygon, remark_counterexample};
use vpmax::criticality::{vertex_residuals, DEFAULT_THRESHOLD};
use vpmax::geometry::Polytope;

fn show(name: &str, p: &Polytope) -> vpmax::Result<()> {
    let r = vertex_residuals(p)?;
    println!("{name}: worst residual {:.3e}, critical {}", r.worst, r.is_critical(DEFAULT_THRESHOLD));
    let lambdas = r.polygon_lambdas.as_ref().expect("planar");
    for v in 0..r.vertices.len() {
        println!(
            "  {:>2} x = {:>24?} slack {:>10.3e} scalar {:>10.3e} vector {:>10.3e} lambda {:.9}",
            v,
            r.vertices[v].as_slice(),
            r.inequality_slack[v],
            r.scalar_residuals[v],
            r.vector_residuals[v],
            lambdas.lambdas[v]
        );
    }
    println!("  lambda spread {:.3e}", lambdas.spread);
    Ok(())
}

fn main() -> vpmax::Result<()> {
    show("affine pentagon", &affine_regular_polygon(5, 0.7, -0.4)?)?;
    show("counterexample", &remark_counterexample())
}
