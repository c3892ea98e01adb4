//! Self-checks reproducing the extremal values, grouped into suites.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constructions::{
    affine_regularity_defect, closed_form_pm, closed_form_simplex_vp, closed_form_symmetric_vp, conv_two_simplices,
    conv_two_simplices_shifted, cross_polytope, cube, f_n_k, regular_polygon, regular_simplex_volume,
    remark_counterexample, simplex,
};
use crate::criticality::{polygon_lambda_table, vertex_residuals};
use crate::error::{Error, Result};
use crate::geometry::{Point, Polytope};
use crate::optimizer::{
    default_bump_grid, optimize_multistart, random_start, shadow_convexity_probe, sweep_M, probe_facet_bump,
};
use crate::santalo::{random_unit, stability_probe, volume_product};

pub const SUITES: [&str; 5] = ["polygons", "n-plus-2", "shadow", "bump", "all"];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn polygon_maximality() -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for m in 3..=10 {
        let t = optimize_multistart(2, m, 16, 0)?;
        let target = closed_form_pm(m)?.value;
        let p = &t.final_polytope;
        let spread = polygon_lambda_table(p)?.spread;
        let defect = affine_regularity_defect(p)? / p.diameter();
        worst = worst.max(rel(t.final_vp(), target));
        ok &= rel(t.final_vp(), target) <= 1e-5 && spread <= 1e-5 && defect <= 1e-4 && p.num_vertices() == m;
    }
    Ok(Check::new("polygon maximality", ok, format!("worst relative vp error {worst:.3e}")))
}

pub fn closed_form_pipeline() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for m in 3..=12 {
        worst = worst.max(rel(volume_product(&regular_polygon(m)?)?.vp, closed_form_pm(m)?.value));
    }
    for n in 2..=5 {
        worst = worst.max(rel(volume_product(&simplex(n)?)?.vp, closed_form_simplex_vp(n)?.value));
        let sym = closed_form_symmetric_vp(n)?.value;
        worst = worst.max(rel(volume_product(&cube(n)?)?.vp, sym));
        worst = worst.max(rel(volume_product(&cross_polytope(n)?)?.vp, sym));
    }
    Ok(Check::new("closed-form pipeline", worst <= 1e-8, format!("worst relative error {worst:.3e}")))
}

pub fn two_simplices() -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut argmax_ok = true;
    for n in 3..=5 {
        let vals: Vec<f64> = (1..n).map(|k| Ok(volume_product(&conv_two_simplices(n, k)?)?.vp)).collect::<Result<_>>()?;
        for (k, v) in (1..n).zip(&vals) {
            worst = worst.max(rel(*v, f_n_k(n, k)?.value));
        }
        let best = vals.iter().cloned().fold(f64::MIN, f64::max);
        argmax_ok &= rel(vals[n / 2 - 1], best) <= 1e-7 && rel(vals[n.div_ceil(2) - 1], best) <= 1e-7;
    }
    let t = optimize_multistart(3, 5, 16, 0)?;
    let ok = worst <= 1e-7 && argmax_ok && rel(t.final_vp(), 9.0) <= 1e-5;
    Ok(Check::new("n+2 vertices", ok, format!("worst {worst:.3e}, optimizer {:.10}", t.final_vp())))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Random point of the regular `k`-simplex with unit circumradius.
fn point_in_simplex(k: usize, rng: &mut ChaCha8Rng) -> Point {
    let verts = crate::constructions::regular_simplex_vertices(k);
    let w: Vec<f64> = (0..=k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = w.iter().sum();
    verts.iter().zip(&w).fold(Point::zeros(k), |acc, (v, wi)| acc + v * (wi / total))
}

pub fn volume_factorization() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    let mut penalty_ok = true;
    for n in 2..=5 {
        for k in 1..n {
            let expected = regular_simplex_volume(k) * regular_simplex_volume(n - k) / binomial(n, k);
            let base = volume_product(&conv_two_simplices(n, k)?)?.vp;
            for _ in 0..20 {
                let x = point_in_simplex(k, &mut rng);
                let y = point_in_simplex(n - k, &mut rng);
                let q = conv_two_simplices_shifted(n, k, &x, &y)?;
                worst = worst.max(rel(q.volume(), expected));
                penalty_ok &= volume_product(&q)?.vp < base;
            }
        }
    }
    Ok(Check::new(
        "volume factorization",
        worst <= 1e-10 && penalty_ok,
        format!("worst volume error {worst:.3e}, translation penalty {}", if penalty_ok { "holds" } else { "fails" }),
    ))
}

pub fn facet_bump() -> Result<Check> {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, p) in [("square", cube(2)?), ("hexagon", regular_polygon(6)?)] {
        let probe = probe_facet_bump(&p, 0, &default_bump_grid(&p))?;
        let e = probe.loss_exponent.unwrap_or(f64::NAN);
        ok &= rel(probe.slope, probe.predicted_slope) <= 0.05 && (e - p.dim() as f64).abs() <= 0.2;
        detail.push(format!("{name}: slope {:.6} vs {:.6}, exponent {e:.4}", probe.slope, probe.predicted_slope));
    }
    Ok(Check::new("facet bump", ok, detail.join("; ")))
}

pub fn criticality_residuals() -> Result<Check> {
    let sq = vertex_residuals(&cube(2)?)?.worst;
    let remark = vertex_residuals(&remark_counterexample())?;
    let mut worst_opt: f64 = 0.0;
    for (n, m) in [(2, 5), (2, 7), (3, 5), (3, 6)] {
        let t = optimize_multistart(n, m, 8, 0)?;
        worst_opt = worst_opt.max(vertex_residuals(&t.final_polytope)?.worst);
    }
    let ok = sq <= 1e-10 && worst_opt <= 1e-6 && remark.worst > 1e-2 && remark.santalo.vp < 8.0;
    Ok(Check::new(
        "criticality residuals",
        ok,
        format!("square {sq:.2e}, optimizer {worst_opt:.2e}, counterexample {:.3}", remark.worst),
    ))
}

pub fn maximizer_simpliciality() -> Result<Check> {
    let mut flags = Vec::new();
    for m in 5..=7 {
        flags.push(optimize_multistart(3, m, 16, 0)?.final_polytope.is_simplicial());
    }
    Ok(Check::new("simpliciality of maximizers", flags.iter().all(|&b| b), format!("n=3, m=5..7: {flags:?}")))
}

pub fn monotonicity() -> Result<Check> {
    let planar = sweep_M(2, 3..=8, 16, 0)?;
    let space = sweep_M(3, 4..=5, 16, 0)?;
    let ok = planar.windows(2).all(|w| w[1].estimate > w[0].estimate)
        && planar.iter().all(|r| r.estimate < PI * PI)
        && rel(space[0].estimate, 64.0 / 9.0) <= 1e-5
        && rel(space[1].estimate, 9.0) <= 1e-5;
    let fmt = |rows: &[crate::optimizer::SweepRow]| rows.iter().map(|r| format!("{:.6}", r.estimate)).collect::<Vec<_>>().join(" ");
    Ok(Check::new("monotonicity in m", ok, format!("n=2: {}; n=3: {}", fmt(&planar), fmt(&space))))
}

pub fn shadow_systems() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut done = 0;
    let mut failures = 0;
    let ts: Vec<f64> = (0..11).map(|i| -0.2 + 0.04 * i as f64).collect();
    while done < 100 {
        let n = 2 + done % 2;
        let m = n + 2 + rng.random_range(0..4);
        let p: Polytope = random_start(n, m, &mut rng)?;
        let v = rng.random_range(0..m);
        let dir = random_unit(n, &mut rng);
        match shadow_convexity_probe(&p, v, &dir, &ts) {
            Ok(probe) => {
                failures += usize::from(!(probe.volume_convex && probe.inv_polar_convex));
                done += 1;
            }
            Err(Error::DegenerateAlongPath { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(Check::new("shadow-system convexity", failures == 0, format!("{failures} of 100 paths fail")))
}

pub fn stability() -> Result<Check> {
    let scales = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    let mut slopes = Vec::new();
    for p in [cube(2)?, regular_polygon(5)?] {
        slopes.push(stability_probe(&p, &scales, 0, 3)?.slope.unwrap_or(f64::NAN));
    }
    Ok(Check::new("stability exponent", slopes.iter().all(|s| *s >= 1.8), format!("slopes {slopes:.4?}")))
}

pub fn run_suite(name: &str) -> Result<Vec<Check>> {
    let checks: Vec<fn() -> Result<Check>> = match name {
        "polygons" => vec![polygon_maximality, closed_form_pipeline],
        "n-plus-2" => vec![two_simplices, volume_factorization],
        "shadow" => vec![shadow_systems, stability],
        "bump" => vec![facet_bump],
        "all" => vec![
            polygon_maximality,
            closed_form_pipeline,
            two_simplices,
            volume_factorization,
            facet_bump,
            criticality_residuals,
            maximizer_simpliciality,
            monotonicity,
            shadow_systems,
            stability,
        ],
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    checks.into_iter().map(|c| c()).collect()
}
