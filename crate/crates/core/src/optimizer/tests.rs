use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::*;
use crate::constructions::{closed_form_pm, cube, regular_polygon, remark_counterexample, simplex};
use crate::criticality::polygon_lambda_table;
use crate::geometry::{pt, Tolerance};

/// Central differences of `vp` in every vertex coordinate.
fn fd_gradient(p: &Polytope, h: f64) -> Vec<Point> {
    let eval = |pts: &[Point]| volume_product(&Polytope::from_points(pts, p.tolerance()).unwrap()).unwrap().vp;
    let mut out = Vec::new();
    for v in 0..p.num_vertices() {
        let mut g = DVector::zeros(p.dim());
        for j in 0..p.dim() {
            let mut pts = p.vertices().to_vec();
            pts[v][j] += h;
            let up = eval(&pts);
            pts[v][j] -= 2.0 * h;
            g[j] = (up - eval(&pts)) / (2.0 * h);
        }
        out.push(g);
    }
    out
}

fn max_norm(gs: &[Point]) -> f64 {
    gs.iter().map(|g| g.norm()).fold(0.0, f64::max)
}

fn max_diff(a: &[Point], b: &[Point]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn gradient_vanishes_on_critical_examples() {
    let g = vp_gradient(&cube(2).unwrap()).unwrap();
    assert!(max_norm(&g.gradients) < 1e-13);
    assert!(!g.subgradient_warning);
    let g = vp_gradient(&simplex(2).unwrap()).unwrap();
    assert!(max_norm(&g.gradients) < 1e-12);
}

#[test]
fn gradient_on_remark_matches_differences() {
    let r = remark_counterexample();
    let g = vp_gradient(&r).unwrap();
    let fd = fd_gradient(&r, 1e-6 * r.diameter());
    let v = r.vertices().iter().position(|x| (x - pt(&[10.0, 1.0])).norm() < 1e-12).unwrap();
    assert!(g.gradients[v].norm() > 1e-3);
    assert!(max_diff(&g.gradients, &fd) <= 1e-5 * max_norm(&fd));
}

#[test]
fn gradient_matches_differences_on_random_polytopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 50 {
        let n = 2 + checked % 2;
        // simplices have constant vp, so start at n + 2
        let m = n + 2 + rng.random_range(0..3);
        let Ok(p) = random_start(n, m, &mut rng) else { continue };
        if !p.is_simplicial() || p.min_slack(&p.vertex_mean()) < 0.1 {
            continue;
        }
        let g = vp_gradient(&p).unwrap();
        let fd = fd_gradient(&p, 1e-6 * p.diameter());
        assert!(max_diff(&g.gradients, &fd) <= 1e-5 * max_norm(&fd), "n = {n}, m = {m}, {:e} {:e} {:?}", max_diff(&g.gradients, &fd), max_norm(&fd), p.vertices());
        checked += 1;
    }
}

#[test]
fn nonsimplicial_vertices_fall_back_to_differences() {
    let g = vp_gradient(&cube(3).unwrap()).unwrap();
    assert!(g.subgradient_warning);
    assert!(g.gradients.iter().all(|x| x.iter().all(|c| c.is_finite())));
}

#[test]
fn regular_polygon_is_already_critical() {
    let t = ascend(&regular_polygon(7).unwrap(), &OptimizeOptions::default()).unwrap();
    assert_eq!(t.iterates.len(), 1);
    assert!(t.converged);
}

#[test]
fn random_heptagon_converges_to_the_regular_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p0 = random_start(2, 7, &mut rng).unwrap();
    let t = ascend(&p0, &OptimizeOptions::default()).unwrap();
    let target = closed_form_pm(7).unwrap().value;
    assert!((t.final_vp() - target).abs() <= 1e-6 * target);
    assert!(polygon_lambda_table(&t.final_polytope).unwrap().spread <= 1e-5);
    assert_eq!(t.final_polytope.num_vertices(), 7);
    for w in t.iterates.windows(2) {
        assert!(w[1].vp >= w[0].vp);
    }
}

#[test]
fn five_points_in_space_reach_nine() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p0 = random_start(3, 5, &mut rng).unwrap();
    let t = ascend(&p0, &OptimizeOptions::default()).unwrap();
    assert!((t.final_vp() - 9.0).abs() <= 1e-5 * 9.0);
    assert!(t.final_polytope.is_simplicial());
}

#[test]
fn affine_start_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = DMatrix::from_row_slice(2, 2, &[1.7, 0.4, -0.3, 0.6]);
    for m in [5, 6] {
        let p0 = random_start(2, m, &mut rng).unwrap();
        let q0 = p0.affine_map(&a, &pt(&[3.0, -2.0])).unwrap();
        let opts = OptimizeOptions::default();
        let tp = ascend(&p0, &opts).unwrap();
        let tq = ascend(&q0, &opts).unwrap();
        assert!((tp.final_vp() - tq.final_vp()).abs() <= 1e-6);
    }
}

#[test]
fn multistart_is_deterministic() {
    let a = optimize_multistart(2, 5, 4, 42).unwrap();
    let b = optimize_multistart(2, 5, 4, 42).unwrap();
    assert_eq!(a.final_vp(), b.final_vp());
    assert_eq!(a.seed, b.seed);
    assert_eq!(a.final_polytope, b.final_polytope);
    assert_eq!(a.restarts_used, 4);
    assert_eq!(a.final_polytope.num_vertices(), 5);
}

#[test]
fn multistart_argument_errors() {
    assert!(matches!(optimize_multistart(3, 3, 1, 0), Err(Error::BadArity(_))));
    assert!(matches!(optimize_multistart(7, 9, 1, 0), Err(Error::UnsupportedDimension(7))));
}

#[test]
fn repair_restores_the_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let q = repair_vertex_count(&simplex(2).unwrap(), 5, &mut rng).unwrap();
    assert_eq!(q.num_vertices(), 5);
    assert!(volume_product(&q).unwrap().vp > 6.75);
}

#[test]
fn small_sweep_increases() {
    let rows = sweep_M(2, 3..=5, 4, 0).unwrap();
    assert!(rows.windows(2).all(|w| w[1].estimate > w[0].estimate));
    assert!(rows.iter().all(|r| r.estimate < PI * PI));
    assert!(rows.iter().all(|r| r.gap.unwrap().abs() < 1e-8));
    let csv = sweep_csv(&rows);
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("m,M_estimate,closed_form,gap"));
}

#[test]
fn trace_csv_has_a_row_per_iterate() {
    let t = optimize_multistart(2, 4, 2, 0).unwrap();
    assert_eq!(t.to_csv().lines().count(), t.iterates.len() + 1);
    let json = serde_json::to_value(&t).unwrap();
    assert_eq!(json["final"]["vertices"].as_array().unwrap().len(), 4);
}

#[test]
fn square_bump() {
    let sq = cube(2).unwrap();
    let f = sq.facets().iter().position(|f| (&f.normal - pt(&[1.0, 0.0])).norm() < 1e-12).unwrap();
    let probe = probe_facet_bump(&sq, f, &default_bump_grid(&sq)).unwrap();
    assert!((probe.predicted_slope - 2.0).abs() < 1e-12);
    assert!((probe.slope - 2.0).abs() <= 0.05 * 2.0);
    assert!((probe.loss_exponent.unwrap() - 2.0).abs() <= 0.2);
    assert!(probe.samples.iter().all(|(_, v)| *v > probe.base_vp));
    let tiny = probe_facet_bump(&sq, f, &[1e-9]).unwrap();
    assert!((tiny.samples[0].1 - 8.0).abs() < 1e-7);
}

#[test]
fn bump_in_space() {
    let c = crate::constructions::cross_polytope(3).unwrap();
    let probe = probe_facet_bump(&c, 0, &default_bump_grid(&c)).unwrap();
    assert!((probe.slope - probe.predicted_slope).abs() <= 0.05 * probe.predicted_slope);
    assert!((probe.loss_exponent.unwrap() - 3.0).abs() <= 0.2);
}

#[test]
fn bump_errors() {
    let sq = cube(2).unwrap();
    assert!(matches!(probe_facet_bump(&sq, 4, &[1e-3]), Err(Error::BadFacet(4))));
    let pent = regular_polygon(5).unwrap();
    assert!(matches!(probe_facet_bump(&pent, 0, &[5.0]), Err(Error::TGridOutsideRegion { .. })));
    assert!(matches!(probe_facet_bump(&sq, 0, &[-1e-3]), Err(Error::TGridOutsideRegion { .. })));
}

#[test]
fn shadow_on_square() {
    let sq = cube(2).unwrap();
    let v = sq.vertices().iter().position(|x| (x - pt(&[1.0, 1.0])).norm() < 1e-12).unwrap();
    let dir = pt(&[1.0, 1.0]) / 2f64.sqrt();
    let ts: Vec<f64> = (0..21).map(|i| -0.5 + 0.1 * i as f64).collect();
    let probe = shadow_convexity_probe(&sq, v, &dir, &ts).unwrap();
    assert!(probe.volume_convex && probe.inv_polar_convex);
    assert_eq!(probe.samples.len(), 21);
    let single = shadow_convexity_probe(&sq, v, &dir, &[0.3]).unwrap();
    assert!(single.volume_convex && single.inv_polar_convex);
}

#[test]
fn shadow_with_affine_volume() {
    let tri = simplex(2).unwrap();
    let v = tri.vertices().iter().position(|x| x.norm() < 1e-12).unwrap();
    let dir = pt(&[-1.0, -1.0]) / 2f64.sqrt();
    let ts: Vec<f64> = (0..26).map(|i| -0.5 + 0.1 * i as f64).collect();
    let probe = shadow_convexity_probe(&tri, v, &dir, &ts).unwrap();
    assert!(probe.volume_affine);
    assert_eq!(probe.vp_quasi_concave, Some(true));
    assert!(probe.inv_polar_convex);
}

#[test]
fn shadow_degenerates() {
    let tri = simplex(2).unwrap();
    let v = tri.vertices().iter().position(|x| x.norm() < 1e-12).unwrap();
    let dir = pt(&[1.0, 1.0]);
    assert!(matches!(
        shadow_convexity_probe(&tri, v, &dir, &[0.0, 0.5]),
        Err(Error::DegenerateAlongPath { .. })
    ));
}

#[test]
fn second_differences_match_uniform_formula() {
    let ts = [0.0, 0.5, 1.0, 1.5];
    let fs = [1.0, 2.0, 5.0, 3.0];
    let d = second_differences(&ts, &fs);
    assert_eq!(d, vec![2.0, -5.0]);
    let _ = Tolerance::default();
}
