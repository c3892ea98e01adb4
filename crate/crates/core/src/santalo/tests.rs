use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;

use super::*;
use crate::geometry::{pt, Tolerance};

fn poly(pts: &[&[f64]]) -> Polytope {
    let pts: Vec<Point> = pts.iter().map(|p| pt(p)).collect();
    Polytope::from_points(&pts, Tolerance::default()).unwrap()
}

fn square() -> Polytope {
    poly(&[&[-1.0, -1.0], &[1.0, -1.0], &[1.0, 1.0], &[-1.0, 1.0]])
}

fn triangle() -> Polytope {
    poly(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]])
}

fn remark() -> Polytope {
    poly(&[&[1.0, -1.0], &[-1.0, -1.0], &[-1.0, 1.0], &[10.0, 1.0]])
}

fn regular(m: usize) -> Polytope {
    let pts: Vec<Point> = (0..m)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / m as f64;
            pt(&[a.cos(), a.sin()])
        })
        .collect();
    Polytope::from_points(&pts, Tolerance::default()).unwrap()
}

/// Independent oracle: `|K^z|` of a polygon from the support-function
/// integral `(1/2) \int h_{K-z}(θ)^{-2} dθ` by composite Simpson quadrature.
fn polar_area_by_quadrature(p: &Polytope, z: &Point) -> f64 {
    let steps = 20_000;
    let h = 2.0 * PI / steps as f64;
    let support = |th: f64| {
        let d = pt(&[th.cos(), th.sin()]);
        p.vertices().iter().map(|v| (v - z).dot(&d)).fold(f64::NEG_INFINITY, f64::max)
    };
    let mut acc = 0.0;
    for i in 0..=steps {
        let w = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * support(i as f64 * h).powi(-2);
    }
    0.5 * acc * h / 3.0
}

/// Independent oracle for the Santaló point of a polygon: grid scan of the
/// quadrature objective, then alternating golden-section refinement.
fn santalo_by_grid(p: &Polytope) -> Point {
    let f = |x: f64, y: f64| {
        let z = pt(&[x, y]);
        if p.min_slack(&z) <= 1e-9 {
            f64::INFINITY
        } else {
            polar_area_by_quadrature(p, &z)
        }
    };
    let lo: Vec<f64> = (0..2).map(|i| p.vertices().iter().map(|v| v[i]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..2).map(|i| p.vertices().iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let g = 40;
    for i in 1..g {
        for j in 1..g {
            let x = lo[0] + (hi[0] - lo[0]) * i as f64 / g as f64;
            let y = lo[1] + (hi[1] - lo[1]) * j as f64 / g as f64;
            let v = f(x, y);
            if v < best.0 {
                best = (v, x, y);
            }
        }
    }
    let (mut x, mut y) = (best.1, best.2);
    let mut width = [(hi[0] - lo[0]) / g as f64, (hi[1] - lo[1]) / g as f64];
    let golden = |g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64| {
        let r = 0.618_033_988_749_894_8;
        for _ in 0..60 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if g(c) < g(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    };
    for _ in 0..6 {
        x = golden(&|t| f(t, y), x - width[0], x + width[0]);
        y = golden(&|t| f(x, t), y - width[1], y + width[1]);
        width = [width[0] * 0.5, width[1] * 0.5];
    }
    pt(&[x, y])
}

#[test]
fn polar_volume_examples() {
    let s = square();
    assert!((polar_volume_at(&s, &pt(&[0.0, 0.0])).unwrap() - 2.0).abs() < 1e-14);
    assert!((polar_volume_at(&regular(6), &pt(&[0.0, 0.0])).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-13);
    let off = polar_volume_at(&s, &pt(&[0.5, 0.0])).unwrap();
    assert!(off > 2.0);
    assert!((off - polar_area_by_quadrature(&s, &pt(&[0.5, 0.0]))).abs() < 1e-9);
    assert!(matches!(polar_volume_at(&s, &pt(&[1.0, 0.0])), Err(Error::CenterNotInterior { .. })));
}

#[test]
fn polar_volume_matches_rehulled_polar() {
    let p = remark();
    let z = pt(&[0.5, -0.2]);
    let direct = p.polar(&z).unwrap().volume();
    assert!((polar_volume_at(&p, &z).unwrap() - direct).abs() < 1e-12 * direct);
}

#[test]
fn grid_scan_confirms_square_minimizer_at_origin() {
    let s = square();
    let at0 = polar_volume_at(&s, &pt(&[0.0, 0.0])).unwrap();
    for i in -4..=4 {
        for j in -4..=4 {
            if i == 0 && j == 0 {
                continue;
            }
            let z = pt(&[0.2 * i as f64, 0.2 * j as f64]);
            assert!(polar_volume_at(&s, &z).unwrap() > at0);
        }
    }
}

#[test]
fn santalo_examples() {
    let r = volume_product(&square()).unwrap();
    assert!(r.s.norm() < 1e-14);
    assert!((r.vp - 8.0).abs() < 1e-12);

    let t = volume_product(&triangle()).unwrap();
    let oracle = santalo_by_grid(&triangle());
    assert!((&t.s - &oracle).norm() < 5e-5, "{} vs {}", t.s, oracle);
    assert!((&t.s - pt(&[1.0 / 3.0, 1.0 / 3.0])).norm() < 1e-12);
    assert!((t.vp - 6.75).abs() < 1e-12);

    let r = volume_product(&remark()).unwrap();
    assert!(r.residual <= 1e-10 * r.polar_diameter);
    assert!(r.residual < 1e-10);
    let oracle = santalo_by_grid(&remark());
    assert!((&r.s - &oracle).norm() < 5e-5, "{} vs {}", r.s, oracle);
    let oracle_vp = remark().volume() * polar_area_by_quadrature(&remark(), &oracle);
    assert!((r.vp - oracle_vp).abs() < 1e-7 * r.vp);
    assert!(r.vp < 8.0);
    assert!((r.vp - r.volume * r.polar_volume).abs() == 0.0);
}

#[test]
fn closed_form_products() {
    let simplex3 = poly(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
    assert!((volume_product(&simplex3).unwrap().vp - 256.0 / 36.0).abs() < 1e-11);
    let cross3 = poly(&[&[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, -1.0]]);
    assert!((volume_product(&cross3).unwrap().vp - 64.0 / 6.0).abs() < 1e-11);
}

#[test]
fn no_convergence_carries_best_iterate() {
    let opts = SantaloOptions { max_iters: 1, tol_residual: 1e-300, damping: 1.0 };
    match santalo_point(&remark(), &opts) {
        Err(Error::NoConvergence { max_iters: 1, best }) => assert!(remark().is_interior(&best.s)),
        other => panic!("expected NoConvergence, got {other:?}"),
    }
}

#[test]
fn stability_of_square_and_pentagon_is_quadratic() {
    let scales = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    for p in [square(), regular(5)] {
        let probe = stability_probe(&p, &scales, 0, 3).unwrap();
        let slope = probe.slope.unwrap();
        assert!((1.8..2.3).contains(&slope), "slope {slope}");
        assert!(probe.rows.iter().all(|r| r.gap <= 0.0));
    }
    let zero = stability_probe(&square(), &[0.0], 1, 0).unwrap();
    assert_eq!(zero.rows[0].gap, 0.0);
    assert!(zero.slope.is_none());
}

fn random_body(n: usize) -> impl Strategy<Value = Polytope> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, n), n + 2..=10).prop_filter_map("degenerate", |vs| {
        let pts: Vec<Point> = vs.into_iter().map(Point::from_vec).collect();
        let p = Polytope::from_points(&pts, Tolerance::default()).ok()?;
        (p.volume() > 0.05).then_some(p)
    })
}

fn body() -> impl Strategy<Value = Polytope> {
    prop_oneof![random_body(2), random_body(3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn polar_volume_is_convex(p in body(), a in 0.0f64..0.8, b in 0.0f64..0.8, lam in 0.0f64..1.0) {
        let c = p.centroid();
        let z1 = &c + (&p.vertices()[0] - &c) * a;
        let z2 = &c + (&p.vertices()[1] - &c) * b;
        let zm = &z1 * lam + &z2 * (1.0 - lam);
        let (f1, f2, fm) = (polar_volume_at(&p, &z1).unwrap(), polar_volume_at(&p, &z2).unwrap(), polar_volume_at(&p, &zm).unwrap());
        prop_assert!(fm <= lam * f1 + (1.0 - lam) * f2 + 1e-9);
    }

    #[test]
    fn santalo_is_affine_equivariant(p in body(), entries in prop::collection::vec(-0.5f64..0.5, 9), shift in prop::collection::vec(-2.0f64..2.0, 3)) {
        let n = p.dim();
        let a = DMatrix::identity(n, n) + DMatrix::from_fn(n, n, |i, j| entries[i * 3 + j]);
        prop_assume!(a.determinant().abs() > 0.2);
        let b = Point::from_iterator(n, shift.iter().copied().take(n));
        let q = p.affine_map(&a, &b).unwrap();
        let rp = volume_product(&p).unwrap();
        let rq = volume_product(&q).unwrap();
        prop_assert!((&rq.s - (&a * &rp.s + &b)).norm() <= 1e-8 * q.diameter());
        prop_assert!((rq.vp - rp.vp).abs() <= 1e-8 * rp.vp);
    }

    #[test]
    fn santalo_point_is_minimal(p in body(), seed in 0u64..1000) {
        let r = volume_product(&p).unwrap();
        prop_assert!(p.is_interior(&r.s));
        prop_assert!(r.residual <= 1e-10 * r.polar_diameter);
        let delta = 1e-4 * p.diameter();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..32 {
            let u = random_unit(p.dim(), &mut rng);
            prop_assert!(polar_volume_at(&p, &(&r.s + u * delta)).unwrap() >= r.polar_volume);
        }
    }

    #[test]
    fn polar_body_has_no_larger_product(p in body()) {
        let r = volume_product(&p).unwrap();
        let polar = p.polar(&r.s).unwrap();
        prop_assert!(volume_product(&polar).unwrap().vp <= r.vp + 1e-9);
    }
}
