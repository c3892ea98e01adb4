//! Model polytopes with closed-form volume products.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::geometry::{hausdorff_distance, polygon_cycle, pt, Point, Polytope, Tolerance};
use crate::linalg::{factorial, MAX_DIM};

/// `P(B_2^2) = π²`, the limit of the polygon maxima.
pub const PLANAR_LIMIT: f64 = PI * PI;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormValue {
    pub label: String,
    pub value: f64,
    pub provenance: String,
}

impl ClosedFormValue {
    fn new(label: impl Into<String>, value: f64, provenance: &str) -> Self {
        debug_assert!(value.is_finite() && value > 0.0);
        Self { label: label.into(), value, provenance: provenance.to_string() }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::BadArity(format!("dimension must be in 1..={MAX_DIM}, got {n}")));
    }
    Ok(())
}

fn check_polygon(m: usize) -> Result<()> {
    if m < 3 {
        return Err(Error::BadArity(format!("a polygon needs at least 3 vertices, got {m}")));
    }
    Ok(())
}

fn build(pts: Vec<Point>) -> Result<Polytope> {
    Polytope::from_points(&pts, Tolerance::default())
}

/// `P_m`: vertices `R_{2kπ/m} e_1` on the unit circle.
pub fn regular_polygon(m: usize) -> Result<Polytope> {
    affine_regular_polygon(m, 1.0, 0.0)
}

/// Image of `P_m` under `[[1, d], [0, b]]`.
pub fn affine_regular_polygon(m: usize, b: f64, d: f64) -> Result<Polytope> {
    check_polygon(m)?;
    if b == 0.0 {
        return Err(Error::SingularMatrix { det: 0.0 });
    }
    build(
        (0..m)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / m as f64;
                pt(&[a.cos() + d * a.sin(), b * a.sin()])
            })
            .collect(),
    )
}

/// `P(P_m) = (m sin(π/m))²`.
pub fn closed_form_pm(m: usize) -> Result<ClosedFormValue> {
    check_polygon(m)?;
    let v = m as f64 * (PI / m as f64).sin();
    Ok(ClosedFormValue::new(format!("P(P_{m})"), v * v, "(m sin(pi/m))^2"))
}

/// `conv{0, e_1, ..., e_n}`.
pub fn simplex(n: usize) -> Result<Polytope> {
    check_dim(n)?;
    let mut pts = vec![DVector::zeros(n)];
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        pts.push(e);
    }
    build(pts)
}

/// Vertices of the regular `k`-simplex centered at the origin with unit
/// circumradius (Helmert coordinates of the centered standard basis).
pub fn regular_simplex_vertices(k: usize) -> Vec<Point> {
    let radius = (k as f64 / (k + 1) as f64).sqrt();
    (0..=k)
        .map(|i| {
            DVector::from_fn(k, |j, _| {
                // j-th Helmert vector: (1, ..., 1 (j+1 times), -(j+1), 0, ...) / sqrt((j+1)(j+2))
                let norm = (((j + 1) * (j + 2)) as f64).sqrt();
                let c = if i <= j {
                    1.0
                } else if i == j + 1 {
                    -((j + 1) as f64)
                } else {
                    0.0
                };
                c / norm / radius
            })
        })
        .collect()
}

pub fn regular_simplex(n: usize) -> Result<Polytope> {
    check_dim(n)?;
    build(regular_simplex_vertices(n))
}

/// Volume of the regular `k`-simplex with unit circumradius.
pub fn regular_simplex_volume(k: usize) -> f64 {
    let edge = (2.0 * (k + 1) as f64 / k as f64).sqrt();
    edge.powi(k as i32) / factorial(k) * ((k + 1) as f64 / 2f64.powi(k as i32)).sqrt()
}

/// `[-1, 1]^n`.
pub fn cube(n: usize) -> Result<Polytope> {
    check_dim(n)?;
    build(
        (0..1u32 << n)
            .map(|mask| DVector::from_fn(n, |i, _| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }))
            .collect(),
    )
}

/// `conv{±e_i}`.
pub fn cross_polytope(n: usize) -> Result<Polytope> {
    check_dim(n)?;
    let mut pts = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = DVector::zeros(n);
            e[i] = s;
            pts.push(e);
        }
    }
    build(pts)
}

/// `P(Δ^n) = (n+1)^{n+1} / (n!)²`.
pub fn closed_form_simplex_vp(n: usize) -> Result<ClosedFormValue> {
    check_dim(n)?;
    let v = ((n + 1) as f64).powi(n as i32 + 1) / factorial(n).powi(2);
    Ok(ClosedFormValue::new(format!("P(simplex_{n})"), v, "(n+1)^(n+1)/(n!)^2"))
}

/// `P(B_1^n) = P(B_∞^n) = 4^n / n!`.
pub fn closed_form_symmetric_vp(n: usize) -> Result<ClosedFormValue> {
    check_dim(n)?;
    Ok(ClosedFormValue::new(format!("P(cube_{n})"), 4f64.powi(n as i32) / factorial(n), "4^n/n!"))
}

/// `conv(Δ_k - x, Δ_{n-k} - y)` with the two regular simplices in the
/// orthogonal coordinate blocks `1..=k` and `k+1..=n`.
pub fn conv_two_simplices_shifted(n: usize, k: usize, x: &Point, y: &Point) -> Result<Polytope> {
    check_dim(n)?;
    if k == 0 || k >= n {
        return Err(Error::BadArity(format!("need 1 <= k <= n-1, got n = {n}, k = {k}")));
    }
    if x.len() != k || y.len() != n - k {
        return Err(Error::DimensionMismatch { expected: k, got: x.len() });
    }
    let mut pts = Vec::with_capacity(n + 2);
    for v in regular_simplex_vertices(k) {
        let mut p = DVector::zeros(n);
        p.rows_mut(0, k).copy_from(&(v - x));
        pts.push(p);
    }
    for v in regular_simplex_vertices(n - k) {
        let mut p = DVector::zeros(n);
        p.rows_mut(k, n - k).copy_from(&(v - y));
        pts.push(p);
    }
    build(pts)
}

pub fn conv_two_simplices(n: usize, k: usize) -> Result<Polytope> {
    conv_two_simplices_shifted(n, k, &DVector::zeros(k), &DVector::zeros(n.saturating_sub(k)))
}

/// `ln g(x)` with `g(x) = (x+1)^{x+1} / Γ(x+1)`.
fn ln_g(x: f64) -> f64 {
    (x + 1.0) * (x + 1.0).ln() - ln_gamma(x + 1.0)
}

pub fn g_of(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::BadArity(format!("g needs x >= 0, got {x}")));
    }
    Ok(ln_g(x).exp())
}

/// `f_n(k) = g(k) g(n-k) / n!`, the volume product of `conv(Δ_k, Δ_{n-k})`.
pub fn f_n_k(n: usize, k: usize) -> Result<ClosedFormValue> {
    if k > n || n == 0 {
        return Err(Error::BadArity(format!("need 0 <= k <= n, got n = {n}, k = {k}")));
    }
    let v = (ln_g(k as f64) + ln_g((n - k) as f64) - ln_gamma(n as f64 + 1.0)).exp();
    Ok(ClosedFormValue::new(format!("f_{n}({k})"), v, "g(k)g(n-k)/n!"))
}

/// Best closed form known for polytopes in `R^n` with `m` vertices.
pub fn known_maximum(n: usize, m: usize) -> Option<ClosedFormValue> {
    if n == 2 && m >= 3 {
        closed_form_pm(m).ok()
    } else if m == n + 1 {
        closed_form_simplex_vp(n).ok()
    } else if m == n + 2 && n >= 2 {
        f_n_k(n, n / 2).ok()
    } else {
        None
    }
}

/// `conv{(1,-1), (-1,-1), (-1,1), (10,1)}`: adding a vertex to the square
/// and still losing volume product.
pub fn remark_counterexample() -> Polytope {
    build(vec![pt(&[1.0, -1.0]), pt(&[-1.0, -1.0]), pt(&[-1.0, 1.0]), pt(&[10.0, 1.0])]).expect("fixed quadrilateral")
}

/// Hausdorff distance between a polygon and the best least-squares affine
/// image of `P_m` over all vertex correspondences preserving cyclic order.
pub fn affine_regularity_defect(p: &Polytope) -> Result<f64> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: p.dim() });
    }
    let m = p.num_vertices();
    let cycle = polygon_cycle(p);
    let reference: Vec<Point> = (0..m)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / m as f64;
            pt(&[a.cos(), a.sin()])
        })
        .collect();
    let design = DMatrix::from_fn(m, 3, |i, j| if j < 2 { reference[i][j] } else { 1.0 });
    let mut best = f64::INFINITY;
    for flip in [false, true] {
        for shift in 0..m {
            let target = DMatrix::from_fn(m, 2, |i, j| {
                let idx = if flip { (shift + m - i) % m } else { (shift + i) % m };
                p.vertices()[cycle[idx]][j]
            });
            let Ok(map) = design.clone().svd(true, true).solve(&target, 1e-14) else { continue };
            let image: Vec<Point> = (0..m)
                .map(|i| {
                    let row = design.row(i) * &map;
                    pt(&[row[0], row[1]])
                })
                .collect();
            if let Ok(q) = Polytope::from_points(&image, p.tolerance()) {
                best = best.min(hausdorff_distance(p, &q)?);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::santalo::volume_product;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn polygons() {
        let p4 = regular_polygon(4).unwrap();
        let diamond = build(vec![pt(&[1.0, 0.0]), pt(&[0.0, 1.0]), pt(&[-1.0, 0.0]), pt(&[0.0, -1.0])]).unwrap();
        assert!(hausdorff_distance(&p4, &diamond).unwrap() < 1e-15);
        assert!(rel(regular_polygon(3).unwrap().volume(), 3.0 * 3f64.sqrt() / 4.0) < 1e-14);
        let hex = regular_polygon(6).unwrap();
        assert!(hex.vertices().iter().any(|v| (v - pt(&[0.5, 3f64.sqrt() / 2.0])).norm() < 1e-15));
        assert!(matches!(regular_polygon(2), Err(Error::BadArity(_))));
        assert!(matches!(affine_regular_polygon(5, 0.0, 1.0), Err(Error::SingularMatrix { .. })));
        assert_eq!(affine_regular_polygon(5, 1.0, 0.0).unwrap(), regular_polygon(5).unwrap());
    }

    #[test]
    fn affine_regular_products() {
        assert!(rel(volume_product(&affine_regular_polygon(4, 2.0, 0.0).unwrap()).unwrap().vp, 8.0) < 1e-12);
        let sheared = affine_regular_polygon(6, 1.0, 3.0).unwrap();
        assert!(rel(volume_product(&sheared).unwrap().vp, 9.0) < 1e-10);
        assert!(affine_regularity_defect(&sheared).unwrap() < 1e-10);
        assert!(affine_regularity_defect(&remark_counterexample()).unwrap() > 0.1);
    }

    #[test]
    fn closed_forms() {
        assert!(rel(closed_form_pm(3).unwrap().value, 6.75) < 1e-15);
        assert!(rel(closed_form_pm(4).unwrap().value, 8.0) < 1e-15);
        assert!(closed_form_pm(100_000).unwrap().value < PLANAR_LIMIT);
        assert!(rel(closed_form_pm(100_000).unwrap().value, PLANAR_LIMIT) < 1e-9);
        for m in 3..40 {
            assert!(closed_form_pm(m + 1).unwrap().value > closed_form_pm(m).unwrap().value);
        }
        assert_eq!(closed_form_simplex_vp(2).unwrap().value, 6.75);
        assert_eq!(closed_form_symmetric_vp(3).unwrap().value, 64.0 / 6.0);
        assert_eq!(closed_form_symmetric_vp(1).unwrap().value, 4.0);
        assert!(matches!(closed_form_simplex_vp(7), Err(Error::BadArity(_))));
    }

    #[test]
    fn models_match_closed_forms() {
        assert!(rel(volume_product(&simplex(2).unwrap()).unwrap().vp, 6.75) < 1e-12);
        assert!(rel(volume_product(&cube(3).unwrap()).unwrap().vp, 64.0 / 6.0) < 1e-12);
        assert!(rel(volume_product(&cube(1).unwrap()).unwrap().vp, 4.0) < 1e-12);
        for n in 1..=5 {
            let s = regular_simplex(n).unwrap();
            assert!(rel(s.volume(), regular_simplex_volume(n)) < 1e-12);
            assert!(s.vertices().iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
            assert!(s.vertex_mean().norm() < 1e-15);
        }
    }

    #[test]
    fn two_simplices() {
        let q = conv_two_simplices(2, 1).unwrap();
        assert_eq!(q.num_vertices(), 4);
        assert!(rel(volume_product(&q).unwrap().vp, 8.0) < 1e-12);
        let d = conv_two_simplices(3, 1).unwrap();
        assert_eq!(d.num_vertices(), 5);
        assert!(rel(volume_product(&d).unwrap().vp, 9.0) < 1e-10);
        assert!(rel(volume_product(&conv_two_simplices(4, 2).unwrap()).unwrap().vp, 729.0 / 96.0) < 1e-10);
        assert!(matches!(conv_two_simplices(3, 3), Err(Error::BadArity(_))));
        assert!(matches!(conv_two_simplices(3, 0), Err(Error::BadArity(_))));
    }

    #[test]
    fn f_and_g() {
        assert!(rel(f_n_k(3, 1).unwrap().value, 9.0) < 1e-13);
        assert!(rel(f_n_k(4, 1).unwrap().value, 4.0 * (256.0 / 6.0) / 24.0) < 1e-13);
        assert!(rel(f_n_k(4, 2).unwrap().value, 729.0 / 96.0) < 1e-13);
        assert!(rel(g_of(1.0).unwrap(), 4.0) < 1e-14);
        assert!(rel(g_of(0.0).unwrap(), 1.0) < 1e-14);
        for n in 1..=6 {
            for k in 0..=n {
                assert!(rel(f_n_k(n, k).unwrap().value, f_n_k(n, n - k).unwrap().value) < 1e-13);
                assert!(f_n_k(n, k).unwrap().value <= f_n_k(n, n / 2).unwrap().value * (1.0 + 1e-13));
            }
        }
        // f_n(0) is the simplex product
        assert!(rel(f_n_k(3, 0).unwrap().value, closed_form_simplex_vp(3).unwrap().value) < 1e-13);
        assert!(matches!(f_n_k(2, 3), Err(Error::BadArity(_))));
        assert!(g_of(-1.0).is_err());
    }

    #[test]
    fn g_is_log_concave_on_grid() {
        let grid: Vec<f64> = (1..=100).map(|i| 0.1 * i as f64).collect();
        for &a in &grid {
            for &b in &grid {
                let mid = g_of(0.5 * (a + b)).unwrap();
                assert!(g_of(a).unwrap() * g_of(b).unwrap() <= mid * mid * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn remark_quadrilateral() {
        let r = remark_counterexample();
        assert_eq!(r.num_vertices(), 4);
        let vp = volume_product(&r).unwrap().vp;
        assert!(vp < 8.0);
        assert!(vp < closed_form_pm(4).unwrap().value);
    }

    #[test]
    fn known_maxima() {
        assert_eq!(known_maximum(2, 5).unwrap().value, closed_form_pm(5).unwrap().value);
        assert_eq!(known_maximum(3, 4).unwrap().value, closed_form_simplex_vp(3).unwrap().value);
        assert!(rel(known_maximum(3, 5).unwrap().value, 9.0) < 1e-13);
        assert!(known_maximum(3, 7).is_none());
    }
}
