use nalgebra::{DMatrix, DVector};

use super::{Point, Polytope};
use crate::error::{Error, Result};

/// Nearest point of `conv(points)` to the origin (Wolfe's active-set
/// min-norm-point method).
fn min_norm_point(q: &[Point]) -> Point {
    let scale = q.iter().map(|v| v.norm_squared()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let (i0, _) = q.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, v)| {
        let d = v.norm_squared();
        if d < acc.1 {
            (i, d)
        } else {
            acc
        }
    });
    let mut corral = vec![i0];
    let mut w = vec![1.0];
    let mut x = q[i0].clone();
    for _ in 0..(50 * q.len() + 50) {
        let (j, best) = q.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, v)| {
            let d = x.dot(v);
            if d < acc.1 {
                (i, d)
            } else {
                acc
            }
        });
        if x.norm_squared() - best <= 1e-13 * scale || corral.contains(&j) {
            break;
        }
        corral.push(j);
        w.push(0.0);
        loop {
            let alpha = affine_min_norm(q, &corral);
            if alpha.iter().all(|&a| a > 1e-14) {
                w = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (k, &a) in alpha.iter().enumerate() {
                if a <= 1e-14 && w[k] - a > 0.0 {
                    theta = theta.min(w[k] / (w[k] - a));
                }
            }
            for (wk, a) in w.iter_mut().zip(alpha.iter()) {
                *wk = theta * a + (1.0 - theta) * *wk;
            }
            let keep: Vec<bool> = w.iter().map(|&v| v > 1e-15).collect();
            if keep.iter().all(|&k| k) {
                // numerical stall: drop the smallest weight
                let (k_min, _) = w.iter().enumerate().fold((0, f64::INFINITY), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
                corral.remove(k_min);
                w.remove(k_min);
            } else {
                let mut k = 0;
                corral.retain(|_| {
                    let r = keep[k];
                    k += 1;
                    r
                });
                let mut k = 0;
                w.retain(|_| {
                    let r = keep[k];
                    k += 1;
                    r
                });
            }
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= total);
            if corral.len() == 1 {
                w = vec![1.0];
                break;
            }
        }
        x = DVector::zeros(q[0].len());
        for (&i, &wi) in corral.iter().zip(w.iter()) {
            x.axpy(wi, &q[i], 1.0);
        }
    }
    x
}

/// Coefficients (summing to one) of the min-norm point of the affine hull.
fn affine_min_norm(q: &[Point], corral: &[usize]) -> Vec<f64> {
    let k = corral.len();
    let mut m = DMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            m[(a, b)] = q[corral[a]].dot(&q[corral[b]]);
        }
        m[(a, k)] = 1.0;
        m[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = m.clone().lu().solve(&rhs).unwrap_or_else(|| {
        m.pseudo_inverse(1e-14).map(|p| p * &rhs).unwrap_or_else(|_| DVector::from_element(k + 1, 1.0 / k as f64))
    });
    sol.rows(0, k).iter().copied().collect()
}

/// Euclidean distance from `x` to `p` (zero inside).
pub fn distance_to_polytope(p: &Polytope, x: &Point) -> f64 {
    if p.contains(x) {
        return 0.0;
    }
    let shifted: Vec<Point> = p.vertices().iter().map(|v| v - x).collect();
    min_norm_point(&shifted).norm()
}

/// Hausdorff distance between two polytopes; attained at a vertex of one of
/// them since distance to a convex set is convex.
pub fn hausdorff_distance(p: &Polytope, q: &Polytope) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: q.dim() });
    }
    let a = p.vertices().iter().map(|v| distance_to_polytope(q, v)).fold(0.0, f64::max);
    let b = q.vertices().iter().map(|v| distance_to_polytope(p, v)).fold(0.0, f64::max);
    Ok(a.max(b))
}
