//! Small dense kernels for dimensions up to [`MAX_DIM`] + 1.

use nalgebra::{DMatrix, DVector};

pub const MAX_DIM: usize = 6;
const BUF: usize = (MAX_DIM + 1) * (MAX_DIM + 1);

/// Determinant of a row-major `n x n` matrix, destroying `a`.
pub fn det_in_place(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f != 0.0 {
                for c in col + 1..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
            }
        }
    }
    det
}

/// Determinant of the matrix whose rows are `rows[i] - origin`.
pub fn det_from(rows: &[&DVector<f64>], origin: Option<&DVector<f64>>) -> f64 {
    let n = rows.len();
    debug_assert!(n <= MAX_DIM + 1);
    let mut buf = [0.0; BUF];
    for (i, r) in rows.iter().enumerate() {
        for j in 0..n {
            buf[i * n + j] = r[j] - origin.map_or(0.0, |o| o[j]);
        }
    }
    det_in_place(&mut buf[..n * n], n)
}

/// Unit normal of the hyperplane through `pts` (exactly `n` points in R^n),
/// via the generalized cross product of the edge vectors. Returns the
/// unnormalized length too, so callers can reject near-degenerate planes.
pub fn hyperplane_normal(pts: &[&DVector<f64>]) -> (DVector<f64>, f64) {
    let n = pts.len();
    let mut normal = DVector::zeros(n);
    if n == 1 {
        normal[0] = 1.0;
        return (normal, 1.0);
    }
    let m = n - 1;
    let mut edges = [0.0; BUF];
    for i in 0..m {
        for j in 0..n {
            edges[i * n + j] = pts[i + 1][j] - pts[0][j];
        }
    }
    let mut minor = [0.0; BUF];
    for skip in 0..n {
        for i in 0..m {
            let mut c = 0;
            for j in 0..n {
                if j != skip {
                    minor[i * m + c] = edges[i * n + j];
                    c += 1;
                }
            }
        }
        let d = det_in_place(&mut minor[..m * m], m);
        normal[skip] = if skip % 2 == 0 { d } else { -d };
    }
    let len = normal.norm();
    if len > 0.0 {
        normal /= len;
    }
    (normal, len)
}

/// Best-fit hyperplane normal through `pts` (any count >= n) by SVD of the
/// centered coordinates.
pub fn fitted_normal(pts: &[&DVector<f64>]) -> DVector<f64> {
    let n = pts[0].len();
    let centered = centered_rows(pts);
    if pts.len() < n {
        // pad with zero rows so the SVD exposes the full right singular basis
        let mut padded = DMatrix::zeros(n, n);
        padded.rows_mut(0, pts.len()).copy_from(&centered);
        return smallest_right_singular(padded);
    }
    smallest_right_singular(centered)
}

fn centered_rows(pts: &[&DVector<f64>]) -> DMatrix<f64> {
    let n = pts[0].len();
    let mut mean = DVector::zeros(n);
    for p in pts {
        mean += *p;
    }
    mean /= pts.len() as f64;
    DMatrix::from_fn(pts.len(), n, |i, j| pts[i][j] - mean[j])
}

fn smallest_right_singular(m: DMatrix<f64>) -> DVector<f64> {
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    vt.row(idx).transpose()
}

/// Orthonormal basis (as rows) of the affine hull directions of `pts`,
/// assumed to span exactly `k` dimensions, plus the mean point.
pub fn affine_basis(pts: &[&DVector<f64>], k: usize) -> (DMatrix<f64>, DVector<f64>) {
    let n = pts[0].len();
    let mut mean = DVector::zeros(n);
    for p in pts {
        mean += *p;
    }
    mean /= pts.len() as f64;
    let centered = DMatrix::from_fn(pts.len().max(n), n, |i, j| {
        if i < pts.len() {
            pts[i][j] - mean[j]
        } else {
            0.0
        }
    });
    let svd = centered.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let basis = DMatrix::from_fn(k, n, |i, j| vt[(order[i], j)]);
    (basis, mean)
}

/// Numerical rank of a set of unit vectors by modified Gram-Schmidt.
pub fn rank(vectors: &[&DVector<f64>], threshold: f64) -> usize {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut w = (*v).clone();
        for b in &basis {
            let c = w.dot(b);
            w.axpy(-c, b, 1.0);
        }
        let len = w.norm();
        if len > threshold {
            basis.push(w / len);
        }
    }
    basis.len()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small() {
        let mut a = [2.0, 1.0, 1.0, 3.0];
        assert_eq!(det_in_place(&mut a, 2), 5.0);
        let mut b = [0.0, 1.0, 1.0, 0.0];
        assert_eq!(det_in_place(&mut b, 2), -1.0);
    }

    #[test]
    fn normal_of_plane_in_3d() {
        let p = [
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 0.0]),
            DVector::from_vec(vec![0.0, 0.0, 1.0]),
        ];
        let refs: Vec<_> = p.iter().collect();
        let (u, len) = hyperplane_normal(&refs);
        assert!(len > 0.0);
        let s = 1.0 / 3f64.sqrt();
        assert!((u.abs() - DVector::from_element(3, s)).norm() < 1e-15);
        let f = fitted_normal(&refs);
        assert!((f.dot(&u).abs() - 1.0).abs() < 1e-12);
    }
}
