//! Fan triangulation of polytope boundaries.
//!
//! A facet with exactly `k` vertices (in ambient dimension `k`) is already a
//! simplex. Larger facets are hulled inside their own hyperplane and fanned
//! from their first vertex over the ridges that avoid it, recursively. The
//! result depends only on the face lattice, so it stays valid while vertices
//! move without changing combinatorics.

use nalgebra::DVector;

use super::hull::hull_core;
use super::Tolerance;
use crate::error::Result;
use crate::linalg;

/// Triangulate the face spanned by `ids` (a facet of a full-dimensional
/// polytope in `R^k`, `k` = ambient dimension). Each returned simplex has `k`
/// ids.
pub(crate) fn triangulate_face(points: &[DVector<f64>], ids: &[usize], tol: &Tolerance) -> Result<Vec<Vec<usize>>> {
    let k = points[ids[0]].len();
    if ids.len() <= k {
        return Ok(vec![ids.to_vec()]);
    }
    let pts: Vec<&DVector<f64>> = ids.iter().map(|&i| &points[i]).collect();
    if k == 2 {
        // collinear boundary segment with extra points: order along the line
        let dir = pts[pts.len() - 1] - pts[0];
        let mut order: Vec<usize> = (0..ids.len()).collect();
        order.sort_by(|&a, &b| dir.dot(pts[a]).total_cmp(&dir.dot(pts[b])));
        return Ok(order.windows(2).map(|w| vec![ids[w[0]], ids[w[1]]]).collect());
    }
    let (basis, mean) = linalg::affine_basis(&pts, k - 1);
    let projected: Vec<DVector<f64>> = pts.iter().map(|p| &basis * (*p - &mean)).collect();
    let raw = hull_core(&projected, tol)?;
    let apex = 0usize;
    let mut out = Vec::new();
    for f in raw.facets.iter().filter(|f| !f.members.contains(&apex)) {
        let mut members = f.members.clone();
        members.sort_unstable();
        for s in triangulate_face(&projected, &members, tol)? {
            let mut simplex = Vec::with_capacity(k);
            simplex.push(ids[apex]);
            simplex.extend(s.iter().map(|&i| ids[i]));
            out.push(simplex);
        }
    }
    Ok(out)
}
