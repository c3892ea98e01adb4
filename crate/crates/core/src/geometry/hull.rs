//! Incremental (beneath-beyond) convex hull with coplanar facet merging.
//!
//! Points are processed in lexicographic order, so the output depends only on
//! the point set and never on the order the caller supplied it in.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DVector;

use super::Tolerance;
use crate::error::{Error, Result};
use crate::linalg::{self, MAX_DIM};

/// A merged facet, with member indices into the caller's point slice.
#[derive(Clone, Debug)]
pub(crate) struct RawFacet {
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct RawHull {
    /// Indices of extreme points in lexicographic order of their coordinates.
    pub extreme: Vec<usize>,
    pub facets: Vec<RawFacet>,
    pub eps: f64,
}

struct Simplex {
    verts: Vec<usize>,
    normal: DVector<f64>,
    offset: f64,
}

pub(crate) fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

pub(crate) fn validate(points: &[DVector<f64>]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let dim = first.len();
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    Ok(dim)
}

fn plane(points: &[DVector<f64>], verts: &[usize], interior: &DVector<f64>) -> Simplex {
    let pts: Vec<&DVector<f64>> = verts.iter().map(|&i| &points[i]).collect();
    let (mut normal, _) = linalg::hyperplane_normal(&pts);
    let mut offset = normal.dot(pts[0]);
    if normal.dot(interior) > offset {
        normal = -normal;
        offset = -offset;
    }
    Simplex { verts: verts.to_vec(), normal, offset }
}

pub(crate) fn hull_core(points: &[DVector<f64>], tol: &Tolerance) -> Result<RawHull> {
    let dim = validate(points)?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]).then(a.cmp(&b)));
    order.dedup_by(|a, b| lex_cmp(&points[*a], &points[*b]).is_eq());

    let mut mean = DVector::zeros(dim);
    for &i in &order {
        mean += &points[i];
    }
    mean /= order.len() as f64;
    let scale = order.iter().map(|&i| (&points[i] - &mean).norm()).fold(0.0, f64::max);
    let eps = tol.abs_eps + tol.rel_eps * scale;

    // initial simplex: greedily maximize distance to the current affine span
    let mut chosen = vec![order[0]];
    let mut basis: Vec<DVector<f64>> = Vec::new();
    while chosen.len() < dim + 1 {
        let origin = &points[chosen[0]];
        let mut best = (usize::MAX, eps);
        for &i in &order {
            let mut w = &points[i] - origin;
            for b in &basis {
                let c = w.dot(b);
                w.axpy(-c, b, 1.0);
            }
            let d = w.norm();
            if d > best.1 {
                best = (i, d);
            }
        }
        if best.0 == usize::MAX {
            return Err(Error::DegenerateInput { span: basis.len(), dim });
        }
        let mut w = &points[best.0] - origin;
        for b in &basis {
            let c = w.dot(b);
            w.axpy(-c, b, 1.0);
        }
        let len = w.norm();
        basis.push(w / len);
        chosen.push(best.0);
    }

    let mut interior = DVector::zeros(dim);
    for &i in &chosen {
        interior += &points[i];
    }
    interior /= chosen.len() as f64;

    let mut facets: Vec<Option<Simplex>> = Vec::new();
    for skip in 0..chosen.len() {
        let mut verts: Vec<usize> = chosen.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
        verts.sort_unstable();
        facets.push(Some(plane(points, &verts, &interior)));
    }

    let mut ridge_count: HashMap<Vec<usize>, usize> = HashMap::new();
    for &p in &order {
        if chosen.contains(&p) {
            continue;
        }
        let visible: Vec<usize> = facets
            .iter()
            .enumerate()
            .filter_map(|(k, f)| f.as_ref().filter(|f| f.normal.dot(&points[p]) - f.offset > eps).map(|_| k))
            .collect();
        if visible.is_empty() {
            continue;
        }
        ridge_count.clear();
        for &k in &visible {
            let f = facets[k].as_ref().expect("alive");
            for skip in 0..f.verts.len() {
                let ridge: Vec<usize> = f.verts.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, &v)| v).collect();
                *ridge_count.entry(ridge).or_insert(0) += 1;
            }
        }
        for &k in &visible {
            facets[k] = None;
        }
        let mut horizon: Vec<&Vec<usize>> = ridge_count.iter().filter(|(_, &c)| c == 1).map(|(r, _)| r).collect();
        horizon.sort();
        for ridge in horizon {
            let mut verts = ridge.clone();
            verts.push(p);
            verts.sort_unstable();
            facets.push(Some(plane(points, &verts, &interior)));
        }
    }

    let alive: Vec<Simplex> = facets.into_iter().flatten().collect();
    let mut hull_verts: Vec<usize> = alive.iter().flat_map(|f| f.verts.iter().copied()).collect();
    hull_verts.sort_unstable();
    hull_verts.dedup();

    // merge coplanar simplices by their full support sets
    let mut merged: BTreeMap<Vec<usize>, DVector<f64>> = BTreeMap::new();
    for f in &alive {
        let support: Vec<usize> = hull_verts
            .iter()
            .copied()
            .filter(|&v| (f.normal.dot(&points[v]) - f.offset).abs() <= eps)
            .collect();
        merged.entry(support).or_insert_with(|| f.normal.clone());
    }

    let rank_threshold = 10.0 * tol.rel_eps;
    let mut incident: HashMap<usize, Vec<&DVector<f64>>> = HashMap::new();
    for (support, normal) in &merged {
        for &v in support {
            incident.entry(v).or_default().push(normal);
        }
    }
    let extreme_set: Vec<usize> = hull_verts
        .iter()
        .copied()
        .filter(|v| incident.get(v).is_some_and(|ns| linalg::rank(ns, rank_threshold) == dim))
        .collect();

    if extreme_set.len() < hull_verts.len() {
        // drop boundary points that are not vertices and rebuild from the rest
        let sub: Vec<DVector<f64>> = extreme_set.iter().map(|&i| points[i].clone()).collect();
        let inner = hull_core(&sub, tol)?;
        return Ok(RawHull {
            extreme: inner.extreme.iter().map(|&i| extreme_set[i]).collect(),
            facets: inner
                .facets
                .into_iter()
                .map(|f| RawFacet { members: f.members.iter().map(|&i| extreme_set[i]).collect() })
                .collect(),
            eps: inner.eps,
        });
    }

    let mut extreme = extreme_set;
    extreme.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]));
    let mut out: Vec<RawFacet> = merged.into_keys().map(|members| RawFacet { members }).collect();
    for f in &mut out {
        f.members.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]));
    }
    Ok(RawHull { extreme, facets: out, eps })
}
