//! V-polytope kernel: hull with facet incidence, volume, centroids, polarity,
//! affine maps and Hausdorff distance.

mod distance;
mod hull;
pub mod io;
pub(crate) mod triangulate;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, factorial};

pub use distance::{distance_to_polytope, hausdorff_distance};
pub(crate) use hull::hull_core;

pub type Point = DVector<f64>;

/// Incidence tolerance: a point is on a hyperplane when its distance is
/// below `abs_eps + rel_eps * scale`, where `scale` is the radius of the
/// point cloud about its mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel_eps: f64,
    pub abs_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel_eps: 1e-9, abs_eps: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(rel_eps: f64, abs_eps: f64) -> Result<Self> {
        if !(rel_eps > 0.0 && abs_eps > 0.0) {
            return Err(Error::BadArity(format!("tolerances must be positive, got rel {rel_eps}, abs {abs_eps}")));
        }
        Ok(Self { rel_eps, abs_eps })
    }
}

/// Vertex list of a full-dimensional polytope in canonical (lexicographic)
/// order. Only produced by [`hull`], so every stored point is extreme.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VPolytope {
    dim: usize,
    #[serde(serialize_with = "io::ser_points")]
    vertices: Vec<Point>,
}

impl VPolytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// One facet: `{x : <normal, x> <= offset}` is the supporting halfspace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Facet {
    #[serde(serialize_with = "io::ser_point")]
    pub normal: Point,
    pub offset: f64,
    /// Sorted indices into [`VPolytope::vertices`].
    pub vertex_ids: Vec<usize>,
}

/// H-representation with facet/vertex incidence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FacetComplex {
    pub facets: Vec<Facet>,
    /// For each vertex, the sorted indices of incident facets.
    pub adjacency: Vec<Vec<usize>>,
    /// Boundary triangulation: `(facet, simplex vertex ids)`.
    #[serde(skip)]
    pub(crate) boundary: Vec<(usize, Vec<usize>)>,
}

impl FacetComplex {
    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }
}

/// Convex hull of `points`: canonical vertex list plus facet complex.
pub fn hull(points: &[Point], tol: Tolerance) -> Result<(VPolytope, FacetComplex)> {
    let p = Polytope::from_points(points, tol)?;
    Ok((p.vpoly, p.complex))
}

/// A [`VPolytope`] together with its [`FacetComplex`].
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    vpoly: VPolytope,
    complex: FacetComplex,
    tol: Tolerance,
    eps: f64,
}

impl Polytope {
    pub fn from_points(points: &[Point], tol: Tolerance) -> Result<Self> {
        Ok(Self::from_points_with_sources(points, tol)?.0)
    }

    /// Like [`Polytope::from_points`], also returning for every canonical
    /// vertex the index of the input point it came from.
    pub fn from_points_with_sources(points: &[Point], tol: Tolerance) -> Result<(Self, Vec<usize>)> {
        let dim = hull::validate(points)?;
        if points.len() < dim + 1 {
            return Err(Error::DegenerateInput { span: points.len().saturating_sub(1), dim });
        }
        let raw = hull_core(points, &tol)?;
        let mut canon = vec![usize::MAX; points.len()];
        for (k, &src) in raw.extreme.iter().enumerate() {
            canon[src] = k;
        }
        let vertices: Vec<Point> = raw.extreme.iter().map(|&i| points[i].clone()).collect();
        let mut id_lists: Vec<Vec<usize>> = raw
            .facets
            .iter()
            .map(|f| {
                let mut ids: Vec<usize> = f.members.iter().map(|&m| canon[m]).collect();
                ids.sort_unstable();
                ids
            })
            .collect();
        id_lists.sort();
        let poly = Self::assemble(dim, vertices, id_lists, tol, raw.eps)?;
        Ok((poly, raw.extreme))
    }

    fn assemble(dim: usize, vertices: Vec<Point>, id_lists: Vec<Vec<usize>>, tol: Tolerance, eps: f64) -> Result<Self> {
        let mut interior = DVector::zeros(dim);
        for v in &vertices {
            interior += v;
        }
        interior /= vertices.len() as f64;
        let facets: Vec<Facet> = id_lists
            .into_iter()
            .map(|ids| {
                let pts: Vec<&Point> = ids.iter().map(|&i| &vertices[i]).collect();
                let mut normal = if pts.len() == dim { linalg::hyperplane_normal(&pts).0 } else { linalg::fitted_normal(&pts) };
                let mut offset = pts.iter().map(|p| normal.dot(p)).sum::<f64>() / pts.len() as f64;
                if normal.dot(&interior) > offset {
                    normal = -normal;
                    offset = -offset;
                }
                Facet { normal, offset, vertex_ids: ids }
            })
            .collect();
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (k, f) in facets.iter().enumerate() {
            for &v in &f.vertex_ids {
                adjacency[v].push(k);
            }
        }
        let mut boundary = Vec::new();
        for (k, f) in facets.iter().enumerate() {
            for s in triangulate::triangulate_face(&vertices, &f.vertex_ids, &tol)? {
                boundary.push((k, s));
            }
        }
        let _ = eps;
        let scale = vertices.iter().map(|v| (v - &interior).norm()).fold(0.0, f64::max);
        let eps = tol.abs_eps + tol.rel_eps * scale;
        Ok(Self { vpoly: VPolytope { dim, vertices }, complex: FacetComplex { facets, adjacency, boundary }, tol, eps })
    }

    pub fn dim(&self) -> usize {
        self.vpoly.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vpoly.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vpoly.vertices.len()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.complex.facets
    }

    pub fn vpoly(&self) -> &VPolytope {
        &self.vpoly
    }

    pub fn complex(&self) -> &FacetComplex {
        &self.complex
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// Absolute incidence threshold used when this hull was built.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub(crate) fn boundary(&self) -> &[(usize, Vec<usize>)] {
        &self.complex.boundary
    }

    /// Every facet has exactly `dim` vertices.
    pub fn is_simplicial(&self) -> bool {
        self.complex.facets.iter().all(|f| f.vertex_ids.len() == self.dim())
    }

    pub fn vertex_mean(&self) -> Point {
        let mut c = DVector::zeros(self.dim());
        for v in self.vertices() {
            c += v;
        }
        c / self.num_vertices() as f64
    }

    /// `|conv(F, apex)|` for every facet `F`.
    pub fn facet_cone_volumes(&self, apex: &Point) -> Vec<f64> {
        let n = self.dim();
        let nf = factorial(n);
        let mut out = vec![0.0; self.complex.facets.len()];
        for (f, s) in self.boundary() {
            let rows: Vec<&Point> = s.iter().map(|&i| &self.vertices()[i]).collect();
            out[*f] += linalg::det_from(&rows, Some(apex)).abs() / nf;
        }
        out
    }

    pub fn volume(&self) -> f64 {
        self.facet_cone_volumes(&self.vertex_mean()).iter().sum()
    }

    /// Center of gravity of the solid polytope.
    pub fn centroid(&self) -> Point {
        let n = self.dim();
        let apex = self.vertex_mean();
        let mut total = 0.0;
        let mut acc = DVector::zeros(n);
        for (_, s) in self.boundary() {
            let rows: Vec<&Point> = s.iter().map(|&i| &self.vertices()[i]).collect();
            let w = linalg::det_from(&rows, Some(&apex)).abs();
            let mut c = apex.clone();
            for r in &rows {
                c += *r;
            }
            acc.axpy(w / (n + 1) as f64, &c, 1.0);
            total += w;
        }
        acc / total
    }

    /// Center of gravity of facet `f` as an (n-1)-dimensional set.
    pub fn facet_centroid(&self, f: usize) -> Result<Point> {
        let len = self.complex.facets.len();
        if f >= len {
            return Err(Error::IndexOutOfRange { index: f, len });
        }
        let n = self.dim();
        let apex = self.vertex_mean();
        let mut total = 0.0;
        let mut acc = DVector::zeros(n);
        for (_, s) in self.boundary().iter().filter(|(k, _)| *k == f) {
            let rows: Vec<&Point> = s.iter().map(|&i| &self.vertices()[i]).collect();
            let w = linalg::det_from(&rows, Some(&apex)).abs();
            let mut c = DVector::zeros(n);
            for r in &rows {
                c += *r;
            }
            acc.axpy(w / n as f64, &c, 1.0);
            total += w;
        }
        Ok(acc / total)
    }

    /// `min_F (h_F - <u_F, z>)`; positive iff `z` is interior.
    pub fn min_slack(&self, z: &Point) -> f64 {
        self.complex.facets.iter().map(|f| f.offset - f.normal.dot(z)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, z: &Point) -> bool {
        self.min_slack(z) >= -self.eps
    }

    pub fn is_interior(&self, z: &Point) -> bool {
        self.min_slack(z) > self.eps
    }

    pub fn diameter(&self) -> f64 {
        let v = self.vertices();
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max((&v[i] - &v[j]).norm());
            }
        }
        d
    }

    /// Polar body about `z`: vertices `z + u_F / (h_F - <u_F, z>)`.
    pub fn polar(&self, z: &Point) -> Result<Polytope> {
        self.check_dim(z)?;
        let slack = self.min_slack(z);
        if slack <= self.eps {
            return Err(Error::CenterNotInterior { slack });
        }
        let pts: Vec<Point> = self
            .complex
            .facets
            .iter()
            .map(|f| z + &f.normal / (f.offset - f.normal.dot(z)))
            .collect();
        Polytope::from_points(&pts, self.tol)
    }

    pub fn affine_map(&self, a: &DMatrix<f64>, b: &Point) -> Result<Polytope> {
        let n = self.dim();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.nrows().max(a.ncols()) });
        }
        self.check_dim(b)?;
        let det = a.determinant();
        if !det.is_finite() || det.abs() <= 1e-14 * a.norm().powi(n as i32).max(f64::MIN_POSITIVE) {
            return Err(Error::SingularMatrix { det });
        }
        let pts: Vec<Point> = self.vertices().iter().map(|v| a * v + b).collect();
        Polytope::from_points(&pts, self.tol)
    }

    pub fn translate(&self, b: &Point) -> Result<Polytope> {
        self.affine_map(&DMatrix::identity(self.dim(), self.dim()), b)
    }

    pub fn scale(&self, c: f64) -> Result<Polytope> {
        self.affine_map(&(DMatrix::identity(self.dim(), self.dim()) * c), &DVector::zeros(self.dim()))
    }

    /// Facets sharing a ridge (at least `n - 1` vertices) with facet `f`.
    pub fn adjacent_facets(&self, f: usize) -> Vec<usize> {
        let ids = &self.complex.facets[f].vertex_ids;
        let need = self.dim().saturating_sub(1).max(1);
        self.complex
            .facets
            .iter()
            .enumerate()
            .filter(|(k, g)| *k != f && g.vertex_ids.iter().filter(|v| ids.contains(v)).count() >= need)
            .map(|(k, _)| k)
            .collect()
    }

    fn check_dim(&self, z: &Point) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: z.len() });
        }
        Ok(())
    }
}

/// Convenience: build a point from a slice.
pub fn pt(coords: &[f64]) -> Point {
    DVector::from_column_slice(coords)
}


/// Vertex indices of a polygon in counterclockwise order, starting from
/// vertex 0.
pub fn polygon_cycle(p: &Polytope) -> Vec<usize> {
    assert_eq!(p.dim(), 2, "polygon_cycle needs a planar polytope");
    let c = p.vertex_mean();
    let angle = |i: usize| {
        let d = &p.vertices()[i] - &c;
        d[1].atan2(d[0])
    };
    let mut order: Vec<usize> = (0..p.num_vertices()).collect();
    order.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
    let start = order.iter().position(|&i| i == 0).unwrap_or(0);
    order.rotate_left(start);
    order
}
