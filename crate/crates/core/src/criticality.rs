//! First-order conditions for a maximizer of the volume product, evaluated
//! after moving the Santaló point to the origin.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{polygon_cycle, Point, Polytope};
use crate::santalo::{recenter, PolarFan, SantaloResult};

pub const DEFAULT_THRESHOLD: f64 = 1e-6;

/// Below this `|μ|` the polygon relation is reported through `μ = 1/λ`.
const RECIPROCAL_SWITCH: f64 = 0.1;

pub fn is_simplicial(p: &Polytope) -> bool {
    p.is_simplicial()
}

/// Both sides of the vertex conditions for a polytope whose Santaló point is
/// the origin. Indexed by vertex.
#[derive(Clone, Debug)]
pub(crate) struct VertexTerms {
    /// `|K°| Σ_{F ∋ x} |conv(F,0)|`
    pub lhs_scalar: Vec<f64>,
    /// `n |K| |conv(F_x,0)|`
    pub rhs_scalar: Vec<f64>,
    /// `|K°| Σ_{F ∋ x} |conv(F,0)| y_F`
    pub lhs_vec: Vec<Point>,
    /// `n |K| |conv(F_x,0)| g_{F_x}`
    pub rhs_vec: Vec<Point>,
    /// every facet through the vertex is a simplex
    pub simplicial: Vec<bool>,
}

pub(crate) fn vertex_terms(k: &Polytope) -> Result<VertexTerms> {
    let n = k.dim();
    let origin = DVector::zeros(n);
    let fan = PolarFan::new(k, &origin)?;
    let cones = k.facet_cone_volumes(&origin);
    let polar_cones = fan.facet_cones(&origin);
    let polar_volume: f64 = polar_cones.iter().map(|c| c.0).sum();
    let volume: f64 = cones.iter().sum();
    let nv = k.num_vertices();
    let mut lhs_scalar = vec![0.0; nv];
    let mut lhs_vec = vec![DVector::zeros(n); nv];
    let mut simplicial = vec![true; nv];
    for (f, facet) in k.facets().iter().enumerate() {
        let y = &facet.normal / facet.offset;
        for &v in &facet.vertex_ids {
            lhs_scalar[v] += polar_volume * cones[f];
            lhs_vec[v].axpy(polar_volume * cones[f], &y, 1.0);
            if facet.vertex_ids.len() != n {
                simplicial[v] = false;
            }
        }
    }
    let scale = n as f64 * volume;
    let rhs_scalar = polar_cones.iter().map(|c| scale * c.0).collect();
    let rhs_vec = polar_cones.iter().map(|c| &c.1 * (scale * c.0)).collect();
    Ok(VertexTerms { lhs_scalar, rhs_scalar, lhs_vec, rhs_vec, simplicial })
}

impl VertexTerms {
    pub fn scalar_residual(&self, v: usize) -> f64 {
        (self.lhs_scalar[v] - self.rhs_scalar[v]).abs() / self.rhs_scalar[v]
    }

    pub fn vector_residual(&self, v: usize) -> f64 {
        (&self.lhs_vec[v] - &self.rhs_vec[v]).norm() / self.rhs_vec[v].norm()
    }

    /// `n|K||conv(F_x,0)| − |K°|Σ|conv(F,0)|`, relative to the right side.
    pub fn slack(&self, v: usize) -> f64 {
        (self.rhs_scalar[v] - self.lhs_scalar[v]) / self.rhs_scalar[v]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PolygonLambdas {
    /// Least-squares `λ` with `x ≈ λ(x₁+x₂)`, per vertex (`inf` when
    /// `x₁+x₂ = 0`).
    pub lambdas: Vec<f64>,
    /// `μ = 1/λ`, the least-squares fit of `x₁+x₂ ≈ μ x`.
    pub mus: Vec<f64>,
    /// `|det(x₁+x₂, x)| / (|x| (|x₁|+|x₂|))`.
    pub collinearity: Vec<f64>,
    /// `max − min` of `λ`, or of `μ` when `spread_on_reciprocal`.
    pub spread: f64,
    pub spread_on_reciprocal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalityReport {
    pub simplicial: bool,
    pub nonsimplicial_warning: bool,
    pub santalo: SantaloResult,
    /// Vertices of the recentred polytope.
    #[serde(serialize_with = "crate::geometry::io::ser_points")]
    pub vertices: Vec<Point>,
    pub scalar_residuals: Vec<f64>,
    pub vector_residuals: Vec<f64>,
    pub inequality_slack: Vec<f64>,
    pub polygon_lambdas: Option<PolygonLambdas>,
    pub worst: f64,
}

impl CriticalityReport {
    pub fn is_critical(&self, threshold: f64) -> bool {
        self.simplicial && self.worst <= threshold
    }
}

fn lambdas_centered(k: &Polytope) -> PolygonLambdas {
    let m = k.num_vertices();
    let cycle = polygon_cycle(k);
    let mut lambdas = vec![0.0; m];
    let mut mus = vec![0.0; m];
    let mut collinearity = vec![0.0; m];
    for (pos, &v) in cycle.iter().enumerate() {
        let x = &k.vertices()[v];
        let x1 = &k.vertices()[cycle[(pos + m - 1) % m]];
        let x2 = &k.vertices()[cycle[(pos + 1) % m]];
        let s = x1 + x2;
        let ss = s.norm_squared();
        lambdas[v] = if ss > 0.0 { x.dot(&s) / ss } else { f64::INFINITY };
        mus[v] = s.dot(x) / x.norm_squared();
        collinearity[v] = (s[0] * x[1] - s[1] * x[0]).abs() / (x.norm() * (x1.norm() + x2.norm()));
    }
    let spread_of = |xs: &[f64]| {
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    };
    let spread_on_reciprocal = mus.iter().any(|mu| mu.abs() < RECIPROCAL_SWITCH);
    let spread = if spread_on_reciprocal { spread_of(&mus) } else { spread_of(&lambdas) };
    PolygonLambdas { lambdas, mus, collinearity, spread, spread_on_reciprocal }
}

/// The planar relation `x = λ(x₁+x₂)` between each vertex and its two
/// neighbours.
pub fn polygon_lambda_table(p: &Polytope) -> Result<PolygonLambdas> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: p.dim() });
    }
    let (k, _) = recenter(p)?;
    Ok(lambdas_centered(&k))
}

pub fn vertex_residuals(p: &Polytope) -> Result<CriticalityReport> {
    let (k, santalo) = recenter(p)?;
    let terms = vertex_terms(&k)?;
    let nv = k.num_vertices();
    let scalar_residuals: Vec<f64> = (0..nv).map(|v| terms.scalar_residual(v)).collect();
    let vector_residuals: Vec<f64> = (0..nv).map(|v| terms.vector_residual(v)).collect();
    let inequality_slack: Vec<f64> = (0..nv).map(|v| terms.slack(v)).collect();
    let polygon_lambdas = (k.dim() == 2).then(|| lambdas_centered(&k));
    let worst = scalar_residuals.iter().chain(&vector_residuals).cloned().fold(0.0, f64::max);
    let simplicial = k.is_simplicial();
    Ok(CriticalityReport {
        simplicial,
        nonsimplicial_warning: !simplicial,
        santalo,
        vertices: k.vertices().to_vec(),
        scalar_residuals,
        vector_residuals,
        inequality_slack,
        polygon_lambdas,
        worst,
    })
}

/// Unnormalized `n|K||conv(F_x,0)| − |K°|Σ_{F∋x}|conv(F,0)|` per vertex.
pub fn minimizer_inequality_check(p: &Polytope) -> Result<Vec<f64>> {
    let (k, _) = recenter(p)?;
    let t = vertex_terms(&k)?;
    Ok((0..k.num_vertices()).map(|v| t.rhs_scalar[v] - t.lhs_scalar[v]).collect())
}
