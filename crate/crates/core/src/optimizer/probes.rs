use nalgebra::DVector;
use serde::Serialize;

use super::second_differences;
use crate::error::{Error, Result};
use crate::geometry::{io::ser_point, Point, Polytope};
use crate::santalo::{loglog_slope, polar_volume_at, recenter, volume_product};

#[derive(Clone, Debug, Serialize)]
pub struct PerturbationProbe {
    pub facet: usize,
    #[serde(serialize_with = "ser_point")]
    pub direction: Point,
    /// Largest `t` keeping `x_F + t u_F` beneath every adjacent facet.
    pub t_max: f64,
    /// `(t, vp(K_t))`
    pub samples: Vec<(f64, f64)>,
    pub base_vp: f64,
    /// Intercept of the linear fit of `(vp(K_t) − vp(K)) / t`.
    pub slope: f64,
    /// `|K°||F| / n`
    pub predicted_slope: f64,
    /// `(t, |K°| − |K_t°|)` with both polars taken about the Santaló point of `K`.
    pub polar_loss: Vec<(f64, f64)>,
    pub loss_exponent: Option<f64>,
}

/// `t = 1e-3 · diam · 2^{-j/2}` for `j = 0..9`.
pub fn default_bump_grid(p: &Polytope) -> Vec<f64> {
    (0..9).map(|j| 1e-3 * p.diameter() * 2f64.powf(-(j as f64) / 2.0)).collect()
}

fn facet_area(k: &Polytope, f: usize) -> f64 {
    let facet = &k.facets()[f];
    let n = k.dim() as f64;
    k.facet_cone_volumes(&DVector::zeros(k.dim()))[f] * n / facet.offset
}

/// Intercept of the least-squares line through `(xs, ys)`.
fn intercept(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() == 1 {
        return ys[0];
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    my - sxy / sxx * mx
}

/// Push a point out of facet `facet` along its normal and watch `vp`.
pub fn probe_facet_bump(p: &Polytope, facet: usize, ts: &[f64]) -> Result<PerturbationProbe> {
    if facet >= p.facets().len() {
        return Err(Error::BadFacet(facet));
    }
    let (k, base) = recenter(p)?;
    let ids = &p.facets()[facet].vertex_ids;
    let f = k.facets().iter().position(|g| &g.vertex_ids == ids).ok_or(Error::BadFacet(facet))?;
    let u = k.facets()[f].normal.clone();
    let xf = k.facet_centroid(f)?;
    let mut t_max = f64::INFINITY;
    for g in k.adjacent_facets(f) {
        let gf = &k.facets()[g];
        let rate = u.dot(&gf.normal);
        if rate > 0.0 {
            t_max = t_max.min((gf.offset - xf.dot(&gf.normal)) / rate);
        }
    }
    for &t in ts {
        if !(t > 0.0 && t < t_max) {
            return Err(Error::TGridOutsideRegion { t, t_max });
        }
    }
    let origin = DVector::zeros(k.dim());
    let mut samples = Vec::with_capacity(ts.len());
    let mut polar_loss = Vec::with_capacity(ts.len());
    for &t in ts {
        let mut pts = k.vertices().to_vec();
        pts.push(&xf + &u * t);
        let kt = Polytope::from_points(&pts, k.tolerance())?;
        samples.push((t, volume_product(&kt)?.vp));
        polar_loss.push((t, base.polar_volume - polar_volume_at(&kt, &origin)?));
    }
    let xs: Vec<f64> = ts.to_vec();
    let quotients: Vec<f64> = samples.iter().map(|(t, v)| (v - base.vp) / t).collect();
    let slope = if ts.is_empty() { f64::NAN } else { intercept(&xs, &quotients) };
    let losses: Vec<f64> = polar_loss.iter().map(|l| l.1).collect();
    Ok(PerturbationProbe {
        facet,
        direction: u,
        t_max,
        samples,
        base_vp: base.vp,
        slope,
        predicted_slope: base.polar_volume * facet_area(&k, f) / k.dim() as f64,
        polar_loss,
        loss_exponent: loglog_slope(&xs, &losses),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowSample {
    pub t: f64,
    pub volume: f64,
    /// `1 / |K_t^{s(K_t)}|`
    pub inv_polar_volume: f64,
    pub vp: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowProbe {
    pub vertex: usize,
    #[serde(serialize_with = "ser_point")]
    pub direction: Point,
    pub samples: Vec<ShadowSample>,
    pub min_volume_second_diff: f64,
    pub min_inv_polar_second_diff: f64,
    pub volume_convex: bool,
    pub inv_polar_convex: bool,
    /// `|K_t|` is affine on the grid.
    pub volume_affine: bool,
    /// Superlevel sets of `vp` are intervals; only checked when
    /// `volume_affine`.
    pub vp_quasi_concave: Option<bool>,
}

pub const VOLUME_CONVEXITY_TOL: f64 = 1e-9;
pub const INV_POLAR_CONVEXITY_TOL: f64 = 1e-8;

fn scale_of(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE)
}

fn unimodal(xs: &[f64], tol: f64) -> bool {
    let top = xs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |(i, _)| i);
    xs[..=top].windows(2).all(|w| w[1] >= w[0] - tol) && xs[top..].windows(2).all(|w| w[1] <= w[0] + tol)
}

/// Move vertex `vertex` along `direction`: `K_t = conv(K \ {x} ∪ {x + t d})`.
pub fn shadow_convexity_probe(p: &Polytope, vertex: usize, direction: &Point, ts: &[f64]) -> Result<ShadowProbe> {
    if vertex >= p.num_vertices() {
        return Err(Error::IndexOutOfRange { index: vertex, len: p.num_vertices() });
    }
    if direction.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: direction.len() });
    }
    let mut ts = ts.to_vec();
    ts.sort_by(f64::total_cmp);
    let mut samples = Vec::with_capacity(ts.len());
    for &t in &ts {
        let mut pts = p.vertices().to_vec();
        pts[vertex] += direction * t;
        let kt = match Polytope::from_points(&pts, p.tolerance()) {
            Ok(k) => k,
            Err(Error::DegenerateInput { .. }) => return Err(Error::DegenerateAlongPath { t }),
            Err(e) => return Err(e),
        };
        let r = volume_product(&kt)?;
        samples.push(ShadowSample { t, volume: r.volume, inv_polar_volume: 1.0 / r.polar_volume, vp: r.vp });
    }
    let vols: Vec<f64> = samples.iter().map(|s| s.volume).collect();
    let invs: Vec<f64> = samples.iter().map(|s| s.inv_polar_volume).collect();
    let dv = second_differences(&ts, &vols);
    let di = second_differences(&ts, &invs);
    let min_volume_second_diff = dv.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_inv_polar_second_diff = di.iter().cloned().fold(f64::INFINITY, f64::min);
    let (sv, si) = (scale_of(&vols), scale_of(&invs));
    let volume_affine = dv.iter().all(|d| d.abs() <= VOLUME_CONVEXITY_TOL * sv);
    let vps: Vec<f64> = samples.iter().map(|s| s.vp).collect();
    Ok(ShadowProbe {
        vertex,
        direction: direction.clone(),
        volume_convex: min_volume_second_diff >= -VOLUME_CONVEXITY_TOL * sv,
        inv_polar_convex: min_inv_polar_second_diff >= -INV_POLAR_CONVEXITY_TOL * si,
        min_volume_second_diff,
        min_inv_polar_second_diff,
        volume_affine,
        vp_quasi_concave: volume_affine.then(|| samples.is_empty() || unimodal(&vps, 1e-12 * scale_of(&vps))),
        samples,
    })
}
