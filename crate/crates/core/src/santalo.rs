//! Santaló point and volume product.
//!
//! `z -> |K^z|` is smooth and strictly convex on the interior of `K`, with
//! gradient `(n+1) * int_{(K-z)°} y dy` and Hessian
//! `(n+1)(n+2) * int_{(K-z)°} y y^T dy`. The solver takes damped steps along
//! the polar centroid mapped back through the inverse polar inertia (a Newton
//! step), with backtracking on `|K^z|` and a slack-preserving clip.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{hausdorff_distance, io::ser_point, triangulate::triangulate_face, Point, Polytope};
use crate::linalg::{self, factorial};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SantaloOptions {
    pub max_iters: usize,
    /// Stop once `|centroid of (K - s)°| <= tol_residual * diam((K - s)°)`.
    pub tol_residual: f64,
    /// Initial fraction of the Newton step tried at each iteration.
    pub damping: f64,
}

impl Default for SantaloOptions {
    fn default() -> Self {
        Self { max_iters: 200, tol_residual: 1e-10, damping: 1.0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SantaloResult {
    #[serde(serialize_with = "ser_point")]
    pub s: Point,
    pub volume: f64,
    pub polar_volume: f64,
    pub vp: f64,
    pub iterations: usize,
    /// Norm of the centroid of `(K - s)°`.
    pub residual: f64,
    /// Diameter of `(K - s)°`, the scale `residual` is measured against.
    pub polar_diameter: f64,
}

/// Volume and first two moments of a polar body about its center.
#[derive(Clone, Debug)]
pub(crate) struct PolarMoments {
    pub volume: f64,
    pub first: DVector<f64>,
    pub second: DMatrix<f64>,
}

/// Fixed combinatorics of `(K - z)°` for `z` in the interior of `K`: polar
/// vertex `j` is dual to facet `j` of `K`, and polar facet `x` (dual to vertex
/// `x` of `K`) is triangulated once and reused for every center.
#[derive(Clone, Debug)]
pub(crate) struct PolarFan {
    dim: usize,
    normals: Vec<Point>,
    offsets: Vec<f64>,
    /// Per vertex of `K`: simplices of the dual polar facet.
    pub groups: Vec<Vec<Vec<usize>>>,
}

impl PolarFan {
    pub fn new(p: &Polytope, z0: &Point) -> Result<Self> {
        let slack = p.min_slack(z0);
        if slack <= p.eps() {
            return Err(Error::CenterNotInterior { slack });
        }
        let normals: Vec<Point> = p.facets().iter().map(|f| f.normal.clone()).collect();
        let offsets: Vec<f64> = p.facets().iter().map(|f| f.offset).collect();
        let mut fan = Self { dim: p.dim(), normals, offsets, groups: Vec::new() };
        let w = fan.polar_vertices(z0);
        let tol = p.tolerance();
        fan.groups = p
            .complex()
            .adjacency
            .iter()
            .map(|ids| triangulate_face(&w, ids, &tol))
            .collect::<Result<_>>()?;
        Ok(fan)
    }

    pub fn slacks(&self, z: &Point) -> Vec<f64> {
        self.normals.iter().zip(&self.offsets).map(|(u, h)| h - u.dot(z)).collect()
    }

    /// Polar vertices relative to `z`.
    pub fn polar_vertices(&self, z: &Point) -> Vec<Point> {
        self.normals.iter().zip(&self.offsets).map(|(u, h)| u / (h - u.dot(z))).collect()
    }

    pub fn volume(&self, z: &Point) -> f64 {
        let w = self.polar_vertices(z);
        let nf = factorial(self.dim);
        self.groups
            .iter()
            .flatten()
            .map(|s| {
                let rows: Vec<&Point> = s.iter().map(|&i| &w[i]).collect();
                linalg::det_from(&rows, None).abs() / nf
            })
            .sum()
    }

    pub fn moments(&self, z: &Point) -> PolarMoments {
        let n = self.dim;
        let w = self.polar_vertices(z);
        let nf = factorial(n);
        let mut volume = 0.0;
        let mut first = DVector::zeros(n);
        let mut second = DMatrix::zeros(n, n);
        for s in self.groups.iter().flatten() {
            let rows: Vec<&Point> = s.iter().map(|&i| &w[i]).collect();
            let vol = linalg::det_from(&rows, None).abs() / nf;
            let mut sum = DVector::zeros(n);
            let mut outer = DMatrix::zeros(n, n);
            for r in &rows {
                sum += *r;
                outer.ger(1.0, r, r, 1.0);
            }
            volume += vol;
            first.axpy(vol / (n + 1) as f64, &sum, 1.0);
            outer.ger(1.0, &sum, &sum, 1.0);
            second += outer * (vol / ((n + 1) * (n + 2)) as f64);
        }
        PolarMoments { volume, first, second }
    }

    /// Per vertex `x` of `K`: `|conv(F_x, z)|` and the centroid of `F_x`,
    /// both relative to `z`.
    pub fn facet_cones(&self, z: &Point) -> Vec<(f64, Point)> {
        let n = self.dim;
        let w = self.polar_vertices(z);
        let nf = factorial(n);
        self.groups
            .iter()
            .map(|group| {
                let mut total = 0.0;
                let mut acc = DVector::zeros(n);
                for s in group {
                    let rows: Vec<&Point> = s.iter().map(|&i| &w[i]).collect();
                    let vol = linalg::det_from(&rows, None).abs() / nf;
                    let mut c = DVector::zeros(n);
                    for r in &rows {
                        c += *r;
                    }
                    acc.axpy(vol / n as f64, &c, 1.0);
                    total += vol;
                }
                (total, acc / total)
            })
            .collect()
    }

    pub fn polar_diameter(&self, z: &Point) -> f64 {
        let w = self.polar_vertices(z);
        let mut d: f64 = 0.0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                d = d.max((&w[i] - &w[j]).norm());
            }
        }
        d
    }
}

/// `|K^z|`.
pub fn polar_volume_at(p: &Polytope, z: &Point) -> Result<f64> {
    if z.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: z.len() });
    }
    Ok(PolarFan::new(p, z)?.volume(z))
}

fn max_feasible_step(slacks: &[f64], fan: &PolarFan, dir: &Point) -> f64 {
    let mut t = f64::INFINITY;
    for (u, s) in fan.normals.iter().zip(slacks) {
        let rate = u.dot(dir);
        if rate > 0.0 {
            t = t.min(0.95 * s / rate);
        }
    }
    t
}

/// Golden-section sweep along each axis; used when Newton steps stagnate.
fn coordinate_sweep(fan: &PolarFan, z: &Point) -> Point {
    const PHI: f64 = 0.618_033_988_749_894_8;
    let mut z = z.clone();
    for axis in 0..z.len() {
        let mut e = DVector::zeros(z.len());
        e[axis] = 1.0;
        let slacks = fan.slacks(&z);
        let hi = max_feasible_step(&slacks, fan, &e);
        let lo = -max_feasible_step(&slacks, fan, &(-&e));
        let f = |t: f64| fan.volume(&(&z + &e * t));
        let (mut a, mut b) = (lo, hi);
        let mut c = b - PHI * (b - a);
        let mut d = a + PHI * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - PHI * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + PHI * (b - a);
                fd = f(d);
            }
        }
        let t = 0.5 * (a + b);
        if f(t) < f(0.0) {
            z += &e * t;
        }
    }
    z
}

pub fn santalo_point(p: &Polytope, opts: &SantaloOptions) -> Result<SantaloResult> {
    let n = p.dim();
    let volume = p.volume();
    let mut z = p.centroid();
    let fan = PolarFan::new(p, &z)?;
    let mut mom = fan.moments(&z);
    let mut swept = false;
    for iter in 0..=opts.max_iters {
        let residual = (&mom.first / mom.volume).norm();
        let diam = fan.polar_diameter(&z);
        let result = SantaloResult {
            s: z.clone(),
            volume,
            polar_volume: mom.volume,
            vp: volume * mom.volume,
            iterations: iter,
            residual,
            polar_diameter: diam,
        };
        if residual <= opts.tol_residual * diam {
            return Ok(result);
        }
        if iter == opts.max_iters {
            return Err(Error::NoConvergence { max_iters: opts.max_iters, best: Box::new(result) });
        }
        let grad = &mom.first * (n + 1) as f64;
        let hess = &mom.second * ((n + 1) * (n + 2)) as f64;
        let dir = match hess.clone().cholesky() {
            Some(ch) => -ch.solve(&grad),
            None => -&grad,
        };
        let slacks = fan.slacks(&z);
        let mut t = opts.damping.min(max_feasible_step(&slacks, &fan, &dir));
        let slope = grad.dot(&dir);
        // Volume differences drown in roundoff near the minimum; judge by the
        // gradient there instead.
        let flat = -slope < 1e-12 * mom.volume;
        let mut accepted = None;
        for _ in 0..60 {
            let cand = &z + &dir * t;
            let m = fan.moments(&cand);
            let better = if flat {
                (&m.first / m.volume).norm() < residual
            } else {
                m.volume <= mom.volume + 1e-4 * t * slope
            };
            if better {
                accepted = Some((cand, m));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((cand, m)) => {
                z = cand;
                mom = m;
                swept = false;
            }
            None if !swept => {
                z = coordinate_sweep(&fan, &z);
                mom = fan.moments(&z);
                swept = true;
            }
            None => return Err(Error::NoConvergence { max_iters: iter, best: Box::new(result) }),
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// `P(K) = |K| |K^{s(K)}|` with default solver options.
pub fn volume_product(p: &Polytope) -> Result<SantaloResult> {
    santalo_point(p, &SantaloOptions::default())
}

/// Translate `p` so that its Santaló point sits at the origin.
pub fn recenter(p: &Polytope) -> Result<(Polytope, SantaloResult)> {
    let res = volume_product(p)?;
    let q = p.translate(&(-&res.s))?;
    Ok((q, res))
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityRow {
    pub t: f64,
    pub hausdorff: f64,
    /// `|L^{s(L)}| - |L^{s(K)}|`, never positive.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityProbe {
    pub vertex: usize,
    #[serde(serialize_with = "ser_point")]
    pub direction: Point,
    pub rows: Vec<StabilityRow>,
    /// Least-squares slope of `log |gap|` against `log d_H` over rows with a
    /// nonzero gap.
    pub slope: Option<f64>,
}

/// Random unit vector from a seeded generator.
pub(crate) fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Point {
    loop {
        let v = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let len: f64 = v.norm();
        if len > 1e-6 {
            return v / len;
        }
    }
}

pub(crate) fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && y.abs() > 0.0)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Displace one vertex of `p` (recentred at its Santaló point) by `t * u`
/// for each scale `t` and record how much the Santaló point of the perturbed
/// body improves on the old center.
pub fn stability_probe(p: &Polytope, scales: &[f64], vertex: usize, seed: u64) -> Result<StabilityProbe> {
    if vertex >= p.num_vertices() {
        return Err(Error::IndexOutOfRange { index: vertex, len: p.num_vertices() });
    }
    let (k, _) = recenter(p)?;
    let origin = DVector::zeros(p.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unit(p.dim(), &mut rng);
    let mut rows = Vec::with_capacity(scales.len());
    for &t in scales {
        if t == 0.0 {
            rows.push(StabilityRow { t, hausdorff: 0.0, gap: 0.0 });
            continue;
        }
        let mut pts = k.vertices().to_vec();
        pts[vertex] += &u * t;
        let l = Polytope::from_points(&pts, k.tolerance())?;
        let at_old = polar_volume_at(&l, &origin)?;
        let best = volume_product(&l)?.polar_volume;
        rows.push(StabilityRow { t, hausdorff: hausdorff_distance(&k, &l)?, gap: (best - at_old).min(0.0) });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.hausdorff).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    Ok(StabilityProbe { vertex, direction: u, slope: loglog_slope(&xs, &ys), rows })
}

#[cfg(test)]
mod tests;
