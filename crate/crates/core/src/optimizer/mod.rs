//! Gradient ascent of the volume product over vertex coordinates, and the
//! perturbation probes around it.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::constructions::known_maximum;
use crate::criticality::{vertex_terms, VertexTerms};
use crate::error::{Error, Result};
use crate::geometry::{Point, Polytope};
use crate::santalo::{random_unit, volume_product};

mod probes;
pub use probes::{default_bump_grid, probe_facet_bump, shadow_convexity_probe, PerturbationProbe, ShadowProbe, ShadowSample};

/// Rejections allowed before giving up on a random start.
pub const MAX_START_REJECTIONS: usize = 1000;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OptimizeOptions {
    /// Stop once the worst criticality residual is at most this.
    pub tol_residual: f64,
    /// Stop once the step falls below this.
    pub min_step: f64,
    pub max_iters: usize,
    pub initial_step: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { tol_residual: 1e-6, min_step: 1e-8, max_iters: 500, initial_step: 0.1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Iterate {
    pub vp: f64,
    pub worst_residual: f64,
    pub step: f64,
}

fn ser_polytope<S: Serializer>(p: &Polytope, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.vpoly().serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizeTrace {
    /// One entry for the start and one per accepted step.
    pub iterates: Vec<Iterate>,
    #[serde(rename = "final", serialize_with = "ser_polytope")]
    pub final_polytope: Polytope,
    pub restarts_used: usize,
    pub seed: u64,
    pub converged: bool,
    /// Some iterate had a non-simplicial vertex and used finite differences.
    pub subgradient_warning: bool,
}

impl OptimizeTrace {
    pub fn final_vp(&self) -> f64 {
        self.iterates.last().map_or(f64::NAN, |it| it.vp)
    }

    pub fn worst_residual(&self) -> f64 {
        self.iterates.last().map_or(f64::INFINITY, |it| it.worst_residual)
    }

    /// `iteration,vp,residual,step` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,vp,residual,step\n");
        for (i, it) in self.iterates.iter().enumerate() {
            out.push_str(&format!("{i},{:.16e},{:.16e},{:.16e}\n", it.vp, it.worst_residual, it.step));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VpGradient {
    #[serde(serialize_with = "crate::geometry::io::ser_points")]
    pub gradients: Vec<Point>,
    pub vp: f64,
    /// Set when some vertex lies on a non-simplex facet; those vertices get
    /// one-sided finite differences.
    pub subgradient_warning: bool,
}

fn worst_of(t: &VertexTerms) -> f64 {
    (0..t.lhs_scalar.len()).map(|v| t.scalar_residual(v).max(t.vector_residual(v))).fold(0.0, f64::max)
}

fn vp_of_points(pts: &[Point], p: &Polytope) -> Result<f64> {
    Ok(volume_product(&Polytope::from_points(pts, p.tolerance())?)?.vp)
}

/// `|K°| Σ|conv(F,0)| y_F − n|K||conv(F_x,0)| g_{F_x}` at each vertex, for a
/// polytope with Santaló point at the origin.
fn gradient_from_terms(k: &Polytope, t: &VertexTerms, vp: f64) -> Result<VpGradient> {
    let mut gradients: Vec<Point> = t.lhs_vec.iter().zip(&t.rhs_vec).map(|(l, r)| l - r).collect();
    let mut warning = false;
    let h = 1e-6 * k.diameter();
    for v in 0..k.num_vertices() {
        if t.simplicial[v] {
            continue;
        }
        warning = true;
        let mut pts = k.vertices().to_vec();
        for j in 0..k.dim() {
            pts[v][j] += h;
            gradients[v][j] = (vp_of_points(&pts, k)? - vp) / h;
            pts[v][j] -= h;
        }
    }
    Ok(VpGradient { gradients, vp, subgradient_warning: warning })
}

/// Gradient of `vp` with respect to each vertex of `p`.
pub fn vp_gradient(p: &Polytope) -> Result<VpGradient> {
    let res = volume_product(p)?;
    let k = p.translate(&(-&res.s))?;
    let t = vertex_terms(&k)?;
    gradient_from_terms(&k, &t, res.vp)
}

/// Affine normal form: Santaló point at the origin, identity vertex
/// covariance, unit volume.
fn normalize(p: &Polytope, s: &Point) -> Result<Polytope> {
    let n = p.dim();
    let m = p.num_vertices() as f64;
    let mean = p.vertex_mean();
    let mut cov = DMatrix::zeros(n, n);
    for v in p.vertices() {
        let d = v - &mean;
        cov += &d * d.transpose() / m;
    }
    let eig = cov.symmetric_eigen();
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let a = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
    let det = a.determinant().abs();
    let c = (det * p.volume()).powf(-1.0 / n as f64);
    let a = a * c;
    let b = -(&a * s);
    p.affine_map(&a, &b)
}

struct State {
    k: Polytope,
    terms: VertexTerms,
    vp: f64,
}

impl State {
    fn new(p: &Polytope) -> Result<Self> {
        let res = volume_product(p)?;
        let k = normalize(p, &res.s)?;
        let terms = vertex_terms(&k)?;
        Ok(Self { k, terms, vp: res.vp })
    }
}

/// Gradient ascent from `p0`, keeping the vertex count fixed.
pub fn ascend(p0: &Polytope, opts: &OptimizeOptions) -> Result<OptimizeTrace> {
    let m = p0.num_vertices();
    let mut state = State::new(p0)?;
    let mut step = opts.initial_step;
    let mut iterates = vec![Iterate { vp: state.vp, worst_residual: worst_of(&state.terms), step: 0.0 }];
    let mut warning = false;
    let mut converged = iterates[0].worst_residual <= opts.tol_residual && state.k.is_simplicial();
    let mut iters = 0;
    while !converged && iters < opts.max_iters && step >= opts.min_step {
        iters += 1;
        let grad = gradient_from_terms(&state.k, &state.terms, state.vp)?;
        warning |= grad.subgradient_warning;
        let mut moved = false;
        while step >= opts.min_step {
            let pts: Vec<Point> =
                state.k.vertices().iter().zip(&grad.gradients).map(|(x, g)| x + g * step).collect();
            let candidate = match Polytope::from_points(&pts, state.k.tolerance()) {
                Ok(c) if c.num_vertices() == m => State::new(&c).ok(),
                _ => None,
            };
            match candidate {
                Some(next) if next.vp > state.vp => {
                    state = next;
                    let worst_residual = worst_of(&state.terms);
                    iterates.push(Iterate { vp: state.vp, worst_residual, step });
                    converged = worst_residual <= opts.tol_residual && state.k.is_simplicial();
                    step *= 1.5;
                    moved = true;
                    break;
                }
                _ => step *= 0.5,
            }
        }
        if !moved {
            break;
        }
    }
    let trace = OptimizeTrace {
        iterates,
        final_polytope: state.k,
        restarts_used: 1,
        seed: 0,
        converged,
        subgradient_warning: warning,
    };
    if converged {
        Ok(trace)
    } else {
        Err(Error::StalledBelowTolerance { trace: Box::new(trace) })
    }
}

/// Add points beyond facet centroids until `p` has `m` vertices.
pub fn repair_vertex_count(p: &Polytope, m: usize, rng: &mut ChaCha8Rng) -> Result<Polytope> {
    let mut p = p.clone();
    let budget = 100 * m;
    for _ in 0..budget {
        if p.num_vertices() >= m {
            return Ok(p);
        }
        let f = rng.random_range(0..p.facets().len());
        let t = 0.05 * p.diameter() * rng.random_range(0.5..1.0);
        let mut pts = p.vertices().to_vec();
        pts.push(p.facet_centroid(f)? + &p.facets()[f].normal * t);
        p = Polytope::from_points(&pts, p.tolerance())?;
    }
    if p.num_vertices() >= m {
        Ok(p)
    } else {
        Err(Error::NoFullDimensionalStart(budget))
    }
}

/// `m` uniform points on the unit sphere with `m` extreme points.
pub fn random_start(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Polytope> {
    for _ in 0..MAX_START_REJECTIONS {
        let pts: Vec<Point> = (0..m).map(|_| random_unit(n, rng)).collect();
        let Ok(p) = Polytope::from_points(&pts, Default::default()) else { continue };
        if p.num_vertices() == m && p.is_interior(&p.vertex_mean()) {
            return Ok(p);
        }
        if p.num_vertices() < m {
            if let Ok(q) = repair_vertex_count(&p, m, rng) {
                return Ok(q);
            }
        }
    }
    Err(Error::NoFullDimensionalStart(MAX_START_REJECTIONS))
}

fn check_nm(n: usize, m: usize) -> Result<()> {
    if n == 0 || n > crate::linalg::MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    if m < n + 1 {
        return Err(Error::BadArity(format!("need m >= n + 1 vertices, got n = {n}, m = {m}")));
    }
    Ok(())
}

fn thread_cap() -> Option<usize> {
    std::env::var("VPMAX_THREADS").ok()?.parse().ok().filter(|&t| t > 0)
}

fn run_restart(n: usize, m: usize, seed: u64, opts: &OptimizeOptions) -> Result<OptimizeTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = random_start(n, m, &mut rng)?;
    let mut trace = match ascend(&start, opts) {
        Ok(t) => t,
        Err(Error::StalledBelowTolerance { trace }) => *trace,
        Err(e) => return Err(e),
    };
    trace.seed = seed;
    Ok(trace)
}

/// Best of `restarts` ascents from random starts with seeds
/// `seed, seed + 1, ...`.
pub fn optimize_multistart_with(
    n: usize,
    m: usize,
    restarts: usize,
    seed: u64,
    opts: &OptimizeOptions,
) -> Result<OptimizeTrace> {
    check_nm(n, m)?;
    let restarts = restarts.max(1);
    let work = || -> Vec<Result<OptimizeTrace>> {
        (0..restarts as u64).into_par_iter().map(|i| run_restart(n, m, seed.wrapping_add(i), opts)).collect()
    };
    let results = match thread_cap() {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Io(std::io::Error::other(e)))?
            .install(work),
        None => work(),
    };
    let mut best: Option<OptimizeTrace> = None;
    let mut first_err = None;
    for r in results {
        match r {
            Ok(t) => {
                if best.as_ref().is_none_or(|b| t.final_vp() > b.final_vp()) {
                    best = Some(t);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let mut best = best.ok_or_else(|| first_err.unwrap_or(Error::NoFullDimensionalStart(MAX_START_REJECTIONS)))?;
    best.restarts_used = restarts;
    Ok(best)
}

pub fn optimize_multistart(n: usize, m: usize, restarts: usize, seed: u64) -> Result<OptimizeTrace> {
    optimize_multistart_with(n, m, restarts, seed, &OptimizeOptions::default())
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub estimate: f64,
    pub closed_form: Option<f64>,
    pub gap: Option<f64>,
    pub worst_residual: f64,
}

/// Estimates of the maximal volume product with `m` vertices for each `m`.
#[allow(non_snake_case)]
pub fn sweep_M(
    n: usize,
    ms: impl IntoIterator<Item = usize>,
    restarts: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    ms.into_iter()
        .map(|m| {
            let t = optimize_multistart(n, m, restarts, seed)?;
            let estimate = t.final_vp();
            let closed_form = known_maximum(n, m).map(|c| c.value);
            Ok(SweepRow { m, estimate, closed_form, gap: closed_form.map(|c| c - estimate), worst_residual: t.worst_residual() })
        })
        .collect()
}

/// `m,M_estimate,closed_form,gap` rows.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("m,M_estimate,closed_form,gap\n");
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.16e}")).unwrap_or_default();
    for r in rows {
        out.push_str(&format!("{},{:.16e},{},{}\n", r.m, r.estimate, opt(r.closed_form), opt(r.gap)));
    }
    out
}

pub(crate) fn second_differences(ts: &[f64], fs: &[f64]) -> Vec<f64> {
    (1..ts.len().saturating_sub(1))
        .map(|i| {
            let (t0, t1, t2) = (ts[i - 1], ts[i], ts[i + 1]);
            (fs[i - 1] * (t2 - t1) - fs[i] * (t2 - t0) + fs[i + 1] * (t1 - t0)) / (0.5 * (t2 - t0))
        })
        .collect()
}


#[cfg(test)]
mod tests;
