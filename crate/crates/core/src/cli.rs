//! The `vpmax` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::constructions::{closed_form_pm, closed_form_simplex_vp, closed_form_symmetric_vp, f_n_k, known_maximum, ClosedFormValue, PLANAR_LIMIT};
use crate::criticality::{vertex_residuals, CriticalityReport, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};
use crate::geometry::{io, pt, Polytope, Tolerance};
use crate::optimizer::{
    default_bump_grid, optimize_multistart_with, probe_facet_bump, shadow_convexity_probe, sweep_M, sweep_csv,
    OptimizeOptions,
};
use crate::santalo::volume_product;
use crate::verify::run_suite;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(name = "vpmax", version, about = "Volume products of polytopes and maximal-volume-product search")]
pub struct RunConfig {
    /// Relative tolerance for hull and containment decisions.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume, Santaló point, polar volume and volume product.
    Vp { input: PathBuf },
    /// Santaló point with solver diagnostics.
    Santalo { input: PathBuf },
    /// Polar polytope about the Santaló point or a given center.
    Polar {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<f64>>,
    },
    /// First-order maximality conditions; exits 1 unless critical.
    Critical {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Multistart gradient ascent over polytopes with a fixed vertex count.
    Optimize {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
    },
    /// Maximal volume product estimates over a range of vertex counts.
    Sweep {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Push a point out of one facet and fit the first-order gain.
    ProbeBump {
        input: PathBuf,
        #[arg(long)]
        facet: usize,
        /// Comma-separated t values (default: a log grid below 1e-3 diam).
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Move one vertex along a line and check the convexity laws.
    ProbeShadow {
        input: PathBuf,
        #[arg(long)]
        vertex: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Vec<f64>,
        #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        t_max: f64,
        #[arg(long, default_value_t = 21)]
        samples: usize,
    },
    /// Closed-form reference values.
    Oracle {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        vertices: Option<usize>,
    },
    /// Run a verification suite: polygons, n-plus-2, shadow, bump or all.
    Verify { suite: String },
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::UnknownSuite(_) | Error::BadArity(_) => 2,
        Error::EmptyInput
        | Error::DegenerateInput { .. }
        | Error::DimensionMismatch { .. }
        | Error::UnsupportedDimension(_)
        | Error::NonFinite => 3,
        Error::NoFullDimensionalStart(_) => 4,
        _ => 1,
    }
}

/// Parse `args` and run; returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

impl RunConfig {
    fn tolerance(&self) -> Result<Tolerance> {
        match self.tol {
            Some(t) => Tolerance::new(t, Tolerance::default().abs_eps),
            None => Ok(Tolerance::default()),
        }
    }

    fn load(&self, path: &Path) -> Result<Polytope> {
        io::read_json(path, self.tolerance()?)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }

    fn check_out(&self) -> Result<()> {
        if let Some(parent) = self.out.as_ref().and_then(|p| p.parent()) {
            if !parent.as_os_str().is_empty() && !parent.is_dir() {
                return Err(Error::Io(std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("output directory {} does not exist", parent.display()),
                )));
            }
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn vec_str(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.9}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Rows of `name, value` pairs as `csv` or two aligned columns.
fn kv_table(rows: &[(&str, String)], csv: bool) -> String {
    let mut out = String::new();
    if csv {
        out.push_str("quantity,value\n");
        for (k, v) in rows {
            let _ = writeln!(out, "{k},\"{v}\"");
        }
    } else {
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<16}{v}");
        }
    }
    out
}

pub fn run(cfg: &RunConfig) -> Result<i32> {
    cfg.check_out()?;
    match &cfg.command {
        Command::Vp { input } => cmd_vp(cfg, input),
        Command::Santalo { input } => {
            let r = volume_product(&cfg.load(input)?)?;
            let text = match cfg.format {
                Format::Json => to_json(&r),
                f => kv_table(
                    &[
                        ("santalo_point", vec_str(r.s.as_slice())),
                        ("polar_volume", format!("{:.12}", r.polar_volume)),
                        ("iterations", r.iterations.to_string()),
                        ("residual", format!("{:.3e}", r.residual)),
                    ],
                    f == Format::Csv,
                ),
            };
            cfg.emit(&text)?;
            Ok(0)
        }
        Command::Polar { input, center } => {
            let p = cfg.load(input)?;
            let z = match center {
                Some(c) => pt(c),
                None => volume_product(&p)?.s,
            };
            if z.len() != p.dim() {
                return Err(Error::DimensionMismatch { expected: p.dim(), got: z.len() });
            }
            cfg.emit(&(io::to_json_string(&p.polar(&z)?) + "\n"))?;
            Ok(0)
        }
        Command::Critical { input, threshold } => {
            let r = vertex_residuals(&cfg.load(input)?)?;
            cfg.emit(&render_report(&r, cfg.format))?;
            Ok(if r.is_critical(*threshold) { 0 } else { 1 })
        }
        Command::Optimize { dim, vertices, restarts, max_iters } => {
            cmd_optimize(cfg, *dim, *vertices, *restarts, *max_iters)
        }
        Command::Sweep { dim, from, to, restarts } => {
            let rows = sweep_M(*dim, *from..=*to, *restarts, cfg.seed)?;
            let text = match cfg.format {
                Format::Json => to_json(&json!({ "seed": cfg.seed, "rows": rows })),
                Format::Csv => sweep_csv(&rows),
                Format::Pretty => {
                    let mut s = format!("seed {}\n{:>4} {:>18} {:>18} {:>12}\n", cfg.seed, "m", "estimate", "closed form", "gap");
                    for r in &rows {
                        let cf = r.closed_form.map(|c| format!("{c:.12}")).unwrap_or_else(|| "-".into());
                        let gap = r.gap.map(|g| format!("{g:.3e}")).unwrap_or_else(|| "-".into());
                        let _ = writeln!(s, "{:>4} {:>18.12} {cf:>18} {gap:>12}", r.m, r.estimate);
                    }
                    if *dim == 2 {
                        let _ = writeln!(s, "limit {PLANAR_LIMIT:.12}");
                    }
                    s
                }
            };
            cfg.emit(&text)?;
            Ok(0)
        }
        Command::ProbeBump { input, facet, t } => {
            let p = cfg.load(input)?;
            let grid = t.clone().unwrap_or_else(|| default_bump_grid(&p));
            let probe = probe_facet_bump(&p, *facet, &grid)?;
            let text = match cfg.format {
                Format::Json => to_json(&probe),
                Format::Csv => {
                    let mut s = String::from("t,vp,polar_loss\n");
                    for ((t, vp), (_, loss)) in probe.samples.iter().zip(&probe.polar_loss) {
                        let _ = writeln!(s, "{t:.16e},{vp:.16e},{loss:.16e}");
                    }
                    s
                }
                Format::Pretty => kv_table(
                    &[
                        ("facet", probe.facet.to_string()),
                        ("t_max", format!("{:.6e}", probe.t_max)),
                        ("slope", format!("{:.9}", probe.slope)),
                        ("predicted", format!("{:.9}", probe.predicted_slope)),
                        ("loss exponent", probe.loss_exponent.map_or("-".into(), |e| format!("{e:.4}"))),
                    ],
                    false,
                ),
            };
            cfg.emit(&text)?;
            Ok(0)
        }
        Command::ProbeShadow { input, vertex, direction, t_min, t_max, samples } => {
            let p = cfg.load(input)?;
            let k = (*samples).max(1);
            let ts: Vec<f64> = if k == 1 {
                vec![*t_min]
            } else {
                (0..k).map(|i| t_min + (t_max - t_min) * i as f64 / (k - 1) as f64).collect()
            };
            let probe = shadow_convexity_probe(&p, *vertex, &pt(direction), &ts)?;
            let text = match cfg.format {
                Format::Json => to_json(&probe),
                Format::Csv => {
                    let mut s = String::from("t,volume,inv_polar_volume,vp\n");
                    for x in &probe.samples {
                        let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e}", x.t, x.volume, x.inv_polar_volume, x.vp);
                    }
                    s
                }
                Format::Pretty => kv_table(
                    &[
                        ("volume convex", probe.volume_convex.to_string()),
                        ("1/polar convex", probe.inv_polar_convex.to_string()),
                        ("volume affine", probe.volume_affine.to_string()),
                        ("quasi-concave", probe.vp_quasi_concave.map_or("-".into(), |b| b.to_string())),
                    ],
                    false,
                ),
            };
            cfg.emit(&text)?;
            Ok(i32::from(!(probe.volume_convex && probe.inv_polar_convex)))
        }
        Command::Oracle { dim, vertices } => {
            let rows = oracle_rows(*dim, *vertices)?;
            let text = match cfg.format {
                Format::Json => to_json(&rows.iter().map(|r| json!({"label": r.label, "value": r.value})).collect::<Vec<_>>()),
                Format::Csv => {
                    let mut s = String::from("label,value,formula\n");
                    for r in &rows {
                        let _ = writeln!(s, "{},{:.16e},{}", r.label, r.value, r.provenance);
                    }
                    s
                }
                Format::Pretty => {
                    let mut s = String::new();
                    for r in &rows {
                        let _ = writeln!(s, "{:<16}{:>20.12}  {}", r.label, r.value, r.provenance);
                    }
                    s
                }
            };
            cfg.emit(&text)?;
            Ok(0)
        }
        Command::Verify { suite } => {
            let checks = run_suite(suite)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            let text = match cfg.format {
                Format::Json => to_json(&checks),
                _ => {
                    let mut s = String::new();
                    for c in &checks {
                        let _ = writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                    }
                    let _ = writeln!(s, "{} passed, {failed} failed", checks.len() - failed);
                    s
                }
            };
            cfg.emit(&text)?;
            Ok(i32::from(failed > 0))
        }
    }
}

fn cmd_vp(cfg: &RunConfig, input: &Path) -> Result<i32> {
    let p = cfg.load(input)?;
    let r = volume_product(&p)?;
    let n = p.dim();
    let m = p.num_vertices();
    let simplex_ratio = r.vp / closed_form_simplex_vp(n)?.value;
    let polygon_ratio = if n == 2 { Some(r.vp / closed_form_pm(m)?.value) } else { None };
    let bound = known_maximum(n, m).map(|c| c.value);
    let not_maximal = bound.is_some_and(|b| r.vp < b * (1.0 - 1e-9));
    let text = match cfg.format {
        Format::Json => to_json(&json!({
            "volume": r.volume,
            "santalo_point": r.s.as_slice(),
            "polar_volume": r.polar_volume,
            "vp": r.vp,
            "ratio_to_simplex": simplex_ratio,
            "ratio_to_regular_polygon": polygon_ratio,
            "known_maximum": bound,
            "not_maximal": not_maximal,
        })),
        f => {
            let mut rows = vec![
                ("volume", format!("{:.12}", r.volume)),
                ("santalo_point", vec_str(r.s.as_slice())),
                ("polar_volume", format!("{:.12}", r.polar_volume)),
                ("vp", format!("{:.12}", r.vp)),
                ("vp/P(simplex)", format!("{simplex_ratio:.12}")),
            ];
            if let Some(q) = polygon_ratio {
                rows.push(("vp/P(P_m)", format!("{q:.12}")));
            }
            let mut s = kv_table(&rows, f == Format::Csv);
            if not_maximal && f == Format::Pretty {
                let _ = writeln!(s, "NOT-MAXIMAL: below {:.12}, the maximum for {m} vertices in dimension {n}", bound.unwrap());
            }
            s
        }
    };
    cfg.emit(&text)?;
    Ok(0)
}

fn render_report(r: &CriticalityReport, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        f => {
            let csv = f == Format::Csv;
            let mut s = String::new();
            if csv {
                s.push_str("vertex,slack,scalar_residual,vector_residual,lambda\n");
            } else {
                let _ = writeln!(s, "{:>6} {:>12} {:>12} {:>12} {:>14}", "vertex", "slack", "scalar", "vector", "lambda");
            }
            for v in 0..r.vertices.len() {
                let lambda = r.polygon_lambdas.as_ref().map(|l| l.lambdas[v]);
                let lam = lambda.map(|l| format!("{l:.9}")).unwrap_or_else(|| "-".into());
                if csv {
                    let _ = writeln!(
                        s,
                        "{v},{:.16e},{:.16e},{:.16e},{}",
                        r.inequality_slack[v],
                        r.scalar_residuals[v],
                        r.vector_residuals[v],
                        lambda.map(|l| format!("{l:.16e}")).unwrap_or_default()
                    );
                } else {
                    let _ = writeln!(
                        s,
                        "{v:>6} {:>12.3e} {:>12.3e} {:>12.3e} {lam:>14}",
                        r.inequality_slack[v], r.scalar_residuals[v], r.vector_residuals[v]
                    );
                }
            }
            if !csv {
                let _ = writeln!(s, "worst residual {:.3e}", r.worst);
                if let Some(l) = &r.polygon_lambdas {
                    let on = if l.spread_on_reciprocal { " (on 1/lambda)" } else { "" };
                    let _ = writeln!(s, "lambda spread {:.3e}{on}", l.spread);
                }
                if r.nonsimplicial_warning {
                    let _ = writeln!(s, "warning: not simplicial, the vector condition does not apply");
                }
            }
            s
        }
    }
}

fn cmd_optimize(cfg: &RunConfig, n: usize, m: usize, restarts: usize, max_iters: usize) -> Result<i32> {
    let opts = OptimizeOptions { max_iters, ..OptimizeOptions::default() };
    let trace = optimize_multistart_with(n, m, restarts, cfg.seed, &opts)?;
    let oracle = known_maximum(n, m).map(|c| c.value);
    if let Some(path) = &cfg.out {
        io::write_json(&trace.final_polytope, path)?;
        let mut csv_path = path.clone().into_os_string();
        csv_path.push(".trace.csv");
        std::fs::write(csv_path, trace.to_csv())?;
    }
    let text = match cfg.format {
        Format::Json => to_json(&trace),
        Format::Csv => trace.to_csv(),
        Format::Pretty => {
            let mut s = kv_table(
                &[
                    ("seed", cfg.seed.to_string()),
                    ("best seed", trace.seed.to_string()),
                    ("restarts", trace.restarts_used.to_string()),
                    ("vp", format!("{:.12}", trace.final_vp())),
                    ("residual", format!("{:.3e}", trace.worst_residual())),
                    ("iterations", (trace.iterates.len() - 1).to_string()),
                    ("simplicial", trace.final_polytope.is_simplicial().to_string()),
                ],
                false,
            );
            if let Some(o) = oracle {
                let _ = writeln!(s, "{:<16}{o:.12} (gap {:.3e})", "closed form", o - trace.final_vp());
            }
            s
        }
    };
    // with --out the files hold the results and stdout gets the summary
    if cfg.out.is_some() {
        print!("{text}");
    } else {
        cfg.emit(&text)?;
    }
    Ok(0)
}

/// Closed forms for the given dimension and vertex count, or a default table.
pub fn oracle_rows(dim: Option<usize>, vertices: Option<usize>) -> Result<Vec<ClosedFormValue>> {
    let mut rows = Vec::new();
    match (dim, vertices) {
        (Some(n), Some(m)) => rows.extend(known_maximum(n, m)),
        (None, Some(m)) => rows.push(closed_form_pm(m)?),
        (Some(2), None) | (None, None) => {
            rows.extend((3..=12).map(closed_form_pm).collect::<Result<Vec<_>>>()?);
            rows.push(ClosedFormValue { label: "P(B_2^2)".into(), value: PLANAR_LIMIT, provenance: "pi^2".into() });
        }
        _ => {}
    }
    let dims: Vec<usize> = match dim {
        Some(n) => vec![n],
        None if vertices.is_none() => (1..=6).collect(),
        None => vec![],
    };
    if vertices.is_none() {
        for n in dims {
            rows.push(closed_form_simplex_vp(n)?);
            rows.push(closed_form_symmetric_vp(n)?);
            for k in 1..n {
                rows.push(f_n_k(n, k)?);
            }
        }
    }
    Ok(rows)
}
