use thiserror::Error;

use crate::optimizer::OptimizeTrace;
use crate::santalo::SantaloResult;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: no points given")]
    EmptyInput,
    #[error("degenerate input: affine span has dimension {span} < {dim}")]
    DegenerateInput { span: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {0} (supported: 1..=6)")]
    UnsupportedDimension(usize),
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("center of polarity is not interior (min slack {slack:e})")]
    CenterNotInterior { slack: f64 },
    #[error("singular matrix (det = {det:e})")]
    SingularMatrix { det: f64 },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("bad arity: {0}")]
    BadArity(String),
    #[error("Santaló iteration did not converge in {max_iters} iterations (residual {:e})", best.residual)]
    NoConvergence { max_iters: usize, best: Box<SantaloResult> },
    #[error("bad facet {0}")]
    BadFacet(usize),
    #[error("t grid leaves the admissible region (t = {t:e}, t_max = {t_max:e})")]
    TGridOutsideRegion { t: f64, t_max: f64 },
    #[error("polytope degenerates along the path at t = {t:e}")]
    DegenerateAlongPath { t: f64 },
    #[error("ascent stalled with residual {:e} above tolerance", trace.worst_residual())]
    StalledBelowTolerance { trace: Box<OptimizeTrace> },
    #[error("no full-dimensional random start after {0} rejections")]
    NoFullDimensionalStart(usize),
    #[error("unknown verification suite {0:?}")]
    UnknownSuite(String),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
