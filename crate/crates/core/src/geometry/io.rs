//! Polytope JSON interchange: `{"dim": n, "vertices": [[x1, ..., xn], ...]}`.
//!
//! Reading hulls the points, so redundant input is accepted. Writing emits the
//! canonical vertex order with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serializer};

use super::{Point, Polytope, Tolerance};
use crate::error::{Error, Result};

#[derive(Deserialize)]
struct PolytopeFile {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

pub fn from_json_str(s: &str, tol: Tolerance) -> Result<Polytope> {
    let file: PolytopeFile = serde_json::from_str(s)?;
    let mut pts = Vec::with_capacity(file.vertices.len());
    for v in &file.vertices {
        if v.len() != file.dim {
            return Err(Error::DimensionMismatch { expected: file.dim, got: v.len() });
        }
        pts.push(Point::from_column_slice(v));
    }
    Polytope::from_points(&pts, tol)
}

pub fn read_json(path: impl AsRef<Path>, tol: Tolerance) -> Result<Polytope> {
    from_json_str(&std::fs::read_to_string(path)?, tol)
}

/// A float with 17 significant digits, as a JSON number.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

pub fn to_json_string(p: &Polytope) -> String {
    let mut s = String::new();
    write!(s, "{{\"dim\": {}, \"vertices\": [", p.dim()).unwrap();
    for (i, v) in p.vertices().iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push('[');
        for (j, x) in v.iter().enumerate() {
            if j > 0 {
                s.push_str(", ");
            }
            s.push_str(&fmt17(*x));
        }
        s.push(']');
    }
    s.push_str("]}");
    s
}

pub fn write_json(p: &Polytope, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_json_string(p) + "\n")?;
    Ok(())
}

pub(crate) fn ser_point<S: Serializer>(p: &Point, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.iter())
}

pub(crate) fn ser_points<S: Serializer>(ps: &[Point], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(|p| p.iter().copied().collect::<Vec<f64>>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pt;

    #[test]
    fn writer_round_trips_bit_exactly() {
        let pts = vec![pt(&[0.1, -1.0 / 3.0]), pt(&[1.0, 0.0]), pt(&[0.0, 2.0f64.sqrt()]), pt(&[0.2, 0.3])];
        let p = Polytope::from_points(&pts, Tolerance::default()).unwrap();
        let text = to_json_string(&p);
        let q = from_json_str(&text, Tolerance::default()).unwrap();
        assert_eq!(p.vertices(), q.vertices());
        assert_eq!(text, to_json_string(&q));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
        assert_eq!(fmt17(-0.5), "-5.0000000000000000e-1");
        let v: f64 = serde_json::from_str(&fmt17(0.1)).unwrap();
        assert_eq!(v, 0.1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(from_json_str("{\"dim\": 2", Tolerance::default()), Err(Error::Parse(_))));
        assert!(matches!(
            from_json_str("{\"dim\": 2, \"vertices\": [[0,0],[1]]}", Tolerance::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            from_json_str("{\"dim\": 2, \"vertices\": [[0,0],[1,1],[2,2]]}", Tolerance::default()),
            Err(Error::DegenerateInput { .. })
        ));
    }
}
