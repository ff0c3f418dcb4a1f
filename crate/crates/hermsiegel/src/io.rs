//! JSON reading for lattices, vectors and matrices.
//!
//! A lattice file is `{"space": {...}, "basis": [[x, ...], ...]}` where each
//! inner list is one basis vector in ambient coordinates. The space is either
//! `{"gram": [[...], ...]}` or `{"kind": "split" | "nonsplit", "dim": n}`.
//! A missing `basis` means the standard basis of the space.
//! Entries are anything [`FElem::from_json`] accepts.

use std::sync::Arc;

use serde_json::Value;

use crate::lattice::{EmbeddedLattice, HermSpace, Mat, SpaceKind};
use crate::ring::{FElem, FieldParams};
use crate::{Error, Result};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn vector_from_json(v: &Value, params: FieldParams) -> Result<Vec<FElem>> {
    v.as_array()
        .ok_or_else(|| parse_err("expected an array of field elements"))?
        .iter()
        .map(|x| FElem::from_json(x, params))
        .collect()
}

/// Rows of field elements; all rows must have the same length.
pub fn matrix_from_json(v: &Value, params: FieldParams) -> Result<Mat> {
    let rows: Vec<Vec<FElem>> = v
        .as_array()
        .ok_or_else(|| parse_err("expected an array of rows"))?
        .iter()
        .map(|r| vector_from_json(r, params))
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Err(parse_err("empty matrix"));
    }
    if rows.iter().any(|r| r.len() != rows[0].len() || r.is_empty()) {
        return Err(parse_err("ragged matrix"));
    }
    Ok(Mat::from_rows(params, rows))
}

pub fn space_from_json(v: &Value, params: FieldParams) -> Result<HermSpace> {
    if let Some(g) = v.get("gram") {
        return HermSpace::new(matrix_from_json(g, params)?);
    }
    let kind: SpaceKind = serde_json::from_value(v.get("kind").cloned().ok_or_else(|| parse_err("space needs gram or kind"))?)
        .map_err(|e| parse_err(format!("bad space kind: {e}")))?;
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .filter(|&d| d >= 1)
        .ok_or_else(|| parse_err("space kind needs a positive dim"))?;
    Ok(HermSpace::standard(kind, dim as usize, params))
}

pub fn lattice_from_json(v: &Value, params: FieldParams) -> Result<EmbeddedLattice> {
    let space = Arc::new(space_from_json(v.get("space").ok_or_else(|| parse_err("lattice needs a space"))?, params)?);
    match v.get("basis") {
        None => Ok(EmbeddedLattice::standard(space)),
        Some(b) => {
            let rows = matrix_from_json(b, params)?;
            if rows.ncols() != space.dim() {
                return Err(parse_err(format!("basis vectors have length {}, space has dimension {}", rows.ncols(), space.dim())));
            }
            EmbeddedLattice::new(space, rows.transpose())
        }
    }
}

pub fn parse_lattice(s: &str, params: FieldParams) -> Result<EmbeddedLattice> {
    let v: Value = serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))?;
    lattice_from_json(&v, params)
}

pub fn parse_vector(s: &str, params: FieldParams) -> Result<Vec<FElem>> {
    let v: Value = serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))?;
    vector_from_json(&v, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_round_trip() {
        let p = FieldParams::new(3).unwrap();
        let l = EmbeddedLattice::in_standard_space(p, SpaceKind::Nonsplit, &[0, 1, 2]).unwrap();
        let back = lattice_from_json(&l.to_json(), p).unwrap();
        assert!(back.same_module(&l));
        assert_eq!(back.invariants(), l.invariants());
    }

    #[test]
    fn kind_and_default_basis() {
        let p = FieldParams::new(5).unwrap();
        let l = parse_lattice(r#"{"space": {"kind": "nonsplit", "dim": 2}}"#, p).unwrap();
        assert_eq!(l.invariants().seq, [0, 1]);
        let l = parse_lattice(r#"{"space": {"gram": [[1, 0], [0, 1]]}, "basis": [["5", 0], [0, {"a": "1", "b": "1"}]]}"#, p).unwrap();
        assert_eq!(l.invariants().seq, [0, 2]);
    }

    #[test]
    fn rejects_malformed() {
        let p = FieldParams::new(3).unwrap();
        assert!(matches!(parse_lattice("[1]", p), Err(Error::Parse(_))));
        assert!(matches!(parse_lattice(r#"{"space": {"kind": "other", "dim": 1}}"#, p), Err(Error::Parse(_))));
        assert!(matches!(parse_lattice(r#"{"space": {"gram": [[1]]}, "basis": [[1, 0]]}"#, p), Err(Error::Parse(_))));
    }
}
