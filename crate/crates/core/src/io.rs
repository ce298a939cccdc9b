//! JSON file formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major:
//!
//! * state: `{"dim": d, "matrix": [[[re, im], ...], ...], "dims": [dA, dB]}`
//!   with `dims` optional;
//! * ensemble: `{"weights": [...], "states": [<state>, ...]}`;
//! * Kraus channel: `{"input_dim": n, "output_dim": m, "kraus": [<matrix>, ...]}`.
//!
//! Reports are written with sorted keys and numbers rounded to 12
//! significant digits, so identical inputs give byte-identical output.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::functionals::KrausChannel;
use crate::linalg::{CMatrix, C64};
use crate::states::{DensityMatrix, Ensemble, PureState};

pub type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub matrix: RawMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub weights: Vec<f64>,
    pub states: Vec<StateFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausFile {
    pub input_dim: usize,
    pub output_dim: usize,
    pub kraus: Vec<RawMatrix>,
}

pub fn matrix_from_raw(raw: &RawMatrix) -> Result<CMatrix> {
    let rows: Vec<Vec<C64>> = raw.iter().map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect()).collect();
    CMatrix::from_rows(&rows)
}

pub fn matrix_to_raw(m: &CMatrix) -> RawMatrix {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

impl StateFile {
    pub fn to_state(&self) -> Result<DensityMatrix> {
        if self.matrix.len() != self.dim {
            return Err(Error::Malformed(format!("\"dim\" is {} but the matrix has {} rows", self.dim, self.matrix.len())));
        }
        let m = matrix_from_raw(&self.matrix)?;
        if m.cols() != self.dim {
            return Err(Error::NotSquare(m.rows(), m.cols()));
        }
        let rho = DensityMatrix::from_matrix(m)?;
        match self.dims {
            Some([a, b]) => rho.with_dims((a, b)),
            None => Ok(rho),
        }
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        StateFile { dim: rho.dim(), matrix: matrix_to_raw(rho.matrix()), dims: rho.dims().map(|(a, b)| [a, b]) }
    }
}

impl EnsembleFile {
    pub fn to_ensemble(&self) -> Result<Ensemble> {
        let atoms = self.states.iter().map(StateFile::to_state).collect::<Result<Vec<_>>>()?;
        Ensemble::new(self.weights.clone(), atoms)
    }

    pub fn from_ensemble(e: &Ensemble) -> Self {
        EnsembleFile { weights: e.weights().to_vec(), states: e.atoms().iter().map(StateFile::from_state).collect() }
    }
}

impl KrausFile {
    pub fn to_channel(&self) -> Result<KrausChannel> {
        let ops = self.kraus.iter().map(matrix_from_raw).collect::<Result<Vec<_>>>()?;
        KrausChannel::new(self.input_dim, self.output_dim, ops)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    serde_json::from_str::<StateFile>(text).map_err(|e| Error::Malformed(e.to_string()))?.to_state()
}

pub fn parse_ensemble(text: &str) -> Result<Ensemble> {
    serde_json::from_str::<EnsembleFile>(text).map_err(|e| Error::Malformed(e.to_string()))?.to_ensemble()
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    read_json::<StateFile>(path)?.to_state()
}

pub fn read_ensemble(path: &Path) -> Result<Ensemble> {
    read_json::<EnsembleFile>(path)?.to_ensemble()
}

pub fn read_channel(path: &Path) -> Result<KrausChannel> {
    read_json::<KrausFile>(path)?.to_channel()
}

/// Reads a list of pure states `{"vectors": [[[re, im], ...], ...]}`.
pub fn read_vectors(path: &Path) -> Result<Vec<PureState>> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Vectors {
        vectors: Vec<Vec<[f64; 2]>>,
    }
    read_json::<Vectors>(path)?
        .vectors
        .into_iter()
        .map(|v| PureState::new(v.into_iter().map(|[re, im]| C64::new(re, im)).collect()))
        .collect()
}

/// Reads a projector given as `{"projector": [[[re, im], ...], ...]}`.
pub fn read_projector(path: &Path) -> Result<CMatrix> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Projector {
        projector: RawMatrix,
    }
    matrix_from_raw(&read_json::<Projector>(path)?.projector)
}

/// Reads `{"k": k}`.
pub fn read_rank(path: &Path) -> Result<usize> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Rank {
        k: usize,
    }
    Ok(read_json::<Rank>(path)?.k)
}

pub fn state_value(rho: &DensityMatrix) -> Value {
    serde_json::to_value(StateFile::from_state(rho)).expect("state serializes")
}

pub fn ensemble_value(e: &Ensemble) -> Value {
    serde_json::to_value(EnsembleFile::from_ensemble(e)).expect("ensemble serializes")
}

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Applies [`round12`] to every float in a JSON tree.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

/// Canonical pretty-printed JSON text with a trailing newline.
pub fn to_canonical_json(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonicalize(v)).expect("json value serializes");
    s.push('\n');
    s
}

/// Formats a float for CSV output with 12 significant digits.
pub fn csv_number(x: f64) -> String {
    let r = round12(x);
    let v = serde_json::Number::from_f64(r).map(|n| n.to_string());
    v.unwrap_or_else(|| r.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::sample_ensemble;

    #[test]
    fn state_round_trip() {
        let text = r#"{"dim": 2, "matrix": [[[0.5, 0], [0, -0.5]], [[0, 0.5], [0.5, 0]]]}"#;
        let rho = parse_state(text).unwrap();
        assert_eq!(rho.matrix()[(0, 1)], C64::new(0.0, -0.5));
        let back = parse_state(&serde_json::to_string(&state_value(&rho)).unwrap()).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) == 0.0);
    }

    #[test]
    fn malformed_states_rejected() {
        assert!(matches!(parse_state("{\"dim\": 2}"), Err(Error::Malformed(_))));
        assert!(matches!(parse_state(r#"{"dim": 3, "matrix": [[[1,0]]]}"#), Err(Error::Malformed(_))));
        assert!(parse_state(r#"{"dim": 1, "matrix": [[[2,0]]]}"#).is_err());
        assert!(parse_state(r#"{"dim": 1, "matrix": [[[1,0]]], "extra": 1}"#).is_err());
        let text = r#"{"dim": 2, "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]], "dims": [2, 2]}"#;
        assert!(parse_state(text).is_err());
    }

    #[test]
    fn ensemble_round_trip() {
        let e = sample_ensemble(3, 4, 2).unwrap();
        let text = serde_json::to_string(&ensemble_value(&e)).unwrap();
        let back = parse_ensemble(&text).unwrap();
        for (a, b) in back.weights().iter().zip(e.weights()) {
            assert!((a - b).abs() < 1e-15);
        }
        for (a, b) in back.atoms().iter().zip(e.atoms()) {
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
        }
    }

    #[test]
    fn rounding_is_stable() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(-0.0), 0.0);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        let v = serde_json::json!({"b": 1.0000000000001, "a": [2, -1e-20]});
        assert_eq!(to_canonical_json(v), "{\n  \"a\": [\n    2,\n    -1e-20\n  ],\n  \"b\": 1.0\n}\n");
        assert_eq!(csv_number(0.25), "0.25");
    }
}
