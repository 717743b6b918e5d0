//! File format for POVMs, channels and instruments.
//!
//! ```json
//! {"kind": "instrument", "dim_in": 2, "dim_out": 2,
//!  "convention": "choi-input-first",
//!  "matrices": [{"rows": 4, "cols": 4, "data": [[1.0, 0.0], ...]}, ...]}
//! ```
//!
//! Matrices are row-major with complex entries as `[re, im]`. Channel and
//! instrument matrices are Choi matrices `Σ_ij E_ij ⊗ Φ(E_ij)`; the
//! `convention` field is mandatory for them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, C64};
use crate::objects::{ChoiOperation, Instrument, ObjectError, Povm};

pub const CHOI_CONVENTION: &str = "choi-input-first";

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("JSON syntax: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Object(#[from] ObjectError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), data: m.as_slice().iter().map(|c| [c.re, c.im]).collect() }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, JsonError> {
        if self.data.iter().flatten().any(|v| !v.is_finite()) {
            return Err(JsonError::Format("non-finite matrix entry".into()));
        }
        let data = self.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::from_vec(self.rows, self.cols, data)
            .map_err(|_| JsonError::Format(format!("{} entries for a {}x{} matrix", self.data.len(), self.rows, self.cols)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    Povm,
    Channel,
    Instrument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectJson {
    pub kind: ObjectKind,
    pub dim_in: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_out: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    pub matrices: Vec<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainObject {
    Povm(Povm),
    Channel(ChoiOperation),
    Instrument(Instrument),
}

impl DomainObject {
    pub fn kind(&self) -> ObjectKind {
        match self {
            Self::Povm(_) => ObjectKind::Povm,
            Self::Channel(_) => ObjectKind::Channel,
            Self::Instrument(_) => ObjectKind::Instrument,
        }
    }
}

impl ObjectJson {
    pub fn from_povm(p: &Povm) -> Self {
        Self {
            kind: ObjectKind::Povm,
            dim_in: p.dim(),
            dim_out: None,
            convention: None,
            matrices: p.effects().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn from_channel(c: &ChoiOperation) -> Self {
        Self {
            kind: ObjectKind::Channel,
            dim_in: c.dim_in(),
            dim_out: Some(c.dim_out()),
            convention: Some(CHOI_CONVENTION.into()),
            matrices: vec![MatrixJson::from_matrix(c.choi())],
        }
    }

    pub fn from_instrument(i: &Instrument) -> Self {
        Self {
            kind: ObjectKind::Instrument,
            dim_in: i.dim_in(),
            dim_out: Some(i.dim_out()),
            convention: Some(CHOI_CONVENTION.into()),
            matrices: i.operations().iter().map(|o| MatrixJson::from_matrix(o.choi())).collect(),
        }
    }

    pub fn from_object(o: &DomainObject) -> Self {
        match o {
            DomainObject::Povm(p) => Self::from_povm(p),
            DomainObject::Channel(c) => Self::from_channel(c),
            DomainObject::Instrument(i) => Self::from_instrument(i),
        }
    }

    /// Checks the declared shape and builds the domain object. Positivity and
    /// completeness are left to validation.
    pub fn to_object(&self) -> Result<DomainObject, JsonError> {
        let mats = self.matrices.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>, _>>()?;
        if mats.is_empty() {
            return Err(JsonError::Format("no matrices".into()));
        }
        if self.dim_in == 0 {
            return Err(JsonError::Format("dim_in must be positive".into()));
        }
        match self.kind {
            ObjectKind::Povm => {
                if self.dim_out.is_some() {
                    return Err(JsonError::Format("a POVM has no dim_out".into()));
                }
                if let Some(m) = mats.iter().find(|m| m.rows() != self.dim_in || m.cols() != self.dim_in) {
                    return Err(JsonError::Format(format!("{}x{} effect on dimension {}", m.rows(), m.cols(), self.dim_in)));
                }
                Ok(DomainObject::Povm(Povm::new(mats)?))
            }
            ObjectKind::Channel | ObjectKind::Instrument => {
                match self.convention.as_deref() {
                    Some(CHOI_CONVENTION) => {}
                    Some(other) => return Err(JsonError::Format(format!("unknown convention {other:?}"))),
                    None => return Err(JsonError::Format("missing convention".into())),
                }
                let dim_out = self.dim_out.ok_or_else(|| JsonError::Format("missing dim_out".into()))?;
                if dim_out == 0 {
                    return Err(JsonError::Format("dim_out must be positive".into()));
                }
                let ops = mats
                    .into_iter()
                    .map(|m| ChoiOperation::new(self.dim_in, dim_out, m))
                    .collect::<Result<Vec<_>, _>>()?;
                if self.kind == ObjectKind::Channel {
                    if ops.len() != 1 {
                        return Err(JsonError::Format(format!("a channel has one matrix, found {}", ops.len())));
                    }
                    Ok(DomainObject::Channel(ops.into_iter().next().expect("one operation")))
                } else {
                    Ok(DomainObject::Instrument(Instrument::new(ops)?))
                }
            }
        }
    }
}

pub fn parse_object(text: &str) -> Result<DomainObject, JsonError> {
    serde_json::from_str::<ObjectJson>(text)?.to_object()
}

pub fn to_json_string(o: &DomainObject) -> String {
    serde_json::to_string_pretty(&ObjectJson::from_object(o)).expect("plain data serializes")
}

/// A list of density matrices, stored as a bare JSON array of matrices.
pub fn parse_states(text: &str) -> Result<Vec<ComplexMatrix>, JsonError> {
    serde_json::from_str::<Vec<MatrixJson>>(text)?.iter().map(MatrixJson::to_matrix).collect()
}

pub fn states_to_json(states: &[ComplexMatrix]) -> String {
    serde_json::to_string_pretty(&states.iter().map(MatrixJson::from_matrix).collect::<Vec<_>>())
        .expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objects::make_lueders;

    #[test]
    fn round_trip_is_bit_exact() {
        let p = Povm::new(vec![
            ComplexMatrix::from_fn(2, 2, |i, j| C64::new(0.1 + i as f64 / 3.0, j as f64 * 1e-17)),
            ComplexMatrix::from_real_rows(&[&[std::f64::consts::PI, -0.0], &[1e-300, 2.0 / 3.0]]),
        ])
        .unwrap();
        let o = DomainObject::Povm(p);
        let text = to_json_string(&o);
        let back = parse_object(&text).unwrap();
        assert_eq!(back, o);
        assert_eq!(to_json_string(&back), text);
        let l = DomainObject::Instrument(make_lueders(&Povm::computational(2)).unwrap());
        assert_eq!(parse_object(&to_json_string(&l)).unwrap(), l);
    }

    #[test]
    fn convention_is_enforced() {
        let c = DomainObject::Channel(ChoiOperation::identity(2));
        let mut j = ObjectJson::from_object(&c);
        j.convention = Some("choi-output-first".into());
        assert!(matches!(j.to_object(), Err(JsonError::Format(_))));
        j.convention = None;
        assert!(j.to_object().is_err());
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(matches!(parse_object("{"), Err(JsonError::Syntax(_))));
        let bad = r#"{"kind":"povm","dim_in":2,"matrices":[{"rows":2,"cols":2,"data":[[1,0]]}]}"#;
        assert!(matches!(parse_object(bad), Err(JsonError::Format(_))));
        let extra = r#"{"kind":"povm","dim_in":1,"matrices":[{"rows":1,"cols":1,"data":[[1,0]]}],"x":1}"#;
        assert!(parse_object(extra).is_err());
    }
}
