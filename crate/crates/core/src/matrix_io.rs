//! Matrix files: a small header plus row-major `[re, im]` entries.
//!
//! ```json
//! {"format": "dqls-matrix", "version": 1, "kind": "noise_operator",
//!  "neighborhood": [0, 1], "dims": [2, 2], "gains": [1.0],
//!  "rows": [[[0, 0], [1, 0]], ...]}
//! ```
//!
//! `neighborhood` is `null` for an operator on the whole space, in which
//! case `dims` lists every subsystem.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DqlsError, Result};
use crate::linalg::{c, CMatrix};
use crate::tensor::{self, Neighborhood, QLOperator, TensorSpace};

pub const FORMAT: &str = "dqls-matrix";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub format: String,
    pub version: u32,
    pub kind: String,
    pub neighborhood: Option<Vec<usize>>,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<Vec<f64>>,
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    /// Header for `m` acting on `neighborhood` of `space`, or on all of it.
    pub fn new(kind: &str, space: &TensorSpace, neighborhood: Option<&Neighborhood>, m: &CMatrix) -> Self {
        let dims = match neighborhood {
            Some(nb) => nb.indices().iter().map(|&a| space.dims()[a]).collect(),
            None => space.dims().to_vec(),
        };
        let rows = m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
        MatrixFile {
            format: FORMAT.into(),
            version: VERSION,
            kind: kind.into(),
            neighborhood: neighborhood.map(|nb| nb.indices().to_vec()),
            dims,
            gains: None,
            rows,
        }
    }

    pub fn with_gains(mut self, gains: &[f64]) -> Self {
        self.gains = Some(gains.to_vec());
        self
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        let d: usize = self.dims.iter().product();
        if self.rows.len() != d || self.rows.iter().any(|r| r.len() != d) {
            return Err(DqlsError::DimensionMismatch(format!(
                "matrix rows do not form a {d}x{d} array for dims {:?}",
                self.dims
            )));
        }
        if self.rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(DqlsError::Parse("matrix entries must be finite".into()));
        }
        Ok(CMatrix::from_row_iterator(d, d, self.rows.iter().flatten().map(|z| c(z[0], z[1]))))
    }

    /// The operator embedded into `space`, checking the header against it.
    pub fn embedded(&self, space: &TensorSpace) -> Result<CMatrix> {
        let m = self.matrix()?;
        match &self.neighborhood {
            None => {
                if self.dims != space.dims() {
                    return Err(DqlsError::DimensionMismatch(format!(
                        "matrix on dims {:?} for space {space}",
                        self.dims
                    )));
                }
                Ok(m)
            }
            Some(indices) => {
                let nb = Neighborhood::new(indices.clone())?;
                nb.validate(space)?;
                let expect: Vec<usize> = nb.indices().iter().map(|&a| space.dims()[a]).collect();
                if expect != self.dims {
                    return Err(DqlsError::DimensionMismatch(format!(
                        "matrix dims {:?} do not match neighborhood {nb} of {space}",
                        self.dims
                    )));
                }
                tensor::embed(&QLOperator::new(space, nb, m)?, space)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| DqlsError::Parse(format!("malformed matrix file: {e}")))?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(DqlsError::Parse(format!(
                "unsupported matrix format {:?} version {}",
                file.format, file.version
            )));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DqlsError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            DqlsError::Parse(msg) => DqlsError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).map_err(|e| DqlsError::Io(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| DqlsError::Io(format!("cannot write {}: {e}", path.display())))
    }
}
