//! JSON forms of matrices, maps and generators.
//!
//! Complex entries are `[re, im]` pairs, matrices are row-major nested
//! arrays, and Choi matrices carry their convention tag.

use serde::{Deserialize, Serialize};

use crate::cpmaps::{SuperOp, CHOI_CONVENTION};
use crate::densela::{CMatrix, HermMatrix, C64};
use crate::dynamics::{gksl_generator, Generator};
use crate::error::{Error, Result};
use crate::tol;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        MatrixJson(
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        )
    }
}

impl TryFrom<&MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        let rows = j.0.len();
        let cols = j.0.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("matrix must be nonempty".into()));
        }
        if j.0.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("matrix rows have different lengths".into()));
        }
        let data = j.0.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
        CMatrix::new(rows, cols, data)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperOpJson {
    pub d: usize,
    pub convention: String,
    pub choi: MatrixJson,
}

impl From<&SuperOp> for SuperOpJson {
    fn from(op: &SuperOp) -> Self {
        Self {
            d: op.d(),
            convention: CHOI_CONVENTION.into(),
            choi: op.choi().into(),
        }
    }
}

impl TryFrom<&SuperOpJson> for SuperOp {
    type Error = Error;

    fn try_from(j: &SuperOpJson) -> Result<Self> {
        if j.convention != CHOI_CONVENTION {
            return Err(Error::InvalidInput(format!(
                "unsupported Choi convention {:?}, expected {CHOI_CONVENTION:?}",
                j.convention
            )));
        }
        SuperOp::new(j.d, CMatrix::try_from(&j.choi)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpJson {
    pub op: MatrixJson,
    pub rate: f64,
}

/// `{"kind":"gksl","H":…,"jumps":[…]}` or `{"kind":"choi","super":…}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeneratorJson {
    Gksl {
        #[serde(rename = "H")]
        h: MatrixJson,
        #[serde(default)]
        jumps: Vec<JumpJson>,
    },
    Choi {
        #[serde(rename = "super")]
        op: SuperOpJson,
    },
}

impl GeneratorJson {
    pub fn build(&self) -> Result<Generator> {
        match self {
            GeneratorJson::Gksl { h, jumps } => {
                let h = HermMatrix::new(CMatrix::try_from(h)?, tol::FEASIBILITY)?;
                let jumps = jumps
                    .iter()
                    .map(|j| Ok((CMatrix::try_from(&j.op)?, j.rate)))
                    .collect::<Result<Vec<_>>>()?;
                gksl_generator(h.dim(), &h, &jumps)
            }
            GeneratorJson::Choi { op } => Ok(Generator::new(SuperOp::try_from(op)?)),
        }
    }
}

impl From<&Generator> for GeneratorJson {
    fn from(g: &Generator) -> Self {
        GeneratorJson::Choi { op: g.op().into() }
    }
}
