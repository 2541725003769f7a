//! Chain complexes over ℚ.
//!
//! Boundaries are dense exact matrices. Every constructor re-checks `∂² = 0`
//! (or the chain-map / commuting-square identities) before returning.
//!
//! Grading is homological throughout. The cone of `φ : Y → X` is
//! `Cone_n = X_n ⊕ Y_{n−1}` with `d(x, y) = (∂x + φy, −∂y)`, so its low end
//! reads `X_0 ← X_1 ⊕ Y_0 ← X_2 ⊕ Y_1 ← …`. The de Rham side uses its own
//! cohomological conventions (see [`crate::derham`]).

mod cech;
mod complex;
mod double;
mod simplicial;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cech::{cech_double_complex, cech_homology, tuples, CechData, CechHomology, CechTable, SubcomplexCover};
pub use complex::{ChainComplexQ, ChainMapQ};
pub use double::DoubleComplexQ;
pub use simplicial::{inclusion_map, simplex_label, simplicial_chain_complex, simplicial_chains, SimplicialChains};

use crate::linalg::QMatrix;
use crate::sa_domain::{format_rational, parse_rational};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("boundary does not square to zero in degree {degree}")]
    BoundaryNotSquareZero { degree: usize },
    #[error("maps do not commute with boundaries in degree {degree}")]
    NotAChainMap { degree: usize },
    #[error("sign convention violated: {0}")]
    SignConventionViolation(String),
    #[error("not a subcomplex")]
    NotSubcomplex,
    #[error("no data for intersection {0:?}")]
    MissingIntersection(Vec<usize>),
    #[error("Čech ranks did not stabilise: {first:?} vs {second:?}")]
    NotStabilized { first: Vec<usize>, second: Vec<usize> },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("malformed matrix JSON: {0}")]
    Json(String),
}

pub fn homology_ranks(c: &ChainComplexQ) -> Vec<usize> {
    c.homology_ranks()
}

pub fn cone(phi: &ChainMapQ) -> ChainComplexQ {
    phi.cone()
}

pub fn total_complex(d: &DoubleComplexQ) -> Result<ChainComplexQ, ChainError> {
    d.total_complex()
}

/// Sparse wire form `{"rows":r,"cols":c,"entries":[[i,j,"p/q"],...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, String)>,
}

impl From<&QMatrix> for MatrixJson {
    fn from(m: &QMatrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.nonzero_entries().map(|(i, j, v)| (i, j, format_rational(v))).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for QMatrix {
    type Error = ChainError;
    fn try_from(raw: &MatrixJson) -> Result<QMatrix, ChainError> {
        let mut m = QMatrix::zeros(raw.rows, raw.cols);
        for (i, j, v) in &raw.entries {
            if *i >= raw.rows || *j >= raw.cols {
                return Err(ChainError::Json(format!("entry ({i},{j}) outside {}x{}", raw.rows, raw.cols)));
            }
            let q = parse_rational(v).ok_or_else(|| ChainError::Json(format!("bad rational `{v}`")))?;
            m.add_to(*i, *j, &q);
        }
        Ok(m)
    }
}

/// Wire form of a chain complex: dimensions per degree and `∂_1, ∂_2, …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainComplexJson {
    pub dims: Vec<usize>,
    pub boundaries: Vec<MatrixJson>,
}

impl ChainComplexJson {
    pub fn to_complex(&self) -> Result<ChainComplexQ, ChainError> {
        let labels =
            self.dims.iter().enumerate().map(|(n, &d)| (0..d).map(|i| format!("e{n}_{i}")).collect()).collect();
        let b = self.boundaries.iter().map(QMatrix::try_from).collect::<Result<Vec<_>, _>>()?;
        ChainComplexQ::new(labels, b)
    }

    pub fn from_complex(c: &ChainComplexQ) -> Self {
        ChainComplexJson {
            dims: (0..c.len()).map(|n| c.dim(n)).collect(),
            boundaries: (1..c.len()).map(|n| MatrixJson::from(&c.boundary(n))).collect(),
        }
    }
}
