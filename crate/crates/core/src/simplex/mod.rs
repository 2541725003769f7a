//! Geometric simplicial complexes over ℚ.
//!
//! Everything here is exact. A complex is a set of open simplices whose
//! closures meet in common faces; the complex condition is decided pairwise
//! by an exact linear program. [`Retraction`] realises the straight-line
//! deformation retraction of `|K|` onto the closed core of `β(K)`.

mod complex;
mod geometry;
pub mod lp;
mod subdivision;

use thiserror::Error;

use crate::Rational;

pub use complex::{intersect_properly, kuhn_triangulation, validate_complex, ComplexJson, GeomComplex};
pub use geometry::{lerp, point_from_i64, OpenSimplex, Point};
pub use subdivision::{barycentric_subdivision, closed_core, homotopy, retract, Retraction};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SimplexError {
    #[error("a simplex needs at least one vertex")]
    Empty,
    #[error("vertices are not affinely independent")]
    NotAffinelyIndependent,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate simplex {0:?}")]
    Duplicate(Box<OpenSimplex>),
    #[error("closures of {:?} and {:?} do not meet in a common face", .0.0.vertices(), .0.1.vertices())]
    NotAComplex(Box<(OpenSimplex, OpenSimplex)>),
    #[error("point is not in the polyhedron")]
    NotInPolyhedron,
    #[error("homotopy parameter must lie in [0, 1]")]
    TimeOutOfRange,
    #[error("vertex index {0} out of range")]
    BadVertexIndex(usize),
    #[error("malformed complex JSON: {0}")]
    Json(String),
}

/// All faces of `σ`, including `σ`.
pub fn faces(s: &OpenSimplex) -> Vec<OpenSimplex> {
    s.faces()
}

pub fn closure_complex(k: &GeomComplex) -> GeomComplex {
    k.closure()
}

/// The open simplex of `K` containing `x`.
pub fn carrier<'a>(k: &'a GeomComplex, x: &[Rational]) -> Result<&'a OpenSimplex, SimplexError> {
    k.carrier(x)
}
