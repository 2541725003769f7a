//! Exact symbolic layer: Gaussian rationals, rational functions and forms,
//! strips, boundary points of the blown-up line, sign-condition regions and
//! declared pseudo-orientations.

mod form;
mod gaussian;
mod orientation;
mod parse;
mod poly;
mod ratfunc;
mod region;
mod strip;

use thiserror::Error;

pub use form::{base_variables, sort_with_sign, RatForm};
pub use gaussian::{format_rational, parse_rational, rational_from_f64, rational_to_f64, GaussianRational};
pub use orientation::{OrientedPiece, ParamBox, PseudoOrientation};
pub use parse::{parse_expr, Expr, ParseError};
pub use poly::{cpoly_degree, cpoly_eval, cpoly_mul, Coeff, Field, GPoly, Poly, QPoly};
pub use ratfunc::{default_var_names, natural_var_order, RatFunc, POLE_TOLERANCE};
pub use region::{
    poly_range, BoxClass, Clause, ClauseJson, Interval, PolyJson, RegionJson, SignConditionRegion,
    FLOAT_MEMBERSHIP_BAND,
};
pub use strip::{PTildeClass, PTildePoint, StripSpec};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DomainError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unsupported function `{0}`")]
    UnsupportedFunction(String),
    #[error("exponent must be an integer constant")]
    NonIntegerExponent,
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("form degree: {0}")]
    FormDegree(String),
    #[error("boundary direction is zero")]
    ZeroDirection,
    #[error("invalid strip r = {r}, s = {s}")]
    InvalidStrip { r: f64, s: f64 },
    #[error("expected a polynomial")]
    NotPolynomial,
    #[error("expected rational (real) coefficients")]
    NotReal,
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("empty piece")]
    EmptyPiece,
    #[error("orientation sign must be +1 or -1, got {0}")]
    BadSign(i8),
    #[error("pieces overlap")]
    Overlap,
}
