//! Oriented real blow-up of genus-0 curves and cell models of the
//! rapid-decay spaces `B∘` and `B♯`.
//!
//! The cell model of a curve is built from the pole orders of `f` at the
//! punctures: a pole of order `d` contributes `d` boundary arcs to `B∘` and
//! `d` boundary points to `B♯`; punctures where `f` stays finite contribute
//! nothing to the boundary. Relative homology of the model is the rapid-decay
//! homology of `(C, Y, f)`.

mod chart;
mod curve;
mod model;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

pub use chart::{
    blowup_chart, blowup_chart_exact, blowup_chart_exact_inverse, blowup_chart_inverse, ChartPoint, ExactChartPoint,
};
pub use curve::{CurveSpec, CurveSpecJson, PoleDatum, ProjPoint, PunctureClasses};
pub use model::{CircleModel, CurveRdModel, RdVariant};

use crate::sa_domain::{DomainError, GaussianRational};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum BlowupError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("f must be a function of `z` alone")]
    NotUnivariate,
    #[error("point {0} listed twice")]
    DuplicatePoint(String),
    #[error("marked point {0} is a puncture")]
    MarkedIsPuncture(String),
    #[error("f has a pole away from the punctures")]
    PoleOutsidePunctures,
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("coordinate {0} lies on the divisor and no boundary direction was given")]
    MissingDirection(usize),
    #[error("modulus is not rational")]
    NonRationalModulus,
    #[error("malformed curve data: {0}")]
    Json(String),
}

pub fn classify_punctures(spec: &CurveSpec) -> PunctureClasses {
    spec.classify_punctures()
}

pub fn build_rd_model(spec: &CurveSpec) -> CurveRdModel {
    CurveRdModel::build(spec, RdVariant::Bcirc)
}

/// Rank of `H_n^rd(C, Y, f)`, computed on the `B∘` model.
pub fn rd_rank(spec: &CurveSpec, n: usize) -> usize {
    let ranks = CurveRdModel::build(spec, RdVariant::Bcirc).relative_ranks();
    ranks.get(n).copied().unwrap_or(0)
}

/// Rays `G_{s^m} = s^m·[0, ∞)`, `s = e^{2πi/n}`, generating `H_1^rd(𝔸¹, {0}, zⁿ)`.
pub fn rd_generators(spec: &CurveSpec) -> Result<Vec<Complex64>, BlowupError> {
    let unsupported = || BlowupError::UnsupportedShape("generators are only synthesised for (𝔸¹, {0}, zⁿ)".into());
    if spec.punctures() != [ProjPoint::Infinity] || spec.marked() != [GaussianRational::from_integer(0)] {
        return Err(unsupported());
    }
    let f = spec.f();
    let poly = f.as_polynomial().ok_or_else(unsupported)?;
    if poly.num_terms() != 1 {
        return Err(unsupported());
    }
    let n = poly.total_degree().unwrap_or(0);
    if n == 0 || poly.coeff(&[n]) != GaussianRational::from_integer(1) {
        return Err(unsupported());
    }
    Ok((0..n).map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64)).collect())
}
