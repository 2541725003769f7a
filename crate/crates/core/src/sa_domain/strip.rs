use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DomainError;

/// The horizontal half-strip `S_{r,s} = {Re z > r, |Im z| < s}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripSpec {
    pub r: f64,
    pub s: f64,
}

impl StripSpec {
    pub fn new(r: f64, s: f64) -> Result<Self, DomainError> {
        if !(s > 0.0) || !r.is_finite() || !s.is_finite() {
            return Err(DomainError::InvalidStrip { r, s });
        }
        Ok(Self { r, s })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.r && z.im.abs() < self.s
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &StripSpec) -> bool {
        other.r >= self.r && other.s <= self.s
    }
}

/// A point of the blown-up projective line: either finite, or the boundary
/// point `s∞` for the half ray `s·[0,∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PTildePoint {
    Finite { z: [f64; 2] },
    AtInfinity { direction: [f64; 2] },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PTildeClass {
    Finite,
    /// `1∞`: the only boundary point of `B♯`.
    OneInfinity,
    /// `s∞` with `Re s > 0` and `s` not a positive real.
    PositiveInfinityDirection,
    /// `s∞` with `Re s ≤ 0`; outside `B∘`.
    NonpositiveInfinityDirection,
}

impl PTildeClass {
    pub fn in_bcirc(self) -> bool {
        !matches!(self, PTildeClass::NonpositiveInfinityDirection)
    }

    pub fn in_bsharp(self) -> bool {
        matches!(self, PTildeClass::Finite | PTildeClass::OneInfinity)
    }
}

/// Relative tolerance of the cross-product test for directions.
const DIRECTION_TOL: f64 = 1e-12;

impl PTildePoint {
    pub fn finite(z: Complex64) -> Self {
        PTildePoint::Finite { z: [z.re, z.im] }
    }

    pub fn at_infinity(direction: Complex64) -> Self {
        PTildePoint::AtInfinity { direction: [direction.re, direction.im] }
    }

    pub fn classify(&self) -> Result<PTildeClass, DomainError> {
        match *self {
            PTildePoint::Finite { .. } => Ok(PTildeClass::Finite),
            PTildePoint::AtInfinity { direction: [re, im] } => {
                let norm = re.hypot(im);
                if norm == 0.0 || !norm.is_finite() {
                    return Err(DomainError::ZeroDirection);
                }
                // Positively proportional to 1: vanishing cross product with (1, 0)
                // and positive dot product.
                if im.abs() <= DIRECTION_TOL * norm && re > 0.0 {
                    Ok(PTildeClass::OneInfinity)
                } else if re > DIRECTION_TOL * norm {
                    Ok(PTildeClass::PositiveInfinityDirection)
                } else {
                    Ok(PTildeClass::NonpositiveInfinityDirection)
                }
            }
        }
    }

    /// Equality in `P̃¹`: boundary directions are compared up to positive scaling.
    pub fn same_point(&self, other: &PTildePoint) -> bool {
        match (*self, *other) {
            (PTildePoint::Finite { z: a }, PTildePoint::Finite { z: b }) => a == b,
            (PTildePoint::AtInfinity { direction: a }, PTildePoint::AtInfinity { direction: b }) => {
                let cross = a[0] * b[1] - a[1] * b[0];
                let dot = a[0] * b[0] + a[1] * b[1];
                let scale = a[0].hypot(a[1]) * b[0].hypot(b[1]);
                scale > 0.0 && cross.abs() <= DIRECTION_TOL * scale && dot > 0.0
            }
            _ => false,
        }
    }
}
