use num_traits::Signed;

use super::gaussian::rational_to_f64;
use super::DomainError;
use crate::Rational;

/// Open axis-parallel box `∏ (lo_i, hi_i)` in parameter space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamBox {
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
}

impl ParamBox {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Result<Self, DomainError> {
        if lo.len() != hi.len() {
            return Err(DomainError::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(DomainError::EmptyPiece);
        }
        Ok(Self { lo, hi })
    }

    pub fn interval(a: Rational, b: Rational) -> Result<Self, DomainError> {
        Self::new(vec![a], vec![b])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Intersection, `None` when empty.
    pub fn intersect(&self, other: &ParamBox) -> Option<ParamBox> {
        let lo: Vec<Rational> = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(b).clone()).collect();
        let hi: Vec<Rational> = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(b).clone()).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            None
        } else {
            Some(ParamBox { lo, hi })
        }
    }

    /// Removes the hyperplanes `x_axis = c` for each cut value, returning the
    /// open pieces left over.
    pub fn split_at(&self, axis: usize, cuts: &[Rational]) -> Vec<ParamBox> {
        let mut inner: Vec<&Rational> = cuts.iter().filter(|c| **c > self.lo[axis] && **c < self.hi[axis]).collect();
        inner.sort();
        inner.dedup();
        let mut bounds = vec![&self.lo[axis]];
        bounds.extend(inner);
        bounds.push(&self.hi[axis]);
        bounds
            .windows(2)
            .map(|w| {
                let mut b = self.clone();
                b.lo[axis] = w[0].clone();
                b.hi[axis] = w[1].clone();
                b
            })
            .collect()
    }

    pub fn volume(&self) -> Rational {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn bounds_f64(&self) -> Vec<(f64, f64)> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (rational_to_f64(a), rational_to_f64(b))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedPiece {
    pub domain: ParamBox,
    /// `+1` or `-1`.
    pub sign: i8,
}

/// A pseudo-orientation given by declared, pairwise disjoint regular pieces
/// of a fixed dimension, each with a sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoOrientation {
    dim: usize,
    pieces: Vec<OrientedPiece>,
}

impl PseudoOrientation {
    pub fn new(dim: usize, pieces: Vec<OrientedPiece>) -> Result<Self, DomainError> {
        for p in &pieces {
            if p.domain.dim() != dim {
                return Err(DomainError::DimensionMismatch { expected: dim, found: p.domain.dim() });
            }
            if p.sign != 1 && p.sign != -1 {
                return Err(DomainError::BadSign(p.sign));
            }
        }
        for (i, a) in pieces.iter().enumerate() {
            for b in &pieces[i + 1..] {
                if a.domain.intersect(&b.domain).is_some() {
                    return Err(DomainError::Overlap);
                }
            }
        }
        Ok(Self { dim, pieces })
    }

    pub fn single(domain: ParamBox, sign: i8) -> Result<Self, DomainError> {
        Self::new(domain.dim(), vec![OrientedPiece { domain, sign }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[OrientedPiece] {
        &self.pieces
    }

    /// Intersects every piece with every box of `sub`; signs are inherited.
    pub fn restrict(&self, sub: &[ParamBox]) -> Result<PseudoOrientation, DomainError> {
        let mut pieces = Vec::new();
        for b in sub {
            if b.dim() != self.dim {
                return Err(DomainError::DimensionMismatch { expected: self.dim, found: b.dim() });
            }
        }
        for p in &self.pieces {
            for b in sub {
                if let Some(domain) = p.domain.intersect(b) {
                    pieces.push(OrientedPiece { domain, sign: p.sign });
                }
            }
        }
        PseudoOrientation::new(self.dim, pieces)
    }

    /// Signed sum of a per-piece quantity, such as an integral over the piece.
    pub fn signed_sum<E>(&self, mut f: impl FnMut(&ParamBox) -> Result<f64, E>) -> Result<f64, E> {
        let mut total = 0.0;
        for p in &self.pieces {
            total += f64::from(p.sign) * f(&p.domain)?;
        }
        Ok(total)
    }

    /// Total signed parameter volume.
    pub fn signed_volume(&self) -> Rational {
        self.pieces
            .iter()
            .map(|p| {
                let v = p.domain.volume();
                if p.sign < 0 {
                    -v
                } else {
                    v
                }
            })
            .sum()
    }

    /// Total unsigned parameter volume.
    pub fn support_volume(&self) -> Rational {
        self.pieces.iter().map(|p| p.domain.volume().abs()).sum()
    }
}
