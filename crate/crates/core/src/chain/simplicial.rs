use std::collections::BTreeMap;

use num_traits::One;

use super::complex::{ChainComplexQ, ChainMapQ};
use super::ChainError;
use crate::linalg::QMatrix;
use crate::sa_domain::format_rational;
use crate::simplex::{GeomComplex, OpenSimplex};
use crate::Rational;

/// Relative simplicial chains together with the simplex basis in each degree.
#[derive(Clone, Debug)]
pub struct SimplicialChains {
    pub complex: ChainComplexQ,
    pub basis: Vec<Vec<OpenSimplex>>,
}

impl SimplicialChains {
    pub fn index_of(&self, s: &OpenSimplex) -> Option<usize> {
        self.basis.get(s.dim())?.iter().position(|t| t == s)
    }
}

pub fn simplex_label(s: &OpenSimplex) -> String {
    s.vertices()
        .iter()
        .map(|v| format!("({})", v.iter().map(format_rational).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join("")
}

/// Chains of `K` relative to `L`: basis `K ∖ L`, `∂σ = Σ (−1)^i k^i σ` with
/// faces in `L` or outside `K` dropped.
pub fn simplicial_chains(k: &GeomComplex, l: &GeomComplex) -> Result<SimplicialChains, ChainError> {
    if !l.is_subset_of(k) {
        return Err(ChainError::NotSubcomplex);
    }
    let top = k.iter().filter(|s| !l.contains(s)).map(OpenSimplex::dim).max();
    let Some(top) = top else {
        return Ok(SimplicialChains { complex: ChainComplexQ::zero(), basis: Vec::new() });
    };
    let basis: Vec<Vec<OpenSimplex>> =
        (0..=top).map(|n| k.of_dim(n).into_iter().filter(|s| !l.contains(s)).cloned().collect()).collect();
    let index: Vec<BTreeMap<&OpenSimplex, usize>> =
        basis.iter().map(|b| b.iter().enumerate().map(|(i, s)| (s, i)).collect()).collect();
    let mut boundaries = Vec::new();
    for n in 1..=top {
        let mut m = QMatrix::zeros(basis[n - 1].len(), basis[n].len());
        for (j, s) in basis[n].iter().enumerate() {
            for (i, f) in s.facets().iter().enumerate() {
                if let Some(&row) = index[n - 1].get(f) {
                    let sign = if i % 2 == 0 { Rational::one() } else { -Rational::one() };
                    m.set(row, j, sign);
                }
            }
        }
        boundaries.push(m);
    }
    let labels = basis.iter().map(|b| b.iter().map(simplex_label).collect()).collect();
    let complex = ChainComplexQ::new(labels, boundaries)?;
    Ok(SimplicialChains { complex, basis })
}

pub fn simplicial_chain_complex(k: &GeomComplex, l: &GeomComplex) -> Result<ChainComplexQ, ChainError> {
    simplicial_chains(k, l).map(|c| c.complex)
}

/// The map induced by inclusion of simplex bases; simplices missing from the
/// target are sent to zero.
pub fn inclusion_map(source: &SimplicialChains, target: &SimplicialChains) -> Result<ChainMapQ, ChainError> {
    let top = source.basis.len();
    let maps = (0..top)
        .map(|n| {
            let mut m = QMatrix::zeros(target.complex.dim(n), source.complex.dim(n));
            for (j, s) in source.basis[n].iter().enumerate() {
                if let Some(i) = target.index_of(s) {
                    m.set(i, j, Rational::one());
                }
            }
            m
        })
        .collect();
    ChainMapQ::new(source.complex.clone(), target.complex.clone(), maps)
}
