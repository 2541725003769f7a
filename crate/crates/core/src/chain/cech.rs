use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::complex::{ChainComplexQ, ChainMapQ};
use super::double::DoubleComplexQ;
use super::simplicial::{inclusion_map, simplicial_chains, SimplicialChains};
use super::ChainError;
use crate::linalg::QMatrix;
use crate::simplex::GeomComplex;
use crate::Rational;

/// Chain complexes on the finite intersections of a cover with `m` members,
/// indexed by tuples `J ∈ {0..m−1}^{n+1}`, and the maps for dropping the
/// `i`-th entry of a tuple.
pub trait CechData {
    fn cover_size(&self) -> usize;
    fn complex(&self, tuple: &[usize]) -> Result<ChainComplexQ, ChainError>;
    fn face_map(&self, tuple: &[usize], i: usize) -> Result<ChainMapQ, ChainError>;
}

/// Explicitly tabulated Čech data.
#[derive(Clone, Debug, Default)]
pub struct CechTable {
    pub m: usize,
    pub complexes: HashMap<Vec<usize>, ChainComplexQ>,
    pub maps: HashMap<(Vec<usize>, usize), ChainMapQ>,
}

impl CechData for CechTable {
    fn cover_size(&self) -> usize {
        self.m
    }

    fn complex(&self, tuple: &[usize]) -> Result<ChainComplexQ, ChainError> {
        self.complexes.get(tuple).cloned().ok_or_else(|| ChainError::MissingIntersection(tuple.to_vec()))
    }

    fn face_map(&self, tuple: &[usize], i: usize) -> Result<ChainMapQ, ChainError> {
        self.maps.get(&(tuple.to_vec(), i)).cloned().ok_or_else(|| ChainError::MissingIntersection(tuple.to_vec()))
    }
}

/// Cover of a geometric complex by face-closed subcomplexes; intersections
/// and inclusions are computed on demand.
#[derive(Debug)]
pub struct SubcomplexCover {
    pieces: Vec<GeomComplex>,
    cache: std::sync::Mutex<BTreeMap<BTreeSet<usize>, SimplicialChains>>,
}

impl SubcomplexCover {
    pub fn new(pieces: Vec<GeomComplex>) -> Result<Self, ChainError> {
        if pieces.is_empty() {
            return Err(ChainError::Shape("a cover needs at least one piece".into()));
        }
        if pieces.iter().any(|p| !p.is_face_closed()) {
            return Err(ChainError::NotSubcomplex);
        }
        Ok(Self { pieces, cache: Default::default() })
    }

    fn chains(&self, tuple: &[usize]) -> Result<SimplicialChains, ChainError> {
        let key: BTreeSet<usize> = tuple.iter().copied().collect();
        if let Some(c) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(c.clone());
        }
        let mut idx = key.iter();
        let first = *idx.next().ok_or_else(|| ChainError::MissingIntersection(tuple.to_vec()))?;
        let base = self.pieces.get(first).ok_or_else(|| ChainError::MissingIntersection(tuple.to_vec()))?;
        let mut inter = base.clone();
        for &j in idx {
            let other = self.pieces.get(j).ok_or_else(|| ChainError::MissingIntersection(tuple.to_vec()))?;
            inter = inter.sub(|s| other.contains(s));
        }
        let c = simplicial_chains(&inter, &GeomComplex::empty(inter.ambient()))?;
        self.cache.lock().expect("cache lock").insert(key, c.clone());
        Ok(c)
    }
}

impl CechData for SubcomplexCover {
    fn cover_size(&self) -> usize {
        self.pieces.len()
    }

    fn complex(&self, tuple: &[usize]) -> Result<ChainComplexQ, ChainError> {
        Ok(self.chains(tuple)?.complex)
    }

    fn face_map(&self, tuple: &[usize], i: usize) -> Result<ChainMapQ, ChainError> {
        let mut smaller = tuple.to_vec();
        smaller.remove(i);
        inclusion_map(&self.chains(tuple)?, &self.chains(&smaller)?)
    }
}

/// All tuples in `{0..m−1}^{len}`, lexicographically.
pub fn tuples(m: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..m).map(move |j| [t.clone(), vec![j]].concat())).collect();
    }
    out
}

/// The Čech double complex truncated after nerve level `levels − 1`.
pub fn cech_double_complex(data: &impl CechData, levels: usize) -> Result<DoubleComplexQ, ChainError> {
    let m = data.cover_size();
    let per_level: Vec<Vec<Vec<usize>>> = (0..levels).map(|p| tuples(m, p + 1)).collect();
    let mut complexes: HashMap<Vec<usize>, ChainComplexQ> = HashMap::new();
    for t in per_level.iter().flatten() {
        complexes.insert(t.clone(), data.complex(t)?);
    }
    let rows = complexes.values().map(ChainComplexQ::len).max().unwrap_or(0);
    let offsets = |p: usize, q: usize| -> Vec<usize> {
        let mut acc = 0;
        per_level[p]
            .iter()
            .map(|t| {
                let o = acc;
                acc += complexes[t].dim(q);
                o
            })
            .collect()
    };
    let mut labels = Vec::with_capacity(levels);
    let mut dh = Vec::with_capacity(levels);
    let mut dv = Vec::with_capacity(levels);
    for p in 0..levels {
        let mut col_labels = Vec::with_capacity(rows);
        let mut col_dh = Vec::with_capacity(rows);
        let mut col_dv = Vec::with_capacity(rows);
        for q in 0..rows {
            let own = offsets(p, q);
            let width: usize = per_level[p].iter().map(|t| complexes[t].dim(q)).sum();
            col_labels.push(
                per_level[p]
                    .iter()
                    .flat_map(|t| complexes[t].labels(q).iter().map(move |s| format!("{t:?}{s}")))
                    .collect::<Vec<_>>(),
            );
            // Vertical: block diagonal of the internal boundaries.
            let below = if q > 0 { offsets(p, q - 1) } else { Vec::new() };
            let height: usize = if q > 0 { per_level[p].iter().map(|t| complexes[t].dim(q - 1)).sum() } else { 0 };
            let mut v = QMatrix::zeros(height, width);
            if q > 0 {
                for (k, t) in per_level[p].iter().enumerate() {
                    v.set_block(below[k], own[k], &complexes[t].boundary(q));
                }
            }
            col_dv.push(v);
            // Horizontal: alternating sum of face maps.
            if p > 0 {
                let target_off = offsets(p - 1, q);
                let index: HashMap<&Vec<usize>, usize> =
                    per_level[p - 1].iter().enumerate().map(|(k, t)| (t, k)).collect();
                let height: usize = per_level[p - 1].iter().map(|t| complexes[t].dim(q)).sum();
                let mut h = QMatrix::zeros(height, width);
                for (k, t) in per_level[p].iter().enumerate() {
                    for i in 0..=p {
                        let mut face = t.clone();
                        face.remove(i);
                        let phi = data.face_map(t, i)?.map(q);
                        let r0 = target_off[index[&face]];
                        let sign = if i % 2 == 0 {
                            Rational::from_integer(1.into())
                        } else {
                            -Rational::from_integer(1.into())
                        };
                        for (a, b, val) in phi.nonzero_entries() {
                            h.add_to(r0 + a, own[k] + b, &(val * &sign));
                        }
                    }
                }
                col_dh.push(h);
            } else {
                col_dh.push(QMatrix::zeros(0, width));
            }
        }
        labels.push(col_labels);
        dh.push(col_dh);
        dv.push(col_dv);
    }
    DoubleComplexQ::new(labels, dh, dv)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CechHomology {
    /// Ranks in degrees `0..=top`, `top` the largest degree of a cover member.
    pub ranks: Vec<usize>,
    /// Nerve levels `0..levels` were assembled.
    pub levels: usize,
    /// Ranks agree with one more level.
    pub stabilized: bool,
}

/// Homology of the total Čech complex, truncated at level `max(m + 2, top + 1)`
/// and compared with one further level.
pub fn cech_homology(data: &impl CechData) -> Result<CechHomology, ChainError> {
    let m = data.cover_size();
    let top = (0..m)
        .map(|j| data.complex(&[j]).map(|c| c.len()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let levels = (m + 2).max(top + 1) + 1;
    let ranks_at = |levels: usize| -> Result<Vec<usize>, ChainError> {
        let tot = cech_double_complex(data, levels)?.total_complex()?;
        let mut r = tot.homology_ranks();
        r.resize(top.max(1), 0);
        r.truncate(top.max(1));
        Ok(r)
    };
    let ranks = ranks_at(levels)?;
    let check = ranks_at(levels + 1)?;
    let stabilized = ranks == check;
    if !stabilized {
        return Err(ChainError::NotStabilized { first: ranks, second: check });
    }
    Ok(CechHomology { ranks, levels, stabilized })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{point_from_i64 as p, OpenSimplex};

    fn segment(a: i64, b: i64) -> GeomComplex {
        let simplices: Vec<OpenSimplex> =
            (a..b).map(|i| OpenSimplex::new(vec![p(&[i]), p(&[i + 1])]).unwrap()).collect();
        GeomComplex::new(1, simplices).unwrap().closure()
    }

    #[test]
    fn single_member_reproduces_the_complex() {
        let cover = SubcomplexCover::new(vec![segment(0, 2)]).unwrap();
        assert_eq!(cech_homology(&cover).unwrap().ranks, vec![1, 0]);
    }

    #[test]
    fn overlapping_intervals() {
        let cover = SubcomplexCover::new(vec![segment(0, 2), segment(1, 3)]).unwrap();
        let h = cech_homology(&cover).unwrap();
        assert_eq!(h.ranks, vec![1, 0]);
        assert!(h.stabilized);
    }

    #[test]
    fn disjoint_pieces() {
        let cover = SubcomplexCover::new(vec![segment(0, 1), segment(2, 3)]).unwrap();
        assert_eq!(cech_homology(&cover).unwrap().ranks, vec![2, 0]);
    }

    #[test]
    fn missing_data_is_reported() {
        let t = CechTable { m: 2, ..Default::default() };
        assert!(matches!(cech_homology(&t), Err(ChainError::MissingIntersection(_))));
    }
}
