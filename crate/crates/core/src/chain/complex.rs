use rayon::prelude::*;

use super::ChainError;
use crate::linalg::QMatrix;

/// A bounded chain complex `C_0 ← C_1 ← … ← C_top` over ℚ.
///
/// `boundary(n)` maps degree `n` to degree `n − 1` and has shape
/// `dim(n−1) × dim(n)`; `boundary(0)` is the zero map to the zero space.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplexQ {
    labels: Vec<Vec<String>>,
    boundaries: Vec<QMatrix>,
}

impl ChainComplexQ {
    /// `boundaries[n − 1]` is `∂_n` for `n = 1..=top`.
    pub fn new(labels: Vec<Vec<String>>, boundaries: Vec<QMatrix>) -> Result<Self, ChainError> {
        if labels.is_empty() {
            return Ok(Self::zero());
        }
        if boundaries.len() + 1 != labels.len() {
            return Err(ChainError::Shape(format!(
                "{} degrees need {} boundary matrices, got {}",
                labels.len(),
                labels.len() - 1,
                boundaries.len()
            )));
        }
        let mut full = vec![QMatrix::zeros(0, labels[0].len())];
        for (k, b) in boundaries.into_iter().enumerate() {
            let n = k + 1;
            if b.rows() != labels[n - 1].len() || b.cols() != labels[n].len() {
                return Err(ChainError::Shape(format!(
                    "boundary in degree {n} is {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    labels[n - 1].len(),
                    labels[n].len()
                )));
            }
            full.push(b);
        }
        let c = Self { labels, boundaries: full };
        c.check_square_zero()?;
        Ok(c)
    }

    /// The complex with no cells.
    pub fn zero() -> Self {
        Self { labels: Vec::new(), boundaries: Vec::new() }
    }

    /// A complex concentrated in the given degrees with zero differentials.
    pub fn from_dims(dims: &[usize]) -> Self {
        let labels: Vec<Vec<String>> =
            dims.iter().enumerate().map(|(n, &d)| (0..d).map(|i| format!("e{n}_{i}")).collect()).collect();
        let boundaries =
            (0..dims.len()).map(|n| QMatrix::zeros(if n == 0 { 0 } else { dims[n - 1] }, dims[n])).collect();
        Self { labels, boundaries }
    }

    fn check_square_zero(&self) -> Result<(), ChainError> {
        for n in 2..self.boundaries.len() {
            if !self.boundaries[n - 1].mul(&self.boundaries[n]).is_zero() {
                return Err(ChainError::BoundaryNotSquareZero { degree: n });
            }
        }
        Ok(())
    }

    /// Number of stored degrees (`top + 1`), zero for the zero complex.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.iter().all(Vec::is_empty)
    }

    pub fn top_degree(&self) -> Option<usize> {
        self.labels.len().checked_sub(1)
    }

    pub fn dim(&self, n: usize) -> usize {
        self.labels.get(n).map_or(0, Vec::len)
    }

    pub fn labels(&self, n: usize) -> &[String] {
        self.labels.get(n).map_or(&[], |l| l.as_slice())
    }

    /// `∂_n`, zero outside the stored range.
    pub fn boundary(&self, n: usize) -> QMatrix {
        match self.boundaries.get(n) {
            Some(b) => b.clone(),
            None => QMatrix::zeros(if n == 0 { 0 } else { self.dim(n - 1) }, self.dim(n)),
        }
    }

    fn boundary_rank(&self, n: usize) -> usize {
        self.boundaries.get(n).map_or(0, QMatrix::rank)
    }

    /// `rank H_n = dim ker ∂_n − rank ∂_{n+1}` for `n = 0..=top`.
    pub fn homology_ranks(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=self.len()).into_par_iter().map(|n| self.boundary_rank(n)).collect();
        (0..self.len()).map(|n| self.dim(n) - ranks[n] - ranks[n + 1]).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..self.len()).map(|n| if n % 2 == 0 { self.dim(n) as i64 } else { -(self.dim(n) as i64) }).sum()
    }

    /// Pads with zero spaces up to degree `top`.
    pub fn extended_to(&self, top: usize) -> ChainComplexQ {
        let mut c = self.clone();
        while c.labels.len() <= top {
            let n = c.labels.len();
            c.labels.push(Vec::new());
            c.boundaries.push(QMatrix::zeros(if n == 0 { 0 } else { c.dim(n - 1) }, 0));
        }
        c
    }

    /// Direct sum of two complexes, degreewise block-diagonal.
    pub fn direct_sum(&self, other: &ChainComplexQ) -> ChainComplexQ {
        let top = self.len().max(other.len());
        let labels = (0..top)
            .map(|n| self.labels(n).iter().chain(other.labels(n)).cloned().collect())
            .collect::<Vec<Vec<String>>>();
        let boundaries = (0..top)
            .map(|n| {
                let (a, b) = (self.boundary(n), other.boundary(n));
                let mut m = QMatrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
                m.set_block(0, 0, &a);
                m.set_block(a.rows(), a.cols(), &b);
                m
            })
            .collect();
        ChainComplexQ { labels, boundaries }
    }
}

/// Degreewise matrices `φ_n : source_n → target_n` commuting with boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMapQ {
    source: ChainComplexQ,
    target: ChainComplexQ,
    maps: Vec<QMatrix>,
}

impl ChainMapQ {
    /// Degrees without a supplied matrix are treated as zero.
    pub fn new(source: ChainComplexQ, target: ChainComplexQ, maps: Vec<QMatrix>) -> Result<Self, ChainError> {
        let top = source.len().max(target.len());
        let mut full = Vec::with_capacity(top);
        for n in 0..top {
            let m = maps.get(n).cloned().unwrap_or_else(|| QMatrix::zeros(target.dim(n), source.dim(n)));
            if m.rows() != target.dim(n) || m.cols() != source.dim(n) {
                return Err(ChainError::Shape(format!(
                    "map in degree {n} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    target.dim(n),
                    source.dim(n)
                )));
            }
            full.push(m);
        }
        for n in 1..top {
            let lhs = full[n - 1].mul(&source.boundary(n));
            let rhs = target.boundary(n).mul(&full[n]);
            if lhs != rhs {
                return Err(ChainError::NotAChainMap { degree: n });
            }
        }
        Ok(Self { source, target, maps: full })
    }

    pub fn identity(c: &ChainComplexQ) -> Self {
        let maps = (0..c.len()).map(|n| QMatrix::identity(c.dim(n))).collect();
        Self { source: c.clone(), target: c.clone(), maps }
    }

    pub fn zero(source: &ChainComplexQ, target: &ChainComplexQ) -> Self {
        Self::new(source.clone(), target.clone(), Vec::new()).expect("zero map is a chain map")
    }

    pub fn source(&self) -> &ChainComplexQ {
        &self.source
    }

    pub fn target(&self) -> &ChainComplexQ {
        &self.target
    }

    pub fn map(&self, n: usize) -> QMatrix {
        self.maps.get(n).cloned().unwrap_or_else(|| QMatrix::zeros(self.target.dim(n), self.source.dim(n)))
    }

    pub fn compose(&self, after: &ChainMapQ) -> Result<ChainMapQ, ChainError> {
        let top = self.source.len().max(after.target.len());
        let maps = (0..top).map(|n| after.map(n).mul(&self.map(n))).collect();
        ChainMapQ::new(self.source.clone(), after.target.clone(), maps)
    }

    /// Rank of the induced map `H_n(source) → H_n(target)`.
    pub fn induced_rank(&self, n: usize) -> usize {
        let cycles = self.source.boundary(n).nullspace();
        if cycles.is_empty() {
            return 0;
        }
        let images: Vec<_> = cycles.iter().map(|z| self.map(n).mul_vec(z)).collect();
        let img = QMatrix::from_columns(self.target.dim(n), &images);
        let b = self.target.boundary(n + 1);
        b.hstack(&img).rank() - b.rank()
    }

    /// The cone: `Cone_n = X_n ⊕ Y_{n−1}` with `d(x, y) = (∂x + φ(y), −∂y)`.
    pub fn cone(&self) -> ChainComplexQ {
        let (x, y) = (&self.target, &self.source);
        let top = x.len().max(y.len() + 1);
        let labels: Vec<Vec<String>> = (0..top)
            .map(|n| {
                let mut l: Vec<String> = x.labels(n).iter().map(|s| format!("X:{s}")).collect();
                if n > 0 {
                    l.extend(y.labels(n - 1).iter().map(|s| format!("Y:{s}")));
                }
                l
            })
            .collect();
        let mut boundaries = vec![QMatrix::zeros(0, labels[0].len())];
        for n in 1..top {
            let (xr, yr) = (x.dim(n - 1), if n >= 2 { y.dim(n - 2) } else { 0 });
            let (xc, yc) = (x.dim(n), y.dim(n - 1));
            let mut m = QMatrix::zeros(xr + yr, xc + yc);
            m.set_block(0, 0, &x.boundary(n));
            m.set_block(0, xc, &self.map(n - 1));
            if n >= 2 {
                m.set_block(xr, xc, &y.boundary(n - 1).scale(&-crate::Rational::from_integer(1.into())));
            }
            boundaries.push(m);
        }
        let c = ChainComplexQ { labels, boundaries };
        debug_assert!(c.check_square_zero().is_ok());
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> ChainComplexQ {
        // Three vertices, three edges.
        let d1 = QMatrix::from_i64(&[&[-1, 0, 1], &[1, -1, 0], &[0, 1, -1]]);
        ChainComplexQ::new(
            vec![vec!["a".into(), "b".into(), "c".into()], vec!["ab".into(), "bc".into(), "ca".into()]],
            vec![d1],
        )
        .unwrap()
    }

    #[test]
    fn basic_ranks() {
        assert_eq!(ChainComplexQ::zero().homology_ranks(), Vec::<usize>::new());
        assert_eq!(ChainComplexQ::from_dims(&[0, 0]).homology_ranks(), vec![0, 0]);
        assert_eq!(circle().homology_ranks(), vec![1, 1]);
        assert_eq!(circle().euler_characteristic(), 0);
    }

    #[test]
    fn square_zero_is_enforced() {
        let d1 = QMatrix::from_i64(&[&[1]]);
        let d2 = QMatrix::from_i64(&[&[1]]);
        let err = ChainComplexQ::new(vec![vec!["a".into()], vec!["b".into()], vec!["c".into()]], vec![d1, d2]);
        assert_eq!(err, Err(ChainError::BoundaryNotSquareZero { degree: 2 }));
    }

    #[test]
    fn cone_examples() {
        let c = circle();
        assert_eq!(ChainMapQ::identity(&c).cone().homology_ranks(), vec![0, 0, 0]);
        let z = ChainMapQ::zero(&c, &c);
        assert_eq!(z.cone().homology_ranks(), vec![1, 2, 1]);
        // A point into an interval.
        let pt = ChainComplexQ::from_dims(&[1]);
        let interval = ChainComplexQ::new(
            vec![vec!["0".into(), "1".into()], vec!["01".into()]],
            vec![QMatrix::from_i64(&[&[-1], &[1]])],
        )
        .unwrap();
        let inc = ChainMapQ::new(pt, interval, vec![QMatrix::from_i64(&[&[1], &[0]])]).unwrap();
        assert_eq!(inc.cone().homology_ranks(), vec![0, 0]);
        assert_eq!(inc.induced_rank(0), 1);
    }

    #[test]
    fn non_chain_map_is_rejected() {
        let pt = ChainComplexQ::from_dims(&[1, 1]);
        let c = circle();
        let bad = ChainMapQ::new(pt, c, vec![QMatrix::zeros(3, 1), QMatrix::from_i64(&[&[1], &[0], &[0]])]);
        assert_eq!(bad, Err(ChainError::NotAChainMap { degree: 1 }));
    }
}
