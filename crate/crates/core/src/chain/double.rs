use super::complex::ChainComplexQ;
use super::ChainError;
use crate::linalg::QMatrix;
use crate::Rational;

/// A first-quadrant double complex with commuting squares.
///
/// `dh(p, q) : D_{p,q} → D_{p−1,q}` and `dv(p, q) : D_{p,q} → D_{p,q−1}`.
/// The total differential is `d = d_h + (−1)^p d_v`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleComplexQ {
    labels: Vec<Vec<Vec<String>>>,
    dh: Vec<Vec<QMatrix>>,
    dv: Vec<Vec<QMatrix>>,
}

impl DoubleComplexQ {
    /// `labels[p][q]` spans `D_{p,q}`; `dh[p][q]` and `dv[p][q]` are the
    /// differentials leaving it (ignored at `p = 0`, resp. `q = 0`).
    pub fn new(
        labels: Vec<Vec<Vec<String>>>,
        dh: Vec<Vec<QMatrix>>,
        dv: Vec<Vec<QMatrix>>,
    ) -> Result<Self, ChainError> {
        let d = Self { labels, dh, dv };
        d.validate()?;
        Ok(d)
    }

    pub fn columns(&self) -> usize {
        self.labels.len()
    }

    pub fn rows(&self) -> usize {
        self.labels.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.labels.get(p).and_then(|c| c.get(q)).map_or(0, Vec::len)
    }

    fn labels_at(&self, p: usize, q: usize) -> &[String] {
        self.labels.get(p).and_then(|c| c.get(q)).map_or(&[], |l| l.as_slice())
    }

    pub fn horizontal(&self, p: usize, q: usize) -> QMatrix {
        let rows = if p == 0 { 0 } else { self.dim(p - 1, q) };
        match self.dh.get(p).and_then(|c| c.get(q)) {
            Some(m) if p > 0 => m.clone(),
            _ => QMatrix::zeros(rows, self.dim(p, q)),
        }
    }

    pub fn vertical(&self, p: usize, q: usize) -> QMatrix {
        let rows = if q == 0 { 0 } else { self.dim(p, q - 1) };
        match self.dv.get(p).and_then(|c| c.get(q)) {
            Some(m) if q > 0 => m.clone(),
            _ => QMatrix::zeros(rows, self.dim(p, q)),
        }
    }

    fn validate(&self) -> Result<(), ChainError> {
        let (cols, rows) = (self.columns(), self.rows());
        for p in 0..cols {
            for q in 0..rows {
                let h = self.horizontal(p, q);
                let v = self.vertical(p, q);
                if p > 0 && (h.rows(), h.cols()) != (self.dim(p - 1, q), self.dim(p, q)) {
                    return Err(ChainError::Shape(format!("horizontal map at ({p},{q})")));
                }
                if q > 0 && (v.rows(), v.cols()) != (self.dim(p, q - 1), self.dim(p, q)) {
                    return Err(ChainError::Shape(format!("vertical map at ({p},{q})")));
                }
                if p > 1 && !self.horizontal(p - 1, q).mul(&h).is_zero() {
                    return Err(ChainError::SignConventionViolation(format!("rows: d_h² ≠ 0 at ({p},{q})")));
                }
                if q > 1 && !self.vertical(p, q - 1).mul(&v).is_zero() {
                    return Err(ChainError::SignConventionViolation(format!("columns: d_v² ≠ 0 at ({p},{q})")));
                }
                if p > 0 && q > 0 {
                    let hv = self.horizontal(p, q - 1).mul(&v);
                    let vh = self.vertical(p - 1, q).mul(&h);
                    if hv != vh {
                        return Err(ChainError::SignConventionViolation(format!(
                            "square at ({p},{q}) does not commute"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `Tot_n = ⊕_{p+q=n} D_{p,q}`, ordered by increasing `p`.
    pub fn total_complex(&self) -> Result<ChainComplexQ, ChainError> {
        let (cols, rows) = (self.columns(), self.rows());
        if cols == 0 || rows == 0 {
            return Ok(ChainComplexQ::zero());
        }
        let top = cols + rows - 2;
        let blocks = |n: usize| -> Vec<(usize, usize)> {
            (0..=n).filter(|&p| p < cols && n - p < rows).map(|p| (p, n - p)).collect()
        };
        let mut labels = Vec::new();
        for n in 0..=top {
            labels.push(
                blocks(n)
                    .into_iter()
                    .flat_map(|(p, q)| self.labels_at(p, q).iter().map(move |s| format!("({p},{q}):{s}")))
                    .collect::<Vec<_>>(),
            );
        }
        let offsets = |n: usize| -> Vec<((usize, usize), usize)> {
            let mut off = 0;
            blocks(n)
                .into_iter()
                .map(|b| {
                    let o = off;
                    off += self.dim(b.0, b.1);
                    (b, o)
                })
                .collect()
        };
        let minus_one = -Rational::from_integer(1.into());
        let mut boundaries = Vec::new();
        for n in 1..=top {
            let mut m = QMatrix::zeros(labels[n - 1].len(), labels[n].len());
            let src = offsets(n);
            let dst = offsets(n - 1);
            let find = |b: (usize, usize)| dst.iter().find(|(bb, _)| *bb == b).map(|(_, o)| *o);
            for &((p, q), col) in &src {
                if p > 0 {
                    if let Some(row) = find((p - 1, q)) {
                        m.set_block(row, col, &self.horizontal(p, q));
                    }
                }
                if q > 0 {
                    if let Some(row) = find((p, q - 1)) {
                        let v = self.vertical(p, q);
                        m.set_block(row, col, &if p % 2 == 1 { v.scale(&minus_one) } else { v });
                    }
                }
            }
            boundaries.push(m);
        }
        ChainComplexQ::new(labels, boundaries).map_err(|e| match e {
            ChainError::BoundaryNotSquareZero { degree } => {
                ChainError::SignConventionViolation(format!("total differential squares to nonzero in degree {degree}"))
            }
            other => other,
        })
    }

    /// `Σ (−1)^{p+q} dim D_{p,q}`.
    pub fn euler_characteristic(&self) -> i64 {
        let mut chi = 0;
        for p in 0..self.columns() {
            for q in 0..self.rows() {
                let d = self.dim(p, q) as i64;
                chi += if (p + q) % 2 == 0 { d } else { -d };
            }
        }
        chi
    }

    /// A single row (`q = 0`) given by a chain complex in the `p` direction.
    pub fn from_row(c: &ChainComplexQ) -> Self {
        let labels = (0..c.len()).map(|p| vec![c.labels(p).to_vec()]).collect();
        let dh = (0..c.len()).map(|p| vec![c.boundary(p)]).collect();
        let dv = (0..c.len()).map(|p| vec![QMatrix::zeros(0, c.dim(p))]).collect();
        Self { labels, dh, dv }
    }

    /// A single column (`p = 0`) given by a chain complex in the `q` direction.
    pub fn from_column(c: &ChainComplexQ) -> Self {
        let labels = vec![(0..c.len()).map(|q| c.labels(q).to_vec()).collect()];
        let dh = vec![(0..c.len()).map(|q| QMatrix::zeros(0, c.dim(q))).collect()];
        let dv = vec![(0..c.len()).map(|q| c.boundary(q)).collect()];
        Self { labels, dh, dv }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(name: &str) -> Vec<String> {
        vec![name.to_string()]
    }

    #[test]
    fn single_row_and_column() {
        let c = ChainComplexQ::new(
            vec![vec!["a".into(), "b".into()], vec!["e".into()]],
            vec![QMatrix::from_i64(&[&[-1], &[1]])],
        )
        .unwrap();
        let row = DoubleComplexQ::from_row(&c).total_complex().unwrap();
        assert_eq!(row.homology_ranks(), c.homology_ranks());
        let col = DoubleComplexQ::from_column(&c).total_complex().unwrap();
        assert_eq!(col.homology_ranks(), c.homology_ranks());
    }

    #[test]
    fn identity_square_is_acyclic() {
        let id = QMatrix::identity(1);
        let z = QMatrix::zeros(0, 1);
        let d = DoubleComplexQ::new(
            vec![vec![one("a"), one("b")], vec![one("c"), one("d")]],
            vec![vec![z.clone(), z.clone()], vec![id.clone(), id.clone()]],
            vec![vec![z.clone(), id.clone()], vec![z, id]],
        )
        .unwrap();
        let tot = d.total_complex().unwrap();
        assert_eq!(tot.homology_ranks(), vec![0, 0, 0]);
        assert_eq!(tot.euler_characteristic(), d.euler_characteristic());
    }

    #[test]
    fn anticommuting_square_is_rejected() {
        let id = QMatrix::identity(1);
        let z = QMatrix::zeros(0, 1);
        let neg = id.scale(&-Rational::from_integer(1.into()));
        let err = DoubleComplexQ::new(
            vec![vec![one("a"), one("b")], vec![one("c"), one("d")]],
            vec![vec![z.clone(), z.clone()], vec![id.clone(), neg]],
            vec![vec![z.clone(), id.clone()], vec![z, id]],
        );
        assert!(matches!(err, Err(ChainError::SignConventionViolation(_))));
    }
}
