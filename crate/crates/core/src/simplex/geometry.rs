use num_traits::{One, Signed, Zero};

use super::SimplexError;
use crate::linalg::QMatrix;
use crate::Rational;

/// A point of `ℚ^N`.
pub type Point = Vec<Rational>;

pub fn point_from_i64(coords: &[i64]) -> Point {
    coords.iter().map(|&c| Rational::from_integer(c.into())).collect()
}

pub fn lerp(x: &[Rational], y: &[Rational], t: &Rational) -> Point {
    let s = Rational::one() - t;
    x.iter().zip(y).map(|(a, b)| &s * a + t * b).collect()
}

/// An open simplex, identified by its vertex set. Vertices are kept in
/// lexicographic order; the sign of the sorting permutation is returned by
/// [`OpenSimplex::oriented`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpenSimplex {
    vertices: Vec<Point>,
}

/// Sign of the permutation sorting `items`, or `None` on repeats.
fn sort_sign<T: Ord + Clone>(items: &[T]) -> Option<(Vec<T>, i32)> {
    let mut v: Vec<T> = items.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

impl OpenSimplex {
    pub fn new(vertices: Vec<Point>) -> Result<Self, SimplexError> {
        Self::oriented(vertices).map(|(s, _)| s)
    }

    /// Builds the simplex and reports the orientation sign of the given order
    /// relative to the stored one.
    pub fn oriented(vertices: Vec<Point>) -> Result<(Self, i32), SimplexError> {
        let Some(first) = vertices.first() else { return Err(SimplexError::Empty) };
        let n = first.len();
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(SimplexError::DimensionMismatch { expected: n, found: v.len() });
        }
        let (sorted, sign) = sort_sign(&vertices).ok_or(SimplexError::NotAffinelyIndependent)?;
        let s = Self { vertices: sorted };
        if !s.affinely_independent() {
            return Err(SimplexError::NotAffinelyIndependent);
        }
        Ok((s, sign))
    }

    /// Skips the independence check; callers guarantee it.
    pub(crate) fn from_sorted_unchecked(vertices: Vec<Point>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Self { vertices }
    }

    fn affinely_independent(&self) -> bool {
        let a0 = &self.vertices[0];
        let diffs: Vec<Vec<Rational>> =
            self.vertices[1..].iter().map(|v| v.iter().zip(a0).map(|(x, y)| x - y).collect()).collect();
        if diffs.is_empty() {
            return true;
        }
        QMatrix::from_rows(diffs, a0.len()).rank() == self.vertices.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// All faces, including the simplex itself.
    pub fn faces(&self) -> Vec<OpenSimplex> {
        let k = self.vertices.len();
        (1u64..(1 << k))
            .map(|mask| {
                OpenSimplex::from_sorted_unchecked(
                    (0..k).filter(|i| mask >> i & 1 == 1).map(|i| self.vertices[i].clone()).collect(),
                )
            })
            .collect()
    }

    /// The codimension-one faces in boundary order: the `i`-th omits vertex `i`.
    pub fn facets(&self) -> Vec<OpenSimplex> {
        if self.vertices.len() == 1 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|i| {
                let mut v = self.vertices.clone();
                v.remove(i);
                OpenSimplex::from_sorted_unchecked(v)
            })
            .collect()
    }

    pub fn is_face_of(&self, other: &OpenSimplex) -> bool {
        self.vertices.iter().all(|v| other.vertices.contains(v))
    }

    pub fn barycenter(&self) -> Point {
        let k = Rational::from_integer((self.vertices.len() as i64).into());
        let n = self.ambient();
        (0..n).map(|j| self.vertices.iter().map(|v| &v[j]).sum::<Rational>() / &k).collect()
    }

    /// Barycentric coordinates of `x` in the affine hull, `None` when `x` is
    /// off the hull.
    pub fn barycentric(&self, x: &[Rational]) -> Option<Vec<Rational>> {
        if x.len() != self.ambient() {
            return None;
        }
        let k = self.vertices.len();
        let n = self.ambient();
        let mut m = QMatrix::zeros(n + 1, k);
        for (j, v) in self.vertices.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, v[i].clone());
            }
            m.set(n, j, Rational::one());
        }
        let mut rhs = x.to_vec();
        rhs.push(Rational::one());
        m.solve(&rhs)
    }

    fn in_bounding_box(&self, x: &[Rational]) -> bool {
        x.len() == self.ambient()
            && x.iter()
                .enumerate()
                .all(|(j, c)| self.vertices.iter().any(|v| &v[j] <= c) && self.vertices.iter().any(|v| &v[j] >= c))
    }

    /// `x` lies in the open simplex.
    pub fn contains(&self, x: &[Rational]) -> bool {
        self.in_bounding_box(x) && self.barycentric(x).is_some_and(|l| l.iter().all(Signed::is_positive))
    }

    /// `x` lies in the closed simplex.
    pub fn closure_contains(&self, x: &[Rational]) -> bool {
        self.in_bounding_box(x) && self.barycentric(x).is_some_and(|l| l.iter().all(|v| !v.is_negative()))
    }

    pub fn point_at(&self, weights: &[Rational]) -> Point {
        let n = self.ambient();
        (0..n)
            .map(|j| self.vertices.iter().zip(weights).filter(|(_, w)| !w.is_zero()).map(|(v, w)| &v[j] * w).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Point {
        point_from_i64(c)
    }

    #[test]
    fn face_counts() {
        let a = OpenSimplex::new(vec![p(&[0])]).unwrap();
        assert_eq!(a.faces(), vec![a.clone()]);
        let e = OpenSimplex::new(vec![p(&[0]), p(&[1])]).unwrap();
        assert_eq!(e.faces().len(), 3);
        let t = OpenSimplex::new(vec![p(&[0, 0]), p(&[1, 0]), p(&[0, 1])]).unwrap();
        assert_eq!(t.faces().len(), 7);
    }

    #[test]
    fn independence_and_orientation() {
        assert_eq!(
            OpenSimplex::new(vec![p(&[0, 0]), p(&[1, 1]), p(&[2, 2])]),
            Err(SimplexError::NotAffinelyIndependent)
        );
        let (_, s) = OpenSimplex::oriented(vec![p(&[1]), p(&[0])]).unwrap();
        assert_eq!(s, -1);
        assert_eq!(OpenSimplex::new(vec![p(&[0]), p(&[0])]), Err(SimplexError::NotAffinelyIndependent));
    }

    #[test]
    fn membership() {
        let t = OpenSimplex::new(vec![p(&[0, 0]), p(&[2, 0]), p(&[0, 2])]).unwrap();
        assert!(t.contains(&t.barycenter()));
        assert!(!t.contains(&p(&[1, 0])));
        assert!(t.closure_contains(&p(&[1, 0])));
        assert!(!t.closure_contains(&p(&[2, 2])));
    }
}
