use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::complex::GeomComplex;
use super::geometry::{lerp, OpenSimplex, Point};
use super::SimplexError;
use crate::Rational;

/// Chains `σ_0 < … < σ_n` of faces with `σ_n ∈ K`, each turned into the
/// simplex spanned by the barycenters.
pub fn barycentric_subdivision(k: &GeomComplex) -> GeomComplex {
    let mut out = BTreeSet::new();
    for top in k.iter() {
        let mut chain = vec![top.barycenter()];
        extend_chains(top, &mut chain, &mut out);
    }
    GeomComplex::from_set_unchecked(k.ambient(), out)
}

fn extend_chains(current: &OpenSimplex, chain: &mut Vec<Point>, out: &mut BTreeSet<OpenSimplex>) {
    let mut verts = chain.clone();
    verts.sort();
    out.insert(OpenSimplex::from_sorted_unchecked(verts));
    for face in current.faces() {
        if face.dim() < current.dim() {
            chain.push(face.barycenter());
            extend_chains(&face, chain, out);
            chain.pop();
        }
    }
}

/// The retraction of `|K|` onto `|cc(β(K))|` together with the data it needs.
#[derive(Clone, Debug)]
pub struct Retraction {
    beta: GeomComplex,
    core: GeomComplex,
    /// Barycenter `b(σ)` of each `σ ∈ K̄`, flagged by `σ ∈ K`.
    in_k: BTreeMap<Point, bool>,
}

impl Retraction {
    pub fn new(k: &GeomComplex) -> Self {
        let beta = barycentric_subdivision(k);
        let core = beta.closed_core();
        let in_k = k.closure().iter().map(|s| (s.barycenter(), k.contains(s))).collect();
        Self { beta, core, in_k }
    }

    pub fn subdivision(&self) -> &GeomComplex {
        &self.beta
    }

    pub fn core(&self) -> &GeomComplex {
        &self.core
    }

    /// `r(x) = Σ_{σ∈K} λ_σ(x) b(σ) / Λ(x)` evaluated in the carrier of `x` in `β(K)`.
    pub fn retract(&self, x: &[Rational]) -> Result<Point, SimplexError> {
        let carrier = self.beta.carrier(x)?;
        let lambda = carrier.barycentric(x).expect("carrier contains x");
        let mut total = Rational::zero();
        let mut acc = vec![Rational::zero(); x.len()];
        for (v, l) in carrier.vertices().iter().zip(&lambda) {
            if self.in_k[v] {
                total += l;
                for (a, c) in acc.iter_mut().zip(v) {
                    *a += l * c;
                }
            }
        }
        // The last barycenter of every chain lies in K, so Λ(x) > 0.
        let inv = Rational::one() / total;
        Ok(acc.into_iter().map(|a| a * &inv).collect())
    }

    /// `H(x, t) = (1 − t) x + t r(x)`.
    pub fn homotopy(&self, x: &[Rational], t: &Rational) -> Result<Point, SimplexError> {
        if t < &Rational::zero() || t > &Rational::one() {
            return Err(SimplexError::TimeOutOfRange);
        }
        let r = self.retract(x)?;
        Ok(lerp(x, &r, t))
    }
}

pub fn closed_core(k: &GeomComplex) -> GeomComplex {
    k.closed_core()
}

pub fn retract(k: &GeomComplex, x: &[Rational]) -> Result<Point, SimplexError> {
    Retraction::new(k).retract(x)
}

pub fn homotopy(k: &GeomComplex, x: &[Rational], t: &Rational) -> Result<Point, SimplexError> {
    Retraction::new(k).homotopy(x, t)
}

#[cfg(test)]
mod tests {
    use super::super::geometry::point_from_i64 as p;
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn s(vs: &[Point]) -> OpenSimplex {
        OpenSimplex::new(vs.to_vec()).unwrap()
    }

    fn open_interval() -> GeomComplex {
        GeomComplex::new(1, vec![s(&[p(&[0]), p(&[1])])]).unwrap()
    }

    #[test]
    fn subdivision_of_closed_interval() {
        let k = open_interval().closure();
        let beta = barycentric_subdivision(&k);
        let half = vec![q(1, 2)];
        let expected: BTreeSet<OpenSimplex> = [
            s(&[p(&[0])]),
            s(&[p(&[1])]),
            s(&[half.clone()]),
            s(&[p(&[0]), half.clone()]),
            s(&[half.clone(), p(&[1])]),
        ]
        .into_iter()
        .collect();
        assert_eq!(beta.iter().cloned().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn subdivision_of_open_interval_and_core() {
        let beta = barycentric_subdivision(&open_interval());
        let half = vec![q(1, 2)];
        let expected: BTreeSet<OpenSimplex> =
            [s(&[half.clone()]), s(&[p(&[0]), half.clone()]), s(&[half.clone(), p(&[1])])].into_iter().collect();
        assert_eq!(beta.iter().cloned().collect::<BTreeSet<_>>(), expected);
        let core = beta.closed_core();
        assert_eq!(core.iter().cloned().collect::<Vec<_>>(), vec![s(&[half])]);
    }

    #[test]
    fn single_vertex_is_fixed() {
        let v = GeomComplex::new(2, vec![s(&[p(&[3, 4])])]).unwrap();
        assert_eq!(barycentric_subdivision(&v), v);
    }

    #[test]
    fn retraction_examples() {
        let k = open_interval();
        let r = Retraction::new(&k);
        assert_eq!(r.retract(&[q(1, 4)]).unwrap(), vec![q(1, 2)]);
        assert_eq!(r.retract(&[q(1, 2)]).unwrap(), vec![q(1, 2)]);
        assert_eq!(r.homotopy(&[q(1, 4)], &q(1, 2)).unwrap(), vec![q(3, 8)]);
        assert_eq!(r.homotopy(&[q(1, 4)], &q(0, 1)).unwrap(), vec![q(1, 4)]);
        assert_eq!(r.retract(&[q(0, 1)]), Err(SimplexError::NotInPolyhedron));
        let closed = Retraction::new(&k.closure());
        for x in [q(0, 1), q(1, 7), q(1, 1)] {
            assert_eq!(closed.retract(&[x.clone()]).unwrap(), vec![x]);
        }
    }

    #[test]
    fn half_open_triangle() {
        // Triangle with one closed edge: points retract onto the closed core
        // of the subdivision.
        let t = s(&[p(&[0, 0]), p(&[4, 0]), p(&[0, 4])]);
        let e = s(&[p(&[0, 0]), p(&[4, 0])]);
        let k = GeomComplex::new(2, vec![t, e, s(&[p(&[0, 0])]), s(&[p(&[4, 0])])]).unwrap();
        let r = Retraction::new(&k);
        let x = vec![q(1, 1), q(5, 2)];
        let y = r.retract(&x).unwrap();
        assert!(r.core().contains_point(&y));
        assert_eq!(r.retract(&y).unwrap(), y);
    }
}
