use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::geometry::{OpenSimplex, Point};
use super::lp::{maximize, LpOutcome};
use super::SimplexError;
use crate::sa_domain::{format_rational, parse_rational};
use crate::Rational;

/// A finite set of open simplices satisfying the complex condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeomComplex {
    ambient: usize,
    simplices: BTreeSet<OpenSimplex>,
}

/// Closures of `a` and `b` meet in the closure of their common face (or not at all).
pub fn intersect_properly(a: &OpenSimplex, b: &OpenSimplex) -> bool {
    if a == b {
        return true;
    }
    let n = a.ambient();
    // Disjoint bounding boxes settle most pairs without an LP.
    for j in 0..n {
        let (amin, amax) = axis_range(a, j);
        let (bmin, bmax) = axis_range(b, j);
        if amax < bmin || bmax < amin {
            return true;
        }
    }
    let (ka, kb) = (a.vertices().len(), b.vertices().len());
    let common: Vec<bool> = a.vertices().iter().map(|v| b.vertices().contains(v)).collect();
    // Variables λ (over a) then μ (over b): Σλa − Σμb = 0, Σλ = 1, Σμ = 1.
    let mut rows = Vec::with_capacity(n + 2);
    for j in 0..n {
        let mut row: Vec<Rational> = a.vertices().iter().map(|v| v[j].clone()).collect();
        row.extend(b.vertices().iter().map(|v| -v[j].clone()));
        rows.push(row);
    }
    let ones = |lo: usize, hi: usize| -> Vec<Rational> {
        (0..ka + kb)
            .map(|i| if (lo..hi).contains(&i) { Rational::from_integer(1.into()) } else { Rational::zero() })
            .collect()
    };
    rows.push(ones(0, ka));
    rows.push(ones(ka, ka + kb));
    let mut rhs = vec![Rational::zero(); n];
    rhs.push(Rational::from_integer(1.into()));
    rhs.push(Rational::from_integer(1.into()));
    let mut cost = vec![Rational::zero(); ka + kb];
    for (i, &c) in common.iter().enumerate() {
        if !c {
            cost[i] = Rational::from_integer(1.into());
        }
    }
    match maximize(&rows, &rhs, &cost) {
        LpOutcome::Infeasible => true,
        LpOutcome::Optimal { value, .. } => common.iter().any(|&c| c) && value.is_zero(),
        LpOutcome::Unbounded => unreachable!("barycentric weights are bounded"),
    }
}

fn axis_range(s: &OpenSimplex, j: usize) -> (&Rational, &Rational) {
    let it = s.vertices().iter().map(|v| &v[j]);
    (it.clone().min().unwrap(), it.max().unwrap())
}

/// Checks the complex condition pairwise; reports the first offending pair.
pub fn validate_complex(simplices: &[OpenSimplex]) -> Result<(), SimplexError> {
    for (i, a) in simplices.iter().enumerate() {
        for b in &simplices[i + 1..] {
            if a == b {
                return Err(SimplexError::Duplicate(Box::new(a.clone())));
            }
            if a.ambient() != b.ambient() {
                return Err(SimplexError::DimensionMismatch { expected: a.ambient(), found: b.ambient() });
            }
            if !intersect_properly(a, b) {
                return Err(SimplexError::NotAComplex(Box::new((a.clone(), b.clone()))));
            }
        }
    }
    Ok(())
}

impl GeomComplex {
    pub fn new(ambient: usize, simplices: Vec<OpenSimplex>) -> Result<Self, SimplexError> {
        if let Some(s) = simplices.iter().find(|s| s.ambient() != ambient) {
            return Err(SimplexError::DimensionMismatch { expected: ambient, found: s.ambient() });
        }
        validate_complex(&simplices)?;
        Ok(Self { ambient, simplices: simplices.into_iter().collect() })
    }

    pub fn empty(ambient: usize) -> Self {
        Self { ambient, simplices: BTreeSet::new() }
    }

    pub(crate) fn from_set_unchecked(ambient: usize, simplices: BTreeSet<OpenSimplex>) -> Self {
        Self { ambient, simplices }
    }

    /// Any subset of a complex is a complex.
    pub fn sub(&self, keep: impl Fn(&OpenSimplex) -> bool) -> GeomComplex {
        Self { ambient: self.ambient, simplices: self.simplices.iter().filter(|s| keep(s)).cloned().collect() }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &OpenSimplex> {
        self.simplices.iter()
    }

    pub fn contains(&self, s: &OpenSimplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().map(OpenSimplex::dim).max()
    }

    /// Simplices of dimension `k`, in the canonical order.
    pub fn of_dim(&self, k: usize) -> Vec<&OpenSimplex> {
        self.simplices.iter().filter(|s| s.dim() == k).collect()
    }

    pub fn is_subset_of(&self, other: &GeomComplex) -> bool {
        self.simplices.is_subset(&other.simplices)
    }

    pub fn is_face_closed(&self) -> bool {
        self.simplices.iter().all(|s| s.faces().iter().all(|f| self.simplices.contains(f)))
    }

    /// All faces of all simplices.
    pub fn closure(&self) -> GeomComplex {
        let simplices = self.simplices.iter().flat_map(|s| s.faces()).collect();
        Self { ambient: self.ambient, simplices }
    }

    /// Simplices all of whose faces belong to the complex.
    pub fn closed_core(&self) -> GeomComplex {
        self.sub(|s| s.faces().iter().all(|f| self.simplices.contains(f)))
    }

    /// The unique open simplex containing `x`.
    pub fn carrier(&self, x: &[Rational]) -> Result<&OpenSimplex, SimplexError> {
        if x.len() != self.ambient {
            return Err(SimplexError::DimensionMismatch { expected: self.ambient, found: x.len() });
        }
        self.simplices.iter().find(|s| s.contains(x)).ok_or(SimplexError::NotInPolyhedron)
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        self.carrier(x).is_ok()
    }

    /// Distinct vertices in lexicographic order.
    pub fn vertices(&self) -> Vec<Point> {
        let set: BTreeSet<&Point> = self.simplices.iter().flat_map(|s| s.vertices()).collect();
        set.into_iter().cloned().collect()
    }

    /// Image under the injective affine map `x ↦ A x + b`.
    pub fn map_affine(&self, a: &[Vec<Rational>], b: &[Rational]) -> Result<GeomComplex, SimplexError> {
        let f = |p: &Point| -> Point {
            a.iter().zip(b).map(|(row, bi)| row.iter().zip(p).map(|(x, y)| x * y).sum::<Rational>() + bi).collect()
        };
        let simplices = self
            .simplices
            .iter()
            .map(|s| OpenSimplex::new(s.vertices().iter().map(f).collect()))
            .collect::<Result<BTreeSet<_>, _>>()?;
        Ok(Self { ambient: b.len(), simplices })
    }

    pub fn to_json(&self) -> ComplexJson {
        let verts = self.vertices();
        let index: BTreeMap<&Point, usize> = verts.iter().enumerate().map(|(i, v)| (v, i)).collect();
        ComplexJson {
            ambient: self.ambient,
            simplices: self.simplices.iter().map(|s| s.vertices().iter().map(|v| index[v]).collect()).collect(),
            vertices: verts.iter().map(|v| v.iter().map(format_rational).collect()).collect(),
        }
    }

    pub fn from_json(raw: &ComplexJson) -> Result<GeomComplex, SimplexError> {
        let verts: Vec<Point> = raw
            .vertices
            .iter()
            .map(|v| {
                v.iter()
                    .map(|c| parse_rational(c).ok_or_else(|| SimplexError::Json(format!("bad rational `{c}`"))))
                    .collect::<Result<Point, _>>()
            })
            .collect::<Result<_, _>>()?;
        let simplices = raw
            .simplices
            .iter()
            .map(|idx| {
                let pts = idx
                    .iter()
                    .map(|&i| verts.get(i).cloned().ok_or(SimplexError::BadVertexIndex(i)))
                    .collect::<Result<Vec<_>, _>>()?;
                OpenSimplex::new(pts)
            })
            .collect::<Result<Vec<_>, _>>()?;
        GeomComplex::new(raw.ambient, simplices)
    }

    pub fn parse_json(text: &str) -> Result<GeomComplex, SimplexError> {
        let raw: ComplexJson = serde_json::from_str(text).map_err(|e| SimplexError::Json(e.to_string()))?;
        Self::from_json(&raw)
    }
}

/// Wire form `{"ambient":N,"simplices":[[i,..],..],"vertices":[["p/q",..],..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub ambient: usize,
    pub simplices: Vec<Vec<usize>>,
    pub vertices: Vec<Vec<String>>,
}

/// Face-closed Kuhn triangulation of the grid `∏ [0, sizes_i]` with unit cells.
pub fn kuhn_triangulation(sizes: &[usize]) -> GeomComplex {
    let d = sizes.len();
    let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
    for k in 0..d {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=k).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    let mut corners: Vec<Vec<usize>> = vec![Vec::new()];
    for &s in sizes {
        corners = corners
            .into_iter()
            .flat_map(|c| {
                (0..s).map(move |i| {
                    let mut c = c.clone();
                    c.push(i);
                    c
                })
            })
            .collect();
    }
    let mut simplices = BTreeSet::new();
    for corner in &corners {
        for perm in &perms {
            let mut cur: Vec<i64> = corner.iter().map(|&c| c as i64).collect();
            let mut verts = vec![cur.clone()];
            for &axis in perm {
                cur[axis] += 1;
                verts.push(cur.clone());
            }
            let pts: Vec<Point> = verts.iter().map(|v| super::geometry::point_from_i64(v)).collect();
            let top = OpenSimplex::new(pts).expect("Kuhn simplices are nondegenerate");
            simplices.extend(top.faces());
        }
    }
    GeomComplex { ambient: d, simplices }
}
