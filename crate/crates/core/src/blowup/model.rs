use serde::Serialize;

use super::curve::CurveSpec;
use crate::chain::{ChainComplexQ, ChainError};
use crate::linalg::QMatrix;
use crate::Rational;

/// Which rapid-decay space a cell model presents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RdVariant {
    /// `B∘`: each pole circle carries `d` boundary arcs.
    Bcirc,
    /// `B♯`: each pole circle carries `d` boundary points.
    Bsharp,
}

/// Boundary structure over one puncture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircleModel {
    pub puncture: String,
    /// Pole order; zero for punctures in `Z_f`.
    pub order: u32,
    /// Closed arcs (`B∘`) or isolated points (`B♯`) lying in the relative part.
    pub boundary_pieces: usize,
}

/// A finite CW complex homotopy equivalent to the blown-up curve, with the
/// subcomplex `Y ∪ ∂B` marked.
///
/// Cells: a base vertex; per puncture a subdivided circle joined to the base
/// by a cut edge; per marked point a vertex joined by a spur edge; one
/// 2-cell whose boundary runs once around every circle (the cut edges cancel).
#[derive(Clone, Debug, Serialize)]
pub struct CurveRdModel {
    pub variant: RdVariant,
    pub circles: Vec<CircleModel>,
    pub marked: usize,
    cells: [Vec<String>; 3],
    /// `∂_1` and `∂_2` on the full cell basis.
    #[serde(skip)]
    d1: QMatrix,
    #[serde(skip)]
    d2: QMatrix,
    relative: [Vec<bool>; 3],
}

struct Builder {
    cells: [Vec<String>; 3],
    edges: Vec<(usize, usize)>,
    relative: [Vec<bool>; 3],
    face_edges: Vec<usize>,
}

impl Builder {
    fn vertex(&mut self, name: String, rel: bool) -> usize {
        self.cells[0].push(name);
        self.relative[0].push(rel);
        self.cells[0].len() - 1
    }

    fn edge(&mut self, name: String, from: usize, to: usize, rel: bool) -> usize {
        self.cells[1].push(name);
        self.relative[1].push(rel);
        self.edges.push((from, to));
        self.cells[1].len() - 1
    }
}

impl CurveRdModel {
    pub fn build(spec: &CurveSpec, variant: RdVariant) -> CurveRdModel {
        let mut b = Builder {
            cells: Default::default(),
            edges: Vec::new(),
            relative: Default::default(),
            face_edges: Vec::new(),
        };
        let base = b.vertex("v0".into(), false);
        let mut circles = Vec::new();
        for (c, p) in spec.punctures().iter().enumerate() {
            let d = spec.order_at(p) as usize;
            let (verts, rel_v, rel_e): (usize, Vec<bool>, Vec<bool>) = match (d, variant) {
                // A circle mapping into ℂ is not part of the boundary.
                (0, _) => (1, vec![false], vec![false]),
                // Alternating good and bad arcs; good arcs are closed and relative.
                (d, RdVariant::Bcirc) => (2 * d, vec![true; 2 * d], (0..2 * d).map(|k| k % 2 == 0).collect()),
                // `d` relative points joined by open edges.
                (d, RdVariant::Bsharp) => (d, vec![true; d], vec![false; d]),
            };
            let first = b.cells[0].len();
            for k in 0..verts {
                b.vertex(format!("S{c}.p{k}"), rel_v[k]);
            }
            for k in 0..verts {
                let e = b.edge(format!("S{c}.e{k}"), first + k, first + (k + 1) % verts, rel_e[k]);
                b.face_edges.push(e);
            }
            b.edge(format!("cut{c}"), base, first, false);
            circles.push(CircleModel { puncture: p.to_string(), order: d as u32, boundary_pieces: d });
        }
        for (k, y) in spec.marked().iter().enumerate() {
            let v = b.vertex(format!("y{k}={y}"), true);
            b.edge(format!("spur{k}"), base, v, false);
        }
        b.cells[2].push("F".into());
        b.relative[2].push(false);
        if spec.punctures().is_empty() {
            // The whole sphere: the 2-cell is attached to the base point.
            b.face_edges.clear();
        }

        let (nv, ne) = (b.cells[0].len(), b.cells[1].len());
        let mut d1 = QMatrix::zeros(nv, ne);
        for (j, &(from, to)) in b.edges.iter().enumerate() {
            if from != to {
                d1.add_to(from, j, &-Rational::from_integer(1.into()));
                d1.add_to(to, j, &Rational::from_integer(1.into()));
            }
        }
        let mut d2 = QMatrix::zeros(ne, 1);
        for &e in &b.face_edges {
            d2.add_to(e, 0, &Rational::from_integer(1.into()));
        }
        CurveRdModel { variant, circles, marked: spec.marked().len(), cells: b.cells, d1, d2, relative: b.relative }
    }

    pub fn cell_counts(&self) -> [usize; 3] {
        [self.cells[0].len(), self.cells[1].len(), self.cells[2].len()]
    }

    pub fn euler_characteristic(&self) -> i64 {
        let [v, e, f] = self.cell_counts();
        v as i64 - e as i64 + f as i64
    }

    /// Total number of boundary arcs (`B∘`) or points (`B♯`).
    pub fn boundary_piece_count(&self) -> usize {
        self.circles.iter().map(|c| c.boundary_pieces).sum()
    }

    /// Cellular chains of the whole model.
    pub fn absolute_chains(&self) -> Result<ChainComplexQ, ChainError> {
        ChainComplexQ::new(self.cells.to_vec(), vec![self.d1.clone(), self.d2.clone()])
    }

    /// Cellular chains relative to `Y ∪ ∂B`.
    pub fn relative_chains(&self) -> Result<ChainComplexQ, ChainError> {
        let keep: Vec<Vec<usize>> =
            (0..3).map(|n| (0..self.cells[n].len()).filter(|&i| !self.relative[n][i]).collect()).collect();
        let restrict = |m: &QMatrix, rows: &[usize], cols: &[usize]| {
            let mut out = QMatrix::zeros(rows.len(), cols.len());
            for (a, &i) in rows.iter().enumerate() {
                for (c, &j) in cols.iter().enumerate() {
                    out.set(a, c, m.get(i, j).clone());
                }
            }
            out
        };
        let labels = (0..3).map(|n| keep[n].iter().map(|&i| self.cells[n][i].clone()).collect()).collect();
        ChainComplexQ::new(labels, vec![restrict(&self.d1, &keep[0], &keep[1]), restrict(&self.d2, &keep[1], &keep[2])])
    }

    /// Ranks of `H_0, H_1, H_2` of the model relative to `Y ∪ ∂B`.
    pub fn relative_ranks(&self) -> Vec<usize> {
        self.relative_chains().expect("cell model boundaries square to zero").homology_ranks()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sa_domain::{GaussianRational, RatFunc};

    fn line(marked: &[i64], f: &str) -> CurveSpec {
        CurveSpec::affine_line(
            marked.iter().map(|&m| GaussianRational::from_integer(m)).collect(),
            RatFunc::parse_in(f, &["z"]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identity_function_with_origin_marked() {
        let m = CurveRdModel::build(&line(&[0], "z"), RdVariant::Bcirc);
        assert_eq!(m.boundary_piece_count(), 1);
        assert_eq!(m.relative_ranks(), vec![0, 1, 0]);
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn power_functions() {
        for n in 1..=5 {
            for variant in [RdVariant::Bcirc, RdVariant::Bsharp] {
                let m = CurveRdModel::build(&line(&[0], &format!("z^{n}")), variant);
                assert_eq!(m.boundary_piece_count(), n);
                assert_eq!(m.relative_ranks()[1], n);
            }
        }
    }

    #[test]
    fn absolute_homology_is_the_open_curve() {
        let spec = CurveSpec::parse_json(r#"{"punctures":["0","1","inf"],"marked":["2"],"f":"1/(z*(z-1))"}"#).unwrap();
        let m = CurveRdModel::build(&spec, RdVariant::Bcirc);
        assert_eq!(m.absolute_chains().unwrap().homology_ranks(), vec![1, 2, 0]);
        assert_eq!(m.euler_characteristic(), -1);
    }

    #[test]
    fn projective_line_without_punctures() {
        let spec = CurveSpec::parse_json(r#"{"punctures":[],"marked":["0","1"],"f":"3"}"#).unwrap();
        let m = CurveRdModel::build(&spec, RdVariant::Bcirc);
        assert_eq!(m.absolute_chains().unwrap().homology_ranks(), vec![1, 0, 1]);
        assert_eq!(m.relative_ranks(), vec![0, 1, 1]);
    }
}
