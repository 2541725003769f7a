//! Twisted de Rham complex `d_f ω = dω − df∧ω` and the cohomology
//! `H¹_dR(𝔸¹, Y, f)` for polynomial `f` and finite `Y ⊂ 𝔸¹`.
//!
//! The relative complex is `k[z] → k[z]dz ⊕ k^Y`, `P ↦ ((P′ − f′P)dz, (P(y))_y)`.
//! It is truncated to `P ∈ ⟨z⁰ … z^N⟩` with codomain `⟨z⁰ … z^{N+deg f−1}⟩dz ⊕ k^Y`.
//! Ranks are exact over `ℚ(i)`: a Gaussian matrix `A + iB` has rank
//! `rank [[A, −B], [B, A]] / 2`.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::QMatrix;
use crate::sa_domain::{natural_var_order, DomainError, GPoly, GaussianRational, RatForm, RatFunc};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DerhamError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("f must be a polynomial in `z` alone")]
    NotPolynomial,
    #[error("marked point {0} listed twice")]
    DuplicatePoint(String),
    #[error("truncation {n} is below the minimum {min}")]
    TruncationTooSmall { n: usize, min: usize },
    #[error("cokernel rank changed from {first} at N={n} to {second} at N={m}")]
    NotStabilized { n: usize, first: usize, m: usize, second: usize },
}

/// `dω − df∧ω`, over the union of the variables of `ω` and `f`.
pub fn d_f_apply(omega: &RatForm, f: &RatFunc) -> RatForm {
    let mut vars: Vec<String> = omega.vars().to_vec();
    for v in f.vars() {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    vars.sort_by(|a, b| natural_var_order(a, b));
    let omega = omega.with_vars(&vars).expect("variables form a superset");
    let f = f.with_vars(&vars).expect("variables form a superset");
    let df = RatForm::function(f).d();
    &omega.d() - &df.wedge(&omega)
}

/// A relative 1-cocycle `(Q dz, (a_y)_{y ∈ Y})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    pub q: GPoly,
    pub values: Vec<GaussianRational>,
}

impl Cocycle {
    pub fn form(&self) -> RatForm {
        let z = vec!["z".to_string()];
        RatForm::monomial(RatFunc::from_poly(z, self.q.clone()), &[0]).expect("one variable")
    }
}

impl std::fmt::Display for Cocycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}", self.form())?;
        for a in &self.values {
            write!(f, ", {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleJson {
    pub form: String,
    pub values: Vec<String>,
}

impl From<&Cocycle> for CocycleJson {
    fn from(c: &Cocycle) -> Self {
        CocycleJson { form: c.form().to_string(), values: c.values.iter().map(ToString::to_string).collect() }
    }
}

/// Matrix of `P ↦ ((P′ − f′P)dz, P(Y))` on `z⁰ … z^N`.
#[derive(Clone, Debug)]
pub struct TruncatedComplex {
    f: Vec<GaussianRational>,
    marked: Vec<GaussianRational>,
    n: usize,
    re: QMatrix,
    im: QMatrix,
}

fn univariate_polynomial(f: &RatFunc) -> Result<Vec<GaussianRational>, DerhamError> {
    if f.vars().iter().any(|v| v != "z") {
        return Err(DerhamError::NotPolynomial);
    }
    let f = f.with_vars(&["z".to_string()])?;
    let p = f.as_polynomial().ok_or(DerhamError::NotPolynomial)?;
    let mut c = p.univariate_coeffs();
    while c.last().is_some_and(|x| x == &GaussianRational::from_integer(0)) {
        c.pop();
    }
    Ok(c)
}

impl TruncatedComplex {
    pub fn new(f: &RatFunc, marked: &[GaussianRational], n: usize) -> Result<Self, DerhamError> {
        let f = univariate_polynomial(f)?;
        for (i, y) in marked.iter().enumerate() {
            if marked[..i].contains(y) {
                return Err(DerhamError::DuplicatePoint(y.to_string()));
            }
        }
        let deg = f.len().saturating_sub(1);
        // f′ coefficients
        let fp: Vec<GaussianRational> =
            f.iter().enumerate().skip(1).map(|(k, c)| c * &GaussianRational::from_integer(k as i64)).collect();
        let forms = if deg == 0 { n } else { n + deg };
        let rows = forms + marked.len();
        let mut re = QMatrix::zeros(rows, n + 1);
        let mut im = QMatrix::zeros(rows, n + 1);
        let mut put = |i: usize, j: usize, v: &GaussianRational| {
            re.add_to(i, j, &v.re);
            im.add_to(i, j, &v.im);
        };
        for j in 0..=n {
            if j > 0 {
                put(j - 1, j, &GaussianRational::from_integer(j as i64));
            }
            for (k, c) in fp.iter().enumerate() {
                put(j + k, j, &-c);
            }
            for (r, y) in marked.iter().enumerate() {
                put(forms + r, j, &y.pow(j as u32));
            }
        }
        Ok(Self { f, marked: marked.to_vec(), n, re, im })
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn degree_of_f(&self) -> usize {
        self.f.len().saturating_sub(1)
    }

    /// Number of `z^k dz` basis forms in the codomain.
    pub fn form_count(&self) -> usize {
        self.re.rows() - self.marked.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.re.rows(), self.re.cols())
    }

    pub fn entry(&self, i: usize, j: usize) -> GaussianRational {
        GaussianRational::new(self.re.get(i, j).clone(), self.im.get(i, j).clone())
    }

    fn realified(&self, extra: &[(QMatrix, QMatrix)]) -> QMatrix {
        let (mut re, mut im) = (self.re.clone(), self.im.clone());
        for (r, i) in extra {
            re = re.hstack(r);
            im = im.hstack(i);
        }
        let top = re.hstack(&im.scale(&-crate::Rational::from_integer(1.into())));
        let bottom = im.hstack(&re);
        top.vstack(&bottom)
    }

    /// Rank of the matrix over `ℚ(i)`.
    pub fn rank(&self) -> usize {
        self.realified(&[]).rank() / 2
    }

    /// Dimension of the truncated cokernel.
    pub fn cokernel_rank(&self) -> usize {
        self.re.rows() - self.rank()
    }

    /// The cocycle `d_f P` for `P = Σ p_k z^k`, `k ≤ N`.
    pub fn image_of(&self, p: &[GaussianRational]) -> Cocycle {
        let rows = self.re.rows();
        let mut out = vec![GaussianRational::from_integer(0); rows];
        for (j, pj) in p.iter().enumerate().take(self.n + 1) {
            for (i, o) in out.iter_mut().enumerate() {
                *o += &(&self.entry(i, j) * pj);
            }
        }
        let values = out.split_off(self.form_count());
        Cocycle { q: GPoly::from_univariate(out), values }
    }

    /// Codomain basis vectors, in order `z⁰dz, z¹dz, …, e_{y₁}, …`, chosen
    /// greedily whenever they are independent of the image and earlier picks.
    pub fn cokernel_basis(&self) -> Vec<Cocycle> {
        let rows = self.re.rows();
        let target = self.cokernel_rank();
        let mut chosen: Vec<usize> = Vec::new();
        let mut rank = self.rank();
        for i in 0..rows {
            if chosen.len() == target {
                break;
            }
            let mut cols: Vec<(QMatrix, QMatrix)> = Vec::new();
            for &c in chosen.iter().chain(std::iter::once(&i)) {
                let mut e = QMatrix::zeros(rows, 1);
                e.set(c, 0, crate::Rational::from_integer(1.into()));
                cols.push((e, QMatrix::zeros(rows, 1)));
            }
            let r = self.realified(&cols).rank() / 2;
            if r > rank {
                rank = r;
                chosen.push(i);
            }
        }
        let forms = self.form_count();
        chosen
            .into_iter()
            .map(|i| {
                let mut values = vec![GaussianRational::from_integer(0); self.marked.len()];
                let q = if i < forms {
                    let mut c = vec![GaussianRational::from_integer(0); i + 1];
                    c[i] = GaussianRational::from_integer(1);
                    GPoly::from_univariate(c)
                } else {
                    values[i - forms] = GaussianRational::from_integer(1);
                    GPoly::zero(1)
                };
                Cocycle { q, values }
            })
            .collect()
    }
}

fn checked_pair(f: &RatFunc, marked: &[GaussianRational], n: usize) -> Result<(TruncatedComplex, usize), DerhamError> {
    let a = TruncatedComplex::new(f, marked, n)?;
    let deg = a.degree_of_f();
    let min = 2 * deg;
    if n < min {
        return Err(DerhamError::TruncationTooSmall { n, min });
    }
    let m = n + deg.max(1);
    let first = a.cokernel_rank();
    let second = TruncatedComplex::new(f, marked, m)?.cokernel_rank();
    if first != second {
        return Err(DerhamError::NotStabilized { n, first, m, second });
    }
    Ok((a, first))
}

/// `dim H¹_dR(𝔸¹, Y, f)`, checked at truncations `N` and `N + deg f`.
pub fn h1_rank(f: &RatFunc, marked: &[GaussianRational], n: usize) -> Result<usize, DerhamError> {
    checked_pair(f, marked, n).map(|(_, r)| r)
}

pub fn h1_basis(f: &RatFunc, marked: &[GaussianRational], n: usize) -> Result<Vec<Cocycle>, DerhamError> {
    checked_pair(f, marked, n).map(|(c, _)| c.cokernel_basis())
}

/// Smallest admissible truncation for `f`.
pub fn default_truncation(f: &RatFunc) -> Result<usize, DerhamError> {
    Ok((2 * univariate_polynomial(f)?.len().saturating_sub(1)).max(1))
}
