use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::gaussian::{format_rational, parse_rational};
use super::poly::QPoly;
use super::ratfunc::RatFunc;
use super::DomainError;
use crate::Rational;

/// Points within this distance of an equality clause's zero set count as on it.
pub const FLOAT_MEMBERSHIP_BAND: f64 = 1e-12;

/// One conjunction `p_1 = … = p_k = 0, q_1 > 0, …, q_l > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub eq: Vec<QPoly>,
    pub gt: Vec<QPoly>,
}

/// A finite union of sign-condition clauses over ℚ in `dim` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct SignConditionRegion {
    dim: usize,
    clauses: Vec<Clause>,
}

/// Closed rational interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    fn mul(&self, o: &Interval) -> Interval {
        let cands = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    fn scale(&self, c: &Rational) -> Interval {
        if c.is_negative() {
            Interval::new(c * &self.hi, c * &self.lo)
        } else {
            Interval::new(c * &self.lo, c * &self.hi)
        }
    }

    fn powu(&self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(Rational::from_integer(1.into()));
        }
        let lo_k = num_traits::pow(self.lo.clone(), k as usize);
        let hi_k = num_traits::pow(self.hi.clone(), k as usize);
        if k % 2 == 1 {
            Interval::new(lo_k, hi_k)
        } else if self.lo.is_negative() && self.hi.is_positive() {
            Interval::new(Rational::zero(), lo_k.max(hi_k))
        } else if self.hi.is_negative() || self.hi.is_zero() {
            Interval::new(hi_k, lo_k)
        } else {
            Interval::new(lo_k, hi_k)
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }
}

/// Natural interval extension of a polynomial over a box; encloses the range.
pub fn poly_range(p: &QPoly, bx: &[Interval]) -> Interval {
    let mut acc = Interval::point(Rational::zero());
    for (exp, c) in p.terms() {
        let mut term = Interval::point(Rational::from_integer(1.into()));
        for (iv, &k) in bx.iter().zip(exp) {
            if k > 0 {
                term = term.mul(&iv.powu(k));
            }
        }
        acc = acc.add(&term.scale(c));
    }
    acc
}

/// How a closed box relates to a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoxClass {
    Inside,
    Outside,
    Mixed,
}

impl Clause {
    fn classify_box(&self, bx: &[Interval]) -> BoxClass {
        let mut inside = true;
        for p in &self.eq {
            let r = poly_range(p, bx);
            if !r.contains_zero() {
                return BoxClass::Outside;
            }
            if !(r.lo.is_zero() && r.hi.is_zero()) {
                inside = false;
            }
        }
        for q in &self.gt {
            let r = poly_range(q, bx);
            if !r.hi.is_positive() {
                return BoxClass::Outside;
            }
            if !r.lo.is_positive() {
                inside = false;
            }
        }
        if inside {
            BoxClass::Inside
        } else {
            BoxClass::Mixed
        }
    }
}

impl SignConditionRegion {
    pub fn new(dim: usize, clauses: Vec<Clause>) -> Result<Self, DomainError> {
        for c in &clauses {
            for p in c.eq.iter().chain(&c.gt) {
                if p.nvars() != dim {
                    return Err(DomainError::DimensionMismatch { expected: dim, found: p.nvars() });
                }
            }
        }
        Ok(Self { dim, clauses })
    }

    /// The empty region (no clauses).
    pub fn empty(dim: usize) -> Self {
        Self { dim, clauses: Vec::new() }
    }

    /// `{x ∈ ℝ^d : lo_i < x_i < hi_i}`.
    pub fn open_box(lo: &[Rational], hi: &[Rational]) -> Self {
        let dim = lo.len();
        let mut gt = Vec::new();
        for i in 0..dim {
            let x = QPoly::var(dim, i);
            gt.push(&x - &QPoly::constant(dim, lo[i].clone()));
            gt.push(&QPoly::constant(dim, hi[i].clone()) - &x);
        }
        Self { dim, clauses: vec![Clause { eq: Vec::new(), gt }] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn union(&self, other: &SignConditionRegion) -> Result<Self, DomainError> {
        if self.dim != other.dim {
            return Err(DomainError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut clauses = self.clauses.clone();
        clauses.extend(other.clauses.iter().cloned());
        Ok(Self { dim: self.dim, clauses })
    }

    /// Pairwise conjunction of clauses.
    pub fn intersection(&self, other: &SignConditionRegion) -> Result<Self, DomainError> {
        if self.dim != other.dim {
            return Err(DomainError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut clauses = Vec::new();
        for a in &self.clauses {
            for b in &other.clauses {
                let mut eq = a.eq.clone();
                eq.extend(b.eq.iter().cloned());
                let mut gt = a.gt.clone();
                gt.extend(b.gt.iter().cloned());
                clauses.push(Clause { eq, gt });
            }
        }
        Ok(Self { dim: self.dim, clauses })
    }

    /// Exact membership of a rational point.
    pub fn contains(&self, x: &[Rational]) -> Result<bool, DomainError> {
        if x.len() != self.dim {
            return Err(DomainError::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(self
            .clauses
            .iter()
            .any(|c| c.eq.iter().all(|p| p.eval(x).is_zero()) && c.gt.iter().all(|q| q.eval(x).is_positive())))
    }

    /// Float membership: equality clauses hold within [`FLOAT_MEMBERSHIP_BAND`].
    pub fn contains_f64(&self, x: &[f64]) -> Result<bool, DomainError> {
        if x.len() != self.dim {
            return Err(DomainError::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(self.clauses.iter().any(|c| {
            c.eq.iter().all(|p| p.eval_f64(x).abs() <= FLOAT_MEMBERSHIP_BAND)
                && c.gt.iter().all(|q| q.eval_f64(x) > 0.0)
        }))
    }

    /// Sound classification of a closed box by interval arithmetic.
    pub fn classify_box(&self, bx: &[Interval]) -> BoxClass {
        let mut any_mixed = false;
        for c in &self.clauses {
            match c.classify_box(bx) {
                BoxClass::Inside => return BoxClass::Inside,
                BoxClass::Mixed => any_mixed = true,
                BoxClass::Outside => {}
            }
        }
        if any_mixed {
            BoxClass::Mixed
        } else {
            BoxClass::Outside
        }
    }

    /// Substitutes `x_axis = value`, producing a region in one fewer variable.
    pub fn slice(&self, axis: usize, value: &Rational) -> SignConditionRegion {
        let sub = |p: &QPoly| {
            QPoly::from_terms(
                self.dim - 1,
                p.terms().map(|(e, c)| {
                    let k = e[axis];
                    let mut exp = e.clone();
                    exp.remove(axis);
                    (exp, c * num_traits::pow(value.clone(), k as usize))
                }),
            )
        };
        SignConditionRegion {
            dim: self.dim - 1,
            clauses: self
                .clauses
                .iter()
                .map(|c| Clause { eq: c.eq.iter().map(sub).collect(), gt: c.gt.iter().map(sub).collect() })
                .collect(),
        }
    }

    /// Translates the region by `shift` (substituting `x ↦ x − shift`).
    pub fn translate(&self, shift: &[Rational]) -> SignConditionRegion {
        let dim = self.dim;
        let images: Vec<QPoly> =
            (0..dim).map(|i| &QPoly::var(dim, i) - &QPoly::constant(dim, shift[i].clone())).collect();
        let sub = |p: &QPoly| {
            let mut acc = QPoly::zero(dim);
            for (exp, c) in p.terms() {
                let mut term = QPoly::constant(dim, c.clone());
                for (i, &k) in exp.iter().enumerate() {
                    if k > 0 {
                        term = &term * &images[i].pow(k);
                    }
                }
                acc = &acc + &term;
            }
            acc
        };
        SignConditionRegion {
            dim,
            clauses: self
                .clauses
                .iter()
                .map(|c| Clause { eq: c.eq.iter().map(sub).collect(), gt: c.gt.iter().map(sub).collect() })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, DomainError> {
        let raw: RegionJson = serde_json::from_str(text).map_err(|e| DomainError::Json(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(RegionJson::from(self)).expect("region serialises")
    }
}

/// Wire form: `{"dim":n,"clauses":[{"eq":[...],"gt":[...]}]}`. Each
/// polynomial is a coefficient map from comma-separated exponent vectors to
/// rational strings, or an expression in `x1..xn` (or `x` when `n = 1`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionJson {
    pub dim: usize,
    pub clauses: Vec<ClauseJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClauseJson {
    #[serde(default)]
    pub eq: Vec<PolyJson>,
    #[serde(default)]
    pub gt: Vec<PolyJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyJson {
    Map(BTreeMap<String, String>),
    Expr(String),
}

impl PolyJson {
    pub fn to_poly(&self, dim: usize) -> Result<QPoly, DomainError> {
        match self {
            PolyJson::Map(map) => {
                let mut terms = Vec::new();
                for (k, v) in map {
                    let exp: Vec<u32> = if k.trim().is_empty() {
                        Vec::new()
                    } else {
                        k.split(',')
                            .map(|s| s.trim().parse::<u32>())
                            .collect::<Result<_, _>>()
                            .map_err(|_| DomainError::Json(format!("bad exponent key `{k}`")))?
                    };
                    if exp.len() != dim {
                        return Err(DomainError::DimensionMismatch { expected: dim, found: exp.len() });
                    }
                    let c = parse_rational(v).ok_or_else(|| DomainError::Json(format!("bad coefficient `{v}`")))?;
                    terms.push((exp, c));
                }
                Ok(QPoly::from_terms(dim, terms))
            }
            PolyJson::Expr(src) => {
                let mut names: Vec<String> = (1..=dim).map(|k| format!("x{k}")).collect();
                let expr = super::parse::parse_expr(src)?;
                if dim == 1 && expr.variables().iter().any(|v| v == "x") {
                    names = vec!["x".to_string()];
                }
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                let f = RatFunc::from_expr(&expr, &refs)?;
                let p = f.as_polynomial().ok_or(DomainError::NotPolynomial)?;
                if !p.is_real() {
                    return Err(DomainError::NotReal);
                }
                Ok(p.real_part())
            }
        }
    }

    pub fn from_poly(p: &QPoly) -> Self {
        PolyJson::Map(
            p.terms()
                .map(|(e, c)| (e.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","), format_rational(c)))
                .collect(),
        )
    }
}

impl TryFrom<RegionJson> for SignConditionRegion {
    type Error = DomainError;
    fn try_from(raw: RegionJson) -> Result<Self, DomainError> {
        let mut clauses = Vec::new();
        for c in raw.clauses {
            let eq = c.eq.iter().map(|p| p.to_poly(raw.dim)).collect::<Result<_, _>>()?;
            let gt = c.gt.iter().map(|p| p.to_poly(raw.dim)).collect::<Result<_, _>>()?;
            clauses.push(Clause { eq, gt });
        }
        SignConditionRegion::new(raw.dim, clauses)
    }
}

impl From<&SignConditionRegion> for RegionJson {
    fn from(r: &SignConditionRegion) -> Self {
        RegionJson {
            dim: r.dim,
            clauses: r
                .clauses
                .iter()
                .map(|c| ClauseJson {
                    eq: c.eq.iter().map(PolyJson::from_poly).collect(),
                    gt: c.gt.iter().map(PolyJson::from_poly).collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    fn disk() -> SignConditionRegion {
        SignConditionRegion::from_json(r#"{"dim":2,"clauses":[{"gt":[{"0,0":"1","2,0":"-1","0,2":"-1"}]}]}"#).unwrap()
    }

    #[test]
    fn membership_examples() {
        let d = disk();
        assert!(d.contains(&[q(0, 1), q(0, 1)]).unwrap());
        assert!(!d.contains(&[q(1, 1), q(0, 1)]).unwrap());
        let u = SignConditionRegion::from_json(r#"{"dim":1,"clauses":[{"gt":["x"]},{"eq":["x"]}]}"#).unwrap();
        assert!(u.contains(&[q(0, 1)]).unwrap());
        assert!(!u.contains(&[q(-1, 3)]).unwrap());
    }

    #[test]
    fn float_band_applies_to_equalities_only() {
        let u = SignConditionRegion::from_json(r#"{"dim":1,"clauses":[{"eq":["x - 1/3"]}]}"#).unwrap();
        assert!(u.contains_f64(&[1.0 / 3.0]).unwrap());
        assert!(!u.contains_f64(&[0.3334]).unwrap());
        assert!(matches!(u.contains(&[q(1, 1), q(1, 1)]), Err(DomainError::DimensionMismatch { .. })));
    }

    #[test]
    fn box_classification_is_sound() {
        let d = disk();
        let inside = [Interval::new(q(-1, 4), q(1, 4)), Interval::new(q(-1, 4), q(1, 4))];
        assert_eq!(d.classify_box(&inside), BoxClass::Inside);
        let outside = [Interval::new(q(2, 1), q(3, 1)), Interval::new(q(0, 1), q(1, 1))];
        assert_eq!(d.classify_box(&outside), BoxClass::Outside);
        let edge = [Interval::new(q(3, 4), q(5, 4)), Interval::new(q(-1, 8), q(1, 8))];
        assert_eq!(d.classify_box(&edge), BoxClass::Mixed);
    }

    #[test]
    fn translation_and_json_roundtrip() {
        let d = disk();
        let t = d.translate(&[q(3, 1), q(0, 1)]);
        assert!(t.contains(&[q(3, 1), q(1, 2)]).unwrap());
        assert!(!t.contains(&[q(0, 1), q(0, 1)]).unwrap());
        let back = SignConditionRegion::from_json(&t.to_json_value().to_string()).unwrap();
        assert_eq!(back, t);
    }
}
