use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::parse::{parse_expr, Expr};
use super::ratfunc::{natural_var_order, RatFunc};
use super::DomainError;

/// A rational differential form `Σ_I a_I dx_I` of fixed degree.
///
/// Index sets are stored strictly increasing, so `dx_I` is the wedge of the
/// coordinate differentials in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct RatForm {
    vars: Vec<String>,
    degree: usize,
    terms: BTreeMap<Vec<usize>, RatFunc>,
}

/// Sorts an index list, returning the permutation sign, or `None` on a repeat.
pub fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = indices.to_vec();
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
        return None;
    }
    Some((v, sign))
}

impl RatForm {
    pub fn zero(vars: Vec<String>, degree: usize) -> Self {
        Self { vars, degree, terms: BTreeMap::new() }
    }

    pub fn function(f: RatFunc) -> Self {
        let vars = f.vars().to_vec();
        let mut out = Self::zero(vars, 0);
        out.add_term(Vec::new(), f);
        out
    }

    /// `a·dx_{indices}`; indices in any order, the sign is absorbed.
    pub fn monomial(a: RatFunc, indices: &[usize]) -> Result<Self, DomainError> {
        let vars = a.vars().to_vec();
        let n = vars.len();
        if indices.iter().any(|&i| i >= n) || indices.len() > n {
            return Err(DomainError::DimensionMismatch { expected: n, found: indices.len() });
        }
        let mut out = Self::zero(vars, indices.len());
        if let Some((sorted, sign)) = sort_with_sign(indices) {
            let coeff = if sign < 0 { -&a } else { a };
            out.add_term(sorted, coeff);
        }
        Ok(out)
    }

    /// Builds a 1-form from one coefficient per variable.
    pub fn one_form(coeffs: Vec<RatFunc>) -> Result<Self, DomainError> {
        let vars = coeffs.first().map(|c| c.vars().to_vec()).unwrap_or_default();
        if coeffs.len() != vars.len() {
            return Err(DomainError::DimensionMismatch { expected: vars.len(), found: coeffs.len() });
        }
        let mut out = Self::zero(vars, 1);
        for (i, c) in coeffs.into_iter().enumerate() {
            out.add_term(vec![i], c);
        }
        Ok(out)
    }

    /// Parses a 0- or 1-form such as `z^2`, `dz`, `z dz`, `dz/z^2` or
    /// `x2*dx1 - x1*dx2`. An identifier `dX` is the differential of `X`.
    ///
    /// With `vars = None` the variables are collected from the expression;
    /// `degree` disambiguates forms that contain no differential (e.g. `0`).
    pub fn parse(src: &str, vars: Option<&[&str]>, degree: Option<usize>) -> Result<Self, DomainError> {
        let expr = parse_expr(src)?;
        let idents = expr.variables();
        let is_diff = |s: &str| s.len() > 1 && s.starts_with('d');
        let base: Vec<String> = match vars {
            Some(v) => v.iter().map(|s| s.to_string()).collect(),
            None => {
                let mut b: Vec<String> = Vec::new();
                for id in &idents {
                    let name = if is_diff(id) { id[1..].to_string() } else { id.clone() };
                    if !b.contains(&name) {
                        b.push(name);
                    }
                }
                b.sort_by(|a, c| natural_var_order(a, c));
                b
            }
        };
        let diffs: Vec<String> = base.iter().map(|v| format!("d{v}")).collect();
        for id in &idents {
            if !base.contains(id) && !diffs.contains(id) {
                return Err(DomainError::UnknownVariable(id.clone()));
            }
        }
        let has_diff = idents.iter().any(|id| diffs.contains(id));
        let degree = match (degree, has_diff) {
            (Some(0), true) => return Err(DomainError::FormDegree("differential in a 0-form".into())),
            (Some(d), _) => d,
            (None, true) => 1,
            (None, false) => 0,
        };
        if degree > 1 {
            return Err(DomainError::FormDegree("only degrees 0 and 1 can be parsed".into()));
        }
        let all: Vec<String> = base.iter().chain(diffs.iter()).cloned().collect();
        let all_refs: Vec<&str> = all.iter().map(String::as_str).collect();
        let full = RatFunc::from_expr(&expr, &all_refs)?;
        let n = base.len();
        if degree == 0 {
            let f = RatFunc::from_expr(&expr, &all_refs[..n])?;
            return Ok(Self::function(f));
        }
        // Denominator free of differentials and numerator homogeneous linear in them.
        let den = full.denominator();
        if (n..2 * n).any(|k| den.degree_in(k).unwrap_or(0) > 0) {
            return Err(DomainError::FormDegree("differential in a denominator".into()));
        }
        for (exp, _) in full.numerator().terms() {
            let dsum: u32 = exp[n..].iter().sum();
            if dsum != 1 {
                return Err(DomainError::FormDegree("expression is not linear in the differentials".into()));
            }
        }
        let project = |p: &super::poly::GPoly, slot: Option<usize>| {
            super::poly::GPoly::from_terms(
                n,
                p.terms()
                    .filter(|(e, _)| match slot {
                        Some(k) => e[n + k] == 1,
                        None => true,
                    })
                    .map(|(e, c)| (e[..n].to_vec(), c.clone())),
            )
        };
        let den_base = project(den, None);
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(RatFunc::new(base.clone(), project(full.numerator(), Some(k)), den_base.clone())?);
        }
        if n == 0 {
            return Ok(Self::zero(base, 1));
        }
        Self::one_form(coeffs)
    }

    fn add_term(&mut self, idx: Vec<usize>, a: RatFunc) {
        let sum = match self.terms.remove(&idx) {
            Some(old) => &old + &a,
            None => a,
        };
        if !sum.is_zero() {
            self.terms.insert(idx, sum);
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &RatFunc)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, indices: &[usize]) -> RatFunc {
        self.terms.get(indices).cloned().unwrap_or_else(|| RatFunc::zero(self.vars.clone()))
    }

    /// Coefficients `a_i` of a 1-form `Σ a_i dx_i`.
    pub fn one_form_coefficients(&self) -> Result<Vec<RatFunc>, DomainError> {
        if self.degree != 1 {
            return Err(DomainError::FormDegree(format!("expected a 1-form, found degree {}", self.degree)));
        }
        Ok((0..self.vars.len()).map(|i| self.coefficient(&[i])).collect())
    }

    pub fn with_vars(&self, vars: &[String]) -> Result<Self, DomainError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).ok_or_else(|| DomainError::UnknownVariable(v.clone())))
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(vars.to_vec(), self.degree);
        for (idx, a) in &self.terms {
            let mapped: Vec<usize> = idx.iter().map(|&i| map[i]).collect();
            let (sorted, sign) = sort_with_sign(&mapped).expect("distinct indices stay distinct");
            let a = a.with_vars(vars)?;
            out.add_term(sorted, if sign < 0 { -&a } else { a });
        }
        Ok(out)
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        let mut out = Self::zero(self.vars.clone(), self.degree);
        for (idx, a) in &self.terms {
            out.add_term(idx.clone(), a * c);
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let mut out = Self::zero(self.vars.clone(), self.degree + 1);
        for (idx, a) in &self.terms {
            for i in 0..self.vars.len() {
                let mut full = vec![i];
                full.extend_from_slice(idx);
                if let Some((sorted, sign)) = sort_with_sign(&full) {
                    let da = a.derivative(i);
                    out.add_term(sorted, if sign < 0 { -&da } else { da });
                }
            }
        }
        out
    }

    pub fn wedge(&self, rhs: &Self) -> Self {
        assert_eq!(self.vars, rhs.vars, "forms over different variable lists");
        let mut out = Self::zero(self.vars.clone(), self.degree + rhs.degree);
        for (i1, a) in &self.terms {
            for (i2, b) in &rhs.terms {
                let mut full = i1.clone();
                full.extend_from_slice(i2);
                if let Some((sorted, sign)) = sort_with_sign(&full) {
                    let ab = a * b;
                    out.add_term(sorted, if sign < 0 { -&ab } else { ab });
                }
            }
        }
        out
    }

    /// Evaluates the coefficient functions at a point, indexed like [`terms`](Self::terms).
    pub fn eval_coefficients(&self, x: &[Complex64]) -> Result<Vec<(Vec<usize>, Complex64)>, DomainError> {
        self.terms.iter().map(|(idx, a)| Ok((idx.clone(), a.eval(x)?))).collect()
    }
}

impl std::ops::Add for &RatForm {
    type Output = RatForm;
    fn add(self, rhs: &RatForm) -> RatForm {
        assert_eq!(self.vars, rhs.vars, "forms over different variable lists");
        assert_eq!(self.degree, rhs.degree, "forms of different degree");
        let mut out = self.clone();
        for (idx, a) in &rhs.terms {
            out.add_term(idx.clone(), a.clone());
        }
        out
    }
}

impl std::ops::Sub for &RatForm {
    type Output = RatForm;
    fn sub(self, rhs: &RatForm) -> RatForm {
        let neg = rhs.scale(&RatFunc::constant(rhs.vars.clone(), -super::GaussianRational::from_integer(1)));
        self + &neg
    }
}

impl fmt::Display for RatForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(idx, a)| {
                if idx.is_empty() {
                    format!("{a}")
                } else {
                    let dx: Vec<String> = idx.iter().map(|&i| format!("d{}", self.vars[i])).collect();
                    let dx = dx.join("∧");
                    let a = a.to_string();
                    match a.as_str() {
                        "1" => dx,
                        "-1" => format!("-{dx}"),
                        _ if !a[1..].contains(['+', '-', '/', ' ']) => format!("{a}*{dx}"),
                        _ => format!("({a})*{dx}"),
                    }
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Variables of an expression excluding differentials, for callers that need
/// to pre-compute a shared variable list.
pub fn base_variables(expr: &Expr) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for id in expr.variables() {
        let name = if id.len() > 1 && id.starts_with('d') { id[1..].to_string() } else { id };
        if !out.contains(&name) {
            out.push(name);
        }
    }
    out.sort_by(|a, b| natural_var_order(a, b));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_one_forms() {
        let w = RatForm::parse("z dz", None, None).unwrap();
        assert_eq!(w.degree(), 1);
        assert_eq!(w.coefficient(&[0]), RatFunc::parse("z").unwrap());
        let w = RatForm::parse("dz/z^2", None, None).unwrap();
        assert_eq!(w.coefficient(&[0]), RatFunc::parse("1/z^2").unwrap());
        let w = RatForm::parse("x2*dx1 - x1*dx2", None, None).unwrap();
        assert_eq!(w.vars(), &["x1".to_string(), "x2".to_string()]);
        assert_eq!(w.coefficient(&[1]), RatFunc::parse_in("-x1", &["x1", "x2"]).unwrap());
    }

    #[test]
    fn zero_needs_a_degree_hint() {
        let w = RatForm::parse("0", Some(&["z"]), Some(1)).unwrap();
        assert!(w.is_zero());
        assert_eq!(w.degree(), 1);
    }

    #[test]
    fn rejects_nonlinear_differentials() {
        assert!(RatForm::parse("dz*dz", None, None).is_err());
        assert!(RatForm::parse("z/dz", None, None).is_err());
        assert!(RatForm::parse("z + dz", None, None).is_err());
    }

    #[test]
    fn d_squared_vanishes() {
        let f = RatFunc::parse("x1^3*x2 + x2^2/(1+x1^2) + x3*x1").unwrap();
        let w = RatForm::function(f);
        assert!(w.d().d().is_zero());
    }

    #[test]
    fn wedge_is_alternating() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let one = RatFunc::constant(vars.clone(), super::super::GaussianRational::from_integer(1));
        let dx = RatForm::monomial(one.clone(), &[0]).unwrap();
        let dy = RatForm::monomial(one, &[1]).unwrap();
        assert!(dx.wedge(&dx).is_zero());
        assert_eq!(
            dx.wedge(&dy),
            dy.wedge(&dx).scale(&RatFunc::constant(vars, super::super::GaussianRational::from_integer(-1)))
        );
    }
}
