use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational;
use super::parse::{parse_expr, Expr};
use super::poly::{GPoly, Poly};
use super::DomainError;

/// Relative size below which a float denominator counts as vanishing.
pub const POLE_TOLERANCE: f64 = 1e-14;

/// A quotient of two multivariate polynomials over ℚ(i) in named variables.
///
/// Equality is semantic: `a/b == c/d` iff `a·d = b·c` as polynomials.
#[derive(Clone, Debug)]
pub struct RatFunc {
    vars: Vec<String>,
    num: GPoly,
    den: GPoly,
}

/// Orders `x2` before `x10` and otherwise lexicographically.
pub fn natural_var_order(a: &str, b: &str) -> std::cmp::Ordering {
    let split = |s: &str| {
        let pos = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (head, tail) = s.split_at(pos);
        (head.to_string(), tail.parse::<u64>().ok())
    };
    split(a).cmp(&split(b)).then_with(|| a.cmp(b))
}

impl RatFunc {
    pub fn new(vars: Vec<String>, num: GPoly, den: GPoly) -> Result<Self, DomainError> {
        if num.nvars() != vars.len() || den.nvars() != vars.len() {
            return Err(DomainError::DimensionMismatch { expected: vars.len(), found: num.nvars().max(den.nvars()) });
        }
        if den.is_zero() {
            return Err(DomainError::ZeroDenominator);
        }
        Ok(Self { vars, num, den }.normalized())
    }

    pub fn from_poly(vars: Vec<String>, num: GPoly) -> Self {
        let den = GPoly::one(vars.len());
        Self { vars, num, den }
    }

    pub fn constant(vars: Vec<String>, c: GaussianRational) -> Self {
        let n = vars.len();
        Self::from_poly(vars, GPoly::constant(n, c))
    }

    pub fn zero(vars: Vec<String>) -> Self {
        Self::constant(vars, GaussianRational::zero())
    }

    pub fn var(vars: Vec<String>, name: &str) -> Result<Self, DomainError> {
        let idx = vars.iter().position(|v| v == name).ok_or_else(|| DomainError::UnknownVariable(name.into()))?;
        let n = vars.len();
        Ok(Self::from_poly(vars, GPoly::var(n, idx)))
    }

    /// Parses with variables collected from the expression in natural order.
    pub fn parse(src: &str) -> Result<Self, DomainError> {
        let expr = parse_expr(src)?;
        let mut vars = expr.variables();
        vars.sort_by(|a, b| natural_var_order(a, b));
        let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
        Self::from_expr(&expr, &refs)
    }

    /// Parses over a fixed variable list; other identifiers are errors.
    pub fn parse_in(src: &str, vars: &[&str]) -> Result<Self, DomainError> {
        Self::from_expr(&parse_expr(src)?, vars)
    }

    pub fn from_expr(expr: &Expr, vars: &[&str]) -> Result<Self, DomainError> {
        let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        Self::build(expr, &names)
    }

    fn build(expr: &Expr, vars: &[String]) -> Result<Self, DomainError> {
        let vs = || vars.to_vec();
        Ok(match expr {
            Expr::Num(q) => Self::constant(vs(), GaussianRational::real(q.clone())),
            Expr::Imag => Self::constant(vs(), GaussianRational::i()),
            Expr::Var(name) => Self::var(vs(), name)?,
            Expr::Call(name, _) => return Err(DomainError::UnsupportedFunction(name.clone())),
            Expr::Neg(a) => -&Self::build(a, vars)?,
            Expr::Add(a, b) => &Self::build(a, vars)? + &Self::build(b, vars)?,
            Expr::Sub(a, b) => &Self::build(a, vars)? - &Self::build(b, vars)?,
            Expr::Mul(a, b) => &Self::build(a, vars)? * &Self::build(b, vars)?,
            Expr::Div(a, b) => Self::build(a, vars)?.checked_div(&Self::build(b, vars)?)?,
            Expr::Pow(a, b) => {
                let k = b.as_integer().ok_or(DomainError::NonIntegerExponent)?;
                Self::build(a, vars)?.powi(k)?
            }
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn numerator(&self) -> &GPoly {
        &self.num
    }

    pub fn denominator(&self) -> &GPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.as_constant().is_some()
    }

    /// All coefficients real.
    pub fn is_real(&self) -> bool {
        self.num.is_real() && self.den.is_real()
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        n.checked_div(&d)
    }

    /// The polynomial, when the denominator is constant.
    pub fn as_polynomial(&self) -> Option<GPoly> {
        let d = self.den.as_constant()?;
        Some(self.num.scale(&d.inv()?))
    }

    /// Same function over a different (super-)list of variables.
    pub fn with_vars(&self, vars: &[String]) -> Result<Self, DomainError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).ok_or_else(|| DomainError::UnknownVariable(v.clone())))
            .collect::<Result<_, _>>()?;
        let remap = |p: &GPoly| {
            GPoly::from_terms(
                vars.len(),
                p.terms().map(|(e, c)| {
                    let mut exp = vec![0; vars.len()];
                    for (k, &slot) in map.iter().enumerate() {
                        exp[slot] = e[k];
                    }
                    (exp, c.clone())
                }),
            )
        };
        Ok(Self { vars: vars.to_vec(), num: remap(&self.num), den: remap(&self.den) })
    }

    fn normalized(mut self) -> Self {
        if let Some(d) = self.den.as_constant() {
            if !d.is_one() {
                self.num = self.num.scale(&d.inv().expect("nonzero denominator"));
                self.den = GPoly::one(self.vars.len());
            }
            return self;
        }
        if self.vars.len() == 1 {
            let g = self.num.gcd(&self.den);
            if g.total_degree().unwrap_or(0) > 0 {
                self.num = self.num.div_rem(&g).0;
                self.den = self.den.div_rem(&g).0;
            }
            // Make the denominator monic.
            let lc = self.den.univariate_coeffs().last().cloned().expect("nonzero denominator");
            if !lc.is_one() {
                let inv = lc.inv().expect("nonzero leading coefficient");
                self.num = self.num.scale(&inv);
                self.den = self.den.scale(&inv);
            }
        }
        self
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, DomainError> {
        self.check_vars(rhs);
        if rhs.is_zero() {
            return Err(DomainError::ZeroDenominator);
        }
        Self::new(self.vars.clone(), &self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn powi(&self, k: i64) -> Result<Self, DomainError> {
        let e = u32::try_from(k.unsigned_abs()).map_err(|_| DomainError::NonIntegerExponent)?;
        let p = Self { vars: self.vars.clone(), num: self.num.pow(e), den: self.den.pow(e) };
        if k >= 0 {
            Ok(p)
        } else {
            Self::constant(self.vars.clone(), GaussianRational::one()).checked_div(&p)
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self { vars: self.vars.clone(), num: self.num.scale(c), den: self.den.clone() }.normalized()
    }

    /// Partial derivative by the quotient rule.
    pub fn derivative(&self, var: usize) -> Self {
        let num = &(&self.num.derivative(var) * &self.den) - &(&self.num * &self.den.derivative(var));
        let den = &self.den * &self.den;
        Self { vars: self.vars.clone(), num, den }.normalized()
    }

    pub fn derivative_by(&self, name: &str) -> Result<Self, DomainError> {
        let idx = self.vars.iter().position(|v| v == name).ok_or_else(|| DomainError::UnknownVariable(name.into()))?;
        Ok(self.derivative(idx))
    }

    /// Complex evaluation; [`DomainError::Pole`] when the denominator is
    /// below [`POLE_TOLERANCE`] relative to its term envelope.
    pub fn eval(&self, x: &[Complex64]) -> Result<Complex64, DomainError> {
        if x.len() != self.vars.len() {
            return Err(DomainError::DimensionMismatch { expected: self.vars.len(), found: x.len() });
        }
        let d = self.den.eval_c64(x);
        let scale = self.den.abs_envelope(x).max(f64::MIN_POSITIVE);
        if d.norm() <= POLE_TOLERANCE * scale {
            return Err(DomainError::Pole);
        }
        Ok(self.num.eval_c64(x) / d)
    }

    pub fn eval_real(&self, x: &[f64]) -> Result<Complex64, DomainError> {
        let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.eval(&z)
    }

    /// Exact evaluation; poles are detected exactly.
    pub fn eval_exact(&self, x: &[GaussianRational]) -> Result<GaussianRational, DomainError> {
        if x.len() != self.vars.len() {
            return Err(DomainError::DimensionMismatch { expected: self.vars.len(), found: x.len() });
        }
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(DomainError::Pole);
        }
        Ok(&self.num.eval(x) / &d)
    }

    /// Splits `f = f1 + i·f2` for real arguments by multiplying through with
    /// the conjugate denominator; both parts have rational coefficients.
    pub fn real_imag_split(&self) -> (RatFunc, RatFunc) {
        let m = &self.num * &self.den.conj();
        let norm = (&self.den * &self.den.conj()).real_part().to_gaussian();
        let re = m.real_part().to_gaussian();
        let im = m.imag_part().to_gaussian();
        (
            Self { vars: self.vars.clone(), num: re, den: norm.clone() }.normalized(),
            Self { vars: self.vars.clone(), num: im, den: norm }.normalized(),
        )
    }

    /// Composition with `x_j = base_j + dir_j·t` as a pair of dense complex
    /// polynomials in `t` (numerator, denominator).
    pub fn compose_affine(&self, base: &[Complex64], dir: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        (self.num.compose_affine_c64(base, dir), self.den.compose_affine_c64(base, dir))
    }

    fn check_vars(&self, rhs: &Self) {
        assert_eq!(self.vars, rhs.vars, "rational functions over different variable lists");
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && &self.num * &other.den == &other.num * &self.den
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.num.render(&self.vars);
        if self.den.as_constant().is_some_and(|c| c.is_one()) {
            write!(f, "{n}")
        } else {
            write!(f, "({n})/({})", self.den.render(&self.vars))
        }
    }
}

impl<'a> std::ops::Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        self.check_vars(rhs);
        if self.den == rhs.den {
            return RatFunc { vars: self.vars.clone(), num: &self.num + &rhs.num, den: self.den.clone() }.normalized();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFunc { vars: self.vars.clone(), num, den: &self.den * &rhs.den }.normalized()
    }
}

impl<'a> std::ops::Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl<'a> std::ops::Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        self.check_vars(rhs);
        RatFunc { vars: self.vars.clone(), num: &self.num * &rhs.num, den: &self.den * &rhs.den }.normalized()
    }
}

impl std::ops::Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { vars: self.vars.clone(), num: -&self.num, den: self.den.clone() }
    }
}

impl From<Poly<GaussianRational>> for RatFunc {
    /// Uses the default names `x1..xn` (or `z` for one variable).
    fn from(p: Poly<GaussianRational>) -> Self {
        let vars = default_var_names(p.nvars());
        RatFunc::from_poly(vars, p)
    }
}

pub fn default_var_names(n: usize) -> Vec<String> {
    if n == 1 {
        vec!["z".to_string()]
    } else {
        (1..=n).map(|k| format!("x{k}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluation_examples() {
        let f = RatFunc::parse("z").unwrap();
        assert_eq!(f.eval(&[c(3.0, 0.0)]).unwrap(), c(3.0, 0.0));
        let g = RatFunc::parse("1/z").unwrap();
        assert_eq!(g.eval(&[c(0.0, 0.0)]), Err(DomainError::Pole));
        assert_eq!(g.eval_exact(&[GaussianRational::zero()]), Err(DomainError::Pole));
        let h = RatFunc::parse("(1+i)*x1").unwrap();
        assert_eq!(h.eval(&[c(2.0, 0.0)]).unwrap(), c(2.0, 2.0));
    }

    #[test]
    fn dimension_is_checked() {
        let f = RatFunc::parse("x1*x2").unwrap();
        assert!(matches!(f.eval(&[c(1.0, 0.0)]), Err(DomainError::DimensionMismatch { .. })));
    }

    #[test]
    fn univariate_results_are_reduced() {
        let f = RatFunc::parse("(z^2-1)/(z-1)").unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f, RatFunc::parse("z+1").unwrap());
        assert_eq!(RatFunc::parse("z^-2").unwrap(), RatFunc::parse("1/(z*z)").unwrap());
    }

    #[test]
    fn quotient_rule() {
        let f = RatFunc::parse("1/z").unwrap();
        assert_eq!(f.derivative(0), RatFunc::parse("-1/z^2").unwrap());
        let g = RatFunc::parse("x1^2*x2 + i*x2").unwrap();
        assert_eq!(g.derivative_by("x2").unwrap(), RatFunc::parse_in("x1^2 + i", &["x1", "x2"]).unwrap());
    }

    #[test]
    fn split_examples() {
        let (f1, f2) = RatFunc::parse("(1+i)*x").unwrap().real_imag_split();
        assert_eq!(f1, RatFunc::parse("x").unwrap());
        assert_eq!(f2, RatFunc::parse("x").unwrap());
        let (f1, f2) = RatFunc::parse("i*x").unwrap().real_imag_split();
        assert!(f1.is_zero());
        assert_eq!(f2, RatFunc::parse("x").unwrap());
        let (f1, f2) = RatFunc::parse("(x+i)/(x-i)").unwrap().real_imag_split();
        assert_eq!(f1, RatFunc::parse("(x^2-1)/(x^2+1)").unwrap());
        assert_eq!(f2, RatFunc::parse("2*x/(x^2+1)").unwrap());
        assert!(f1.is_real() && f2.is_real());
    }

    #[test]
    fn split_agrees_exactly_at_rational_points() {
        let f = RatFunc::parse("(x+i)/(x-i) + (2-3*i)*x^3/(x^2+x+1)").unwrap();
        let (f1, f2) = f.real_imag_split();
        for k in -50..50 {
            let x = [GaussianRational::real(Rational::new(k.into(), 7.into()))];
            let lhs = f.eval_exact(&x).unwrap();
            let rhs = &f1.eval_exact(&x).unwrap() + &(&f2.eval_exact(&x).unwrap() * &GaussianRational::i());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn unknown_and_unsupported() {
        assert!(matches!(RatFunc::parse_in("y", &["z"]), Err(DomainError::UnknownVariable(_))));
        assert!(matches!(RatFunc::parse("exp(z)"), Err(DomainError::UnsupportedFunction(_))));
        assert!(matches!(RatFunc::parse("z^(1/2)"), Err(DomainError::NonIntegerExponent)));
        assert!(matches!(RatFunc::parse("1/(z-z)"), Err(DomainError::ZeroDenominator)));
    }
}
