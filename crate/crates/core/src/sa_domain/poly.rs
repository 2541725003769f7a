use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::gaussian::{format_rational, rational_to_f64, GaussianRational};
use crate::Rational;

/// Coefficient ring for [`Poly`].
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn to_c64(&self) -> Complex64;
    fn render(&self) -> String;
}

/// Coefficient field: exact division by nonzero elements.
pub trait Field: Coeff + Div<Output = Self> {}

impl Coeff for Rational {
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
    fn render(&self) -> String {
        format_rational(self)
    }
}
impl Field for Rational {}

impl Coeff for GaussianRational {
    fn to_c64(&self) -> Complex64 {
        self.to_complex()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}
impl Field for GaussianRational {}

/// Sparse multivariate polynomial keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<C> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, C>,
}

pub type QPoly = Poly<Rational>;
pub type GPoly = Poly<GaussianRational>;

impl<C: Coeff> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    /// The coordinate function `x_index`.
    pub fn var(nvars: usize, index: usize) -> Self {
        let mut exp = vec![0; nvars];
        exp[index] = 1;
        Self::monomial(nvars, exp, C::one())
    }

    pub fn monomial(nvars: usize, exp: Vec<u32>, c: C) -> Self {
        assert_eq!(exp.len(), nvars, "exponent length must match variable count");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (exp, c) in terms {
            p.add_term(exp, c);
        }
        p
    }

    /// Dense univariate constructor, lowest degree first.
    pub fn from_univariate(coeffs: Vec<C>) -> Self {
        Self::from_terms(1, coeffs.into_iter().enumerate().map(|(k, c)| (vec![k as u32], c)))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u32]) -> C {
        self.terms.get(exp).cloned().unwrap_or_else(C::zero)
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => {
                let (exp, c) = self.terms.iter().next().unwrap();
                exp.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, exp: Vec<u32>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exp) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(exp, s);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    /// Re-embeds into a space with more variables (new ones appended).
    pub fn extend_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        Self::from_terms(
            nvars,
            self.terms.iter().map(|(e, c)| {
                let mut exp = e.clone();
                exp.resize(nvars, 0);
                (exp, c.clone())
            }),
        )
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, a)| (e.clone(), a.clone() * c.clone())))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, c)| {
                let mut exp = e.clone();
                let k = exp[var];
                exp[var] -= 1;
                (exp, c.clone() * int_coeff::<C>(k as i64))
            }),
        )
    }

    pub fn eval(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        let mut acc = C::zero();
        for (exp, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(exp) {
                for _ in 0..k {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    pub fn eval_c64(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        self.terms.iter().map(|(exp, c)| exp.iter().zip(point).fold(c.to_c64(), |acc, (&k, x)| acc * x.powu(k))).sum()
    }

    /// Sum of `|c|·|x|^e` over the terms: an upper bound for `|p(x)|`.
    pub fn abs_envelope(&self, point: &[Complex64]) -> f64 {
        self.terms
            .iter()
            .map(|(exp, c)| exp.iter().zip(point).fold(c.to_c64().norm(), |acc, (&k, x)| acc * x.norm().powi(k as i32)))
            .sum()
    }

    /// Composes with the affine map `x_j = base_j + dir_j·t`; the result is a
    /// dense complex polynomial in `t`, lowest degree first.
    pub fn compose_affine_c64(&self, base: &[Complex64], dir: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(base.len(), self.nvars);
        assert_eq!(dir.len(), self.nvars);
        let mut out = vec![Complex64::zero()];
        for (exp, c) in &self.terms {
            let mut term = vec![c.to_c64()];
            for ((&k, b), d) in exp.iter().zip(base).zip(dir) {
                for _ in 0..k {
                    term = cpoly_mul(&term, &[*b, *d]);
                }
            }
            if term.len() > out.len() {
                out.resize(term.len(), Complex64::zero());
            }
            for (o, t) in out.iter_mut().zip(term) {
                *o += t;
            }
        }
        out
    }

    /// Dense coefficients of a univariate polynomial, lowest degree first.
    pub fn univariate_coeffs(&self) -> Vec<C> {
        assert_eq!(self.nvars, 1, "univariate polynomial expected");
        let deg = self.degree_in(0).map_or(0, |d| d as usize + 1);
        let mut out = vec![C::zero(); deg];
        for (e, c) in &self.terms {
            out[e[0] as usize] = c.clone();
        }
        out
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (exp, c) in self.terms.iter().rev() {
            let mono: Vec<String> = exp
                .iter()
                .zip(names)
                .filter(|(k, _)| **k > 0)
                .map(|(k, n)| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
                .collect();
            let coeff = c.render();
            let piece = if mono.is_empty() {
                coeff
            } else if c.is_one() {
                mono.join("*")
            } else {
                format!("{}*{}", coeff, mono.join("*"))
            };
            parts.push(piece);
        }
        parts.join(" + ")
    }
}

impl<C: Field> Poly<C> {
    /// Univariate division with remainder.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert_eq!(self.nvars, 1);
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let d = divisor.univariate_coeffs();
        let dn = d.len() - 1;
        let lc = d[dn].clone();
        let mut rem = self.univariate_coeffs();
        if rem.len() <= dn {
            return (Self::zero(1), self.clone());
        }
        let mut quot = vec![C::zero(); rem.len() - dn];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dn].clone() / lc.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * dj.clone();
            }
            quot[k] = c;
        }
        (Self::from_univariate(quot), Self::from_univariate(rem))
    }

    /// Monic univariate gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        match a.univariate_coeffs().last() {
            Some(lc) if !lc.is_zero() => {
                let inv = C::one() / lc.clone();
                a.scale(&inv)
            }
            _ => a,
        }
    }

    /// Multiplicity of `point` as a root; `None` for the zero polynomial.
    pub fn root_multiplicity(&self, point: &C) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let mut p = self.clone();
        let mut k = 0;
        while p.eval(std::slice::from_ref(point)).is_zero() {
            p = p.derivative(0);
            k += 1;
        }
        Some(k)
    }
}

fn int_coeff<C: Coeff>(k: i64) -> C {
    let mut acc = C::zero();
    let unit = if k < 0 { -C::one() } else { C::one() };
    for _ in 0..k.unsigned_abs() {
        acc = acc + unit.clone();
    }
    acc
}

/// Product of dense complex polynomials.
pub fn cpoly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Horner evaluation of a dense complex polynomial.
pub fn cpoly_eval(p: &[Complex64], t: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::zero(), |acc, c| acc * t + c)
}

/// Index of the highest coefficient whose modulus exceeds `rel_tol` times
/// the largest modulus.
pub fn cpoly_degree(p: &[Complex64], rel_tol: f64) -> Option<usize> {
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    p.iter().rposition(|c| c.norm() > rel_tol * scale)
}

impl<'a, C: Coeff> Add<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a, C: Coeff> Sub<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a, C: Coeff> Mul<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let exp = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(exp, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

impl GPoly {
    pub fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    pub fn real_part(&self) -> QPoly {
        self.map_coeffs(|c| c.re.clone())
    }

    pub fn imag_part(&self) -> QPoly {
        self.map_coeffs(|c| c.im.clone())
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }
}

impl QPoly {
    pub fn to_gaussian(&self) -> GPoly {
        self.map_coeffs(|c| GaussianRational::real(c.clone()))
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(exp, c)| exp.iter().zip(point).fold(rational_to_f64(c), |acc, (&k, x)| acc * x.powi(k as i32)))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn derivative_and_eval() {
        let x = QPoly::var(2, 0);
        let y = QPoly::var(2, 1);
        let p = &(&x.pow(3) * &y) + &QPoly::constant(2, q(5));
        assert_eq!(p.derivative(0), &(&x.pow(2) * &y).scale(&q(3)) + &QPoly::zero(2));
        assert_eq!(p.eval(&[q(2), q(3)]), q(29));
        assert_eq!(p.total_degree(), Some(4));
    }

    #[test]
    fn division_gcd_and_multiplicity() {
        // (z-1)^2 (z+2)
        let z = QPoly::var(1, 0);
        let zm1 = &z - &QPoly::one(1);
        let zp2 = &z + &QPoly::constant(1, q(2));
        let p = &(&zm1 * &zm1) * &zp2;
        let (quot, rem) = p.div_rem(&zm1);
        assert!(rem.is_zero());
        assert_eq!(quot, &zm1 * &zp2);
        assert_eq!(p.gcd(&(&zm1 * &z)), zm1);
        assert_eq!(p.root_multiplicity(&q(1)), Some(2));
        assert_eq!(p.root_multiplicity(&q(0)), Some(0));
    }

    #[test]
    fn affine_composition_matches_direct_evaluation() {
        let x = GPoly::var(2, 0);
        let y = GPoly::var(2, 1);
        let p = &(&x * &y) + &x.pow(2).scale(&GaussianRational::i());
        let base = [Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25)];
        let dir = [Complex64::new(1.0, 1.0), Complex64::new(-0.5, 0.0)];
        let comp = p.compose_affine_c64(&base, &dir);
        for t in [0.0, 0.3, 2.0] {
            let pt = [base[0] + dir[0] * t, base[1] + dir[1] * t];
            let direct = p.eval_c64(&pt);
            assert!((cpoly_eval(&comp, Complex64::new(t, 0.0)) - direct).norm() < 1e-12);
        }
    }
}
