use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::BlowupError;
use crate::sa_domain::GaussianRational;
use crate::Rational;

/// A point of the oriented real blow-up along the first `m` coordinate
/// hyperplanes: `z_i = r_i w_i` for `i < m`, with `r_i ≥ 0` and `|w_i| = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    pub r: Vec<f64>,
    pub w: Vec<Complex64>,
    pub rest: Vec<Complex64>,
}

/// Polar chart. On the divisor (`z_i = 0`) the boundary direction must be
/// supplied in `directions[i]`; it is normalised to modulus one.
pub fn blowup_chart(x: &[Complex64], m: usize, directions: &[Option<Complex64>]) -> Result<ChartPoint, BlowupError> {
    if m > x.len() {
        return Err(BlowupError::Domain(crate::sa_domain::DomainError::DimensionMismatch {
            expected: x.len(),
            found: m,
        }));
    }
    let mut r = Vec::with_capacity(m);
    let mut w = Vec::with_capacity(m);
    for (i, z) in x[..m].iter().enumerate() {
        let modulus = z.norm();
        if modulus == 0.0 {
            let d = directions.get(i).copied().flatten().ok_or(BlowupError::MissingDirection(i))?;
            if d.norm() == 0.0 {
                return Err(BlowupError::MissingDirection(i));
            }
            r.push(0.0);
            w.push(d / d.norm());
        } else {
            r.push(modulus);
            w.push(z / modulus);
        }
    }
    Ok(ChartPoint { r, w, rest: x[m..].to_vec() })
}

/// `z_i = r_i w_i`.
pub fn blowup_chart_inverse(p: &ChartPoint) -> Vec<Complex64> {
    p.r.iter().zip(&p.w).map(|(r, w)| w * *r).chain(p.rest.iter().copied()).collect()
}

/// Exact polar chart for entries whose modulus is rational.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactChartPoint {
    pub r: Vec<Rational>,
    pub w: Vec<GaussianRational>,
    pub rest: Vec<GaussianRational>,
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

pub fn blowup_chart_exact(
    x: &[GaussianRational],
    m: usize,
    directions: &[Option<GaussianRational>],
) -> Result<ExactChartPoint, BlowupError> {
    let mut r = Vec::with_capacity(m);
    let mut w = Vec::with_capacity(m);
    for (i, z) in x[..m.min(x.len())].iter().enumerate() {
        if z.is_zero() {
            let d = directions.get(i).cloned().flatten().ok_or(BlowupError::MissingDirection(i))?;
            let norm = rational_sqrt(&d.norm_sqr()).ok_or(BlowupError::NonRationalModulus)?;
            if norm.is_zero() {
                return Err(BlowupError::MissingDirection(i));
            }
            r.push(Rational::zero());
            w.push(&d * &GaussianRational::real(norm.recip()));
        } else {
            let modulus = rational_sqrt(&z.norm_sqr()).ok_or(BlowupError::NonRationalModulus)?;
            w.push(z * &GaussianRational::real(modulus.recip()));
            r.push(modulus);
        }
    }
    Ok(ExactChartPoint { r, w, rest: x[m.min(x.len())..].to_vec() })
}

pub fn blowup_chart_exact_inverse(p: &ExactChartPoint) -> Vec<GaussianRational> {
    p.r.iter().zip(&p.w).map(|(r, w)| w * &GaussianRational::real(r.clone())).chain(p.rest.iter().cloned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_examples() {
        let p = blowup_chart(&[Complex64::new(0.0, 2.0)], 1, &[]).unwrap();
        assert_eq!(p.r, vec![2.0]);
        assert!((p.w[0] - Complex64::i()).norm() < 1e-15);
        let b = blowup_chart(&[Complex64::new(0.0, 0.0)], 1, &[Some(Complex64::new(1.0, 0.0))]).unwrap();
        assert_eq!((b.r[0], b.w[0]), (0.0, Complex64::new(1.0, 0.0)));
        assert_eq!(blowup_chart(&[Complex64::new(0.0, 0.0)], 1, &[]), Err(BlowupError::MissingDirection(0)));
    }

    #[test]
    fn exact_roundtrip() {
        let x = vec![
            GaussianRational::new(Rational::from_integer(3.into()), Rational::from_integer(4.into())),
            GaussianRational::from_ratio(-5, 13),
            GaussianRational::from_ratio(7, 2),
        ];
        let p = blowup_chart_exact(&x, 2, &[]).unwrap();
        assert_eq!(p.r[0], Rational::from_integer(5.into()));
        assert_eq!(blowup_chart_exact_inverse(&p), x);
        let bad = vec![GaussianRational::new(Rational::from_integer(1.into()), Rational::from_integer(1.into()))];
        assert_eq!(blowup_chart_exact(&bad, 1, &[]), Err(BlowupError::NonRationalModulus));
    }
}
