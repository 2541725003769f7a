use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use super::path::PathSpec;
use super::{align, PeriodError};
use crate::sa_domain::{cpoly_degree, cpoly_eval, PTildeClass, PTildePoint, RatFunc, StripSpec};

/// Coefficients below this fraction of the largest one are treated as zero.
pub(crate) const COEFF_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub enum RejectReason {
    /// `f` stays bounded along an unbounded end.
    NotProper {
        limit: Complex64,
    },
    /// The end maps to `s∞` with `Re s ≤ 0`.
    DirectionOutsideBcirc {
        direction: Complex64,
    },
    PoleOnPath {
        point: Complex64,
    },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::NotProper { limit } => write!(
                f,
                "f is not proper on the path: f tends to the finite value {limit} along the unbounded end, \
                 so the image f(G) is not closed"
            ),
            RejectReason::DirectionOutsideBcirc { direction } => write!(
                f,
                "the unbounded end maps to the boundary direction {direction}·∞ with nonpositive real part, \
                 outside B∘; the path is not a cycle for rapid decay homology"
            ),
            RejectReason::PoleOnPath { point } => write!(f, "f has a pole on the path at {point}"),
        }
    }
}

/// Outcome of the convergence gate.
#[derive(Clone, Debug, PartialEq)]
pub enum Properness {
    /// `f(G)` lies in the strip; the witness is found by sampling.
    OkStrip(StripSpec),
    /// The end tends to `s∞` with `Re s > 0`, but `Im f` is unbounded.
    OkBcirc {
        direction: Complex64,
    },
    Reject(RejectReason),
}

impl Properness {
    pub fn is_accepted(&self) -> bool {
        !matches!(self, Properness::Reject(_))
    }

    pub fn to_json(&self) -> Value {
        match self {
            Properness::OkStrip(s) => json!({"verdict": "ok_strip", "r": s.r, "s": s.s}),
            Properness::OkBcirc { direction } => {
                json!({"verdict": "ok_bcirc", "direction": [direction.re, direction.im]})
            }
            Properness::Reject(reason) => json!({"verdict": "reject", "reason": reason.to_string()}),
        }
    }
}

pub(crate) fn trim(p: &[Complex64]) -> Vec<Complex64> {
    match cpoly_degree(p, COEFF_TOL) {
        Some(d) => p[..=d].to_vec(),
        None => Vec::new(),
    }
}

/// Quotient of polynomial division (ascending coefficients).
pub(crate) fn cpoly_quotient(num: &[Complex64], den: &[Complex64]) -> Vec<Complex64> {
    let (mut r, d) = (num.to_vec(), den.len());
    if r.len() < d {
        return Vec::new();
    }
    let lead = den[d - 1];
    let mut q = vec![Complex64::new(0.0, 0.0); r.len() - d + 1];
    for k in (0..q.len()).rev() {
        let c = r[k + d - 1] / lead;
        q[k] = c;
        for (j, dj) in den.iter().enumerate() {
            r[k + j] -= c * dj;
        }
    }
    q
}

/// Complex roots via the eigenvalues of the companion matrix.
pub(crate) fn cpoly_roots(p: &[Complex64]) -> Vec<Complex64> {
    let p = trim(p);
    let n = p.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -p[i] / lead;
    }
    m.schur().eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default()
}

/// Real roots of `p` in `[lo, hi]` (`hi` may be infinite).
pub(crate) fn real_roots_in(p: &[Complex64], lo: f64, hi: f64) -> Vec<f64> {
    cpoly_roots(p)
        .into_iter()
        .filter(|t| t.im.abs() <= 1e-8 * t.norm().max(1.0) && t.re >= lo - 1e-12 && t.re <= hi + 1e-12)
        .map(|t| t.re)
        .collect()
}

fn sample_points(unbounded: bool) -> impl Iterator<Item = f64> {
    let n = 2000;
    (0..=n).map(move |k| {
        let u = k as f64 / n as f64;
        if unbounded {
            // Up to t ≈ 10⁴.
            let u = u * 0.9999;
            u / (1.0 - u)
        } else {
            u
        }
    })
}

fn strip_witness(values: impl Iterator<Item = Complex64>, extra_im: f64) -> StripSpec {
    let (mut min_re, mut max_im) = (f64::INFINITY, extra_im.abs());
    for v in values {
        min_re = min_re.min(v.re);
        max_im = max_im.max(v.im.abs());
    }
    StripSpec { r: min_re.floor() - 1.0, s: max_im.ceil() + 1.0 }
}

/// Limit behaviour of `f` along the path; see [`Properness`].
pub fn properness_check(f: &RatFunc, path: &PathSpec) -> Result<Properness, PeriodError> {
    if let PathSpec::Parametric(comps) = path {
        let (f, _, _) = align(f, None, comps.len())?;
        let mut vals = Vec::new();
        for t in sample_points(false) {
            let z = comps.iter().map(|c| c.eval_real(&[t])).collect::<Result<Vec<_>, _>>();
            match z.and_then(|z| f.eval(&z)) {
                Ok(v) => vals.push(v),
                Err(_) => {
                    let point = comps[0].eval_real(&[t]).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                    return Ok(Properness::Reject(RejectReason::PoleOnPath { point }));
                }
            }
        }
        return Ok(Properness::OkStrip(strip_witness(vals.into_iter(), 0.0)));
    }
    let (f, _, _) = align(f, None, 1)?;
    let mut samples = Vec::new();
    for (base, disp) in path.affine_pieces() {
        let (p, q) = f.compose_affine(&[base], &[disp]);
        let (p, q) = (trim(&p), trim(&q));
        let hi = if path.is_unbounded() { f64::INFINITY } else { 1.0 };
        if let Some(&t) = real_roots_in(&q, 0.0, hi).first() {
            return Ok(Properness::Reject(RejectReason::PoleOnPath { point: base + disp * t }));
        }
        let value = |t: f64| {
            let t = Complex64::new(t, 0.0);
            cpoly_eval(&p, t) / cpoly_eval(&q, t)
        };
        if !path.is_unbounded() {
            samples.extend(sample_points(false).map(value));
            continue;
        }
        let k = p.len() as i64 - q.len() as i64;
        if k <= 0 {
            let limit = if k == 0 { p[p.len() - 1] / q[q.len() - 1] } else { Complex64::new(0.0, 0.0) };
            return Ok(Properness::Reject(RejectReason::NotProper { limit }));
        }
        let c = p[p.len() - 1] / q[q.len() - 1];
        let direction = c / c.norm();
        match PTildePoint::at_infinity(c).classify()? {
            PTildeClass::NonpositiveInfinityDirection => {
                return Ok(Properness::Reject(RejectReason::DirectionOutsideBcirc { direction }));
            }
            PTildeClass::PositiveInfinityDirection => return Ok(Properness::OkBcirc { direction }),
            PTildeClass::OneInfinity | PTildeClass::Finite => {
                // Im f is bounded iff the polynomial part is real above degree 0.
                let quot = cpoly_quotient(&p, &q);
                let scale = quot.iter().map(|x| x.norm()).fold(0.0, f64::max);
                if quot.iter().skip(1).any(|x| x.im.abs() > COEFF_TOL * scale) {
                    return Ok(Properness::OkBcirc { direction });
                }
                samples.extend(sample_points(true).map(value));
                return Ok(Properness::OkStrip(strip_witness(samples.into_iter(), quot[0].im)));
            }
        }
    }
    Ok(Properness::OkStrip(strip_witness(samples.into_iter(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(f: &str, path: &str) -> Properness {
        properness_check(&RatFunc::parse_in(f, &["z"]).unwrap(), &PathSpec::parse(path).unwrap()).unwrap()
    }

    #[test]
    fn verdicts() {
        assert!(matches!(check("1/z", "ray:1:1"), Properness::Reject(RejectReason::NotProper { .. })));
        assert!(matches!(check("z", "ray:0:exp(i*pi/4)"), Properness::OkBcirc { .. }));
        assert!(matches!(check("i*z", "ray:1:1"), Properness::Reject(RejectReason::DirectionOutsideBcirc { .. })));
        let Properness::OkStrip(s) = check("z", "ray:0:1") else { panic!() };
        assert!(s.r < 0.0 && s.s >= 1.0);
        assert!(matches!(check("z^2", "ray:0:exp(2*pi*i/2)"), Properness::OkStrip(_)));
        assert!(matches!(check("z^2+i*z", "ray:0:1"), Properness::OkBcirc { .. }));
        assert!(matches!(check("1/(z-2)", "segment:0:3"), Properness::Reject(RejectReason::PoleOnPath { .. })));
        assert!(matches!(check("1/(z-2)", "segment:0:1"), Properness::OkStrip(_)));
        assert!(matches!(check("-z", "ray:0:1"), Properness::Reject(_)));
    }

    #[test]
    fn roots_and_quotients() {
        let c = |re: f64| Complex64::new(re, 0.0);
        let mut r: Vec<f64> = real_roots_in(&[c(2.0), c(-3.0), c(1.0)], 0.0, 10.0);
        r.sort_by(f64::total_cmp);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
        assert_eq!(cpoly_quotient(&[c(-1.0), c(0.0), c(1.0)], &[c(-1.0), c(1.0)]), vec![c(1.0), c(1.0)]);
    }
}
