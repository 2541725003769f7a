use std::cell::RefCell;

use num_complex::Complex64;

use super::VolumeError;
use crate::period::{integrate, real_roots_in, QuadFailure};
use crate::sa_domain::{rational_to_f64, QPoly, SignConditionRegion};
use crate::Rational;

/// `∫ max(g, 0)`, `∫ max(−g, 0)` and their quadrature error over a set.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Parts {
    pub pos: f64,
    pub neg: f64,
    pub err: f64,
}

const SAMPLES: usize = 64;
const MAX_PIECES: usize = 2000;

/// Strict-inequality lists of the clauses that can carry positive measure.
fn full_clauses(region: &SignConditionRegion) -> Vec<&[QPoly]> {
    region.clauses().iter().filter(|c| c.eq.iter().all(|p| p.is_zero())).map(|c| c.gt.as_slice()).collect()
}

fn member(clauses: &[&[QPoly]], x: &[f64]) -> bool {
    clauses.iter().any(|gt| gt.iter().all(|q| q.eval_f64(x) > 0.0))
}

/// Open subintervals of `(lo, hi)` covering a 1-d region up to finitely many points.
pub(crate) fn intervals_1d(region: &SignConditionRegion, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let clauses = full_clauses(region);
    let mut cuts = vec![lo, hi];
    for gt in &clauses {
        for q in gt.iter() {
            let c: Vec<Complex64> =
                q.univariate_coeffs().iter().map(|r| Complex64::new(rational_to_f64(r), 0.0)).collect();
            cuts.extend(real_roots_in(&c, lo, hi).into_iter().filter(|t| *t > lo && *t < hi));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    cuts.windows(2).filter(|w| member(&clauses, &[0.5 * (w[0] + w[1])])).map(|w| (w[0], w[1])).collect()
}

fn bisect(g: &dyn Fn(f64) -> Result<f64, VolumeError>, mut a: f64, mut b: f64) -> Result<f64, VolumeError> {
    let sa = g(a)?.signum();
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if g(m)?.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Splits `(a, b)` at sign changes of `g` seen on an interior sample grid.
fn sign_pieces(g: &dyn Fn(f64) -> Result<f64, VolumeError>, a: f64, b: f64) -> Result<Vec<(f64, f64)>, VolumeError> {
    let xs: Vec<f64> = (0..SAMPLES).map(|k| a + (b - a) * (k as f64 + 0.5) / SAMPLES as f64).collect();
    let mut signs = Vec::with_capacity(SAMPLES);
    for &x in &xs {
        signs.push(g(x)?.signum());
    }
    let mut cuts = vec![a];
    for k in 1..SAMPLES {
        if signs[k] != signs[k - 1] && g(xs[k - 1])? != 0.0 && g(xs[k])? != 0.0 {
            cuts.push(bisect(g, xs[k - 1], xs[k])?);
        }
    }
    cuts.push(b);
    Ok(cuts.windows(2).map(|w| (w[0], w[1])).collect())
}

/// `∫_a^b h` for a closure that may fail; the first failure wins.
pub(crate) fn quad(
    h: &dyn Fn(f64) -> Result<Complex64, VolumeError>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(Complex64, f64), VolumeError> {
    let failure: RefCell<Option<VolumeError>> = RefCell::new(None);
    let wrapped = |t: f64| match h(t) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(f64::NAN, f64::NAN)
        }
    };
    let r = integrate(wrapped, a, b, tol, MAX_PIECES);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    match r {
        Ok(q) => Ok((q.value, q.abs_err)),
        Err(QuadFailure::NonFinite { at }) => Err(VolumeError::DensityUndefined(format!("non-finite value at {at}"))),
        Err(QuadFailure::Stalled { abs_err, .. }) => {
            Err(VolumeError::Quadrature(format!("refinement stalled with error estimate {abs_err:.3e}")))
        }
    }
}

fn split(g: f64) -> Complex64 {
    Complex64::new(g.max(0.0), (-g).max(0.0))
}

/// Positive and negative parts of `∫ g` over `region ∩ (lo, hi)`, `region ⊂ ℝ`.
pub(crate) fn parts_1d(
    region: &SignConditionRegion,
    lo: f64,
    hi: f64,
    g: &dyn Fn(f64) -> Result<f64, VolumeError>,
    tol: f64,
) -> Result<Parts, VolumeError> {
    let mut pieces = Vec::new();
    for (a, b) in intervals_1d(region, lo, hi) {
        pieces.extend(sign_pieces(g, a, b)?);
    }
    let mut out = Parts::default();
    let each = tol / pieces.len().max(1) as f64;
    for (a, b) in pieces {
        let (v, e) = quad(&|t| g(t).map(split), a, b, each)?;
        out.pos += v.re;
        out.neg += v.im;
        out.err += e;
    }
    Ok(out)
}

/// Plain `∫ g` over `region ∩ (lo, hi)` without sign splitting.
pub(crate) fn direct_1d(
    region: &SignConditionRegion,
    lo: f64,
    hi: f64,
    g: &dyn Fn(f64) -> Result<f64, VolumeError>,
    tol: f64,
) -> Result<(f64, f64), VolumeError> {
    let pieces = intervals_1d(region, lo, hi);
    let each = tol / pieces.len().max(1) as f64;
    let (mut v, mut e) = (0.0, 0.0);
    for (a, b) in pieces {
        let (q, err) = quad(&|t| g(t).map(|x| Complex64::new(x, 0.0)), a, b, each)?;
        v += q.re;
        e += err;
    }
    Ok((v, e))
}

fn slice_at(region: &SignConditionRegion, x: f64) -> Result<SignConditionRegion, VolumeError> {
    let q = Rational::from_float(x).ok_or_else(|| VolumeError::Quadrature(format!("slice at {x}")))?;
    Ok(region.slice(0, &q))
}

/// Iterated version of [`parts_1d`] over `region ∩ box`, `region ⊂ ℝ²`.
pub(crate) fn parts_2d(
    region: &SignConditionRegion,
    bounds: [(f64, f64); 2],
    g: &dyn Fn(f64, f64) -> Result<f64, VolumeError>,
    tol: f64,
) -> Result<Parts, VolumeError> {
    let [(x0, x1), (y0, y1)] = bounds;
    let inner_err = RefCell::new(0.0);
    let h = |x: f64| -> Result<Complex64, VolumeError> {
        let s = slice_at(region, x)?;
        let p = parts_1d(&s, y0, y1, &|y| g(x, y), tol * 1e-2)?;
        *inner_err.borrow_mut() += p.err * 1e-3;
        Ok(Complex64::new(p.pos, p.neg))
    };
    let (v, e) = quad(&h, x0, x1, tol)?;
    let inner = *inner_err.borrow();
    Ok(Parts { pos: v.re, neg: v.im, err: e + inner.min(tol) })
}

/// Iterated version of [`direct_1d`].
pub(crate) fn direct_2d(
    region: &SignConditionRegion,
    bounds: [(f64, f64); 2],
    g: &dyn Fn(f64, f64) -> Result<f64, VolumeError>,
    tol: f64,
) -> Result<(f64, f64), VolumeError> {
    let [(x0, x1), (y0, y1)] = bounds;
    let h = |x: f64| -> Result<Complex64, VolumeError> {
        let s = slice_at(region, x)?;
        direct_1d(&s, y0, y1, &|y| g(x, y), tol * 1e-2).map(|(v, _)| Complex64::new(v, 0.0))
    };
    let (v, e) = quad(&h, x0, x1, tol)?;
    Ok((v.re, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(src: &str) -> SignConditionRegion {
        SignConditionRegion::from_json(src).unwrap()
    }

    #[test]
    fn interval_decomposition() {
        let r = region(r#"{"dim":1,"clauses":[{"gt":["x*(1-x)"]},{"gt":["x-2","3-x"]}]}"#);
        let iv = intervals_1d(&r, -1.0, 4.0);
        assert_eq!(iv.len(), 2);
        assert!((iv[0].0).abs() < 1e-14 && (iv[0].1 - 1.0).abs() < 1e-14);
        assert!((iv[1].0 - 2.0).abs() < 1e-14 && (iv[1].1 - 3.0).abs() < 1e-14);
        let thin = region(r#"{"dim":1,"clauses":[{"eq":["x"],"gt":[]}]}"#);
        assert!(intervals_1d(&thin, -1.0, 1.0).is_empty());
    }

    #[test]
    fn split_parts() {
        let r = region(r#"{"dim":1,"clauses":[{"gt":["x","1-x"]}]}"#);
        let p = parts_1d(&r, 0.0, 1.0, &|x| Ok(x - 0.5), 1e-12).unwrap();
        assert!((p.pos - 0.125).abs() < 1e-12 && (p.neg - 0.125).abs() < 1e-12);
        let disk = region(r#"{"dim":2,"clauses":[{"gt":["1-x1^2-x2^2"]}]}"#);
        let p = parts_2d(&disk, [(-1.0, 1.0), (-1.0, 1.0)], &|_, _| Ok(1.0), 1e-9).unwrap();
        assert!((p.pos - std::f64::consts::PI).abs() < 1e-8, "{p:?}");
        let (v, _) = direct_2d(&disk, [(-1.0, 1.0), (-1.0, 1.0)], &|x, _| Ok(x), 1e-9).unwrap();
        assert!(v.abs() < 1e-8);
    }
}
