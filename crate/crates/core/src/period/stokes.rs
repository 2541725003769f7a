use num_complex::Complex64;
use serde::Serialize;

use super::proper::{real_roots_in, trim};
use super::quad::{integrate, QuadFailure};
use super::{align, PeriodError};
use crate::derham::d_f_apply;
use crate::sa_domain::{DomainError, RatForm, RatFunc};

/// An affine 2-simplex in `ℂ ≅ ℝ²`, oriented by its vertex order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Triangle(pub [[f64; 2]; 3]);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StokesReport {
    /// `∫_σ e^{−f} d_f ω`.
    pub interior: [f64; 2],
    /// `∫_{∂σ} e^{−f} ω`.
    pub boundary: [f64; 2],
    pub residual: f64,
}

const TOL: f64 = 1e-12;
const PIECES: usize = 400;

fn quad_err(e: QuadFailure) -> PeriodError {
    match e {
        QuadFailure::NonFinite { .. } => PeriodError::PoleOnSimplex,
        other => other.into(),
    }
}

/// Looks for real zeros of the denominators along the edges and along 64
/// chords parallel to the edge `v0 v2`.
fn pole_on_triangle<'a>(sigma: &Triangle, funcs: impl Iterator<Item = &'a RatFunc>) -> bool {
    let [v0, v1, v2] = sigma.0.map(|[x, y]| [Complex64::new(x, 0.0), Complex64::new(y, 0.0)]);
    let mut lines = vec![(v0, v1), (v1, v2), (v2, v0)];
    for k in 1..64 {
        let s = k as f64 / 64.0;
        let a = [v0[0] + (v1[0] - v0[0]) * s, v0[1] + (v1[1] - v0[1]) * s];
        let b = [v2[0] + (v1[0] - v2[0]) * s, v2[1] + (v1[1] - v2[1]) * s];
        lines.push((a, b));
    }
    funcs.filter(|g| !g.is_polynomial()).any(|g| {
        lines.iter().any(|(a, b)| {
            let den = g.denominator().compose_affine_c64(a, &[b[0] - a[0], b[1] - a[1]]);
            !real_roots_in(&trim(&den), 0.0, 1.0).is_empty()
        })
    })
}

/// Compares both sides of `∫_σ d(e^{−f}ω) = ∫_{∂σ} e^{−f}ω` for a 1-form `ω`
/// and function `f` in two real variables (natural order, e.g. `x, y`).
pub fn stokes_check(sigma: &Triangle, omega: &RatForm, f: &RatFunc) -> Result<StokesReport, PeriodError> {
    let (f, coeffs, vars) = align(f, Some(omega), 2)?;
    let omega = omega.with_vars(&vars)?;
    let r = d_f_apply(&omega, &f).with_vars(&vars)?.coefficient(&[0, 1]);
    let [v0, v1, v2] = sigma.0;
    if pole_on_triangle(sigma, std::iter::once(&f).chain(&coeffs).chain(std::iter::once(&r))) {
        return Err(PeriodError::PoleOnSimplex);
    }
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let at = |x: f64, y: f64| [Complex64::new(x, 0.0), Complex64::new(y, 0.0)];
    let weight = |p: &[Complex64; 2]| -> Result<Complex64, DomainError> { Ok((-f.eval(p)?).exp()) };

    let (e1, e2) = ([v1[0] - v0[0], v1[1] - v0[1]], [v2[0] - v0[0], v2[1] - v0[1]]);
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    let inner = |s: f64| -> Complex64 {
        let g = |w: f64| {
            let t = (1.0 - s) * w;
            let p = at(v0[0] + s * e1[0] + t * e2[0], v0[1] + s * e1[1] + t * e2[1]);
            (|| Ok::<_, DomainError>(weight(&p)? * r.eval(&p)?))().unwrap_or(nan) * (1.0 - s)
        };
        integrate(g, 0.0, 1.0, TOL, PIECES).map(|q| q.value).unwrap_or(nan)
    };
    let interior = integrate(inner, 0.0, 1.0, TOL, PIECES).map_err(quad_err)?.value * det;

    let mut boundary = Complex64::new(0.0, 0.0);
    for (a, b) in [(v0, v1), (v1, v2), (v2, v0)] {
        let d = [b[0] - a[0], b[1] - a[1]];
        let g = |t: f64| {
            let p = at(a[0] + t * d[0], a[1] + t * d[1]);
            (|| Ok::<_, DomainError>(weight(&p)? * (coeffs[0].eval(&p)? * d[0] + coeffs[1].eval(&p)? * d[1])))()
                .unwrap_or(nan)
        };
        boundary += integrate(g, 0.0, 1.0, TOL, PIECES).map_err(quad_err)?.value;
    }
    Ok(StokesReport {
        interior: [interior.re, interior.im],
        boundary: [boundary.re, boundary.im],
        residual: (interior - boundary).norm(),
    })
}

/// `|∫_σ e^{−f} d_f ω − ∫_{∂σ} e^{−f} ω|`.
pub fn stokes_residual(sigma: &Triangle, omega: &RatForm, f: &RatFunc) -> Result<f64, PeriodError> {
    stokes_check(sigma, omega, f).map(|r| r.residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy(src: &str) -> RatFunc {
        RatFunc::parse_in(src, &["x", "y"]).unwrap()
    }

    fn form(src: &str) -> RatForm {
        RatForm::parse(src, Some(&["x", "y"]), Some(1)).unwrap()
    }

    const T: Triangle = Triangle([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);

    #[test]
    fn trivial_cases() {
        assert_eq!(stokes_residual(&T, &form("0"), &xy("x")).unwrap(), 0.0);
        assert!(stokes_residual(&T, &form("dx"), &xy("0")).unwrap() < 1e-12);
    }

    #[test]
    fn area_form() {
        // ω = x dy, f = 0: both sides equal the area 1/2.
        let r = stokes_check(&T, &form("x*dy"), &xy("0")).unwrap();
        assert!((r.interior[0] - 0.5).abs() < 1e-12 && r.residual < 1e-12);
        // Reversed orientation flips both sides.
        let rev = Triangle([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]);
        let r = stokes_check(&rev, &form("x*dy"), &xy("0")).unwrap();
        assert!((r.interior[0] + 0.5).abs() < 1e-12 && r.residual < 1e-12);
    }

    #[test]
    fn twisted() {
        let r = stokes_check(&T, &form("(x^2-i*y)*dx + x*y*dy"), &xy("x^3 + i*y - 2*x*y")).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
        assert!(matches!(stokes_residual(&T, &form("dx/(x-1/4)"), &xy("0")), Err(PeriodError::PoleOnSimplex)));
    }
}
