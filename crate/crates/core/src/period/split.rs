use num_complex::Complex64;

use super::quad::{integrate, QuadResult};
use super::PeriodError;
use crate::sa_domain::{natural_var_order, DomainError, RatForm, RatFunc};

/// `e^{−f}ω` over real variables, written through `f = f₁ + i f₂` and
/// `ω = ω₁ + i ω₂` as
///
/// ```text
/// Re = cos(f₂)e^{−f₁}ω₁ + sin(f₂)e^{−f₁}ω₂
/// Im = −sin(f₂)e^{−f₁}ω₁ + cos(f₂)e^{−f₁}ω₂
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SplitIntegrand {
    pub vars: Vec<String>,
    pub f1: RatFunc,
    pub f2: RatFunc,
    /// Coefficients of `ω₁` and `ω₂` against `dx₁, …, dxₙ`.
    pub omega1: Vec<RatFunc>,
    pub omega2: Vec<RatFunc>,
}

pub fn split_integrand(f: &RatFunc, omega: &RatForm) -> Result<SplitIntegrand, DomainError> {
    let mut vars: Vec<String> = f.vars().to_vec();
    for v in omega.vars() {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    vars.sort_by(|a, b| natural_var_order(a, b));
    let (f1, f2) = f.with_vars(&vars)?.real_imag_split();
    let (omega1, omega2) =
        omega.with_vars(&vars)?.one_form_coefficients()?.iter().map(RatFunc::real_imag_split).unzip();
    Ok(SplitIntegrand { vars, f1, f2, omega1, omega2 })
}

fn real_at(g: &RatFunc, x: &[f64]) -> Result<f64, DomainError> {
    Ok(g.eval_real(x)?.re)
}

impl SplitIntegrand {
    /// The four real terms `[cos f₂ e^{−f₁}ω₁, sin f₂ e^{−f₁}ω₂, −sin f₂ e^{−f₁}ω₁,
    /// cos f₂ e^{−f₁}ω₂]` of each coefficient at `x`.
    pub fn terms(&self, x: &[f64]) -> Result<Vec<[f64; 4]>, DomainError> {
        let e = (-real_at(&self.f1, x)?).exp();
        let (s, c) = real_at(&self.f2, x)?.sin_cos();
        self.omega1
            .iter()
            .zip(&self.omega2)
            .map(|(w1, w2)| {
                let (a, b) = (real_at(w1, x)?, real_at(w2, x)?);
                Ok([c * e * a, s * e * b, -s * e * a, c * e * b])
            })
            .collect()
    }

    /// Real and imaginary coefficient vectors at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>), DomainError> {
        Ok(self.terms(x)?.iter().map(|t| (t[0] + t[1], t[2] + t[3])).unzip())
    }
}

/// Integrates the real and imaginary parts separately over `[a, b]` (one variable).
pub fn integrate_split(s: &SplitIntegrand, a: f64, b: f64, tol: f64) -> Result<(QuadResult, QuadResult), PeriodError> {
    if s.vars.len() != 1 {
        return Err(PeriodError::DimensionMismatch { expected: 1, found: s.vars.len() });
    }
    let part = |k: usize| {
        move |x: f64| match s.eval(&[x]) {
            Ok((re, im)) => Complex64::new(if k == 0 { re[0] } else { im[0] }, 0.0),
            Err(_) => Complex64::new(f64::NAN, 0.0),
        }
    };
    Ok((integrate(part(0), a, b, tol, 4000)?, integrate(part(1), a, b, tol, 4000)?))
}
