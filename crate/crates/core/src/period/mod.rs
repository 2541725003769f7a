//! Exponential period integrals `∫_G e^{−f} ω` along paths, with the
//! convergence gate of [`properness_check`] in front of the quadrature.
//!
//! Compact pieces are integrated by adaptive Gauss–Kronrod. On an accepted
//! unbounded end `t ↦ b + t·d` the integral is cut at `T` with an explicit
//! bound on the tail: if `f(b + td) = c·t^k + O(t^{k−1})` with `Re c > 0` and
//! `|ω-coefficient·d| ≤ A·t^m` for `t ≥ T₀`, then for `T ≥ T₀`
//!
//! ```text
//! |∫_T^∞ e^{−f} ω| ≤ 2A·T^{m−k+1}·e^{−αT^k}/α,   α = Re(c)/2.
//! ```
//!
//! With `force`, rejected paths are integrated anyway (unbounded ends through
//! `t = u/(1−u)`); the result keeps the rejection in its verdict.

mod matrix;
mod path;
mod proper;
mod quad;
mod split;
mod stokes;

use std::fmt;

use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

pub use matrix::{period_matrix, PeriodMatrix};
pub use path::{parse_complex, PathSpec};
pub use proper::{properness_check, Properness, RejectReason};
pub use quad::{integrate, QuadFailure, QuadResult};
pub use split::{integrate_split, split_integrand, SplitIntegrand};
pub use stokes::{stokes_check, stokes_residual, StokesReport, Triangle};

use crate::sa_domain::{cpoly_eval, natural_var_order, DomainError, RatForm, RatFunc};
pub(crate) use proper::{real_roots_in, trim};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PeriodError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("bad path: {0}")]
    BadPath(String),
    #[error("path lives in ℂ^{expected} but the data uses {found} variables")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("path rejected: {0}")]
    RejectedPath(RejectReason),
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("path endpoint {0} is not a marked point")]
    EndpointNotMarked(Complex64),
    #[error("ω has a pole on the path at {0}")]
    PoleOnPath(Complex64),
    #[error("pole on the simplex")]
    PoleOnSimplex,
    #[error("{0}")]
    Invalid(String),
}

impl From<QuadFailure> for PeriodError {
    fn from(e: QuadFailure) -> Self {
        PeriodError::QuadratureFailure(match e {
            QuadFailure::NonFinite { at } => format!("non-finite integrand at parameter {at}"),
            QuadFailure::Stalled { value, abs_err } => {
                format!("refinement stalled at {value} with error estimate {abs_err:.3e}")
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationOptions {
    /// Target absolute error, quadrature plus tail.
    pub tol: f64,
    /// Integrate paths the gate rejects.
    pub force: bool,
    /// Subinterval budget per quadrature.
    pub max_pieces: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self { tol: 1e-10, force: false, max_pieces: 4000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Converged,
    /// Computed under `force` although the gate rejected the path.
    Rejected(RejectReason),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Converged => write!(f, "converged"),
            Verdict::Rejected(r) => write!(f, "rejected: {r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodValue {
    pub value: Complex64,
    /// Quadrature estimate plus tail bound. Forced unbounded ends have no tail bound.
    pub abs_err: f64,
    pub verdict: Verdict,
    pub properness: Properness,
    /// Truncation point `T` of the unbounded end, if any.
    pub cutoff: Option<f64>,
    pub evaluations: usize,
}

impl PeriodValue {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "re": self.value.re,
            "im": self.value.im,
            "abs_err": self.abs_err,
            "verdict": match self.verdict { Verdict::Converged => "converged", Verdict::Rejected(_) => "rejected" },
            "properness": self.properness.to_json(),
            "evaluations": self.evaluations,
        });
        if let Verdict::Rejected(r) = &self.verdict {
            v["reason"] = json!(r.to_string());
        }
        if let Some(t) = self.cutoff {
            v["cutoff"] = json!(t);
        }
        v
    }
}

/// Puts `f` and `ω` on a common variable list of length `dim`: the union of
/// their variables in natural order, padded with unused names.
pub(crate) fn align(
    f: &RatFunc,
    omega: Option<&RatForm>,
    dim: usize,
) -> Result<(RatFunc, Vec<RatFunc>, Vec<String>), PeriodError> {
    let mut vars: Vec<String> = f.vars().to_vec();
    for v in omega.map(|o| o.vars()).unwrap_or(&[]) {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    vars.sort_by(|a, b| natural_var_order(a, b));
    if vars.len() > dim {
        return Err(PeriodError::DimensionMismatch { expected: dim, found: vars.len() });
    }
    let mut k = 0;
    while vars.len() < dim {
        let name = if dim == 1 { "z".to_string() } else { format!("_{k}") };
        k += 1;
        if !vars.contains(&name) {
            vars.push(name);
        }
    }
    let f = f.with_vars(&vars)?;
    let coeffs = match omega {
        Some(o) => o.with_vars(&vars)?.one_form_coefficients()?,
        None => Vec::new(),
    };
    Ok((f, coeffs, vars))
}

fn l1(p: &[Complex64]) -> f64 {
    p.iter().map(|c| c.norm()).sum()
}

/// Tail bound along `t ↦ b + t·d` for `f = p/q`, coefficient `n/d`.
struct TailBound {
    alpha: f64,
    k: i32,
    a: f64,
    m: i32,
    t0: f64,
}

impl TailBound {
    fn new(p: &[Complex64], q: &[Complex64], n: &[Complex64], dd: &[Complex64], speed: f64) -> Option<TailBound> {
        let k = p.len() as i32 - q.len() as i32;
        if k < 1 {
            return None;
        }
        let (pl, ql) = (p[p.len() - 1], q[q.len() - 1]);
        let c = pl / ql;
        if c.re <= 0.0 {
            return None;
        }
        let alpha = c.re / 2.0;
        // R = p − c·t^k·q has degree below deg p.
        let mut r = p.to_vec();
        for (i, qi) in q.iter().enumerate() {
            r[i + k as usize] -= c * qi;
        }
        r.pop();
        let t_q = 2.0 * l1(&q[..q.len() - 1]) / ql.norm();
        let e = 2.0 * l1(&r) / ql.norm();
        let t_f = 2.0 * e / c.re;
        let (a, m, t_d) = if n.is_empty() {
            (0.0, 0, 0.0)
        } else {
            let dl = dd[dd.len() - 1];
            (
                2.0 * l1(n) * speed / dl.norm(),
                n.len() as i32 - dd.len() as i32,
                2.0 * l1(&dd[..dd.len() - 1]) / dl.norm(),
            )
        };
        let t_mono = if m > 0 { (2.0 * m as f64 / (alpha * k as f64)).powf(1.0 / k as f64) } else { 0.0 };
        let t0 = 1f64.max(t_q).max(t_f).max(t_d).max(t_mono);
        Some(TailBound { alpha, k, a, m, t0 })
    }

    fn bound(&self, t: f64) -> f64 {
        if self.a == 0.0 {
            return 0.0;
        }
        2.0 * self.a * t.powi(self.m - self.k + 1) * (-self.alpha * t.powi(self.k)).exp() / self.alpha
    }

    /// Smallest `T = T₀·1.1^j` whose bound is below `target`.
    fn cutoff(&self, target: f64) -> Option<f64> {
        let mut t = self.t0;
        for _ in 0..2000 {
            if self.bound(t) <= target {
                return Some(t);
            }
            t *= 1.1;
        }
        None
    }
}

/// `∫_path e^{−f} ω` for a 1-form `ω`.
pub fn integrate_path(
    f: &RatFunc,
    omega: &RatForm,
    path: &PathSpec,
    opts: &IntegrationOptions,
) -> Result<PeriodValue, PeriodError> {
    let properness = properness_check(f, path)?;
    let verdict = match &properness {
        Properness::Reject(reason) if !opts.force => return Err(PeriodError::RejectedPath(reason.clone())),
        Properness::Reject(reason) => Verdict::Rejected(reason.clone()),
        _ => Verdict::Converged,
    };
    let (f, coeffs, _) = align(f, Some(omega), path.dim())?;
    let mut total = Complex64::new(0.0, 0.0);
    let (mut abs_err, mut evaluations, mut cutoff) = (0.0, 0, None);

    if let PathSpec::Parametric(comps) = path {
        let d: Vec<RatFunc> = comps.iter().map(|c| c.derivative(0)).collect();
        let g = |t: f64| -> Complex64 {
            let eval = || -> Result<Complex64, DomainError> {
                let z = comps.iter().map(|c| c.eval_real(&[t])).collect::<Result<Vec<_>, _>>()?;
                let mut s = Complex64::new(0.0, 0.0);
                for (a, dc) in coeffs.iter().zip(&d) {
                    s += a.eval(&z)? * dc.eval_real(&[t])?;
                }
                Ok((-f.eval(&z)?).exp() * s)
            };
            eval().unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        };
        let r = integrate(g, 0.0, 1.0, opts.tol, opts.max_pieces)?;
        return Ok(PeriodValue {
            value: r.value,
            abs_err: r.abs_err,
            verdict,
            properness,
            cutoff: None,
            evaluations: r.evaluations,
        });
    }

    let pieces = path.affine_pieces();
    let budget = if path.is_unbounded() { opts.tol / 2.0 } else { opts.tol / pieces.len() as f64 };
    let coeff = &coeffs[0];
    for (base, disp) in pieces {
        let (p, q) = f.compose_affine(&[base], &[disp]);
        let (n, dd) = coeff.compose_affine(&[base], &[disp]);
        let (p, q, n, dd) = (trim(&p), trim(&q), trim(&n), trim(&dd));
        let hi = if path.is_unbounded() { f64::INFINITY } else { 1.0 };
        if !opts.force {
            if let Some(&t) = real_roots_in(&dd, 0.0, hi).first() {
                return Err(PeriodError::PoleOnPath(base + disp * t));
            }
        }
        let g = |t: f64| -> Complex64 {
            let t = Complex64::new(t, 0.0);
            if n.is_empty() {
                return Complex64::new(0.0, 0.0);
            }
            (-cpoly_eval(&p, t) / cpoly_eval(&q, t)).exp() * cpoly_eval(&n, t) / cpoly_eval(&dd, t) * disp
        };
        let r = if !path.is_unbounded() {
            integrate(g, 0.0, 1.0, budget, opts.max_pieces)?
        } else if properness.is_accepted() {
            let tail = TailBound::new(&p, &q, &n, &dd, disp.norm())
                .ok_or_else(|| PeriodError::QuadratureFailure("no tail bound on an accepted end".into()))?;
            let t = tail
                .cutoff(opts.tol / 2.0)
                .ok_or_else(|| PeriodError::QuadratureFailure("tail bound never fell below tolerance".into()))?;
            cutoff = Some(t);
            abs_err += tail.bound(t);
            integrate(g, 0.0, t, budget, opts.max_pieces)?
        } else {
            let h = |u: f64| g(u / (1.0 - u)) / ((1.0 - u) * (1.0 - u));
            integrate(h, 0.0, 1.0, opts.tol, opts.max_pieces)?
        };
        total += r.value;
        abs_err += r.abs_err;
        evaluations += r.evaluations;
    }
    if matches!(verdict, Verdict::Converged) && abs_err > opts.tol {
        return Err(PeriodError::QuadratureFailure(format!("error {abs_err:.3e} above tolerance {}", opts.tol)));
    }
    Ok(PeriodValue { value: total, abs_err, verdict, properness, cutoff, evaluations })
}

/// Pairing of the relative cocycle `(ω, a)` with the chain `path`:
/// `∫_path e^{−f}ω − Σ_y (∂path)_y·e^{−f(y)}·a(y)`.
///
/// With `∂G = −[y₀]` for a ray starting at `y₀` this is `∫ + e^{−f(y₀)}a(y₀)`,
/// and every `d_f`-exact pair `(d_f P, P|_Y)` pairs to zero.
pub fn pair_relative(
    f: &RatFunc,
    omega: &RatForm,
    marked: &[Complex64],
    values: &[Complex64],
    path: &PathSpec,
    opts: &IntegrationOptions,
) -> Result<PeriodValue, PeriodError> {
    if marked.len() != values.len() {
        return Err(PeriodError::Invalid(format!("{} marked points but {} values", marked.len(), values.len())));
    }
    let boundary = path.boundary()?;
    let (f1, _, _) = align(f, None, 1)?;
    let mut correction = Complex64::new(0.0, 0.0);
    for (y, mult) in boundary {
        let idx = marked
            .iter()
            .position(|m| (m - y).norm() <= 1e-12 * m.norm().max(1.0))
            .ok_or(PeriodError::EndpointNotMarked(y))?;
        correction += (-f1.eval(&[y])?).exp() * values[idx] * mult as f64;
    }
    let mut v = integrate_path(f, omega, path, opts)?;
    v.value -= correction;
    Ok(v)
}
