use std::collections::BTreeMap;

use num_complex::Complex64;

use super::VolumeError;
use crate::sa_domain::{sort_with_sign, Expr};
use crate::Rational;

fn num(k: i64) -> Expr {
    Expr::Num(Rational::from_integer(k.into()))
}

fn call(name: &str, a: Expr) -> Expr {
    Expr::Call(name.to_string(), Box::new(a))
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::Mul(Box::new(a), Box::new(b))
}

fn div(a: Expr, b: Expr) -> Expr {
    Expr::Div(Box::new(a), Box::new(b))
}

fn depends_on(e: &Expr, var: &str) -> bool {
    e.variables().iter().any(|v| v == var)
}

/// Symbolic `∂e/∂var`, unsimplified.
pub(crate) fn derivative(e: &Expr, var: &str) -> Result<Expr, VolumeError> {
    if !depends_on(e, var) {
        return Ok(num(0));
    }
    let d = |x: &Expr| derivative(x, var);
    Ok(match e {
        Expr::Num(_) | Expr::Imag => num(0),
        Expr::Var(v) => num(i64::from(v == var)),
        Expr::Neg(a) => Expr::Neg(Box::new(d(a)?)),
        Expr::Add(a, b) => Expr::Add(Box::new(d(a)?), Box::new(d(b)?)),
        Expr::Sub(a, b) => Expr::Sub(Box::new(d(a)?), Box::new(d(b)?)),
        Expr::Mul(a, b) => Expr::Add(Box::new(mul(d(a)?, (**b).clone())), Box::new(mul((**a).clone(), d(b)?))),
        Expr::Div(a, b) => div(
            Expr::Sub(Box::new(mul(d(a)?, (**b).clone())), Box::new(mul((**a).clone(), d(b)?))),
            Expr::Pow(b.clone(), Box::new(num(2))),
        ),
        Expr::Pow(a, b) if !depends_on(b, var) => {
            mul(mul((**b).clone(), Expr::Pow(a.clone(), Box::new(Expr::Sub(b.clone(), Box::new(num(1)))))), d(a)?)
        }
        Expr::Pow(a, b) => mul(
            e.clone(),
            Expr::Add(
                Box::new(mul(d(b)?, call("log", (**a).clone()))),
                Box::new(div(mul((**b).clone(), d(a)?), (**a).clone())),
            ),
        ),
        Expr::Call(name, a) => {
            let inner = d(a)?;
            let a = (**a).clone();
            let outer = match name.as_str() {
                "exp" => call("exp", a),
                "sin" => call("cos", a),
                "cos" => Expr::Neg(Box::new(call("sin", a))),
                "sqrt" => div(num(1), mul(num(2), call("sqrt", a))),
                "log" => div(num(1), a),
                other => return Err(VolumeError::NotDifferentiable(other.to_string())),
            };
            mul(outer, inner)
        }
    })
}

fn has_differential(e: &Expr, ambient: &[String]) -> bool {
    e.variables().iter().any(|v| ambient.iter().any(|a| v.strip_prefix('d') == Some(a.as_str())))
}

type Terms = Vec<(Vec<usize>, Expr)>;

fn expand(e: &Expr, ambient: &[String]) -> Result<Terms, VolumeError> {
    let plain = |e: &Expr| -> Result<Expr, VolumeError> {
        if has_differential(e, ambient) {
            Err(VolumeError::BadForm(format!("differential inside `{e}`")))
        } else {
            Ok(e.clone())
        }
    };
    Ok(match e {
        Expr::Var(v) => match ambient.iter().position(|a| v.strip_prefix('d') == Some(a.as_str())) {
            Some(i) => vec![(vec![i], num(1))],
            None => vec![(Vec::new(), e.clone())],
        },
        Expr::Num(_) | Expr::Imag | Expr::Call(..) | Expr::Pow(..) => vec![(Vec::new(), plain(e)?)],
        Expr::Neg(a) => expand(a, ambient)?.into_iter().map(|(i, c)| (i, Expr::Neg(Box::new(c)))).collect(),
        Expr::Add(a, b) => [expand(a, ambient)?, expand(b, ambient)?].concat(),
        Expr::Sub(a, b) => {
            let mut out = expand(a, ambient)?;
            out.extend(expand(b, ambient)?.into_iter().map(|(i, c)| (i, Expr::Neg(Box::new(c)))));
            out
        }
        Expr::Mul(a, b) => {
            let mut out = Vec::new();
            for (ia, ca) in expand(a, ambient)? {
                for (ib, cb) in expand(b, ambient)? {
                    if let Some((idx, sign)) = sort_with_sign(&[ia.clone(), ib].concat()) {
                        let c = mul(ca.clone(), cb);
                        out.push((idx, if sign < 0 { Expr::Neg(Box::new(c)) } else { c }));
                    }
                }
            }
            out
        }
        Expr::Div(a, b) => {
            let b = plain(b)?;
            expand(a, ambient)?.into_iter().map(|(i, c)| (i, div(c, b.clone()))).collect()
        }
    })
}

/// Splits a differential form written in the shared grammar (`dx` for the
/// differential of ambient variable `x`, products as wedges) into
/// `Σ_I a_I dx_I` with strictly increasing index sets of length `degree`.
pub(crate) fn form_terms(e: &Expr, ambient: &[String], degree: usize) -> Result<Terms, VolumeError> {
    let mut grouped: BTreeMap<Vec<usize>, Expr> = BTreeMap::new();
    for (idx, c) in expand(e, ambient)? {
        if idx.len() != degree {
            return Err(VolumeError::BadForm(format!("term of degree {} in a {degree}-form", idx.len())));
        }
        let entry = grouped.remove(&idx);
        grouped.insert(
            idx,
            match entry {
                Some(prev) => Expr::Add(Box::new(prev), Box::new(c)),
                None => c,
            },
        );
    }
    Ok(grouped.into_iter().collect())
}

/// Numerical value of a real-valued expression with the given bindings.
pub(crate) fn eval_real(e: &Expr, names: &[String], values: &[f64]) -> Result<f64, VolumeError> {
    let lookup = |v: &str| names.iter().position(|n| n == v).map(|i| Complex64::new(values[i], 0.0));
    let z = e.eval_c64(&lookup).map_err(|err| VolumeError::DensityUndefined(err.to_string()))?;
    if !z.re.is_finite() || z.im.abs() > 1e-12 * (1.0 + z.re.abs()) {
        return Err(VolumeError::DensityUndefined(format!("`{e}` is {z} at {values:?}")));
    }
    Ok(z.re)
}
