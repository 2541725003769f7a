use std::fmt;

use num_complex::Complex64;

use super::PeriodError;
use crate::sa_domain::{parse_expr, RatFunc};

/// An integration chain in `ℂ` (or `ℂⁿ` for parametric paths).
#[derive(Clone, Debug, PartialEq)]
pub enum PathSpec {
    /// `base + t·direction`, `t ∈ [0, ∞)`.
    Ray {
        base: Complex64,
        direction: Complex64,
    },
    Segment {
        a: Complex64,
        b: Complex64,
    },
    /// Consecutive segments through the given vertices.
    Polyline(Vec<Complex64>),
    /// `t ↦ (γ₁(t), …, γₙ(t))` on `[0, 1]`, components rational in `t`.
    Parametric(Vec<RatFunc>),
}

/// A complex literal: any constant expression of the shared grammar,
/// e.g. `2`, `1/2-3*i`, `exp(i*pi/4)`.
pub fn parse_complex(text: &str) -> Result<Complex64, PeriodError> {
    let bad = || PeriodError::BadPath(format!("`{text}` is not a complex constant"));
    let expr = parse_expr(text).map_err(|_| bad())?;
    let v = expr.eval_c64(&|_| None).map_err(|_| bad())?;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}*i", z.im)
    } else {
        format!("{}{:+}*i", z.re, z.im)
    }
}

impl PathSpec {
    /// Parses `ray:BASE:DIR`, `segment:A:B`, `poly:A:B:C…` or
    /// `param:γ₁(t),γ₂(t),…`.
    pub fn parse(text: &str) -> Result<Self, PeriodError> {
        let (kind, rest) = text.split_once(':').ok_or_else(|| PeriodError::BadPath(text.to_string()))?;
        if kind == "param" {
            let comps = rest
                .split(',')
                .map(|c| RatFunc::parse_in(c, &["t"]).map_err(|e| PeriodError::BadPath(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(PathSpec::Parametric(comps));
        }
        let pts = rest.split(':').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
        let path = match (kind, pts.as_slice()) {
            ("ray", &[base, direction]) => PathSpec::Ray { base, direction },
            ("segment", &[a, b]) => PathSpec::Segment { a, b },
            ("poly", p) if p.len() >= 2 => PathSpec::Polyline(p.to_vec()),
            _ => return Err(PeriodError::BadPath(text.to_string())),
        };
        path.validate()?;
        Ok(path)
    }

    pub fn ray(base: Complex64, direction: Complex64) -> Result<Self, PeriodError> {
        let p = PathSpec::Ray { base, direction };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), PeriodError> {
        match self {
            PathSpec::Ray { direction, .. } if direction.norm() == 0.0 => {
                Err(PeriodError::BadPath("ray direction must be nonzero".into()))
            }
            _ => Ok(()),
        }
    }

    /// Ambient complex dimension.
    pub fn dim(&self) -> usize {
        match self {
            PathSpec::Parametric(c) => c.len(),
            _ => 1,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, PathSpec::Ray { .. })
    }

    /// Affine pieces `(start, displacement)`, each parametrized by `t ∈ [0, 1]`
    /// (for a ray, `t ∈ [0, ∞)`).
    pub(crate) fn affine_pieces(&self) -> Vec<(Complex64, Complex64)> {
        match self {
            PathSpec::Ray { base, direction } => vec![(*base, *direction)],
            PathSpec::Segment { a, b } => vec![(*a, b - a)],
            PathSpec::Polyline(p) => p.windows(2).map(|w| (w[0], w[1] - w[0])).collect(),
            PathSpec::Parametric(_) => Vec::new(),
        }
    }

    /// `∂` as a list of `(point, multiplicity)`; the end at infinity of a ray
    /// contributes nothing. `None` for parametric paths in `ℂⁿ`, `n > 1`.
    pub fn boundary(&self) -> Result<Vec<(Complex64, i32)>, PeriodError> {
        Ok(match self {
            PathSpec::Ray { base, .. } => vec![(*base, -1)],
            PathSpec::Segment { a, b } => vec![(*a, -1), (*b, 1)],
            PathSpec::Polyline(p) => vec![(p[0], -1), (*p.last().expect("two vertices"), 1)],
            PathSpec::Parametric(c) if c.len() == 1 => {
                let at = |t: f64| c[0].eval_real(&[t]).map_err(|e| PeriodError::BadPath(e.to_string()));
                vec![(at(0.0)?, -1), (at(1.0)?, 1)]
            }
            PathSpec::Parametric(_) => {
                return Err(PeriodError::BadPath("boundary points of a path in ℂⁿ, n > 1".into()));
            }
        })
    }
}

impl fmt::Display for PathSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathSpec::Ray { base, direction } => {
                write!(f, "ray:{}:{}", format_complex(*base), format_complex(*direction))
            }
            PathSpec::Segment { a, b } => write!(f, "segment:{}:{}", format_complex(*a), format_complex(*b)),
            PathSpec::Polyline(p) => {
                write!(f, "poly")?;
                for z in p {
                    write!(f, ":{}", format_complex(*z))?;
                }
                Ok(())
            }
            PathSpec::Parametric(c) => {
                let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
                write!(f, "param:{}", parts.join(","))
            }
        }
    }
}
