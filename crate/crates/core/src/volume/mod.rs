//! Integrals over compact pseudo-oriented domains as volumes.
//!
//! A density (a function, or a top-degree form pulled back through user
//! declared charts `ψ`) becomes the pair of bounded open sets
//!
//! ```text
//! U_± = {(y, z) : y ∈ C_±, 0 < z < |a(y)|},   C_± = {y : ±σ(y)·a(y) > 0}
//! ```
//!
//! with `σ` the orientation sign, so that `∫ a = vol U_+ − vol U_−`.
//! [`grid_volume`] gives exact Jordan bounds for sign-condition regions and
//! [`combine_signed_volumes`] merges signed lists of regions by disjoint
//! translation and cube swapping on a mesh.

mod expr;
mod grid;
mod integrate;

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

pub use grid::{combine_signed_volumes, grid_volume, CombineResult, GridBounds, SignedItem};

use crate::sa_domain::{
    format_rational, parse_expr, parse_rational, Clause, DomainError, Expr, ParamBox, PseudoOrientation, QPoly,
    RatFunc, RegionJson, SignConditionRegion,
};
use crate::Rational;
use expr::{derivative, eval_real, form_terms};
use integrate::{direct_1d, direct_2d, parts_1d, parts_2d, Parts};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum VolumeError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("domain is not bounded: {0}")]
    UnboundedDomain(String),
    #[error("density undefined: {0}")]
    DensityUndefined(String),
    #[error("bad form: {0}")]
    BadForm(String),
    #[error("`{0}` cannot be differentiated")]
    NotDifferentiable(String),
    #[error("domains of dimension {0} are not supported (only 1 and 2)")]
    UnsupportedDimension(usize),
    #[error("mesh size must be positive")]
    BadMesh,
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("malformed input: {0}")]
    Invalid(String),
}

/// Chart coordinates: `x` in dimension 1, `x1, x2` in dimension 2.
pub fn param_names(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["x".into()]
    } else {
        (1..=dim).map(|i| format!("x{i}")).collect()
    }
}

/// One piece of the domain: the image of `region ∩ bbox` under `map`.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub region: SignConditionRegion,
    pub bbox: ParamBox,
    /// Ambient coordinates as expressions in [`param_names`]; `None` is the identity.
    pub map: Option<Vec<Expr>>,
    pub orientation: PseudoOrientation,
}

impl Chart {
    /// Identity chart with the positive orientation on the whole box.
    pub fn identity(region: SignConditionRegion, bbox: ParamBox) -> Result<Self, VolumeError> {
        let orientation = PseudoOrientation::single(bbox.clone(), 1)?;
        Ok(Chart { region, bbox, map: None, orientation })
    }
}

/// A compact `d`-dimensional domain with a density, `d ∈ {1, 2}`.
#[derive(Clone, Debug)]
pub struct DensityDomain {
    dim: usize,
    ambient: Vec<String>,
    charts: Vec<Chart>,
    density: Expr,
    pullbacks: Vec<Expr>,
}

fn substitute(e: &Expr, names: &[String], images: &[Expr]) -> Expr {
    let s = |x: &Expr| Box::new(substitute(x, names, images));
    match e {
        Expr::Var(v) => match names.iter().position(|n| n == v) {
            Some(i) => images[i].clone(),
            None => e.clone(),
        },
        Expr::Num(_) | Expr::Imag => e.clone(),
        Expr::Call(f, a) => Expr::Call(f.clone(), s(a)),
        Expr::Neg(a) => Expr::Neg(s(a)),
        Expr::Add(a, b) => Expr::Add(s(a), s(b)),
        Expr::Sub(a, b) => Expr::Sub(s(a), s(b)),
        Expr::Mul(a, b) => Expr::Mul(s(a), s(b)),
        Expr::Div(a, b) => Expr::Div(s(a), s(b)),
        Expr::Pow(a, b) => Expr::Pow(s(a), s(b)),
    }
}

fn zero() -> Expr {
    Expr::Num(Rational::from_integer(0.into()))
}

fn is_differential(v: &str, ambient: &[String]) -> bool {
    v.strip_prefix('d').is_some_and(|rest| ambient.iter().any(|a| a == rest))
}

impl DensityDomain {
    /// `density` is either a `d`-form in the ambient variables (`y*dx`) or a
    /// function, read as `a·dx₁∧…∧dx_d` in chart coordinates with its
    /// variables bound to the ambient point `ψ(x)`.
    pub fn new(
        dim: usize,
        ambient: Option<Vec<String>>,
        charts: Vec<Chart>,
        density: Expr,
    ) -> Result<Self, VolumeError> {
        if dim == 0 || dim > 2 {
            return Err(VolumeError::UnsupportedDimension(dim));
        }
        if charts.is_empty() {
            return Err(VolumeError::Invalid("at least one chart is required".into()));
        }
        let ambient = match ambient {
            Some(a) => a,
            None if charts.iter().all(|c| c.map.is_none()) => param_names(dim),
            None => return Err(VolumeError::Invalid("charts with maps need the ambient `vars`".into())),
        };
        let params = param_names(dim);
        let mut pullbacks = Vec::new();
        for c in &charts {
            let mismatch = |found| VolumeError::Domain(DomainError::DimensionMismatch { expected: dim, found });
            if c.region.dim() != dim {
                return Err(mismatch(c.region.dim()));
            }
            if c.bbox.dim() != dim {
                return Err(mismatch(c.bbox.dim()));
            }
            if c.orientation.dim() != dim {
                return Err(mismatch(c.orientation.dim()));
            }
            let images: Vec<Expr> = match &c.map {
                Some(m) if m.len() != ambient.len() => {
                    return Err(VolumeError::Invalid(format!(
                        "map has {} components for {} ambient variables",
                        m.len(),
                        ambient.len()
                    )))
                }
                Some(m) => m.clone(),
                None if ambient.len() != dim => {
                    return Err(VolumeError::Invalid("identity charts need as many ambient variables as dim".into()))
                }
                None => params.iter().map(|p| Expr::Var(p.clone())).collect(),
            };
            let pb = Self::pullback(&density, dim, &ambient, &params, &images)?;
            if let Some(v) = pb.variables().into_iter().find(|v| !params.contains(v) && v != "pi" && v != "e") {
                return Err(VolumeError::DensityUndefined(format!("unknown variable `{v}`")));
            }
            pullbacks.push(pb);
        }
        Ok(DensityDomain { dim, ambient, charts, density, pullbacks })
    }

    fn pullback(
        density: &Expr,
        dim: usize,
        ambient: &[String],
        params: &[String],
        images: &[Expr],
    ) -> Result<Expr, VolumeError> {
        if !density.variables().iter().any(|v| is_differential(v, ambient)) {
            return Ok(substitute(density, ambient, images));
        }
        let mut acc: Option<Expr> = None;
        for (idx, coeff) in form_terms(density, ambient, dim)? {
            let jac = |r: usize, c: usize| derivative(&images[idx[r]], &params[c]);
            let det = if dim == 1 {
                jac(0, 0)?
            } else {
                Expr::Sub(
                    Box::new(Expr::Mul(Box::new(jac(0, 0)?), Box::new(jac(1, 1)?))),
                    Box::new(Expr::Mul(Box::new(jac(0, 1)?), Box::new(jac(1, 0)?))),
                )
            };
            let term = Expr::Mul(Box::new(substitute(&coeff, ambient, images)), Box::new(det));
            acc = Some(match acc {
                Some(a) => Expr::Add(Box::new(a), Box::new(term)),
                None => term,
            });
        }
        Ok(acc.unwrap_or_else(zero))
    }

    /// Reads `{"dim", "vars"?, "charts":[{"region","box","map"?,"orientation"?}]}`
    /// or the single-chart shorthand `{"dim","region","box"}`.
    pub fn from_json(text: &str, density: &str) -> Result<Self, VolumeError> {
        let raw: DomainJson = serde_json::from_str(text).map_err(|e| VolumeError::Invalid(e.to_string()))?;
        let density = parse_expr(density).map_err(|e| VolumeError::DensityUndefined(e.to_string()))?;
        let chart_json = match (raw.charts, raw.region) {
            (Some(c), None) => c,
            (None, Some(region)) => vec![ChartJson { region, bbox: raw.bbox, map: None, orientation: None }],
            _ => return Err(VolumeError::Invalid("give either `charts` or `region`".into())),
        };
        let mut charts = Vec::new();
        for c in chart_json {
            let region: SignConditionRegion = c.region.try_into()?;
            let bbox = parse_box(
                c.bbox
                    .as_ref()
                    .ok_or_else(|| VolumeError::UnboundedDomain("every chart needs a bounding `box`".into()))?,
            )?;
            let map =
                match c.map {
                    Some(m) => Some(
                        m.iter()
                            .map(|s| parse_expr(s).map_err(|e| VolumeError::Invalid(e.to_string())))
                            .collect::<Result<Vec<_>, _>>()?,
                    ),
                    None => None,
                };
            let orientation = match c.orientation {
                None => PseudoOrientation::single(bbox.clone(), 1)?,
                Some(pieces) => {
                    let mut out = Vec::new();
                    for p in pieces {
                        out.push(crate::sa_domain::OrientedPiece { domain: parse_box(&p.bbox)?, sign: p.sign });
                    }
                    PseudoOrientation::new(raw.dim, out)?
                }
            };
            charts.push(Chart { region, bbox, map, orientation });
        }
        DensityDomain::new(raw.dim, raw.vars, charts, density)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> &[String] {
        &self.ambient
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn density(&self) -> &Expr {
        &self.density
    }

    /// The density of chart `i` with respect to `dx₁…dx_d`.
    pub fn pulled_back(&self, i: usize) -> &Expr {
        &self.pullbacks[i]
    }
}

#[derive(Deserialize)]
struct DomainJson {
    dim: usize,
    #[serde(default)]
    vars: Option<Vec<String>>,
    #[serde(default)]
    charts: Option<Vec<ChartJson>>,
    #[serde(default)]
    region: Option<RegionJson>,
    #[serde(default, rename = "box")]
    bbox: Option<Value>,
}

#[derive(Deserialize)]
struct ChartJson {
    region: RegionJson,
    #[serde(default, rename = "box")]
    bbox: Option<Value>,
    #[serde(default)]
    map: Option<Vec<String>>,
    #[serde(default)]
    orientation: Option<Vec<PieceJson>>,
}

#[derive(Deserialize)]
struct PieceJson {
    #[serde(rename = "box")]
    bbox: Value,
    sign: i8,
}

/// A box written as `[["lo","hi"], …]`; bounds may be rational strings or numbers.
pub fn parse_box(v: &Value) -> Result<ParamBox, VolumeError> {
    let bad = || VolumeError::UnboundedDomain(format!("`{v}` is not a finite box"));
    let rows = v.as_array().ok_or_else(bad)?;
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for row in rows {
        let pair = row.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
        let q = |x: &Value| -> Result<Rational, VolumeError> {
            match x {
                Value::String(s) => parse_rational(s).ok_or_else(bad),
                Value::Number(n) => n.as_f64().and_then(Rational::from_float).ok_or_else(bad),
                _ => Err(bad()),
            }
        };
        lo.push(q(&pair[0])?);
        hi.push(q(&pair[1])?);
    }
    Ok(ParamBox::new(lo, hi)?)
}

pub fn box_to_json(b: &ParamBox) -> Value {
    json!(b.lo.iter().zip(&b.hi).map(|(l, h)| [format_rational(l), format_rational(h)]).collect::<Vec<_>>())
}

/// A piece of `C_±`: chart, parameter box and the orientation sign there.
#[derive(Clone, Debug, PartialEq)]
pub struct BasePiece {
    pub chart: usize,
    pub domain: ParamBox,
    pub orientation: i8,
}

/// One of `U_±`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphRegion {
    pub sign: i8,
    pub pieces: Vec<BasePiece>,
    pub volume: f64,
    /// Sign conditions in `(x, z)` when there is one chart and its pulled back
    /// density is rational.
    pub region: Option<SignConditionRegion>,
}

impl GraphRegion {
    /// Human-readable set-builder description.
    pub fn describe(&self, densities: &[String]) -> String {
        let sign = if self.sign > 0 { "+" } else { "-" };
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| {
                let s = if p.orientation * self.sign > 0 { "" } else { "-" };
                format!("{{(x, z) : x ∈ R_{} ∩ box, {s}a > 0, 0 < z < |a|}} with a = {}", p.chart, densities[p.chart])
            })
            .collect();
        format!("U{sign} = {}", parts.join(" ⊔ "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeRepresentation {
    pub u_plus: GraphRegion,
    pub u_minus: GraphRegion,
    /// `Σ σ ∫ a` computed without sign splitting.
    pub integral: f64,
    pub abs_err: f64,
    pub densities: Vec<String>,
}

impl VolumeRepresentation {
    pub fn signed(&self) -> f64 {
        self.u_plus.volume - self.u_minus.volume
    }

    pub fn to_json(&self) -> Value {
        let region = |g: &GraphRegion| {
            json!({
                "description": g.describe(&self.densities),
                "volume": g.volume,
                "pieces": g.pieces.iter().map(|p| json!({
                    "chart": p.chart, "box": box_to_json(&p.domain), "orientation": p.orientation,
                })).collect::<Vec<_>>(),
                "region": g.region.as_ref().map(|r| r.to_json_value()),
            })
        };
        json!({
            "u_plus": region(&self.u_plus),
            "u_minus": region(&self.u_minus),
            "vol_plus": self.u_plus.volume,
            "vol_minus": self.u_minus.volume,
            "signed": self.signed(),
            "integral": self.integral,
            "abs_err": self.abs_err,
            "pulled_back": self.densities,
        })
    }
}

/// `{(x, z) : x ∈ R ∩ box, 0 < z, s·p·q − z·q² > 0}` for `a = p/q`.
fn graph_clauses(chart: &Chart, dom: &ParamBox, p: &QPoly, q: &QPoly, s: i8) -> Vec<Clause> {
    let d = chart.region.dim();
    let lift = |x: &QPoly| x.extend_vars(d + 1);
    let z = QPoly::var(d + 1, d);
    let (p, q) = (lift(p), lift(q));
    let pq = &p * &q;
    let pq = if s > 0 { pq } else { pq.scale(&Rational::from_integer((-1).into())) };
    let top = &pq - &(&z * &(&q * &q));
    let mut extra = vec![z, top];
    for i in 0..d {
        let xi = QPoly::var(d + 1, i);
        extra.push(&xi - &QPoly::constant(d + 1, dom.lo[i].clone()));
        extra.push(&QPoly::constant(d + 1, dom.hi[i].clone()) - &xi);
    }
    chart
        .region
        .clauses()
        .iter()
        .map(|c| Clause {
            eq: c.eq.iter().map(lift).collect(),
            gt: c.gt.iter().map(lift).chain(extra.iter().cloned()).collect(),
        })
        .collect()
}

/// Builds `U_±` and their volumes; `tol` is the absolute quadrature target.
pub fn represent_volume(domain: &DensityDomain, tol: f64) -> Result<VolumeRepresentation, VolumeError> {
    let params = param_names(domain.dim);
    let mut plus = GraphRegion { sign: 1, pieces: Vec::new(), volume: 0.0, region: None };
    let mut minus = GraphRegion { sign: -1, pieces: Vec::new(), volume: 0.0, region: None };
    let (mut integral, mut abs_err) = (0.0, 0.0);
    let mut clauses_plus = Vec::new();
    let mut clauses_minus = Vec::new();
    let mut graphs = domain.charts.len() == 1;

    for (ci, chart) in domain.charts.iter().enumerate() {
        let a = &domain.pullbacks[ci];
        let rational = RatFunc::from_expr(a, &params.iter().map(String::as_str).collect::<Vec<_>>())
            .ok()
            .filter(|r| r.is_real())
            .map(|r| (r.numerator().real_part(), r.denominator().real_part()));
        graphs &= rational.is_some();
        for piece in chart.orientation.pieces() {
            let Some(dom) = piece.domain.intersect(&chart.bbox) else { continue };
            let sigma = piece.sign;
            let b = dom.bounds_f64();
            let (parts, (direct, derr)) = match domain.dim {
                1 => {
                    let g = |x: f64| eval_real(a, &params, &[x]);
                    (
                        parts_1d(&chart.region, b[0].0, b[0].1, &g, tol)?,
                        direct_1d(&chart.region, b[0].0, b[0].1, &g, tol)?,
                    )
                }
                _ => {
                    let g = |x: f64, y: f64| eval_real(a, &params, &[x, y]);
                    let bounds = [b[0], b[1]];
                    (parts_2d(&chart.region, bounds, &g, tol)?, direct_2d(&chart.region, bounds, &g, tol)?)
                }
            };
            let Parts { pos, neg, err } = parts;
            let (to_plus, to_minus) = if sigma > 0 { (pos, neg) } else { (neg, pos) };
            plus.volume += to_plus;
            minus.volume += to_minus;
            integral += f64::from(sigma) * direct;
            abs_err += err + derr;
            for g in [&mut plus, &mut minus] {
                g.pieces.push(BasePiece { chart: ci, domain: dom.clone(), orientation: sigma });
            }
            if let (true, Some((p, q))) = (graphs, &rational) {
                clauses_plus.extend(graph_clauses(chart, &dom, p, q, sigma));
                clauses_minus.extend(graph_clauses(chart, &dom, p, q, -sigma));
            }
        }
    }
    if graphs {
        plus.region = Some(SignConditionRegion::new(domain.dim + 1, clauses_plus)?);
        minus.region = Some(SignConditionRegion::new(domain.dim + 1, clauses_minus)?);
    }
    Ok(VolumeRepresentation {
        u_plus: plus,
        u_minus: minus,
        integral,
        abs_err,
        densities: domain.pullbacks.iter().map(ToString::to_string).collect(),
    })
}
