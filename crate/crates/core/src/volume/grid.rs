use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{box_to_json, VolumeError};
use crate::sa_domain::{
    format_rational, poly_range, rational_to_f64, BoxClass, Interval, ParamBox, SignConditionRegion,
};
use crate::Rational;

/// Jordan bounds from an `ε`-mesh anchored at the lower corner of the box.
#[derive(Clone, Debug, PartialEq)]
pub struct GridBounds {
    pub lower: Rational,
    pub upper: Rational,
    /// Cubes contained in the region up to a null set.
    pub inside: u64,
    /// Cubes not certified disjoint from the region.
    pub meeting: u64,
}

impl GridBounds {
    pub fn to_json(&self) -> Value {
        json!({
            "lower": format_rational(&self.lower),
            "upper": format_rational(&self.upper),
            "lower_f64": rational_to_f64(&self.lower),
            "upper_f64": rational_to_f64(&self.upper),
            "inside": self.inside,
            "meeting": self.meeting,
        })
    }
}

/// Whether every open clause holds on the box away from a null set: no
/// equalities and every strict polynomial is nonzero with range `≥ 0`.
fn inside_ae(region: &SignConditionRegion, bx: &[Interval]) -> bool {
    region.clauses().iter().any(|c| {
        c.eq.iter().all(|p| p.is_zero()) && c.gt.iter().all(|q| !q.is_zero() && !poly_range(q, bx).lo.is_negative())
    })
}

struct Mesh<'a> {
    region: &'a SignConditionRegion,
    lo: &'a [Rational],
    eps: &'a Rational,
}

impl Mesh<'_> {
    fn cell_box(&self, from: &[u64], to: &[u64]) -> Vec<Interval> {
        (0..self.lo.len())
            .map(|i| {
                let at = |k: u64| &self.lo[i] + self.eps * Rational::from_integer(k.into());
                Interval::new(at(from[i]), at(to[i]))
            })
            .collect()
    }

    /// `(inside, meeting)` counts over the index block `[from, to)`.
    fn count(&self, from: Vec<u64>, to: Vec<u64>) -> (u64, u64) {
        let cells: u64 = from.iter().zip(&to).map(|(a, b)| b - a).product();
        if cells == 0 {
            return (0, 0);
        }
        let bx = self.cell_box(&from, &to);
        if self.region.classify_box(&bx) == BoxClass::Outside {
            return (0, 0);
        }
        if inside_ae(self.region, &bx) {
            return (cells, cells);
        }
        if cells == 1 {
            return (0, 1);
        }
        let axis = (0..from.len()).max_by_key(|&i| to[i] - from[i]).expect("nonempty");
        let mid = from[axis] + (to[axis] - from[axis]) / 2;
        let (mut to_a, mut from_b) = (to.clone(), from.clone());
        to_a[axis] = mid;
        from_b[axis] = mid;
        let (a, b) = if cells > 64 {
            rayon::join(|| self.count(from, to_a), || self.count(from_b, to))
        } else {
            (self.count(from, to_a), self.count(from_b, to))
        };
        (a.0 + b.0, a.1 + b.1)
    }
}

fn cells_along(bbox: &ParamBox, eps: &Rational) -> Vec<u64> {
    bbox.lo
        .iter()
        .zip(&bbox.hi)
        .map(|(l, h)| {
            let n = ((h - l) / eps).ceil().to_integer();
            u64::try_from(n).unwrap_or(u64::MAX)
        })
        .collect()
}

/// Inner and outer Jordan content of `region ∩ bbox` on the mesh of side
/// `eps` anchored at `bbox.lo`. Halving `eps` never loosens either bound.
pub fn grid_volume(region: &SignConditionRegion, bbox: &ParamBox, eps: &Rational) -> Result<GridBounds, VolumeError> {
    if !eps.is_positive() {
        return Err(VolumeError::BadMesh);
    }
    if region.dim() != bbox.dim() {
        return Err(
            crate::sa_domain::DomainError::DimensionMismatch { expected: bbox.dim(), found: region.dim() }.into()
        );
    }
    let n = cells_along(bbox, eps);
    // Keep only what lies in the box, so cells past `hi` stay empty.
    let clipped = region.intersection(&SignConditionRegion::open_box(&bbox.lo, &bbox.hi))?;
    let mesh = Mesh { region: &clipped, lo: &bbox.lo, eps };
    let (inside, meeting) = mesh.count(vec![0; n.len()], n);
    let cube = num_traits::pow(eps.clone(), bbox.dim());
    Ok(GridBounds {
        lower: &cube * Rational::from_integer(inside.into()),
        upper: &cube * Rational::from_integer(meeting.into()),
        inside,
        meeting,
    })
}

/// One summand `sign · vol(region)`; `bbox` must contain the region.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedItem {
    pub sign: i8,
    pub region: SignConditionRegion,
    pub bbox: ParamBox,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CombineResult {
    /// Midpoint of `[lower, upper]`.
    pub volume: f64,
    pub lower: Rational,
    pub upper: Rational,
    /// Half-width of `[lower, upper]`.
    pub error: f64,
    /// Cubes contained in the merged positive part.
    pub n_plus: u64,
    /// Cubes meeting the merged negative part; each is swapped for one of the `n_plus` cubes.
    pub n_minus: u64,
    /// `n_plus > n_minus`, so every negative cube found a partner.
    pub resolved: bool,
    /// The signed sum is negative; every sign was flipped.
    pub negative_total: bool,
    /// Translation applied to each item to make its slot disjoint from the others.
    pub shifts: Vec<Vec<Rational>>,
    pub description: String,
}

impl CombineResult {
    pub fn to_json(&self) -> Value {
        json!({
            "volume": self.volume,
            "lower": format_rational(&self.lower),
            "upper": format_rational(&self.upper),
            "error": self.error,
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "resolved": self.resolved,
            "negative_total": self.negative_total,
            "shifts": self.shifts.iter().map(|s| s.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "description": self.description,
        })
    }
}

/// Slots along the first axis, each starting on the mesh and one cube apart.
fn placements(items: &[&SignedItem], eps: &Rational) -> Vec<Vec<Rational>> {
    let mut cursor = Rational::zero();
    items
        .iter()
        .map(|it| {
            let b = &it.bbox;
            let mut shift: Vec<Rational> = b.lo.iter().map(|l| -l).collect();
            shift[0] = &cursor - &b.lo[0];
            let width = ((&b.hi[0] - &b.lo[0]) / eps).ceil() * eps;
            cursor = &cursor + &width + eps;
            shift
        })
        .collect()
}

/// Realizes `Σ sign_i · vol(R_i)` as one volume. Positives and negatives are
/// each merged by disjoint translation into `B₊` and `B₋`; every mesh cube
/// meeting `B₋` is swapped, first found first, for a cube inside `B₊`, which
/// is possible once `N₊ > N₋`. The resulting set has volume
/// `vol B₊ − vol B₋`, reported with the grid slack as error.
pub fn combine_signed_volumes(items: &[SignedItem], eps: &Rational) -> Result<CombineResult, VolumeError> {
    if !eps.is_positive() {
        return Err(VolumeError::BadMesh);
    }
    let dim = items.first().map(|i| i.region.dim()).unwrap_or(1);
    for it in items {
        if it.sign != 1 && it.sign != -1 {
            return Err(crate::sa_domain::DomainError::BadSign(it.sign).into());
        }
        if it.region.dim() != dim || it.bbox.dim() != dim {
            return Err(
                crate::sa_domain::DomainError::DimensionMismatch { expected: dim, found: it.region.dim() }.into()
            );
        }
    }
    let bounds: Vec<GridBounds> =
        items.par_iter().map(|it| grid_volume(&it.region, &it.bbox, eps)).collect::<Result<_, _>>()?;
    let total = |s: i8, f: &dyn Fn(&GridBounds) -> Rational| -> Rational {
        items.iter().zip(&bounds).filter(|(it, _)| it.sign == s).map(|(_, b)| f(b)).sum()
    };
    let mut lower = total(1, &|b| b.lower.clone()) - total(-1, &|b| b.upper.clone());
    let mut upper = total(1, &|b| b.upper.clone()) - total(-1, &|b| b.lower.clone());
    let negative_total = (&lower + &upper).is_negative();
    let flip = if negative_total { -1 } else { 1 };
    if negative_total {
        (lower, upper) = (-upper, -lower);
    }
    let count = |s: i8, f: &dyn Fn(&GridBounds) -> u64| -> u64 {
        items.iter().zip(&bounds).filter(|(it, _)| it.sign * flip == s).map(|(_, b)| f(b)).sum()
    };
    let (n_plus, n_minus) = (count(1, &|b| b.inside), count(-1, &|b| b.meeting));
    let pos: Vec<&SignedItem> = items.iter().filter(|it| it.sign * flip == 1).collect();
    let neg: Vec<&SignedItem> = items.iter().filter(|it| it.sign * flip == -1).collect();
    let (sp, sn) = (placements(&pos, eps), placements(&neg, eps));
    let (mut ip, mut ineg) = (sp.into_iter(), sn.into_iter());
    let shifts: Vec<Vec<Rational>> = items
        .iter()
        .map(|it| if it.sign * flip == 1 { ip.next() } else { ineg.next() }.expect("one slot per item"))
        .collect();
    let description = format!(
        "B+ = disjoint union of {} translated region(s); B- = disjoint union of {}; \
         {} cube(s) of side {} meeting B- exchanged for cubes inside B+ ({} available): \
         (B+ minus swapped cubes) ⊔ (swapped cubes minus B-)",
        pos.len(),
        neg.len(),
        n_minus,
        format_rational(eps),
        n_plus
    );
    let (lf, uf) = (rational_to_f64(&lower), rational_to_f64(&upper));
    Ok(CombineResult {
        volume: 0.5 * (lf + uf),
        error: 0.5 * (uf - lf),
        lower,
        upper,
        n_plus,
        n_minus,
        resolved: n_minus == 0 || n_plus > n_minus,
        negative_total,
        shifts,
        description,
    })
}

impl SignedItem {
    pub fn to_json(&self) -> Value {
        json!({"sign": self.sign, "region": self.region.to_json_value(), "box": box_to_json(&self.bbox)})
    }
}
