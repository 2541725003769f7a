use serde::{Deserialize, Serialize};

use super::BlowupError;
use crate::sa_domain::{GPoly, GaussianRational, RatFunc};

/// A point of `ℙ¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjPoint {
    Finite(GaussianRational),
    Infinity,
}

impl ProjPoint {
    pub fn parse(s: &str) -> Result<Self, BlowupError> {
        let t = s.trim();
        if matches!(t, "inf" | "∞" | "infinity") {
            return Ok(ProjPoint::Infinity);
        }
        t.parse::<GaussianRational>().map(ProjPoint::Finite).map_err(BlowupError::Json)
    }
}

impl std::fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProjPoint::Finite(z) => write!(f, "{z}"),
            ProjPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// A genus-0 curve `ℙ¹ ∖ punctures` with marked points `Y` and a function `f`
/// in the variable `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    punctures: Vec<ProjPoint>,
    marked: Vec<GaussianRational>,
    f: RatFunc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoleDatum {
    pub location: String,
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PunctureClasses {
    /// Punctures where `f` stays finite.
    pub z_f: Vec<String>,
    /// Punctures where `f` has a pole, with its order.
    pub z_inf: Vec<PoleDatum>,
}

/// Wire form `{"punctures":["inf","1/2",...],"marked":["0",...],"f":"z^3"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpecJson {
    pub punctures: Vec<String>,
    #[serde(default)]
    pub marked: Vec<String>,
    pub f: String,
}

impl CurveSpec {
    pub fn new(punctures: Vec<ProjPoint>, marked: Vec<GaussianRational>, f: RatFunc) -> Result<Self, BlowupError> {
        if f.vars().iter().any(|v| v != "z") {
            return Err(BlowupError::NotUnivariate);
        }
        let f = f.with_vars(&["z".to_string()])?;
        for (i, p) in punctures.iter().enumerate() {
            if punctures[..i].contains(p) {
                return Err(BlowupError::DuplicatePoint(p.to_string()));
            }
        }
        for (i, y) in marked.iter().enumerate() {
            if marked[..i].contains(y) {
                return Err(BlowupError::DuplicatePoint(y.to_string()));
            }
            if punctures.contains(&ProjPoint::Finite(y.clone())) {
                return Err(BlowupError::MarkedIsPuncture(y.to_string()));
            }
        }
        let spec = Self { punctures, marked, f };
        spec.check_poles()?;
        Ok(spec)
    }

    /// `𝔸¹ = ℙ¹ ∖ {∞}` with the given marked points.
    pub fn affine_line(marked: Vec<GaussianRational>, f: RatFunc) -> Result<Self, BlowupError> {
        Self::new(vec![ProjPoint::Infinity], marked, f)
    }

    pub fn from_json(raw: &CurveSpecJson) -> Result<Self, BlowupError> {
        let punctures = raw.punctures.iter().map(|s| ProjPoint::parse(s)).collect::<Result<_, _>>()?;
        let marked = raw
            .marked
            .iter()
            .map(|s| s.parse::<GaussianRational>().map_err(BlowupError::Json))
            .collect::<Result<_, _>>()?;
        let f = RatFunc::parse_in(&raw.f, &["z"])?;
        Self::new(punctures, marked, f)
    }

    pub fn parse_json(text: &str) -> Result<Self, BlowupError> {
        let raw: CurveSpecJson = serde_json::from_str(text).map_err(|e| BlowupError::Json(e.to_string()))?;
        Self::from_json(&raw)
    }

    pub fn punctures(&self) -> &[ProjPoint] {
        &self.punctures
    }

    pub fn marked(&self) -> &[GaussianRational] {
        &self.marked
    }

    pub fn f(&self) -> &RatFunc {
        &self.f
    }

    /// Every finite pole is a puncture, and `f` is regular at `∞` unless `∞`
    /// is a puncture.
    fn check_poles(&self) -> Result<(), BlowupError> {
        let mut rest: GPoly = self.f.denominator().clone();
        for p in &self.punctures {
            if let ProjPoint::Finite(a) = p {
                let lin = GPoly::from_univariate(vec![-a.clone(), GaussianRational::from_integer(1)]);
                while rest.root_multiplicity(a).unwrap_or(0) > 0 {
                    rest = rest.div_rem(&lin).0;
                }
            }
        }
        if rest.total_degree().unwrap_or(0) > 0 {
            // A remaining root not cancelled by the numerator is a pole off the punctures.
            let g = rest.gcd(self.f.numerator());
            if g.total_degree().unwrap_or(0) < rest.total_degree().unwrap_or(0) {
                return Err(BlowupError::PoleOutsidePunctures);
            }
        }
        if !self.punctures.contains(&ProjPoint::Infinity) && self.order_at(&ProjPoint::Infinity) > 0 {
            return Err(BlowupError::PoleOutsidePunctures);
        }
        Ok(())
    }

    /// Pole order of `f` at `p` (zero where `f` is regular).
    pub fn order_at(&self, p: &ProjPoint) -> u32 {
        let (num, den) = (self.f.numerator(), self.f.denominator());
        match p {
            ProjPoint::Infinity => {
                let dn = num.total_degree().unwrap_or(0) as i64;
                let dd = den.total_degree().unwrap_or(0) as i64;
                if num.is_zero() {
                    0
                } else {
                    (dn - dd).max(0) as u32
                }
            }
            ProjPoint::Finite(a) => {
                let md = den.root_multiplicity(a).unwrap_or(0) as i64;
                let mn = num.root_multiplicity(a).unwrap_or(u32::MAX) as i64;
                (md - mn).max(0) as u32
            }
        }
    }

    /// Splits the punctures into `Z_f` and `Z_∞`.
    pub fn classify_punctures(&self) -> PunctureClasses {
        let mut z_f = Vec::new();
        let mut z_inf = Vec::new();
        for p in &self.punctures {
            match self.order_at(p) {
                0 => z_f.push(p.to_string()),
                d => z_inf.push(PoleDatum { location: p.to_string(), order: d }),
            }
        }
        PunctureClasses { z_f, z_inf }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(json: &str) -> Result<CurveSpec, BlowupError> {
        CurveSpec::parse_json(json)
    }

    #[test]
    fn pole_orders() {
        let s = spec(r#"{"punctures":["inf"],"marked":["0"],"f":"z^3"}"#).unwrap();
        assert_eq!(
            s.classify_punctures(),
            PunctureClasses { z_f: vec![], z_inf: vec![PoleDatum { location: "inf".into(), order: 3 }] }
        );
        let s = spec(r#"{"punctures":["1","inf"],"f":"1/(z-1)"}"#).unwrap();
        let c = s.classify_punctures();
        assert_eq!(c.z_inf, vec![PoleDatum { location: "1".into(), order: 1 }]);
        assert_eq!(c.z_f, vec!["inf".to_string()]);
        let s = spec(r#"{"punctures":["inf"],"f":"7"}"#).unwrap();
        assert!(s.classify_punctures().z_inf.is_empty());
        let s = spec(r#"{"punctures":["i","inf"],"f":"(z-1)/(z-i)^2"}"#).unwrap();
        assert_eq!(s.classify_punctures().z_inf, vec![PoleDatum { location: "1*i".into(), order: 2 }]);
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(spec(r#"{"punctures":["inf"],"f":"1/z"}"#), Err(BlowupError::PoleOutsidePunctures)));
        assert!(matches!(spec(r#"{"punctures":["0"],"f":"z"}"#), Err(BlowupError::PoleOutsidePunctures)));
        assert!(matches!(
            spec(r#"{"punctures":["0","inf"],"marked":["0"],"f":"z"}"#),
            Err(BlowupError::MarkedIsPuncture(_))
        ));
        // A removable singularity is not a pole.
        assert!(spec(r#"{"punctures":["inf"],"f":"(z^2-1)/(z-1)"}"#).is_ok());
    }
}
