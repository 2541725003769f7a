use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::path::PathSpec;
use super::{pair_relative, IntegrationOptions, PeriodError, PeriodValue};
use crate::sa_domain::{RatForm, RatFunc};

/// Periods of `(𝔸¹, {0}, zⁿ)`: rows are the rays `G_{s^m}`, `s = e^{2πi/n}`,
/// columns the cocycles `(z^j dz, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodMatrix {
    pub n: usize,
    pub entries: Vec<Vec<PeriodValue>>,
    pub det: Complex64,
    /// Ratio of extreme singular values.
    pub condition: f64,
}

impl PeriodMatrix {
    pub fn value(&self, m: usize, j: usize) -> Complex64 {
        self.entries[m][j].value
    }

    pub fn max_abs_err(&self) -> f64 {
        self.entries.iter().flatten().map(|v| v.abs_err).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Vec<[f64; 2]>> =
            self.entries.iter().map(|row| row.iter().map(|v| [v.value.re, v.value.im]).collect()).collect();
        json!({
            "n": self.n,
            "entries": entries,
            "max_abs_err": self.max_abs_err(),
            "det": [self.det.re, self.det.im],
            "condition": self.condition,
        })
    }
}

pub fn period_matrix(n: usize, opts: &IntegrationOptions) -> Result<PeriodMatrix, PeriodError> {
    if n == 0 {
        return Err(PeriodError::Invalid("n must be at least 1".into()));
    }
    let f = RatFunc::parse_in(&format!("z^{n}"), &["z"])?;
    let origin = [Complex64::new(0.0, 0.0)];
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|m| (0..n).map(move |j| (m, j))).collect();
    let values = cells
        .par_iter()
        .map(|&(m, j)| {
            let omega = RatForm::parse(&format!("z^{j}*dz"), Some(&["z"]), Some(1))?;
            let path = PathSpec::ray(origin[0], Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64))?;
            pair_relative(&f, &omega, &origin, &[Complex64::new(0.0, 0.0)], &path, opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let entries: Vec<Vec<PeriodValue>> = values.chunks(n).map(<[PeriodValue]>::to_vec).collect();
    let mat = DMatrix::from_fn(n, n, |m, j| entries[m][j].value);
    let det = mat.determinant();
    let sv = mat.singular_values();
    let condition = sv.max() / sv.min();
    Ok(PeriodMatrix { n, entries, det, condition })
}
