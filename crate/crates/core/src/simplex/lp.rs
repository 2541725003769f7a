//! Exact two-phase simplex method over ℚ with Bland's anti-cycling rule.

use num_traits::{One, Signed, Zero};

use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, x: Vec<Rational> },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = &*v - &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, c: &[Rational]) -> Vec<Rational> {
        (0..self.ncols)
            .map(|j| {
                let mut r = c[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !c[b].is_zero() && !self.rows[i][j].is_zero() {
                        r -= &c[b] * &self.rows[i][j];
                    }
                }
                r
            })
            .collect()
    }

    /// Maximises `c·x` from the current basis; `false` when unbounded.
    fn optimise(&mut self, c: &[Rational], allowed: usize) -> bool {
        loop {
            let red = self.reduced_costs(c);
            let Some(enter) = (0..allowed).find(|&j| red[j].is_positive()) else { return true };
            let mut best: Option<(Rational, usize, usize)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, leave, _)) = best else { return false };
            self.pivot(leave, enter);
        }
    }

    fn solution(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs(i).clone();
            }
        }
        x
    }
}

/// Maximises `c·x` subject to `A x = b`, `x ≥ 0`.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        assert_eq!(ai.len(), n, "constraint row has wrong width");
        let flip = bi.is_negative();
        let mut row: Vec<Rational> = ai.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        row.push(if flip { -bi } else { bi.clone() });
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (n..n + m).collect(), ncols };

    let mut phase1 = vec![Rational::zero(); ncols];
    for v in phase1.iter_mut().skip(n) {
        *v = -Rational::one();
    }
    t.optimise(&phase1, ncols);
    let infeasibility: Rational =
        t.basis.iter().enumerate().filter(|(_, &bv)| bv >= n).map(|(i, _)| t.rhs(i).clone()).sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }

    // Drive remaining artificials out of the basis, dropping redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat(Rational::zero()).take(m));
    if !t.optimise(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let x = t.solution(n);
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { value, x }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn rows(r: &[&[i64]]) -> Vec<Vec<Rational>> {
        r.iter().map(|row| row.iter().map(|&v| q(v)).collect()).collect()
    }

    #[test]
    fn small_optimum() {
        // max x + y with x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = rows(&[&[1, 2, 1, 0], &[3, 1, 0, 1]]);
        let out = maximize(&a, &[q(4), q(6)], &[q(1), q(1), q(0), q(0)]);
        match out {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, Rational::new(14.into(), 5.into()));
                assert_eq!(x[0], Rational::new(8.into(), 5.into()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = rows(&[&[1, 1]]);
        assert_eq!(maximize(&a, &[q(-1)], &[q(0), q(0)]), LpOutcome::Infeasible);
        let a = rows(&[&[1, -1]]);
        assert_eq!(maximize(&a, &[q(0)], &[q(1), q(0)]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let a = rows(&[&[1, 1], &[2, 2]]);
        match maximize(&a, &[q(1), q(2)], &[q(1), q(0)]) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(1)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
