use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xp_core::chain::{
    cech_double_complex, cech_homology, inclusion_map, simplicial_chains, ChainComplexQ, ChainMapQ, SubcomplexCover,
};
use xp_core::linalg::QMatrix;
use xp_core::simplex::{kuhn_triangulation, GeomComplex, OpenSimplex};
use xp_core::Rational;

fn random_closed(rng: &mut ChaCha8Rng, grid: &[usize], p: f64) -> GeomComplex {
    let k = kuhn_triangulation(grid);
    let tops: Vec<OpenSimplex> = k.iter().filter(|_| rng.gen_bool(p)).cloned().collect();
    let set: std::collections::BTreeSet<OpenSimplex> = tops.iter().flat_map(|s| s.faces()).collect();
    k.sub(|s| set.contains(s))
}

/// Rank of an integer matrix from its Smith normal form.
fn smith_rank(m: &QMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|q| {
                    assert!(q.is_integer());
                    q.to_integer()
                })
                .collect()
        })
        .collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry in the remaining block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                let qt = &a[i][t] / &a[t][t];
                if !qt.is_zero() {
                    for j in t..cols {
                        let v = &a[t][j] * &qt;
                        a[i][j] -= v;
                    }
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let qt = &a[t][j] / &a[t][t];
                if !qt.is_zero() {
                    for i in t..rows {
                        let v = &a[i][t] * &qt;
                        a[i][j] -= v;
                    }
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
            // Move the smallest remaining entry of row/column t to the pivot.
            let mut best = (t, t);
            for i in t..rows {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        t += 1;
    }
    (0..rows.min(cols)).filter(|&i| !a[i][i].is_zero()).count()
}

fn smith_homology(c: &ChainComplexQ) -> Vec<usize> {
    let r: Vec<usize> = (0..=c.len()).map(|n| smith_rank(&c.boundary(n))).collect();
    (0..c.len()).map(|n| c.dim(n) - r[n] - r[n + 1]).collect()
}

fn homology_rank(c: &ChainComplexQ, n: usize) -> usize {
    c.homology_ranks().get(n).copied().unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ranks_agree_with_smith_normal_form(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_closed(&mut rng, &[1, 1, 1], 0.4);
        prop_assume!(k.len() <= 50);
        let c = simplicial_chains(&k, &GeomComplex::empty(3)).unwrap().complex;
        prop_assert_eq!(c.homology_ranks(), smith_homology(&c));
    }

    #[test]
    fn cone_long_exact_sequence(seed in any::<u64>(), scale in -2i64..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_closed(&mut rng, &[2, 2], 0.6);
        let keep: std::collections::BTreeSet<OpenSimplex> =
            k.iter().filter(|s| s.dim() == 2 && rng.gen_bool(0.5)).flat_map(|s| s.faces()).collect();
        let l = k.sub(|s| keep.contains(s));
        let x = simplicial_chains(&k, &GeomComplex::empty(2)).unwrap();
        let y = simplicial_chains(&l, &GeomComplex::empty(2)).unwrap();
        let inc = inclusion_map(&y, &x).unwrap();
        let s = Rational::from_integer(scale.into());
        let maps = (0..y.complex.len()).map(|n| inc.map(n).scale(&s)).collect();
        let phi = ChainMapQ::new(y.complex.clone(), x.complex.clone(), maps).unwrap();
        let cone = phi.cone();
        for n in 0..cone.len() {
            let coker = homology_rank(&x.complex, n) - phi.induced_rank(n);
            let ker = if n == 0 { 0 } else { homology_rank(&y.complex, n - 1) - phi.induced_rank(n - 1) };
            prop_assert_eq!(homology_rank(&cone, n), coker + ker, "degree {}", n);
        }
    }

    #[test]
    fn total_complex_euler_characteristic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_closed(&mut rng, &[2, 1], 0.7);
        prop_assume!(!k.is_empty());
        let a = k.sub(|s| s.vertices().iter().all(|v| v[0] <= Rational::from_integer(1.into())));
        let b = k.sub(|s| s.vertices().iter().all(|v| v[0] >= Rational::from_integer(1.into())));
        let cover = SubcomplexCover::new(vec![a, b]).unwrap();
        let d = cech_double_complex(&cover, 3).unwrap();
        let tot = d.total_complex().unwrap();
        prop_assert_eq!(tot.euler_characteristic(), d.euler_characteristic());
    }
}

#[test]
fn cech_of_overlapping_cover_matches_union() {
    let k = kuhn_triangulation(&[2, 1]);
    let left = k.sub(|s| s.vertices().iter().all(|v| v[0] <= Rational::from_integer(1.into())));
    let right = k.sub(|s| s.vertices().iter().all(|v| v[0] >= Rational::from_integer(1.into())));
    let cover = SubcomplexCover::new(vec![left, right]).unwrap();
    let union = simplicial_chains(&k, &GeomComplex::empty(2)).unwrap().complex.homology_ranks();
    assert_eq!(cech_homology(&cover).unwrap().ranks, union);
}
