use num_complex::Complex64;
use proptest::prelude::*;
use xp_core::blowup::{blowup_chart, blowup_chart_inverse, CurveRdModel, CurveSpec, ProjPoint, RdVariant};
use xp_core::sa_domain::{GaussianRational, RatFunc};

/// A rational function with prescribed pole orders at `0, 1, 2, …` and at `∞`.
fn spec_with_poles(finite: &[u32], at_inf: u32, extra_punct: usize, marked: usize) -> CurveSpec {
    let mut num = vec!["1".to_string()];
    let mut den = vec!["1".to_string()];
    let mut punctures = Vec::new();
    for (k, &d) in finite.iter().enumerate() {
        punctures.push(ProjPoint::Finite(GaussianRational::from_integer(k as i64)));
        if d > 0 {
            den.push(format!("(z-{k})^{d}"));
        }
    }
    if at_inf > 0 {
        // Root at -100 keeps the numerator coprime to the denominator.
        num.push(format!("(z+100)^{}", at_inf + finite.iter().sum::<u32>()));
    }
    punctures.push(ProjPoint::Infinity);
    for j in 0..extra_punct {
        punctures.push(ProjPoint::Finite(GaussianRational::from_integer(50 + j as i64)));
    }
    let marked = (0..marked).map(|j| GaussianRational::from_integer(-1 - j as i64)).collect();
    let f = RatFunc::parse_in(&format!("({})/({})", num.join("*"), den.join("*")), &["z"]).unwrap();
    CurveSpec::new(punctures, marked, f).unwrap()
}

/// `H_1 = (k − 1) + (|Y| + Σ d − 1)` when the relative part is nonempty.
fn expected_h1(spec: &CurveSpec) -> usize {
    let k = spec.punctures().len();
    let c: usize = spec.marked().len() + spec.punctures().iter().map(|p| spec.order_at(p) as usize).sum::<usize>();
    if c == 0 {
        k - 1
    } else {
        k - 1 + c - 1
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn variants_agree_and_match_formula(
        finite in proptest::collection::vec(0u32..4, 0..3),
        at_inf in 0u32..4,
        extra in 0usize..2,
        marked in 0usize..3,
    ) {
        let spec = spec_with_poles(&finite, at_inf, extra, marked);
        let a = CurveRdModel::build(&spec, RdVariant::Bcirc);
        let b = CurveRdModel::build(&spec, RdVariant::Bsharp);
        prop_assert_eq!(a.relative_ranks(), b.relative_ranks());
        prop_assert_eq!(a.boundary_piece_count(), b.boundary_piece_count());
        let total: usize = spec.punctures().iter().map(|p| spec.order_at(p) as usize).sum();
        prop_assert_eq!(a.boundary_piece_count(), total);
        let r = a.relative_ranks();
        prop_assert_eq!(r[1], expected_h1(&spec));
        prop_assert_eq!(r[2], 0);
        let nonempty = total + spec.marked().len() > 0;
        prop_assert_eq!(r[0], usize::from(!nonempty));
        prop_assert_eq!(a.euler_characteristic(), 2 - spec.punctures().len() as i64);
        prop_assert_eq!(a.absolute_chains().unwrap().homology_ranks(), vec![1, spec.punctures().len() - 1, 0]);
    }

    #[test]
    fn chart_roundtrip(re in proptest::collection::vec(-5.0f64..5.0, 1..4), im in proptest::collection::vec(-5.0f64..5.0, 3), m in 0usize..4) {
        let x: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let m = m.min(x.len());
        let p = blowup_chart(&x, m, &[]).unwrap();
        prop_assert!(p.r.iter().all(|&r| r >= 0.0));
        prop_assert!(p.w.iter().all(|w| (w.norm() - 1.0).abs() < 1e-12));
        let back = blowup_chart_inverse(&p);
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }
}
