use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use statrs::function::gamma::gamma;
use xp_core::period::{
    integrate_path, integrate_split, period_matrix, split_integrand, stokes_residual, IntegrationOptions, PathSpec,
    Triangle,
};
use xp_core::sa_domain::{RatForm, RatFunc};

fn z(src: &str) -> RatFunc {
    RatFunc::parse_in(src, &["z"]).unwrap()
}

fn form(src: &str) -> RatForm {
    RatForm::parse(src, Some(&["z"]), Some(1)).unwrap()
}

/// `∫_0^∞ e^{−(st)^n} (st)^j s dt = s^{j+1} Γ((j+1)/n)/n` for `sⁿ = 1`.
fn power_oracle(n: usize, j: usize, m: usize) -> Complex64 {
    let a = (j + 1) as f64 / n as f64;
    Complex64::from_polar(1.0, 2.0 * PI * m as f64 * a) * gamma(a) / n as f64
}

#[test]
fn power_rays_match_gamma() {
    let opts = IntegrationOptions::default();
    for n in 1..=5 {
        for j in 0..n + 2 {
            for m in 0..n {
                let path =
                    PathSpec::ray(Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64))
                        .unwrap();
                let v = integrate_path(&z(&format!("z^{n}")), &form(&format!("z^{j}*dz")), &path, &opts).unwrap();
                let exact = power_oracle(n, j, m);
                assert!((v.value - exact).norm() <= 1e-9 * exact.norm().max(1.0), "n={n} j={j} m={m}: {}", v.value);
            }
        }
    }
}

#[test]
fn period_matrices_are_nonsingular() {
    for n in 1..=4 {
        let pm = period_matrix(n, &IntegrationOptions::default()).unwrap();
        for m in 0..n {
            for j in 0..n {
                let exact = power_oracle(n, j, m);
                assert!((pm.value(m, j) - exact).norm() <= 1e-8 * exact.norm());
            }
        }
        // Oracle determinant: row factors s_m, the Vandermonde in the s_m, and the Γ factors.
        let s: Vec<Complex64> = (0..n).map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64)).collect();
        let mut vdm = Complex64::new(1.0, 0.0);
        for a in 0..n {
            for b in a + 1..n {
                vdm *= s[b] - s[a];
            }
        }
        let factors: Complex64 =
            (0..n).map(|j| Complex64::new(gamma((j + 1) as f64 / n as f64) / n as f64, 0.0)).product();
        let rows: Complex64 = s.iter().product();
        let det = rows * vdm * factors;
        assert!(det.norm() > 1e-3);
        assert!((pm.det - det).norm() <= 1e-8 * det.norm(), "n={n}: {} vs {det}", pm.det);
        assert!(pm.condition.is_finite());
    }
}

#[test]
fn independent_of_direction() {
    for k in 0..8 {
        let theta = -PI / 2.0 + PI * (k as f64 + 0.5) / 8.0;
        let path = PathSpec::ray(Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, theta)).unwrap();
        let v = integrate_path(&z("z"), &form("dz"), &path, &IntegrationOptions::default()).unwrap();
        assert!((v.value - 1.0).norm() <= 1e-10, "θ={theta}: {}", v.value);
    }
}

fn cpoly_src(var: &str, coeffs: &[(i64, i64)]) -> String {
    let mut s = String::from("0");
    for (k, (a, b)) in coeffs.iter().enumerate() {
        s.push_str(&format!("+({a}/4+({b}/4)*i)*{var}^{k}"));
    }
    s
}

fn xy_poly(coeffs: &[(i64, i64, u32, u32)]) -> String {
    let mut s = String::from("0");
    for (a, b, p, q) in coeffs {
        s.push_str(&format!("+({a}/4+({b}/4)*i)*x^{p}*y^{q}"));
    }
    s
}

fn xy_term() -> impl Strategy<Value = (i64, i64, u32, u32)> {
    (-4i64..=4, -4i64..=4, 0u32..=3, 0u32..=3).prop_filter("total degree ≤ 3", |t| t.2 + t.3 <= 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn stokes_on_random_simplices(
        verts in proptest::array::uniform3((0.0f64..1.0, 0.0f64..1.0)),
        p in proptest::collection::vec(xy_term(), 0..4),
        q in proptest::collection::vec(xy_term(), 0..4),
        f in proptest::collection::vec(xy_term(), 0..4),
    ) {
        let sigma = Triangle(verts.map(|(x, y)| [x, y]));
        let omega = RatForm::parse(&format!("({})*dx + ({})*dy", xy_poly(&p), xy_poly(&q)), Some(&["x", "y"]), Some(1)).unwrap();
        let f = RatFunc::parse_in(&xy_poly(&f), &["x", "y"]).unwrap();
        let r = stokes_residual(&sigma, &omega, &f).unwrap();
        prop_assert!(r < 1e-6, "residual {r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn linearity(
        w1 in proptest::collection::vec((-4i64..=4, -4i64..=4), 1..4),
        w2 in proptest::collection::vec((-4i64..=4, -4i64..=4), 1..4),
        alpha in (-3i64..=3, -3i64..=3),
        beta in (-3i64..=3, -3i64..=3),
        n in 1usize..4,
    ) {
        let f = z(&format!("z^{n}"));
        let path = PathSpec::parse("ray:0:1").unwrap();
        let opts = IntegrationOptions::default();
        let (s1, s2) = (cpoly_src("z", &w1), cpoly_src("z", &w2));
        let ab = |c: (i64, i64)| Complex64::new(c.0 as f64, c.1 as f64);
        let combo = format!("(({}+({})*i)*({s1}) + ({}+({})*i)*({s2}))*dz", alpha.0, alpha.1, beta.0, beta.1);
        let i1 = integrate_path(&f, &form(&format!("({s1})*dz")), &path, &opts).unwrap().value;
        let i2 = integrate_path(&f, &form(&format!("({s2})*dz")), &path, &opts).unwrap().value;
        let i12 = integrate_path(&f, &form(&combo), &path, &opts).unwrap().value;
        let expected = ab(alpha) * i1 + ab(beta) * i2;
        // Scaled by the coefficients, since each integral carries its own tolerance.
        let slack = 2.0 * opts.tol * (1.0 + ab(alpha).norm() + ab(beta).norm());
        prop_assert!((i12 - expected).norm() <= slack, "{i12} vs {expected}");
    }

    #[test]
    fn inclusion_exclusion_on_a_ray(a in 0.0f64..1.0, b in 1.0f64..2.0, c in 2.0f64..3.0, theta in -0.7f64..0.7) {
        // G = [a, c], H = [b, ∞) along the ray of direction e^{iθ}; G ∩ H = [b, c], G ∪ H = [a, ∞).
        let s = Complex64::from_polar(1.0, theta);
        let f = z("z^2");
        let w = form("(1+z)*dz");
        let opts = IntegrationOptions::default();
        let i = |p: PathSpec| integrate_path(&f, &w, &p, &opts).unwrap().value;
        let g = i(PathSpec::Segment { a: s * a, b: s * c });
        let h = i(PathSpec::ray(s * b, s).unwrap());
        let gh = i(PathSpec::Segment { a: s * b, b: s * c });
        let union = i(PathSpec::ray(s * a, s).unwrap());
        prop_assert!((union - (g + h - gh)).norm() <= 3.0 * opts.tol);
    }

    #[test]
    fn decay_beyond_cutoff(n in 1usize..5, j in 0usize..4, theta in -0.3f64..0.3) {
        let dir = Complex64::from_polar(1.0, theta / n as f64);
        let path = PathSpec::ray(Complex64::new(0.0, 0.0), dir).unwrap();
        let f = z(&format!("z^{n}"));
        let v = integrate_path(&f, &form(&format!("z^{j}*dz")), &path, &IntegrationOptions::default()).unwrap();
        let t0 = v.cutoff.unwrap();
        let mut last = f64::INFINITY;
        for k in 0..50 {
            let t = t0 * (1.0 + k as f64 / 10.0);
            let zt = dir * t;
            let g = ((-zt.powu(n as u32)).exp() * zt.powu(j as u32)).norm();
            prop_assert!(g <= last);
            last = g;
        }
        prop_assert!(last < 1e-10);
    }

    #[test]
    fn split_matches_complex(f in proptest::collection::vec((-4i64..=4, -4i64..=4), 1..4),
                             w in proptest::collection::vec((-4i64..=4, -4i64..=4), 1..4),
                             lo in -1.0f64..0.0, hi in 0.0f64..1.0) {
        let fx = RatFunc::parse_in(&cpoly_src("x", &f), &["x"]).unwrap();
        let wx = RatForm::parse(&format!("({})*dx", cpoly_src("x", &w)), Some(&["x"]), Some(1)).unwrap();
        let split = split_integrand(&fx, &wx).unwrap();
        let (re, im) = integrate_split(&split, lo, hi, 1e-13).unwrap();
        let path = PathSpec::Segment { a: Complex64::new(lo, 0.0), b: Complex64::new(hi, 0.0) };
        let direct = integrate_path(&fx, &wx, &path, &IntegrationOptions { tol: 1e-13, ..Default::default() }).unwrap();
        prop_assert!((direct.value - Complex64::new(re.value.re, im.value.re)).norm() < 1e-10);
    }
}
