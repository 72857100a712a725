use bergman::analytic::{
    bergman_norm, circle_values, dirichlet_norm, hardy_mean, m_infinity, mixed_norm, modulus_of_continuity, parse_function,
    partial_sum,
};
use bergman::{AnalyticFunction, RadialWeight};
use num_complex::Complex64;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

/// Coefficients of f².
fn square(f: &AnalyticFunction) -> AnalyticFunction {
    let n = f.coeffs.len();
    let mut c = vec![Complex64::new(0.0, 0.0); 2 * n - 1];
    for i in 0..n {
        for j in 0..n {
            c[i + j] += f.coeffs[i] * f.coeffs[j];
        }
    }
    AnalyticFunction::new(c)
}

#[test]
fn parses_function_specs() {
    let f = parse_function("poly(1,0,2.5)").unwrap();
    assert_eq!(f.degree(), 2);
    assert_eq!(f.coeff(2), Complex64::new(2.5, 0.0));
    let l = parse_function("logk(deg=16)").unwrap();
    assert_eq!(l.degree(), 16);
    assert!(close(l.coeff(4).re, 0.25, 1e-15));
    let b = parse_function("binom(s=0.5,deg=8)").unwrap();
    // (1 − z)^{−1/2}: 1, 1/2, 3/8, 5/16.
    assert!(close(b.coeff(3).re, 5.0 / 16.0, 1e-15));
    let r1 = parse_function("rand(deg=512,seed=7,dist=unit)").unwrap();
    let r2 = parse_function("rand(deg=512,seed=7,dist=unit)").unwrap();
    assert_eq!(r1.coeffs, r2.coeffs);
    assert!(r1.coeffs.iter().all(|c| (0.0..1.0).contains(&c.re)));
    assert!(parse_function("rand(deg=4,dist=gauss)").is_err());
    assert!(parse_function("logk(deg=-1)").is_err());
    assert!(parse_function("sin(1)").is_err());
}

#[test]
fn circle_values_evaluate_the_series() {
    let f = parse_function("poly(1,-2,0.5,3)").unwrap();
    let n = 16;
    let vals = circle_values(&f, 0.7, n);
    for (j, v) in vals.iter().enumerate() {
        let z = Complex64::from_polar(0.7, 2.0 * std::f64::consts::PI * j as f64 / n as f64);
        assert!((f.eval(z) - v).norm() < 1e-13);
    }
}

#[test]
fn monomial_means_are_powers_of_r() {
    let f = AnalyticFunction::monomial(7, 2.0);
    for p in [0.5, 1.0, 2.0, 3.0] {
        for r in [0.1, 0.5, 0.99, 1.0] {
            assert!(close(hardy_mean(&f, p, r), 2.0 * r.powi(7), 1e-12));
        }
    }
    let m = m_infinity(&f, 0.5);
    assert!(close(m.upper, 2.0 * 0.5f64.powi(7), 1e-15));
}

#[test]
fn fourth_means_match_the_square() {
    let f = AnalyticFunction::random(20, 3, "sym").unwrap();
    let g = square(&f);
    for r in [0.3, 0.8, 1.0] {
        let m4 = hardy_mean(&f, 4.0, r);
        let m2 = hardy_mean(&g, 2.0, r);
        assert!(close(m4 * m4, m2, 1e-10), "r = {r}");
    }
}

#[test]
fn bergman_norms_by_parseval_and_quadrature() {
    // ‖f‖^4_{A^4_ω} = ‖f²‖²_{A²_ω}: the left side goes through quadrature.
    let w = RadialWeight::standard(1.0).unwrap();
    let f = AnalyticFunction::random(12, 5, "unit").unwrap();
    let q = bergman_norm(&f, 4.0, &w).unwrap().value;
    let g = square(&f);
    let exact: f64 = g
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| 2.0 * c.norm_sqr() * (1.0 / (2 * n + 2) as f64 - 1.0 / (2 * n + 4) as f64))
        .sum();
    assert!(close(q, exact, 1e-9), "{q} vs {exact}");
    let p2 = bergman_norm(&g, 2.0, &w).unwrap().value;
    assert!(close(p2, exact, 1e-12));
}

#[test]
fn mixed_norm_with_equal_exponents() {
    // q = p, γ = 0: ∫ M_2² ω dr = Σ |a_k|² ∫ r^{2k} dr for ω ≡ 1.
    let w = RadialWeight::constant(1.0).unwrap();
    let f = parse_function("poly(1,2,3)").unwrap();
    let v = mixed_norm(&f, 2.0, 2.0, &w, 0.0).unwrap().value;
    let exact: f64 = 1.0 + 4.0 / 3.0 + 9.0 / 5.0;
    assert!(close(v, exact.sqrt(), 1e-10));
}

#[test]
fn max_modulus_of_positive_series_is_at_r() {
    let f = AnalyticFunction::binomial(0.5, 64);
    for r in [0.2, 0.9, 0.999] {
        let exact = f.eval_real(r).re;
        let m = m_infinity(&f, r);
        assert!(m.lower <= exact * (1.0 + 1e-12));
        assert!(m.upper >= exact * (1.0 - 1e-12));
        assert!(close(m.lower, exact, 1e-6));
    }
}

#[test]
fn modulus_of_continuity_of_monomials() {
    for m in [1usize, 2, 5, 17] {
        let f = AnalyticFunction::monomial(m, 1.0);
        for h in [1e-3, 0.1, 0.5, 2.0] {
            let exact = 2.0 * (m as f64 * h / 2.0).sin().abs();
            assert!((modulus_of_continuity(&f, 2.0, h) - exact).abs() < 1e-10);
        }
    }
}

#[test]
fn dirichlet_and_partial_sums() {
    let f = parse_function("poly(2,1,0,3)").unwrap();
    assert!(close(dirichlet_norm(&f).value, (4.0f64 + 1.0 + 27.0).sqrt(), 1e-15));
    let p = partial_sum(&f, 1, 3);
    assert_eq!(p.coeff(0), Complex64::new(0.0, 0.0));
    assert_eq!(p.coeff(1), Complex64::new(1.0, 0.0));
    assert_eq!(p.coeff(3), Complex64::new(0.0, 0.0));
}

proptest! {
    #[test]
    fn parseval_at_p_two(a in proptest::collection::vec(-3.0f64..3.0, 1..40), r in 0.0f64..1.0) {
        let f = AnalyticFunction::from_real(&a);
        let exact: f64 = a.iter().enumerate().map(|(k, c)| c * c * r.powi(2 * k as i32)).sum::<f64>().sqrt();
        prop_assert!((hardy_mean(&f, 2.0, r) - exact).abs() <= 1e-10 * exact.max(1.0));
    }

    #[test]
    fn hardy_means_increase_with_r(seed in 0u64..1000, p in 0.5f64..4.0) {
        let f = AnalyticFunction::random(30, seed, "sym").unwrap();
        let mut last = 0.0;
        for j in 0..=20 {
            let m = hardy_mean(&f, p, j as f64 / 20.0);
            prop_assert!(m >= last * (1.0 - 1e-9));
            last = m;
        }
    }

    #[test]
    fn hardy_means_increase_with_p(seed in 0u64..1000, r in 0.1f64..1.0) {
        let f = AnalyticFunction::random(16, seed, "sign").unwrap();
        let ms: Vec<f64> = [1.0, 1.5, 2.0, 3.0].iter().map(|&p| hardy_mean(&f, p, r)).collect();
        prop_assert!(ms.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-9)));
        prop_assert!(ms[3] <= m_infinity(&f, r).upper * (1.0 + 1e-12));
    }
}
