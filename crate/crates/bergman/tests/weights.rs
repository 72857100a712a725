use std::io::Write;

use bergman::weights::{self, classify, condition_99, diagnostic_grid, muckenhoupt, muckenhoupt_grid, Class};
use bergman::{parse_weight, Error, RadialWeight, Verdict};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

#[test]
fn tails_match_closed_forms() {
    let std1 = RadialWeight::standard(1.0).unwrap();
    let std_half = RadialWeight::standard(-0.5).unwrap();
    let pow = RadialWeight::power(0.5).unwrap();
    let lp = RadialWeight::logpow(2.5).unwrap();
    for &r in &[0.0, 0.3, 0.9, 0.999, 1.0 - 1e-9] {
        let s: f64 = 1.0 - r;
        assert!(close(std1.tail(r), s * s - s * s * s / 3.0, 1e-9), "std(1) at {r}");
        assert!(close(std_half.tail(r), std::f64::consts::FRAC_PI_2 - r.asin(), 1e-8), "std(-0.5) at {r}");
        assert!(close(pow.tail(r), s.powf(1.5) / 1.5, 1e-10), "pow at {r}");
        let l = (std::f64::consts::E / s).ln();
        assert!(close(lp.tail(r), l.powf(-1.5) / 1.5, 1e-9), "logpow at {r}");
    }
}

#[test]
fn radial_moments_of_standard_weights() {
    // ∫ r^{2n+1}(1 − r²) dr = 1/(2n+2) − 1/(2n+4).
    let w = RadialWeight::standard(1.0).unwrap();
    for n in [0usize, 1, 5, 40, 1000] {
        let exact = 1.0 / (2 * n + 2) as f64 - 1.0 / (2 * n + 4) as f64;
        assert!(close(w.moment_radial(n), exact, 1e-12), "n = {n}");
    }
    // ∫ r^{2n+1}(1 − r²)^{−1/2} dr = 2^{2n}(n!)²/(2n+1)!.
    let w = RadialWeight::standard(-0.5).unwrap();
    let mut exact = 1.0;
    for n in 0..60usize {
        if n > 0 {
            exact *= (2 * n) as f64 / (2 * n + 1) as f64;
        }
        assert!(close(w.moment_radial(n), exact, 1e-10), "n = {n}");
    }
}

#[test]
fn generic_moment_agrees_with_closed_form() {
    let w = RadialWeight::logpow(2.0).unwrap();
    // ω_0 = ∫ r ω = ∫ ŵ (by parts); compare two quadrature paths.
    let by_parts: f64 = bergman::analytic::tail_weighted(&w, |_| 1.0);
    assert!(close(w.moment(1.0), by_parts, 1e-7));
}

#[test]
fn normalization_records_the_factor() {
    let w = RadialWeight::standard(1.0).unwrap();
    let (n, factor) = w.normalized();
    assert!(close(n.mass(), 1.0, 1e-12));
    assert!(close(factor * w.mass(), 1.0, 1e-12));
    assert!(n.is_normalized());
    let c = parse_weight("pow(a=1)").unwrap().normalized().0;
    assert!(close(c.density(0.25), 2.0 * 0.75, 1e-12));
}

#[test]
fn spec_strings_round_trip() {
    for spec in ["const(c=1)", "std(alpha=-0.5)", "pow(a=1)", "logpow(beta=2)", "logprod(n=2,alpha=1.5)", "osc", "std(alpha=1,scale=3)"] {
        let w = parse_weight(spec).unwrap();
        let again = parse_weight(&w.spec()).unwrap();
        assert_eq!(w.spec(), again.spec(), "{spec}");
        assert!(close(w.tail(0.5), again.tail(0.5), 1e-15));
    }
}

#[test]
fn bad_specs_are_rejected() {
    assert!(matches!(parse_weight("std(alpha=-1)"), Err(Error::Parameter { .. } | Error::DivergentMass(_))));
    assert!(matches!(parse_weight("logpow(beta=1)"), Err(Error::Parameter { .. })));
    assert!(matches!(parse_weight("nope(a=1)"), Err(Error::UnknownFamily(_))));
    assert!(parse_weight("std(alpha=1").is_err());
    assert!(parse_weight("std(beta=1)").is_err());
    assert!(parse_weight("const(c=1,scale=0)").is_err());
}

#[test]
fn table_weight_interpolates_samples() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "r,omega").unwrap();
    for i in 0..10 {
        writeln!(file, "{},{}", i as f64 / 10.0, 2.0).unwrap();
    }
    file.flush().unwrap();
    let w = parse_weight(&format!("table(path={})", file.path().display())).unwrap();
    assert!(close(w.density(0.37), 2.0, 1e-12));
    assert!(close(w.tail(0.25), 1.5, 1e-9));
    assert!(close(w.mass(), 2.0, 1e-9));
}

#[test]
fn osc_density_is_positive_and_matches_its_tail() {
    let w = RadialWeight::osc();
    for &s in &[0.5, 0.1, 1e-3, 1e-6] {
        assert!(w.density_s(s) > 0.0);
        let tail = 2.0 * s * (s.powf(-0.5)).cos() + 16.0 * s.sqrt();
        assert!(close(w.tail_s(s), tail, 1e-9), "s = {s}");
    }
}

#[test]
fn classification_of_standard_families() {
    let grid = diagnostic_grid();
    let std = classify(&RadialWeight::standard(-0.5).unwrap(), &grid).unwrap();
    assert_eq!(std.verdict, Class::Regular);
    let lp = classify(&RadialWeight::logpow(2.0).unwrap(), &grid).unwrap();
    assert_eq!(lp.verdict, Class::RapidlyIncreasing);
}

#[test]
fn muckenhoupt_thresholds_for_standard_weights() {
    let grid = muckenhoupt_grid();
    for p in [1.5, 2.0, 3.0] {
        for (delta, expect) in [(-0.75, Verdict::Finite), (-0.25, Verdict::Finite), (0.0, Verdict::Divergent), (0.5, Verdict::Divergent)] {
            let alpha = p - 2.0 + delta;
            if alpha <= -1.0 {
                continue;
            }
            let w = RadialWeight::standard(alpha).unwrap();
            assert_eq!(muckenhoupt(&w, p, &grid).unwrap().verdict, expect, "p={p} alpha={alpha}");
            assert_eq!(condition_99(&w, p).unwrap(), expect, "p={p} alpha={alpha}");
        }
    }
}

#[test]
fn u_p_weight_is_built_from_the_tail() {
    let w = RadialWeight::standard(-0.5).unwrap();
    let u = weights::u_p_weight(&w, 2.0).unwrap();
    let s = 0.01;
    assert!(close(u.density_s(s), (w.tail_s(s) * s).powf(-0.5), 1e-10));
}

proptest! {
    #[test]
    fn tail_is_nonincreasing(alpha in -0.9f64..3.0, a in 0.0f64..0.99, b in 0.0f64..0.99) {
        let w = RadialWeight::standard(alpha).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(w.tail(lo) >= w.tail(hi) * (1.0 - 1e-12));
    }

    #[test]
    fn muckenhoupt_is_scale_invariant(alpha in -0.9f64..-0.3, c in 0.01f64..100.0) {
        let w = RadialWeight::standard(alpha).unwrap();
        let grid = muckenhoupt_grid();
        let a = muckenhoupt(&w, 2.0, &grid).unwrap().value;
        let b = muckenhoupt(&w.scaled(c), 2.0, &grid).unwrap().value;
        prop_assert!(close(a, b, 1e-8));
    }

    #[test]
    fn distortion_ignores_scale(beta in 1.2f64..4.0, c in 0.1f64..10.0, s in 1e-8f64..0.5) {
        let w = RadialWeight::logpow(beta).unwrap();
        prop_assert!(close(w.distortion_s(s), w.scaled(c).distortion_s(s), 1e-12));
    }
}
