//! Truncated power series and the function-space norms built from their
//! integral means.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grammar::{fmt_float, parse_call};
use crate::quad::{self, RadialRule};
use crate::value::{Diagnostics, Method, NormValue};
use crate::weights::{self, RadialWeight};

/// Default truncation degree for infinite series.
pub const DEFAULT_DEGREE: usize = 2048;

const MIN_NODES_LOG2: u32 = 7;
const MAX_NODES_LOG2: u32 = 18;
const MEAN_TOL: f64 = 1e-9;

/// A polynomial Σ a_k z^k with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFunction {
    pub coeffs: Vec<Complex64>,
    /// Where the coefficients came from, e.g. `logk(deg=2048)`.
    pub tag: String,
}

impl AnalyticFunction {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut f = AnalyticFunction { coeffs, tag: String::new() };
        f.trim();
        f
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn constant(c: f64) -> Self {
        Self::from_real(&[c])
    }

    /// c·z^m.
    pub fn monomial(m: usize, c: f64) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); m + 1];
        v[m] = Complex64::new(c, 0.0);
        Self::new(v)
    }

    /// Truncation of log(1/(1−z)) = Σ_{k≥1} z^k/k.
    pub fn log_kernel(deg: usize) -> Self {
        let mut v = vec![0.0; deg + 1];
        for (k, c) in v.iter_mut().enumerate().skip(1) {
            *c = 1.0 / k as f64;
        }
        Self::from_real(&v).tagged(format!("logk(deg={deg})"))
    }

    /// Truncation of (1−z)^{−s}.
    pub fn binomial(s: f64, deg: usize) -> Self {
        let mut v = vec![0.0; deg + 1];
        v[0] = 1.0;
        for k in 0..deg {
            v[k + 1] = v[k] * (s + k as f64) / (k as f64 + 1.0);
        }
        Self::from_real(&v).tagged(format!("binom(s={},deg={deg})", fmt_float(s)))
    }

    /// Seeded random coefficients; `dist` is `unit` (uniform [0,1]),
    /// `sym` (uniform [−1,1]) or `sign` (±1).
    pub fn random(deg: usize, seed: u64, dist: &str) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = match dist {
            "unit" => (0..=deg).map(|_| rng.gen::<f64>()).collect(),
            "sym" => (0..=deg).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect(),
            "sign" => (0..=deg).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect(),
            other => return Err(Error::Parse(format!("unknown distribution `{other}`"))),
        };
        Ok(Self::from_real(&v).tagged(format!("rand(deg={deg},seed={seed},dist={dist})")))
    }

    pub fn tagged(mut self, tag: String) -> Self {
        self.tag = tag;
        self
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.norm_sqr() == 0.0) {
            self.coeffs.pop();
        }
    }

    /// Degree of the highest nonzero coefficient (0 for the zero function).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }

    pub fn differentiate(&self) -> Self {
        let v = self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect();
        Self::new(v)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// g − g(0).
    pub fn without_constant(&self) -> Self {
        let mut v = self.coeffs.clone();
        if let Some(c) = v.first_mut() {
            *c = Complex64::new(0.0, 0.0);
        }
        Self::new(v)
    }

    /// Coefficients scaled by r^k, i.e. z ↦ f(rz).
    pub fn dilate(&self, r: f64) -> Vec<Complex64> {
        let mut rk = 1.0;
        self.coeffs
            .iter()
            .map(|&c| {
                let v = c * rk;
                rk *= r;
                v
            })
            .collect()
    }

    /// Real parts of the coefficients.
    pub fn real_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    /// `Some(|c| r^m)` if f = c z^m; every integral mean equals it.
    fn single_term(&self, r: f64) -> Option<f64> {
        let c = self.coeffs.last()?;
        if self.coeffs[..self.coeffs.len() - 1].iter().any(|a| a.norm_sqr() != 0.0) {
            return None;
        }
        Some(c.norm() * r.powi(self.degree() as i32))
    }
}

/// Parses `poly(a0,a1,...)`, `mono(m=..,c=..)`, `logk(deg=..)`,
/// `binom(s=..,deg=..)` and `rand(deg=..,seed=..,dist=..)`.
pub fn parse_function(spec: &str) -> Result<AnalyticFunction> {
    let call = parse_call(spec)?;
    let int = |key: &str, default: f64| -> Result<usize> {
        let v = call.float_or(key, default)?;
        if v < 0.0 || v.fract() != 0.0 || v > 1e8 {
            return Err(Error::param(key, v, "must be a nonnegative integer"));
        }
        Ok(v as usize)
    };
    let f = match call.name.as_str() {
        "poly" => AnalyticFunction::from_real(&call.positional()?),
        "mono" => {
            call.expect_keys(&["m", "c"])?;
            AnalyticFunction::monomial(int("m", 1.0)?, call.float_or("c", 1.0)?)
        }
        "logk" => {
            call.expect_keys(&["deg"])?;
            AnalyticFunction::log_kernel(int("deg", DEFAULT_DEGREE as f64)?)
        }
        "binom" => {
            call.expect_keys(&["s", "deg"])?;
            AnalyticFunction::binomial(call.required("s")?, int("deg", DEFAULT_DEGREE as f64)?)
        }
        "rand" => {
            call.expect_keys(&["deg", "seed", "dist"])?;
            let dist = call.raw("dist").unwrap_or("unit");
            AnalyticFunction::random(int("deg", 512.0)?, int("seed", 0.0)? as u64, dist)?
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    let tag = if f.tag.is_empty() { spec.trim().to_string() } else { f.tag.clone() };
    Ok(f.tagged(tag))
}

type PlanCache = (FftPlanner<f64>, HashMap<usize, Arc<dyn Fft<f64>>>);

thread_local! {
    static PLANS: RefCell<PlanCache> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        let mut p = p.borrow_mut();
        if let Some(f) = p.1.get(&n) {
            return f.clone();
        }
        let f = p.0.plan_fft_inverse(n);
        p.1.insert(n, f.clone());
        f
    })
}

/// Values f(r e^{2πij/n}), j = 0..n, by an inverse FFT of the aliased
/// coefficients.
pub fn circle_values(f: &AnalyticFunction, r: f64, n: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut rk = 1.0;
    for (k, &c) in f.coeffs.iter().enumerate() {
        buf[k % n] += c * rk;
        rk *= r;
    }
    plan(n).process(&mut buf);
    buf
}

/// Integral mean with its sampling diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mean {
    pub value: f64,
    pub nodes: usize,
    pub converged: bool,
}

fn start_nodes(deg: usize) -> u32 {
    let need = (deg + 1).next_power_of_two().trailing_zeros();
    need.clamp(MIN_NODES_LOG2, MAX_NODES_LOG2)
}

/// M_p(r, f) with node-doubling diagnostics. p = 2 uses Parseval.
pub fn hardy_mean_diag(f: &AnalyticFunction, p: f64, r: f64) -> Mean {
    if f.is_zero() {
        return Mean { value: 0.0, nodes: 0, converged: true };
    }
    if let Some(v) = f.single_term(r) {
        return Mean { value: v, nodes: 0, converged: true };
    }
    if p.is_infinite() {
        return Mean { value: m_infinity(f, r).lower, nodes: 0, converged: true };
    }
    if p == 2.0 {
        let mut r2k = 1.0;
        let mut s = 0.0;
        let r2 = r * r;
        for c in &f.coeffs {
            s += c.norm_sqr() * r2k;
            r2k *= r2;
        }
        return Mean { value: s.sqrt(), nodes: 0, converged: true };
    }
    let mut k = start_nodes(f.degree());
    let mut prev = f64::NAN;
    loop {
        let n = 1usize << k;
        let vals = circle_values(f, r, n);
        let m = (vals.iter().map(|v| v.norm().powf(p)).sum::<f64>() / n as f64).powf(1.0 / p);
        if (m - prev).abs() <= MEAN_TOL * m || m == 0.0 {
            return Mean { value: m, nodes: n, converged: true };
        }
        if k >= MAX_NODES_LOG2 {
            return Mean { value: m, nodes: n, converged: false };
        }
        prev = m;
        k += 1;
    }
}

/// M_p(r, f) = ((1/2π) ∫ |f(re^{iθ})|^p dθ)^{1/p}.
pub fn hardy_mean(f: &AnalyticFunction, p: f64, r: f64) -> f64 {
    hardy_mean_diag(f, p, r).value
}

/// Certified bracket for M_∞(r, f).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxModulus {
    /// Attained value at a refined sample point.
    pub lower: f64,
    /// Grid maximum inflated by the Bernstein bound on |f|².
    pub upper: f64,
}

/// M_∞(r, f) = max_θ |f(re^{iθ})|.
pub fn m_infinity(f: &AnalyticFunction, r: f64) -> MaxModulus {
    if f.is_zero() {
        return MaxModulus { lower: 0.0, upper: 0.0 };
    }
    if let Some(v) = f.single_term(r) {
        return MaxModulus { lower: v, upper: v };
    }
    let d = f.degree();
    let n = (8 * (d + 1)).next_power_of_two().max(64);
    let vals = circle_values(f, r, n);
    let mags: Vec<f64> = vals.iter().map(|v| v.norm()).collect();
    let grid_max = mags.iter().cloned().fold(0.0, f64::max);
    let h = 2.0 * std::f64::consts::PI / n as f64;
    // |f|² is a trigonometric polynomial of degree d; its second derivative
    // is bounded by d² M², and the maximum lies within h/2 of a node.
    let slack = (h * d as f64).powi(2) / 8.0;
    let upper = if slack < 1.0 { grid_max / (1.0 - slack).sqrt() } else { f64::INFINITY };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]));
    let mut best = grid_max;
    let at = |t: f64| f.eval(Complex64::from_polar(r, t)).norm();
    for &i in order.iter().take(4) {
        let (mut a, mut b) = ((i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (at(x1), at(x2));
        for _ in 0..60 {
            if f1 > f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = at(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = at(x2);
            }
        }
        best = best.max(f1).max(f2);
    }
    MaxModulus { lower: best, upper: upper.max(best) }
}

/// How to sample M_p across radii for radial integrals.
fn profile(f: &AnalyticFunction, p: f64, nodes: &[f64]) -> Vec<f64> {
    nodes.iter().map(|&r| hardy_mean(f, p, r)).collect()
}

fn weighted_rule(w: &RadialWeight, degree: usize, gamma: f64, area: bool) -> RadialRule {
    let k = |s: f64| {
        let base = if gamma == 0.0 { 1.0 } else { s.powf(gamma) };
        let r = if area { 2.0 * (1.0 - s) } else { 1.0 };
        base * r * w.density_s(s)
    };
    let t = |s: f64| {
        let base = if gamma == 0.0 { 1.0 } else { s.powf(gamma) };
        let r = if area { 2.0 } else { 1.0 };
        base * r * w.tail_s(s)
    };
    RadialRule::with_tail(degree, k, t)
}

/// Quadrature rule for ∫₀¹ F(r) ŵ(r) dr.
pub fn tail_rule(w: &RadialWeight, degree: usize) -> RadialRule {
    RadialRule::new(degree, |s| w.tail_s(s))
}

/// Rule for ∫₀¹ F(r) (1−r)^γ ω(r) [2r] dr, exposed for callers that reuse
/// one sampled profile against several weights.
pub fn norm_rule(w: &RadialWeight, degree: usize, gamma: f64, area: bool) -> RadialRule {
    weighted_rule(w, degree, gamma, area)
}

/// ‖f‖^p_{A^p_ω} = 2 ∫₀¹ M_p^p(r, f) ω(r) r dr.
pub fn bergman_norm(f: &AnalyticFunction, p: f64, w: &RadialWeight) -> Result<NormValue> {
    if !(p > 0.0) {
        return Err(Error::param("p", p, "needs p > 0"));
    }
    if f.is_zero() {
        return Ok(NormValue::exact(0.0));
    }
    if p == 2.0 {
        let v: f64 = f.coeffs.iter().enumerate().map(|(k, c)| 2.0 * c.norm_sqr() * w.moment_radial(k)).sum();
        return Ok(NormValue::finite(
            v,
            Method::ClosedForm,
            Diagnostics { degree: f.degree(), note: "Parseval with radial moments".into(), ..Diagnostics::default() },
        ));
    }
    let rule = weighted_rule(w, f.degree(), 0.0, true);
    let vals: Vec<f64> = profile(f, p, &rule.nodes).into_iter().map(|m| m.powf(p)).collect();
    Ok(NormValue::finite(
        rule.integrate(&vals),
        Method::Quadrature,
        Diagnostics { grid: rule.nodes.len(), degree: f.degree(), ..Diagnostics::default() },
    ))
}

/// ‖f‖_{A^p_ω} = (bergman_norm)^{1/p}.
pub fn bergman_norm_root(f: &AnalyticFunction, p: f64, w: &RadialWeight) -> Result<f64> {
    Ok(bergman_norm(f, p, w)?.value.powf(1.0 / p))
}

/// (∫₀¹ M_p^q(r, f)(1−r)^γ ω(r) dr)^{1/q}; no factor r.
pub fn mixed_norm(f: &AnalyticFunction, p: f64, q: f64, w: &RadialWeight, gamma: f64) -> Result<NormValue> {
    if !(p > 0.0) || !(q > 0.0) || !(gamma >= 0.0) {
        return Err(Error::Invalid(format!("mixed norm needs p, q > 0 and γ ≥ 0 (p={p}, q={q}, γ={gamma})")));
    }
    if f.is_zero() {
        return Ok(NormValue::exact(0.0));
    }
    let rule = weighted_rule(w, f.degree(), gamma, false);
    let vals: Vec<f64> = profile(f, p, &rule.nodes).into_iter().map(|m| m.powf(q)).collect();
    Ok(NormValue::finite(
        rule.integrate(&vals).powf(1.0 / q),
        Method::Quadrature,
        Diagnostics { grid: rule.nodes.len(), degree: f.degree(), ..Diagnostics::default() },
    ))
}

/// Maximum of `h(s)` over descending co-radii, refined by golden-section
/// search in log s around the best grid point.
pub fn refined_sup(h: impl Fn(f64) -> f64, coradii: &[f64]) -> f64 {
    let vals: Vec<f64> = coradii.iter().map(|&s| h(s)).collect();
    let (i, &best) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    let lo = coradii[(i + 1).min(coradii.len() - 1)].ln();
    let hi = coradii[i.saturating_sub(1)].ln();
    let (mut a, mut b) = (lo, hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (h(x1.exp()), h(x2.exp()));
    for _ in 0..50 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = h(x1.exp());
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = h(x2.exp());
        }
    }
    best.max(f1).max(f2)
}

/// sup_r M_p(r, f)(1−r)^γ ŵ(r)^β over the diagnostic grid, refined near
/// the best grid point.
pub fn mixed_norm_sup(f: &AnalyticFunction, p: f64, w: &RadialWeight, beta: f64, gamma: f64) -> Result<NormValue> {
    let grid = weights::diagnostic_coradii();
    let h = |s: f64| hardy_mean(f, p, 1.0 - s) * s.powf(gamma) * w.tail_s(s).powf(beta);
    let best = refined_sup(h, &grid);
    Ok(NormValue::finite(
        best,
        Method::Quadrature,
        Diagnostics { grid: grid.len(), degree: f.degree(), ..Diagnostics::default() },
    ))
}

/// sup_r M_q(r, g′)(1−r)^{1−α}/ŵ(r)^η + |g(0)|.
pub fn lambda_norm(g: &AnalyticFunction, q: f64, alpha: f64, eta: f64, w: &RadialWeight) -> Result<NormValue> {
    if !(alpha > 0.0 && alpha <= 1.0) || !(eta >= 0.0) {
        return Err(Error::Invalid(format!("lambda norm needs 0 < α ≤ 1 and η ≥ 0 (α={alpha}, η={eta})")));
    }
    let grid = weights::diagnostic_coradii();
    let d = g.differentiate();
    let h = |s: f64| {
        let wt = if eta == 0.0 { 1.0 } else { w.tail_s(s).powf(eta) };
        hardy_mean(&d, q, 1.0 - s) * s.powf(1.0 - alpha) / wt
    };
    let sup = refined_sup(h, &grid);
    Ok(NormValue::finite(
        sup + g.coeff(0).norm(),
        Method::Quadrature,
        Diagnostics { grid: grid.len(), degree: g.degree(), ..Diagnostics::default() },
    ))
}

/// M_q(r, g′)(1−r)^{1−α}/ŵ(r)^η on `grid`.
pub fn little_lambda_profile(
    g: &AnalyticFunction,
    q: f64,
    alpha: f64,
    eta: f64,
    w: &RadialWeight,
    grid: &[f64],
) -> Vec<f64> {
    let d = g.differentiate();
    grid.iter()
        .map(|&r| {
            let s = 1.0 - r;
            let wt = if eta == 0.0 { 1.0 } else { w.tail_s(s).powf(eta) };
            hardy_mean(&d, q, r) * s.powf(1.0 - alpha) / wt
        })
        .collect()
}

/// (|g(0)|² + Σ_{k≥1} k |b_k|²)^{1/2}.
pub fn dirichlet_norm(g: &AnalyticFunction) -> NormValue {
    let s: f64 = g.coeff(0).norm_sqr() + g.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c.norm_sqr()).sum::<f64>();
    NormValue::finite(
        s.sqrt(),
        Method::Truncation,
        Diagnostics { degree: g.degree(), ..Diagnostics::default() },
    )
}

/// S_{n1,n2} f = Σ_{n1 ≤ k < n2} a_k z^k.
pub fn partial_sum(f: &AnalyticFunction, n1: usize, n2: usize) -> AnalyticFunction {
    let mut v = vec![Complex64::new(0.0, 0.0); n2.min(f.coeffs.len())];
    let hi = v.len();
    if n1 < hi {
        v[n1..].copy_from_slice(&f.coeffs[n1..hi]);
    }
    AnalyticFunction::new(v)
}

/// ‖P‖_{H^p} = M_p(1, P) for a polynomial P.
pub fn hardy_norm_poly(poly: &AnalyticFunction, p: f64) -> f64 {
    hardy_mean(poly, p, 1.0)
}

/// (∫ |g(e^{i(θ+h)}) − g(e^{iθ})|^q dθ/2π)^{1/q}.
pub fn modulus_of_continuity(g: &AnalyticFunction, q: f64, h: f64) -> f64 {
    let diff: Vec<Complex64> = g
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| c * (Complex64::from_polar(1.0, k as f64 * h) - 1.0))
        .collect();
    hardy_mean(&AnalyticFunction::new(diff), q, 1.0)
}

/// sup_{0<h≤t} of [`modulus_of_continuity`] over the dyadic grid t 2^{−j}.
pub fn modulus_sup(g: &AnalyticFunction, q: f64, t: f64) -> f64 {
    (0..40).map(|j| modulus_of_continuity(g, q, t * 0.5f64.powi(j))).fold(0.0, f64::max)
}

/// ∫₀¹ M_∞^p(r, f) ŵ(r) dr, evaluated with the upper bracket of M_∞.
pub fn minfty_integral(f: &AnalyticFunction, p: f64, w: &RadialWeight) -> f64 {
    let rule = tail_rule(w, f.degree());
    let vals: Vec<f64> = rule.nodes.iter().map(|&r| m_infinity(f, r).upper.powf(p)).collect();
    rule.integrate(&vals)
}

/// ∫₀¹ g(r) ŵ(r) dr for a cheap pointwise g; used by tests and oracles.
pub fn tail_weighted(w: &RadialWeight, g: impl Fn(f64) -> f64) -> f64 {
    quad::toward_zero(|s| g(1.0 - s) * w.tail_s(s), 1.0, quad::TAIL_TOL).value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_derivative() {
        let f = AnalyticFunction::from_real(&[1.0, 0.0, 2.0]);
        assert_eq!(f.eval_real(2.0).re, 9.0);
        assert_eq!(f.differentiate(), AnalyticFunction::from_real(&[0.0, 4.0]));
        assert!(AnalyticFunction::constant(3.0).differentiate().is_zero());
    }

    #[test]
    fn circle_values_alias_high_degree() {
        let f = AnalyticFunction::monomial(200, 1.0);
        let v = circle_values(&f, 0.9, 128);
        for x in v {
            assert!((x.norm() - 0.9f64.powi(200)).abs() < 1e-15);
        }
    }

    #[test]
    fn partial_sum_slices() {
        let f = AnalyticFunction::from_real(&[1.0, 1.0, 5.0]);
        assert_eq!(partial_sum(&f, 2, 3), AnalyticFunction::monomial(2, 5.0));
        assert_eq!(partial_sum(&f, 0, 10), f);
    }
}
