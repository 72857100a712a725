//! The generalized Hilbert operator H_g f(z) = ∫₀¹ f(t) g′(tz) dt, the
//! Hilbert matrix H = H_{log 1/(1−z)}, the sublinear companion H̃, test
//! functions for operator-norm lower bounds, and Hilbert–Schmidt sums.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{bergman_norm_root, hardy_mean, AnalyticFunction};
use crate::decomposition::BlockPartition;
use crate::error::{Error, Result};
use crate::quad::{self, RadialRule};
use crate::value::{Diagnostics, Method, NormValue, Verdict};
use crate::weights::{self, carleson_mass, condition_99, RadialWeight};

/// Exponents and weight of an operator question H_g : A^p_ω → A^q_ω.
#[derive(Debug, Clone)]
pub struct OperatorSetting {
    pub p: f64,
    pub q: f64,
    /// Normalized weight.
    pub weight: RadialWeight,
    /// Factor that normalized the input weight.
    pub factor: f64,
    /// 1/s = 1/q − 1/p when q < p.
    pub s: Option<f64>,
    /// Verdict on ∫₀¹ ŵ^{−1/(p−1)} < ∞.
    pub well_defined: Verdict,
}

impl OperatorSetting {
    pub fn new(p: f64, q: f64, w: &RadialWeight) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::param("p", p, "needs p > 1"));
        }
        if !(q > 1.0) {
            return Err(Error::param("q", q, "needs q > 1"));
        }
        let (weight, factor) = w.normalized();
        let s = if q < p { Some(1.0 / (1.0 / q - 1.0 / p)) } else { None };
        let well_defined = condition_99(&weight, p)?;
        Ok(OperatorSetting { p, q, weight, factor, s, well_defined })
    }

    fn require_well_defined(&self) -> Result<()> {
        if self.well_defined == Verdict::Divergent {
            return Err(Error::WellDefined(format!(
                "∫₀¹ ŵ^{{−1/(p−1)}} diverges for p = {} and weight {}",
                self.p,
                self.weight.spec()
            )));
        }
        Ok(())
    }
}

/// μ_k = ∫₀¹ t^k f(t) dt = Σ_n a_n/(n + k + 1), k = 0..=k_max.
pub fn moments(f: &AnalyticFunction, k_max: usize) -> Vec<Complex64> {
    (0..=k_max)
        .map(|k| {
            f.coeffs
                .iter()
                .enumerate()
                .map(|(n, &a)| a / (n + k + 1) as f64)
                .sum()
        })
        .collect()
}

/// μ_k = ∫₀¹ t^k φ(t) dt for a pointwise φ given in the co-radius s = 1 − t.
pub fn moments_quad(phi: impl Fn(f64) -> f64, k_max: usize) -> Vec<f64> {
    let rule = RadialRule::new(k_max, phi);
    power_moments(&rule, k_max)
}

fn power_moments(rule: &RadialRule, k_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; k_max + 1];
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let mut rk = w;
        for o in out.iter_mut() {
            *o += rk;
            rk *= r;
        }
    }
    out
}

fn coefficient_action(g: &AnalyticFunction, mu: &[Complex64]) -> AnalyticFunction {
    let c: Vec<Complex64> = mu
        .iter()
        .enumerate()
        .map(|(k, &m)| g.coeff(k + 1) * (k + 1) as f64 * m)
        .collect();
    AnalyticFunction::new(c)
}

/// Coefficients c_k = (k+1) b_{k+1} μ_k(f) of H_g f for k ≤ k_max.
pub fn apply_generalized(
    g: &AnalyticFunction,
    f: &AnalyticFunction,
    k_max: usize,
    setting: &OperatorSetting,
) -> Result<AnalyticFunction> {
    setting.require_well_defined()?;
    Ok(coefficient_action(g, &moments(f, k_max)))
}

/// H f with c_k = Σ_n a_n/(n + k + 1).
pub fn apply_classical(f: &AnalyticFunction, k_max: usize) -> AnalyticFunction {
    AnalyticFunction::new(moments(f, k_max))
}

/// H̃ f(x) = ∫₀¹ |f(t)|/(1 − t x) dt for 0 ≤ x < 1.
pub fn apply_sublinear(f: &AnalyticFunction, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::param("x", x, "needs 0 ≤ x < 1"));
    }
    let q = quad::toward_zero(|s| f.eval_real(1.0 - s).norm() / (1.0 - x + x * s), 1.0, quad::TAIL_TOL);
    if !q.converged {
        return Err(Error::Quadrature(format!("sublinear integral at x = {x} did not settle")));
    }
    Ok(q.value)
}

/// A function on [0, 1) handled pointwise, written in the co-radius s = 1 − t.
#[derive(Debug, Clone)]
pub enum RadialFn {
    /// c ŵ(t)^e on each co-radius range (lo, hi]; lo = 0 reaches the boundary.
    WeightPower { weight: RadialWeight, exponent: f64, pieces: Vec<(f64, f64, f64)> },
    /// Σ c_m t^m.
    Poly(Vec<f64>),
    Zero,
}

impl RadialFn {
    pub fn value_s(&self, s: f64) -> f64 {
        match self {
            RadialFn::WeightPower { weight, exponent, pieces } => pieces
                .iter()
                .find(|&&(lo, hi, _)| s > lo && s <= hi)
                .map_or(0.0, |&(_, _, c)| c * weight.tail_s(s).powf(*exponent)),
            RadialFn::Poly(c) => {
                let t = 1.0 - s;
                c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
            }
            RadialFn::Zero => 0.0,
        }
    }

    /// ∫₀¹ h(s) φ(s) ds, with a flag for convergence at the boundary.
    pub fn integrate_s(&self, h: impl Fn(f64) -> f64) -> (f64, bool) {
        match self {
            RadialFn::WeightPower { weight, exponent, pieces } => {
                let mut total = 0.0;
                let mut ok = true;
                for &(lo, hi, c) in pieces {
                    if c == 0.0 {
                        continue;
                    }
                    let f = |s: f64| h(s) * weight.tail_s(s).powf(*exponent);
                    if lo == 0.0 {
                        let q = quad::toward_zero(f, hi, quad::TAIL_TOL);
                        ok &= q.converged;
                        total += c * q.value;
                    } else {
                        total += c * quad::dyadic_between(f, lo, hi);
                    }
                }
                (total, ok)
            }
            RadialFn::Poly(_) => {
                let q = quad::toward_zero(|s| h(s) * self.value_s(s), 1.0, quad::TAIL_TOL);
                (q.value, q.converged)
            }
            RadialFn::Zero => (0.0, true),
        }
    }

    /// μ_x = ∫₀¹ t^x φ(t) dt.
    pub fn moment(&self, x: f64) -> f64 {
        if let RadialFn::Poly(c) = self {
            return c.iter().enumerate().map(|(m, a)| a / (x + m as f64 + 1.0)).sum();
        }
        self.integrate_s(|s| (x * (-s).ln_1p()).exp()).0
    }

    /// μ_0..μ_{k_max}.
    pub fn moments(&self, k_max: usize) -> Vec<f64> {
        match self {
            RadialFn::Poly(_) => (0..=k_max).map(|k| self.moment(k as f64)).collect(),
            RadialFn::Zero => vec![0.0; k_max + 1],
            RadialFn::WeightPower { .. } => moments_quad(|s| self.value_s(s), k_max),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RadialFn::Zero => true,
            RadialFn::Poly(c) => c.iter().all(|&a| a == 0.0),
            RadialFn::WeightPower { pieces, .. } => pieces.iter().all(|p| p.2 == 0.0),
        }
    }
}

/// (∫₀¹ |φ(t)|^p ŵ(t) dt)^{1/p}.
pub fn lp_hat_norm(phi: &RadialFn, p: f64, w: &RadialWeight) -> Result<NormValue> {
    if !(p > 0.0) {
        return Err(Error::param("p", p, "needs p > 0"));
    }
    if phi.is_zero() {
        return Ok(NormValue::exact(0.0));
    }
    let (v, ok) = match phi {
        RadialFn::WeightPower { weight, exponent, pieces } => {
            let abs = RadialFn::WeightPower {
                weight: weight.clone(),
                exponent: exponent * p,
                pieces: pieces.iter().map(|&(lo, hi, c)| (lo, hi, c.abs().powf(p))).collect(),
            };
            abs.integrate_s(|s| w.tail_s(s))
        }
        _ => {
            let q = quad::toward_zero(|s| phi.value_s(s).abs().powf(p) * w.tail_s(s), 1.0, quad::TAIL_TOL);
            (q.value, q.converged)
        }
    };
    if !ok || !v.is_finite() {
        return Ok(NormValue::divergent(f64::NAN, "∫ |φ|^p ŵ does not settle at t = 1"));
    }
    Ok(NormValue::finite(v.powf(1.0 / p), Method::Quadrature, Diagnostics::default()))
}

/// φ_r = ŵ^{−1/(p−1)} χ_{[r,1)}.
pub fn phi_r(w: &RadialWeight, p: f64, r: f64) -> Result<RadialFn> {
    phi_on(w, p, 0.0, 1.0 - r)
}

/// φ_r restricted to [r, 1 − (1 − r)²], for weights where φ_r itself is
/// not integrable.
pub fn phi_r_truncated(w: &RadialWeight, p: f64, r: f64) -> Result<RadialFn> {
    let s = 1.0 - r;
    phi_on(w, p, s * s, s)
}

fn phi_on(w: &RadialWeight, p: f64, lo: f64, hi: f64) -> Result<RadialFn> {
    if !(p > 1.0) {
        return Err(Error::param("p", p, "needs p > 1"));
    }
    if !(hi > 0.0 && hi <= 1.0) {
        return Err(Error::param("r", 1.0 - hi, "needs 0 ≤ r < 1"));
    }
    Ok(RadialFn::WeightPower { weight: w.clone(), exponent: -1.0 / (p - 1.0), pieces: vec![(lo, hi, 1.0)] })
}

/// Dyadic pieces (2^{−j−1}, 2^{−j}], j < levels, and the boundary piece
/// (0, 2^{−levels}], each carrying ŵ^{−1/(p−1)}.
pub fn dyadic_pieces(levels: usize) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = (0..levels).map(|j| (0.5f64.powi(j as i32 + 1), 0.5f64.powi(j as i32))).collect();
    v.push((0.0, 0.5f64.powi(levels as i32)));
    v
}

const GRAM_HEAD: usize = 256;
const GRAM_BLOCKS: usize = 400;

/// Gram matrix G_ij = ⟨Hφ_i, Hφ_j⟩_{A²_ω} for a family of functions on
/// [0, 1): ‖H(Σ v_i φ_i)‖² = vᵀ G v.
#[derive(Debug, Clone)]
pub struct HilbertGram {
    pub gram: Vec<Vec<f64>>,
    pub converged: bool,
}

impl HilbertGram {
    pub fn new(basis: &[RadialFn], w: &RadialWeight) -> Self {
        let m = basis.len();
        let mut gram = vec![vec![0.0; m]; m];
        let heads: Vec<Vec<f64>> = basis.iter().map(|b| b.moments(GRAM_HEAD - 1)).collect();
        for k in 0..GRAM_HEAD {
            let wk = 2.0 * w.moment_radial(k);
            for i in 0..m {
                for j in 0..=i {
                    gram[i][j] += wk * heads[i][k] * heads[j][k];
                }
            }
        }
        // Σ_{k ≥ K} F(k) ≈ ∫_{K−1/2}^∞ F(x) dx in dyadic blocks of x.
        let mut lo = GRAM_HEAD as f64 - 0.5;
        let mut prev = f64::NAN;
        let mut total = (0..m).map(|i| gram[i][i]).sum::<f64>();
        let mut converged = false;
        for _ in 0..GRAM_BLOCKS {
            let mut block = vec![vec![0.0; m]; m];
            for (x, wx) in quad::gauss_points(lo, 2.0 * lo) {
                let wk = 2.0 * w.moment(2.0 * x + 1.0) * wx;
                let mu: Vec<f64> = basis.iter().map(|b| b.moment(x)).collect();
                for i in 0..m {
                    for j in 0..=i {
                        block[i][j] += wk * mu[i] * mu[j];
                    }
                }
            }
            let c: f64 = (0..m).map(|i| block[i][i]).sum();
            let q = c / prev;
            let factor = if q.is_finite() && (0.0..1.0).contains(&q) { 1.0 + q / (1.0 - q) } else { 1.0 };
            let done = c == 0.0 || (q.is_finite() && (0.0..0.98).contains(&q) && c * (factor - 1.0) <= 1e-10 * total);
            let scale = if done { factor } else { 1.0 };
            for i in 0..m {
                for j in 0..=i {
                    gram[i][j] += scale * block[i][j];
                }
            }
            total += scale * c;
            prev = c;
            lo *= 2.0;
            if done {
                converged = true;
                break;
            }
        }
        for i in 0..m {
            for j in 0..i {
                gram[j][i] = gram[i][j];
            }
        }
        HilbertGram { gram, converged }
    }

    /// vᵀ G v.
    pub fn quadratic(&self, v: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                s += v[i] * g * v[j];
            }
        }
        s
    }
}

/// ‖H φ‖_{A^p_ω}. For p = 2 the coefficient sum carries a continuous tail;
/// other p truncate H φ at degree 2048.
pub fn hilbert_image_norm(phi: &RadialFn, p: f64, w: &RadialWeight) -> Result<NormValue> {
    if phi.is_zero() {
        return Ok(NormValue::exact(0.0));
    }
    if p == 2.0 {
        let g = HilbertGram::new(std::slice::from_ref(phi), w);
        let v = g.gram[0][0].sqrt();
        let mut out = NormValue::finite(v, Method::Quadrature, Diagnostics::default());
        if !g.converged {
            out.verdict = Verdict::Undetermined;
            out.diagnostics.note = "coefficient tail did not settle".into();
        }
        return Ok(out);
    }
    let mu = phi.moments(2048);
    let h = AnalyticFunction::from_real(&mu);
    let v = bergman_norm_root(&h, p, w)?;
    Ok(NormValue::finite(
        v,
        Method::Truncation,
        Diagnostics { degree: 2048, note: "H φ truncated at degree 2048".into(), ..Diagnostics::default() },
    ))
}

/// A test function f_{M_n} with its truncation diagnostics.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub f: AnalyticFunction,
    pub n: usize,
    pub mark: u64,
    pub a: f64,
    pub gamma: f64,
    /// Last kept coefficient relative to the largest one.
    pub tail: f64,
}

/// Largest degree used for f_{M_n} truncations.
pub const TEST_DEGREE_CAP: usize = 1 << 14;

/// f_{M_n}(z) = (M_n^{γ+1} ω(S(a)))^{−1/p} (1 − a z)^{−(γ+1)/p}, a = 1 − 1/M_n.
pub fn test_function_fn(
    setting: &OperatorSetting,
    gamma: Option<f64>,
    n: usize,
    part: &BlockPartition,
) -> Result<TestFunction> {
    let p = setting.p;
    let gamma = gamma.unwrap_or(p + 2.0);
    if !(gamma > p - 1.0) {
        return Err(Error::param("gamma", gamma, "needs gamma > p − 1"));
    }
    if n >= part.marks.len() {
        return Err(Error::Invalid(format!("partition has no mark M_{n}")));
    }
    let m = part.marks[n];
    let a = 1.0 - 1.0 / m as f64;
    let sigma = (gamma + 1.0) / p;
    let norm = ((m as f64).powf(gamma + 1.0) * carleson_mass(&setting.weight, a)).powf(-1.0 / p);
    if a == 0.0 {
        return Ok(TestFunction { f: AnalyticFunction::constant(norm), n, mark: m, a, gamma, tail: 0.0 });
    }
    let need = (45.0 * m as f64 + 4.0 * sigma).ceil() as usize;
    let deg = need.min(TEST_DEGREE_CAP);
    let mut c = vec![0.0; deg + 1];
    c[0] = norm;
    for k in 0..deg {
        c[k + 1] = c[k] * (sigma + k as f64) / (k as f64 + 1.0) * a;
    }
    let peak = c.iter().cloned().fold(0.0, f64::max);
    let tail = c[deg] / peak;
    if tail > 1e-6 {
        return Err(Error::Invalid(format!(
            "f_(M_{n}) needs degree above {TEST_DEGREE_CAP} (mark {m}); truncation tail {tail:e}"
        )));
    }
    let f = AnalyticFunction::from_real(&c).tagged(format!("f_M{n}"));
    Ok(TestFunction { f, n, mark: m, a, gamma, tail })
}

/// (1/2π) ∫ |1 − ρ e^{iθ}|^{−2λ} dθ.
pub fn kernel_mean(lambda: f64, rho: f64) -> f64 {
    let d = |t: f64| {
        let h = (0.5 * t).sin();
        ((1.0 - rho) * (1.0 - rho) + 4.0 * rho * h * h).powf(-lambda)
    };
    quad::toward_zero(d, std::f64::consts::PI, 1e-12).value / std::f64::consts::PI
}

/// Ratios (∫_D ω/|1 − a z|^{γ+1} dA) / (ω(S(a))/(1 − a)^{γ+1}) on a = 1 − 2^{−j}.
pub fn zhu_ratios(w: &RadialWeight, gamma: f64, depth: usize) -> Vec<f64> {
    let lambda = 0.5 * (gamma + 1.0);
    (1..=depth)
        .map(|j| {
            let a = 1.0 - 0.5f64.powi(j as i32);
            let lhs = 2.0
                * quad::toward_zero(
                    |s| w.density_s(s) * (1.0 - s) * kernel_mean(lambda, a * (1.0 - s)),
                    1.0,
                    1e-10,
                )
                .value;
            let rhs = carleson_mass(w, a) / (1.0 - a).powf(gamma + 1.0);
            lhs / rhs
        })
        .collect()
}

/// Smallest γ on a candidate ladder above p − 1 whose comparability ratios
/// stay within a spread of 8 and settle over the last three radii.
pub fn gamma_zero(w: &RadialWeight, p: f64) -> Option<f64> {
    let ladder = [0.25, 0.5, 1.0, 2.0, 3.0, 5.0];
    ladder.iter().map(|d| p - 1.0 + d).find(|&g| {
        let r = zhu_ratios(w, g, 10);
        let (lo, hi) = (r.iter().cloned().fold(f64::INFINITY, f64::min), r.iter().cloned().fold(0.0, f64::max));
        let last = &r[r.len() - 3..];
        let settle = last.iter().cloned().fold(0.0, f64::max) / last.iter().cloned().fold(f64::INFINITY, f64::min);
        hi / lo <= 8.0 && settle <= 1.1
    })
}

/// Samples of φ_ρ with the truncated Q_ρ.
#[derive(Debug, Clone)]
pub struct QFamily {
    pub rho: f64,
    /// (t, φ_ρ(t)) on the quadrature radii.
    pub samples: Vec<(f64, f64)>,
    pub q_fn: AnalyticFunction,
}

/// Degree of Q_ρ truncations.
pub const Q_DEGREE: usize = 2048;

/// φ_ρ(t) = (M_q(t, g_ρ′)(1 − t)^{1−1/q})^{q/(p−q)}, Q_ρ(z) = ∫₀¹ φ_ρ(t)/(1 − t z) dt.
pub fn test_function_q(g: &AnalyticFunction, rho: f64, setting: &OperatorSetting) -> Result<QFamily> {
    let (p, q) = (setting.p, setting.q);
    if !(q < p) {
        return Err(Error::Invalid(format!("Q_ρ needs q < p (p={p}, q={q})")));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::param("rho", rho, "needs 0 ≤ rho < 1"));
    }
    let d = AnalyticFunction::new(g.differentiate().dilate(rho));
    if d.is_zero() {
        return Ok(QFamily { rho, samples: Vec::new(), q_fn: AnalyticFunction::zero() });
    }
    let e = q / (p - q);
    let power = (q - 1.0) / (p - q);
    let rule = RadialRule::new(Q_DEGREE, |s| s.powf(power));
    let m: Vec<f64> = rule.nodes.iter().map(|&r| hardy_mean(&d, q, r).powf(e)).collect();
    let samples = rule.nodes.iter().zip(&m).map(|(&t, &v)| (t, v * (1.0 - t).powf(power))).collect();
    let mut mu = vec![0.0; Q_DEGREE + 1];
    for ((&r, &w), &v) in rule.nodes.iter().zip(&rule.weights).zip(&m) {
        let mut rk = w * v;
        for o in mu.iter_mut() {
            *o += rk;
            rk *= r;
        }
    }
    Ok(QFamily { rho, samples, q_fn: AnalyticFunction::from_real(&mu).tagged(format!("Q_rho={rho}")) })
}

/// One lower-bound estimate with the ratio of every test function tried.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorEstimate {
    pub value: f64,
    pub ratios: Vec<f64>,
    pub best: usize,
}

fn image_ratio(g: &AnalyticFunction, f: &AnalyticFunction, setting: &OperatorSetting) -> Result<f64> {
    let k_max = g.degree().max(1) - 1;
    let h = apply_generalized(g, f, k_max, setting)?;
    let num = bergman_norm_root(&h, setting.q, &setting.weight)?;
    let den = bergman_norm_root(f, setting.p, &setting.weight)?;
    Ok(num / den)
}

/// max ‖H_g f‖_{A^q_ω}/‖f‖_{A^p_ω} over f_{M_n} (q ≥ p, n ≤ n_max, as far
/// as truncation allows) or Q_ρ (q < p, ρ ∈ {0.9, 0.95, 0.99}).
pub fn operator_norm_lower(
    g: &AnalyticFunction,
    setting: &OperatorSetting,
    part: &BlockPartition,
    n_max: usize,
) -> Result<OperatorEstimate> {
    setting.require_well_defined()?;
    if g.without_constant().is_zero() {
        return Ok(OperatorEstimate { value: 0.0, ratios: Vec::new(), best: 0 });
    }
    let mut ratios = Vec::new();
    if setting.q >= setting.p {
        for n in 0..=n_max.min(part.marks.len() - 1) {
            let t = match test_function_fn(setting, None, n, part) {
                Ok(t) => t,
                Err(Error::Invalid(_)) if n > 0 => break,
                Err(e) => return Err(e),
            };
            ratios.push(image_ratio(g, &t.f, setting)?);
        }
    } else {
        for rho in [0.9, 0.95, 0.99] {
            let fam = test_function_q(g, rho, setting)?;
            ratios.push(image_ratio(g, &fam.q_fn, setting)?);
        }
    }
    let (best, value) = ratios
        .iter()
        .cloned()
        .enumerate()
        .fold((0, 0.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Ok(OperatorEstimate { value, ratios, best })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub samples: usize,
    pub degree: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { samples: 200, degree: 256, seed: 0 }
    }
}

/// sup of ‖H_g f‖_q/‖f‖_p over seeded polynomials with i.i.d. uniform
/// [0, 1] coefficients.
pub fn operator_norm_sample(g: &AnalyticFunction, setting: &OperatorSetting, cfg: &SamplerConfig) -> Result<OperatorEstimate> {
    setting.require_well_defined()?;
    if g.without_constant().is_zero() {
        return Ok(OperatorEstimate { value: 0.0, ratios: vec![0.0; cfg.samples], best: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ratios = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        let c: Vec<f64> = (0..=cfg.degree).map(|_| rng.gen::<f64>()).collect();
        ratios.push(image_ratio(g, &AnalyticFunction::from_real(&c), setting)?);
    }
    let (best, value) = ratios
        .iter()
        .cloned()
        .enumerate()
        .fold((0, 0.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Ok(OperatorEstimate { value, ratios, best })
}

/// β_k = (k+1)|b_{k+1}| of a symbol g, with an optional constant value for
/// all k beyond the listed ones.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCoeffs {
    pub finite: Vec<f64>,
    pub tail: Option<f64>,
}

impl SymbolCoeffs {
    pub fn from_function(g: &AnalyticFunction) -> Self {
        let finite = (0..g.degree()).map(|k| (k + 1) as f64 * g.coeff(k + 1).norm()).collect();
        SymbolCoeffs { finite, tail: None }
    }

    /// log(1/(1−z)) without truncation: β_k = 1 for every k.
    pub fn log_kernel() -> Self {
        SymbolCoeffs { finite: Vec::new(), tail: Some(1.0) }
    }

    pub fn is_zero(&self) -> bool {
        self.finite.iter().all(|&b| b == 0.0) && self.tail.is_none_or(|t| t == 0.0)
    }
}

const HS_HEAD: usize = 4096;
const HS_BLOCKS: usize = 64;

/// ω(x) = ∫₀¹ r^{2x+1} ω at Gauss nodes of dyadic x-blocks from `start`.
struct MomentTail {
    nodes: Vec<(f64, f64, f64)>,
}

impl MomentTail {
    fn new(w: &RadialWeight, start: f64) -> Self {
        let mut nodes = Vec::with_capacity(HS_BLOCKS * quad::ORDER);
        let mut lo = start;
        for _ in 0..HS_BLOCKS {
            for (x, wx) in quad::gauss_points(lo, 2.0 * lo) {
                nodes.push((x, wx, w.moment(2.0 * x + 1.0)));
            }
            lo *= 2.0;
        }
        MomentTail { nodes }
    }

    /// ∫ h(x, ω(x)) dx over the blocks, plus a geometric remainder and the
    /// ratio of the last two block contributions.
    fn integrate(&self, h: impl Fn(f64, f64) -> f64) -> (f64, f64) {
        let mut blocks = Vec::with_capacity(HS_BLOCKS);
        for chunk in self.nodes.chunks(quad::ORDER) {
            blocks.push(chunk.iter().map(|&(x, wx, om)| wx * h(x, om)).sum::<f64>());
        }
        let n = blocks.len();
        let q = blocks[n - 1] / blocks[n - 2];
        let mut s: f64 = blocks.iter().sum();
        if q.is_finite() && (0.0..1.0).contains(&q) {
            s += blocks[n - 1] * q / (1.0 - q);
        }
        (s, q)
    }
}

/// Partial sums S_K = Σ_{n ≤ K} ‖H_g(e_n)‖²_{A²_ω}, e_n = z^n/(2ω_n)^{1/2},
/// returned for K = 0..=k_max.
pub fn hilbert_schmidt_partial(sym: &SymbolCoeffs, w: &RadialWeight, k_max: usize) -> Result<Vec<f64>> {
    let m2 = weights::muckenhoupt(w, 2.0, &weights::muckenhoupt_grid())?;
    if m2.verdict == Verdict::Divergent {
        return Err(Error::WellDefined("the weight fails the M_2 condition".into()));
    }
    if sym.is_zero() {
        return Ok(vec![0.0; k_max + 1]);
    }
    let head = match sym.tail {
        Some(_) => sym.finite.len() + HS_HEAD,
        None => sym.finite.len(),
    };
    let beta2: Vec<f64> = (0..head)
        .map(|k| sym.finite.get(k).copied().unwrap_or_else(|| sym.tail.unwrap_or(0.0)).powi(2))
        .collect();
    let om: Vec<f64> = (0..head.max(k_max + 1)).map(|k| w.moment_radial(k)).collect();
    let tail = sym.tail.map(|t| (t * t, MomentTail::new(w, head as f64 - 0.5)));
    let mut sums = Vec::with_capacity(k_max + 1);
    let mut acc = 0.0;
    for n in 0..=k_max {
        let mut inner: f64 = (0..head).map(|k| beta2[k] * om[k] / ((n + k + 1) as f64).powi(2)).sum();
        if let Some((b2, mt)) = &tail {
            let (t, _) = mt.integrate(|x, o| o / (n as f64 + x + 1.0).powi(2));
            inner += b2 * t;
        }
        acc += inner / om[n];
        if !acc.is_finite() {
            return Err(Error::Quadrature(format!("Hilbert–Schmidt sum overflowed at n = {n}")));
        }
        sums.push(acc);
    }
    Ok(sums)
}

/// [Σ_n 1/((n+k+1)² ω_n)] / [1/((k+1) ω_k)] for each k in `ks`.
pub fn suma_ratio(w: &RadialWeight, ks: &[usize]) -> Result<Vec<NormValue>> {
    let om: Vec<f64> = (0..HS_HEAD).map(|n| w.moment_radial(n)).collect();
    let mt = MomentTail::new(w, HS_HEAD as f64 - 0.5);
    Ok(ks
        .iter()
        .map(|&k| {
            let kf = k as f64;
            let head: f64 = om.iter().enumerate().map(|(n, o)| 1.0 / (((n + k + 1) as f64).powi(2) * o)).sum();
            let (tail, q) = mt.integrate(|x, o| 1.0 / ((x + kf + 1.0).powi(2) * o));
            let rhs = 1.0 / ((kf + 1.0) * w.moment_radial(k));
            if !(q < 0.98) {
                NormValue::divergent(q, "block sums of Σ_n 1/((n+k+1)² ω_n) do not decay")
            } else {
                NormValue::finite((head + tail) / rhs, Method::Truncation, Diagnostics { last_increment: q, ..Diagnostics::default() })
            }
        })
        .collect())
}

/// S_∞ from three partial sums at K, 2K, 4K by geometric extrapolation of
/// the increments; `None` when the increments do not shrink.
pub fn extrapolate_limit(s_k: f64, s_2k: f64, s_4k: f64) -> Option<f64> {
    let d1 = s_2k - s_k;
    let d2 = s_4k - s_2k;
    if d1 == 0.0 {
        return Some(s_4k);
    }
    let q = d2 / d1;
    if !(0.0..0.98).contains(&q) {
        return None;
    }
    Some(s_4k + d2 * q / (1.0 - q))
}
