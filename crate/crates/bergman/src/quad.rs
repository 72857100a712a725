//! Gauss–Legendre panels and dyadic quadrature for integrands that are
//! singular at the boundary point r = 1.
//!
//! Radial integrals are written in the co-radius s = 1 − r so that points
//! close to the boundary keep full relative precision.

use std::sync::OnceLock;

/// Number of Gauss–Legendre nodes per panel.
pub const ORDER: usize = 20;

const MAX_LEVELS: usize = 1100;
const MAX_DEPTH: u32 = 10;
const PANEL_TOL: f64 = 1e-13;

/// Default relative tolerance on the neglected boundary tail.
pub const TAIL_TOL: f64 = 1e-12;

struct Rule {
    x: [f64; ORDER],
    w: [f64; ORDER],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = legendre_nodes(ORDER);
        let mut rx = [0.0; ORDER];
        let mut rw = [0.0; ORDER];
        rx.copy_from_slice(&x);
        rw.copy_from_slice(&w);
        Rule { x: rx, w: rw }
    })
}

/// Gauss–Legendre nodes and weights on [−1, 1], ascending.
pub fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Single fixed-order panel on [a, b].
pub fn gauss<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let r = rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..ORDER {
        s += r.w[i] * f(c + h * r.x[i]);
    }
    s * h
}

fn refine<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gauss(f, a, m);
    let right = gauss(f, m, b);
    let both = left + right;
    if depth >= MAX_DEPTH || (both - whole).abs() <= tol * both.abs() + f64::MIN_POSITIVE {
        return both;
    }
    refine(f, a, m, left, tol, depth + 1) + refine(f, m, b, right, tol, depth + 1)
}

/// Adaptive bisection of Gauss panels on [a, b] to relative tolerance `tol`.
pub fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let whole = gauss(f, a, b);
    refine(f, a, b, whole, tol, 0)
}

/// Outcome of a quadrature toward a singular endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    /// Dyadic levels visited.
    pub levels: usize,
    /// Ratio of the last two level contributions.
    pub tail_ratio: f64,
    pub converged: bool,
}

struct TailTracker {
    sum: f64,
    prev: f64,
    levels: usize,
    zero_run: usize,
}

enum Step {
    Continue,
    Done(Quad),
}

impl TailTracker {
    fn new() -> Self {
        TailTracker { sum: 0.0, prev: f64::NAN, levels: 0, zero_run: 0 }
    }

    fn push(&mut self, c: f64, tol: f64) -> Step {
        self.sum += c;
        self.levels += 1;
        let q = c / self.prev;
        self.prev = c;
        if !self.sum.is_finite() {
            return Step::Done(Quad { value: self.sum, levels: self.levels, tail_ratio: q, converged: false });
        }
        if c == 0.0 {
            self.zero_run += 1;
            if (self.zero_run >= 3 && self.sum != 0.0) || self.zero_run >= 80 {
                return Step::Done(Quad { value: self.sum, levels: self.levels, tail_ratio: 0.0, converged: true });
            }
            return Step::Continue;
        }
        self.zero_run = 0;
        if self.levels >= 4 && q.is_finite() && (0.0..1.0).contains(&q) {
            let tail = c * q / (1.0 - q);
            if tail.abs() <= tol * self.sum.abs() {
                return Step::Done(Quad {
                    value: self.sum + tail,
                    levels: self.levels,
                    tail_ratio: q,
                    converged: true,
                });
            }
        }
        Step::Continue
    }

    fn exhausted(&self) -> Quad {
        Quad { value: self.sum, levels: self.levels, tail_ratio: self.prev, converged: false }
    }
}

/// ∫₀^{s0} f(σ) dσ over panels [s0 2^{−j−1}, s0 2^{−j}], j = 0, 1, ...
///
/// Stops once the geometric extrapolation of the remaining levels falls
/// below `tol` relative to the running sum; the extrapolated tail is added.
pub fn toward_zero<F: FnMut(f64) -> f64>(mut f: F, s0: f64, tol: f64) -> Quad {
    let mut t = TailTracker::new();
    let mut hi = s0;
    for _ in 0..MAX_LEVELS {
        let lo = 0.5 * hi;
        if lo < 1e-300 {
            break;
        }
        let c = adaptive(&mut f, lo, hi, PANEL_TOL);
        if let Step::Done(q) = t.push(c, tol) {
            return q;
        }
        hi = lo;
    }
    t.exhausted()
}

/// ∫_a^∞ f(x) dx over blocks [a 2^j, a 2^{j+1}], with the same geometric
/// tail extrapolation as [`toward_zero`].
pub fn toward_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, tol: f64) -> Quad {
    let mut t = TailTracker::new();
    let mut lo = a;
    for _ in 0..MAX_LEVELS {
        let hi = 2.0 * lo;
        if hi > 1e300 {
            break;
        }
        let c = adaptive(&mut f, lo, hi, PANEL_TOL);
        if let Step::Done(q) = t.push(c, tol) {
            return q;
        }
        lo = hi;
    }
    t.exhausted()
}

/// Gauss–Legendre nodes and weights mapped to [a, b].
pub fn gauss_points(a: f64, b: f64) -> Vec<(f64, f64)> {
    let r = rule();
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    (0..ORDER).map(|i| (m + h * r.x[i], h * r.w[i])).collect()
}

/// ∫_{lo}^{hi} f(σ) dσ with panels growing geometrically from `lo`.
pub fn dyadic_between<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut a = lo;
    while a < hi {
        let b = (2.0 * a).min(hi);
        let b = if b > hi * (1.0 - 1e-15) { hi } else { b };
        sum += adaptive(&mut f, a, b, PANEL_TOL);
        a = b;
    }
    sum
}

/// Product-integration rule ∫₀¹ F(r) K(r) dr ≈ Σ wᵢ F(rᵢ) for expensive,
/// smooth F and a cheap, possibly boundary-singular kernel K.
///
/// F is interpolated on each dyadic panel in s = 1 − r; the moments of the
/// Lagrange basis against K are integrated adaptively. The innermost panel
/// [0, s*] uses Chebyshev nodes and reaches into the singularity of K.
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub converged: bool,
}

const CHEB: usize = 24;

/// Radii at which a degree-`degree` profile must be sampled.
pub fn radial_nodes(degree: usize) -> Vec<f64> {
    let (levels, s_star) = split(degree);
    let r = rule();
    let mut s_nodes = Vec::with_capacity(levels * ORDER + CHEB);
    let mut hi = 1.0;
    for _ in 0..levels {
        let lo = 0.5 * hi;
        for i in 0..ORDER {
            s_nodes.push(0.5 * (lo + hi) + 0.5 * (hi - lo) * r.x[i]);
        }
        hi = lo;
    }
    for c in cheb_nodes(s_star) {
        s_nodes.push(c);
    }
    s_nodes.into_iter().map(|s| 1.0 - s).collect()
}

fn split(degree: usize) -> (usize, f64) {
    let target = 8.0 * (degree as f64 + 1.0);
    let levels = (target.log2().ceil() as usize).max(3);
    (levels, 0.5f64.powi(levels as i32))
}

fn cheb_nodes(s_star: f64) -> Vec<f64> {
    (0..CHEB)
        .map(|i| {
            let t = ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * CHEB) as f64).cos();
            0.5 * s_star * (1.0 + t)
        })
        .collect()
}

fn bary_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![1.0; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w[i] /= x[i] - x[j];
            }
        }
    }
    let scale = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    w.iter_mut().for_each(|v| *v /= scale);
    w
}

fn lagrange_into(x: &[f64], bw: &[f64], t: f64, out: &mut [f64]) {
    for (i, &xi) in x.iter().enumerate() {
        if t == xi {
            out.iter_mut().for_each(|o| *o = 0.0);
            out[i] = 1.0;
            return;
        }
    }
    let mut den = 0.0;
    for i in 0..x.len() {
        let v = bw[i] / (t - x[i]);
        out[i] = v;
        den += v;
    }
    out.iter_mut().for_each(|o| *o /= den);
}

fn gauss_vec<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, buf: &mut [f64], acc: &mut [f64]) {
    let r = rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    acc.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..ORDER {
        f(c + h * r.x[i], buf);
        for (a, &b) in acc.iter_mut().zip(buf.iter()) {
            *a += r.w[i] * b * h;
        }
    }
}

fn adaptive_vec<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, whole: &[f64], depth: u32, out: &mut [f64]) {
    let n = whole.len();
    let m = 0.5 * (a + b);
    let mut buf = vec![0.0; n];
    let mut left = vec![0.0; n];
    let mut right = vec![0.0; n];
    gauss_vec(f, a, m, &mut buf, &mut left);
    gauss_vec(f, m, b, &mut buf, &mut right);
    let mut diff = 0.0;
    let mut size = 0.0;
    for i in 0..n {
        diff += (left[i] + right[i] - whole[i]).abs();
        size += (left[i] + right[i]).abs();
    }
    if depth >= MAX_DEPTH || diff <= PANEL_TOL * size + f64::MIN_POSITIVE {
        for i in 0..n {
            out[i] += left[i] + right[i];
        }
        return;
    }
    adaptive_vec(f, a, m, &left, depth + 1, out);
    adaptive_vec(f, m, b, &right, depth + 1, out);
}

fn panel_vec<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut buf = vec![0.0; n];
    let mut whole = vec![0.0; n];
    gauss_vec(f, a, b, &mut buf, &mut whole);
    let mut out = vec![0.0; n];
    adaptive_vec(f, a, b, &whole, 0, &mut out);
    out
}

impl RadialRule {
    /// Builds the rule for profiles of polynomials up to `degree` against
    /// the kernel `k(s)`, evaluated at co-radius s = 1 − r.
    pub fn new<K: Fn(f64) -> f64>(degree: usize, k: K) -> Self {
        Self::build(degree, &k, None)
    }

    /// As [`RadialRule::new`], for kernels whose mass near the boundary
    /// decays too slowly for geometric extrapolation; `tail(σ)` must
    /// approximate ∫₀^σ k.
    pub fn with_tail<K: Fn(f64) -> f64, T: Fn(f64) -> f64>(degree: usize, k: K, tail: T) -> Self {
        Self::build(degree, &k, Some(&tail))
    }

    fn build(degree: usize, k: &dyn Fn(f64) -> f64, tail: Option<&dyn Fn(f64) -> f64>) -> Self {
        let (levels, s_star) = split(degree);
        let r = rule();
        let mut weights = Vec::with_capacity(levels * ORDER + CHEB);
        let mut hi = 1.0;
        for _ in 0..levels {
            let lo = 0.5 * hi;
            let xs: Vec<f64> = (0..ORDER).map(|i| 0.5 * (lo + hi) + 0.5 * (hi - lo) * r.x[i]).collect();
            let bw = bary_weights(&xs);
            let mut f = |t: f64, out: &mut [f64]| {
                lagrange_into(&xs, &bw, t, out);
                let kv = k(t);
                out.iter_mut().for_each(|o| *o *= kv);
            };
            weights.extend(panel_vec(&mut f, lo, hi, ORDER));
            hi = lo;
        }
        let xs = cheb_nodes(s_star);
        let bw = bary_weights(&xs);
        let mut inner = vec![0.0; CHEB];
        let mut mass = TailTracker::new();
        let mut converged = false;
        let mut top = s_star;
        let mut at_zero = vec![0.0; CHEB];
        lagrange_into(&xs, &bw, 0.0, &mut at_zero);
        let floor = s_star * 0.5f64.powi(46);
        for _ in 0..MAX_LEVELS {
            let lo = 0.5 * top;
            if lo < 1e-300 {
                break;
            }
            let mut f = |t: f64, out: &mut [f64]| {
                lagrange_into(&xs, &bw, t, out);
                let kv = k(t);
                out.iter_mut().for_each(|o| *o *= kv);
            };
            let part = panel_vec(&mut f, lo, top, CHEB);
            for i in 0..CHEB {
                inner[i] += part[i];
            }
            if let Some(tail) = tail {
                if lo <= floor {
                    let rest = tail(lo);
                    for i in 0..CHEB {
                        inner[i] += rest * at_zero[i];
                    }
                    converged = rest.is_finite();
                    break;
                }
            } else {
                let c = adaptive(&mut |t| k(t), lo, top, PANEL_TOL);
                if let Step::Done(q) = mass.push(c, TAIL_TOL) {
                    converged = q.converged;
                    let rest = q.value - mass.sum;
                    for i in 0..CHEB {
                        inner[i] += rest * at_zero[i];
                    }
                    break;
                }
            }
            top = lo;
        }
        weights.extend(inner);
        let nodes = radial_nodes(degree);
        RadialRule { nodes, weights, converged }
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = legendre_nodes(ORDER);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((m - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_power_singularity() {
        let q = toward_zero(|s| s.powf(-0.5), 1.0, 1e-12);
        assert!(q.converged);
        assert!((q.value - 2.0).abs() < 1e-10, "{}", q.value);
        let q = toward_zero(|s| s.powf(-0.9), 1.0, 1e-12);
        assert!((q.value - 10.0).abs() < 1e-8, "{}", q.value);
    }

    #[test]
    fn boundary_divergence_not_converged() {
        let q = toward_zero(|s| 1.0 / s, 1.0, 1e-12);
        assert!(!q.converged);
    }

    #[test]
    fn radial_rule_with_logarithmic_kernel() {
        // k(s) = 1/(s L²), L = 1 + log(1/s); ∫₀^σ k = 1/L(σ).
        let l = |s: f64| 1.0 + (1.0 / s).ln();
        let rule = RadialRule::with_tail(16, |s| 1.0 / (s * l(s) * l(s)), |s| 1.0 / l(s));
        let ones = vec![1.0; rule.nodes.len()];
        assert!((rule.integrate(&ones) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn radial_rule_against_singular_kernel() {
        let rule = RadialRule::new(64, |s| s.powf(-0.5));
        let vals: Vec<f64> = rule.nodes.iter().map(|r| r.powi(64)).collect();
        // ∫₀¹ r^64 (1−r)^{−1/2} dr = B(65, 1/2)
        let beta = {
            let mut v = 2.0;
            for k in 1..=64 {
                v *= k as f64 / (k as f64 + 0.5);
            }
            v
        };
        let got = rule.integrate(&vals);
        assert!((got - beta).abs() < 1e-11 * beta, "{got} {beta}");
    }
}
