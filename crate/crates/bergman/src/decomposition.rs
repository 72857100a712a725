//! Block decompositions adapted to a normalized weight: radii r_n with
//! ŵ(r_n) = 2^{−nα}, marks M_n = ⌊1/(1 − r_n)⌋ and index blocks
//! I(n) = [M_n, M_{n+1}), with I(0) = [0, M_1).

use serde::{Deserialize, Serialize};

use crate::analytic::{hardy_norm_poly, partial_sum, AnalyticFunction};
use crate::error::{Error, Result};
use crate::quad::RadialRule;
use crate::value::{Diagnostics, Method, NormValue};
use crate::weights::RadialWeight;

/// Largest admissible mark.
pub const MARK_CAP: u64 = 1 << 31;

const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct BlockPartition {
    /// The normalized weight the partition is built on.
    pub weight: RadialWeight,
    /// Factor that normalized the input weight.
    pub factor: f64,
    pub alpha: f64,
    /// Co-radii s_n = 1 − r_n, s_0 = 1.
    pub coradii: Vec<f64>,
    pub marks: Vec<u64>,
    /// Marks whose 1/(1 − r_n) fell within the tie tolerance of an integer.
    pub near_ties: Vec<usize>,
    /// Degree the partition was asked to cover.
    pub max_degree: usize,
    /// Whether the mark cap stopped construction before `max_degree`.
    pub capped: bool,
}

/// One row of a partition listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub n: usize,
    pub r_n: f64,
    pub m_n: u64,
    pub lo: u64,
    pub hi: u64,
}

fn solve_coradius(w: &RadialWeight, target: f64, upper: f64) -> Result<f64> {
    if (w.tail_s(upper) - target).abs() <= 1e-15 * target {
        return Ok(upper);
    }
    let mut hi = upper;
    let mut lo = upper * 0.5;
    while w.tail_s(lo) > target {
        hi = lo;
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Bracket(format!("no radius with tail {target:e} above 1 − 1e−300")));
        }
    }
    // Bisection in log s; near r = 1 the radius alone does not pin the tail.
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        let t = w.tail_s(mid);
        if t > target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    let s = (lo * hi).sqrt();
    let t = w.tail_s(s);
    if (t - target).abs() > 1e-10 * target && (hi - lo) > 1e-12 {
        return Err(Error::Bracket(format!("tail {t:e} misses target {target:e}")));
    }
    Ok(s)
}

/// Radii r_n = 1 − s_n, n = 0..count, solving ŵ(r_n) = 2^{−nα} for the
/// normalized weight.
pub fn radii(w: &RadialWeight, alpha: f64, count: usize) -> Result<Vec<f64>> {
    Ok(coradii(w, alpha, count)?.into_iter().map(|s| 1.0 - s).collect())
}

/// As [`radii`], returned as co-radii s_n = 1 − r_n.
pub fn coradii(w: &RadialWeight, alpha: f64, count: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::param("alpha", alpha, "needs alpha > 0"));
    }
    let (w, _) = w.normalized();
    let mut out = vec![1.0];
    for n in 1..=count {
        let target = 2f64.powf(-(n as f64) * alpha);
        let s = solve_coradius(&w, target, *out.last().unwrap())?;
        out.push(s);
    }
    Ok(out)
}

/// ⌊x⌋, snapping to the nearest integer when x lies within the tie tolerance.
fn mark(x: f64) -> (u64, bool) {
    let k = x.round();
    let tol = TIE_TOL.max(4.0 * f64::EPSILON * x);
    if (x - k).abs() <= tol {
        (k as u64, true)
    } else {
        (x.floor() as u64, false)
    }
}

/// The partition covering degrees 0..=max_degree, or as far as M_n ≤ 2^31.
pub fn partition(w: &RadialWeight, alpha: f64, max_degree: usize) -> Result<BlockPartition> {
    if !(alpha > 0.0) {
        return Err(Error::param("alpha", alpha, "needs alpha > 0"));
    }
    let (nw, factor) = w.normalized();
    let mut coradii = vec![1.0];
    let mut marks = vec![1u64];
    let mut near_ties = Vec::new();
    let mut capped = false;
    let mut n = 0usize;
    loop {
        if *marks.last().unwrap() > max_degree as u64 && marks.len() >= 2 {
            break;
        }
        n += 1;
        let target = 2f64.powf(-(n as f64) * alpha);
        let s = solve_coradius(&nw, target, *coradii.last().unwrap())?;
        let x = 1.0 / s;
        if x > MARK_CAP as f64 + 1.0 {
            capped = true;
            break;
        }
        let (m, tie) = mark(x);
        if m > MARK_CAP {
            capped = true;
            break;
        }
        if tie {
            near_ties.push(n);
        }
        coradii.push(s);
        marks.push(m);
    }
    Ok(BlockPartition { weight: nw, factor, alpha, coradii, marks, near_ties, max_degree, capped })
}

impl BlockPartition {
    /// Number of blocks I(0)..I(K−1).
    pub fn block_count(&self) -> usize {
        self.marks.len() - 1
    }

    /// Half-open index range of I(n).
    pub fn block_range(&self, n: usize) -> (u64, u64) {
        let lo = if n == 0 { 0 } else { self.marks[n] };
        (lo, self.marks[n + 1])
    }

    /// One past the largest index covered by the blocks.
    pub fn covered(&self) -> u64 {
        *self.marks.last().unwrap()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.coradii.iter().map(|s| 1.0 - s).collect()
    }

    pub fn rows(&self) -> Vec<BlockRow> {
        (0..self.block_count())
            .map(|n| {
                let (lo, hi) = self.block_range(n);
                BlockRow { n, r_n: 1.0 - self.coradii[n], m_n: self.marks[n], lo, hi }
            })
            .collect()
    }

    /// Block index containing coefficient index k.
    pub fn block_of(&self, k: u64) -> Option<usize> {
        if k >= self.covered() {
            return None;
        }
        let i = self.marks[1..].partition_point(|&m| m <= k);
        Some(i)
    }

    fn require_cover(&self, f: &AnalyticFunction) -> Result<()> {
        if (f.degree() as u64) >= self.covered() && !f.is_zero() {
            return Err(Error::Invalid(format!(
                "partition covers indices below {} but the function has degree {}",
                self.covered(),
                f.degree()
            )));
        }
        Ok(())
    }

    /// Checks the structural invariants; returns a description of the first failure.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.coradii[0] != 1.0 || self.marks[0] != 1 {
            return Err("r_0 must be 0 and M_0 = 1".into());
        }
        for n in 1..self.coradii.len() {
            if self.coradii[n] >= self.coradii[n - 1] {
                return Err(format!("r_{n} does not increase"));
            }
            let t = self.weight.tail_s(self.coradii[n]);
            let target = 2f64.powf(-(n as f64) * self.alpha);
            if (t - target).abs() > 1e-10 * target {
                return Err(format!("tail at r_{n} is {t:e}, expected {target:e}"));
            }
            let (m, _) = mark(1.0 / self.coradii[n]);
            if m != self.marks[n] {
                return Err(format!("M_{n} = {} but ⌊1/(1−r_n)⌋ = {m}", self.marks[n]));
            }
            if self.marks[n] < self.marks[n - 1] {
                return Err(format!("M_{n} decreases"));
            }
        }
        Ok(())
    }
}

/// Δ_n f = Σ_{k∈I(n)} a_k z^k.
pub fn block(f: &AnalyticFunction, part: &BlockPartition, n: usize) -> AnalyticFunction {
    let (lo, hi) = part.block_range(n);
    let lo = lo.min(usize::MAX as u64) as usize;
    let hi = hi.min(f.coeffs.len() as u64) as usize;
    if lo >= hi {
        return AnalyticFunction::zero();
    }
    partial_sum(f, lo, hi)
}

/// ‖Δ_n f‖_{H^p} for every block, exactly on the unit circle.
pub fn block_norms(f: &AnalyticFunction, p: f64, part: &BlockPartition) -> Vec<f64> {
    (0..part.block_count()).map(|n| hardy_norm_poly(&block(f, part, n), p)).collect()
}

/// (Σ_n 2^{−nα} ‖Δ_n f‖_{H^p}^q)^{1/q}.
pub fn decomposition_norm(f: &AnalyticFunction, p: f64, q: f64, part: &BlockPartition) -> Result<NormValue> {
    if !(p > 1.0) || !(q > 0.0) {
        return Err(Error::Invalid(format!("decomposition norm needs p > 1 and q > 0 (p={p}, q={q})")));
    }
    part.require_cover(f)?;
    let norms = block_norms(f, p, part);
    let s: f64 = norms
        .iter()
        .enumerate()
        .map(|(n, b)| 2f64.powf(-(n as f64) * part.alpha) * b.powf(q))
        .sum();
    Ok(NormValue::finite(
        s.powf(1.0 / q),
        Method::Truncation,
        Diagnostics { grid: norms.len(), degree: f.degree(), ..Diagnostics::default() },
    ))
}

/// sup_n 2^{−nαβ} ‖Δ_n f‖_{H^p}.
pub fn decomposition_norm_sup(f: &AnalyticFunction, p: f64, beta: f64, part: &BlockPartition) -> Result<NormValue> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", beta, "needs beta > 0"));
    }
    part.require_cover(f)?;
    let norms = block_norms(f, p, part);
    let s = norms
        .iter()
        .enumerate()
        .map(|(n, b)| 2f64.powf(-(n as f64) * part.alpha * beta) * b)
        .fold(0.0, f64::max);
    Ok(NormValue::finite(
        s,
        Method::Truncation,
        Diagnostics { grid: norms.len(), degree: f.degree(), ..Diagnostics::default() },
    ))
}

/// Σ_n 2^{−n} ‖Δ_n g‖_{H^q}^p / M_n^γ for an α = 1 partition.
pub fn decomposition_norm_gamma(
    g: &AnalyticFunction,
    q: f64,
    p: f64,
    gamma: f64,
    part: &BlockPartition,
) -> Result<NormValue> {
    if part.alpha != 1.0 {
        return Err(Error::param("alpha", part.alpha, "this sum needs an alpha = 1 partition"));
    }
    part.require_cover(g)?;
    let norms = block_norms(g, q, part);
    let s: f64 = norms
        .iter()
        .enumerate()
        .map(|(n, b)| 2f64.powi(-(n as i32)) * b.powf(p) / (part.marks[n] as f64).powf(gamma))
        .sum();
    Ok(NormValue::finite(
        s,
        Method::Truncation,
        Diagnostics { grid: norms.len(), degree: g.degree(), ..Diagnostics::default() },
    ))
}

/// sup_n 2^{nη} ‖Δ_n g′‖_{H^q} / M_n^{1−1/p} and the per-block profile.
pub fn block_criterion_lambda(
    g: &AnalyticFunction,
    q: f64,
    p: f64,
    eta: f64,
    part: &BlockPartition,
) -> Result<(f64, Vec<f64>)> {
    if part.alpha != 1.0 {
        return Err(Error::param("alpha", part.alpha, "this criterion needs an alpha = 1 partition"));
    }
    if !(eta >= 0.0 && eta < 1.0 / p) {
        return Err(Error::param("eta", eta, "needs 0 ≤ eta < 1/p"));
    }
    let d = g.differentiate();
    part.require_cover(&d)?;
    let prof: Vec<f64> = block_norms(&d, q, part)
        .iter()
        .enumerate()
        .map(|(n, b)| 2f64.powf(n as f64 * eta) * b / (part.marks[n] as f64).powf(1.0 - 1.0 / p))
        .collect();
    let sup = prof.iter().cloned().fold(0.0, f64::max);
    Ok((sup, prof))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LacunaryCheck {
    pub lacunary: bool,
    /// First k with ŵ(1−1/n_k)/ŵ(1−1/n_{k+1}) < λ.
    pub first_violation: Option<usize>,
    pub min_ratio: f64,
}

/// Checks ŵ(1 − 1/n_k)/ŵ(1 − 1/n_{k+1}) ≥ λ for all consecutive exponents.
pub fn is_omega_lacunary(exponents: &[u64], w: &RadialWeight, lambda: f64) -> Result<LacunaryCheck> {
    if exponents.windows(2).any(|p| p[1] <= p[0]) || exponents.first() == Some(&0) {
        return Err(Error::Invalid("exponents must be positive and strictly increasing".into()));
    }
    let mut first = None;
    let mut min_ratio = f64::INFINITY;
    for (k, pair) in exponents.windows(2).enumerate() {
        let ratio = w.tail_s(1.0 / pair[0] as f64) / w.tail_s(1.0 / pair[1] as f64);
        min_ratio = min_ratio.min(ratio);
        if ratio < lambda && first.is_none() {
            first = Some(k);
        }
    }
    Ok(LacunaryCheck { lacunary: first.is_none(), first_violation: first, min_ratio })
}

/// Σ_k |a_k|^q ω_{n_k} with ω_n = ∫₀¹ r^{2n+1} ω.
pub fn lacunary_norm(coeffs: &[f64], exponents: &[u64], q: f64, w: &RadialWeight) -> Result<NormValue> {
    if coeffs.len() != exponents.len() {
        return Err(Error::Invalid("coefficient and exponent lists differ in length".into()));
    }
    let s: f64 = coeffs
        .iter()
        .zip(exponents)
        .map(|(a, &n)| a.abs().powf(q) * w.moment_radial(n as usize))
        .sum();
    Ok(NormValue::finite(s, Method::Truncation, Diagnostics { grid: coeffs.len(), ..Diagnostics::default() }))
}

/// The block sums of a lacunary series:
/// Σ 2^{−nα}(Σ_{I(n)}|a_k|²)^{q/2}, Σ 2^{−nα} Σ_{I(n)}|a_k|^q, Σ 2^{−nα}(Σ_{I(n)}|a_k|)^q.
pub fn lacunary_block_sums(coeffs: &[f64], exponents: &[u64], q: f64, part: &BlockPartition) -> Result<[f64; 3]> {
    let k = part.block_count();
    let (mut l2, mut lq, mut l1) = (vec![0.0; k], vec![0.0; k], vec![0.0; k]);
    for (a, &e) in coeffs.iter().zip(exponents) {
        let n = part
            .block_of(e)
            .ok_or_else(|| Error::Invalid(format!("exponent {e} lies beyond the partition")))?;
        l2[n] += a * a;
        lq[n] += a.abs().powf(q);
        l1[n] += a.abs();
    }
    let mut out = [0.0; 3];
    for n in 0..k {
        let wt = 2f64.powf(-(n as f64) * part.alpha);
        out[0] += wt * l2[n].powf(q / 2.0);
        out[1] += wt * lq[n];
        out[2] += wt * l1[n].powf(q);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupTest {
    /// sup_k |a_k| (∫₀¹ r^{n_k} ω)^β.
    pub margin: f64,
    /// |a_k| (∫₀¹ r^{n_k} ω)^β for each k.
    pub margins: Vec<f64>,
    /// Margins stay bounded: the second half never exceeds twice the first.
    pub member: bool,
}

/// Coefficient test |a_k| ≲ (∫₀¹ r^{n_k} ω)^{−β} for lacunary series in
/// H(p, ∞, ŵ^β).
pub fn lacunary_sup_test(coeffs: &[f64], exponents: &[u64], w: &RadialWeight, beta: f64) -> Result<SupTest> {
    if coeffs.len() != exponents.len() || coeffs.is_empty() {
        return Err(Error::Invalid("need matching, nonempty coefficient and exponent lists".into()));
    }
    let margins: Vec<f64> = coeffs
        .iter()
        .zip(exponents)
        .map(|(a, &n)| a.abs() * w.moment(n as f64).powf(beta))
        .collect();
    let margin = margins.iter().cloned().fold(0.0, f64::max);
    let h = margins.len().div_ceil(2);
    let first = margins[..h].iter().cloned().fold(0.0, f64::max);
    let second = margins[h..].iter().cloned().fold(0.0, f64::max);
    let member = margin.is_finite() && (second <= 2.0 * first || margin == 0.0);
    Ok(SupTest { margin, margins, member })
}

/// η_γ(r) = Σ_n 2^{nγ} r^{M_n}, with a flag telling whether the terms died
/// out before the partition ran out of marks.
pub fn eta_gamma_series(part: &BlockPartition, gamma: f64, r: f64) -> Result<(f64, bool)> {
    if !(gamma > 0.0) || !(0.0..1.0).contains(&r) {
        return Err(Error::Invalid(format!("need γ > 0 and 0 ≤ r < 1 (γ={gamma}, r={r})")));
    }
    if r == 0.0 {
        return Ok((0.0, true));
    }
    let lr = (-(1.0 - r)).ln_1p();
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for (n, &m) in part.marks.iter().enumerate() {
        let term = (n as f64 * gamma * std::f64::consts::LN_2 + m as f64 * lr).exp();
        sum += term;
        if term < 1e-16 * sum && term <= prev {
            return Ok((sum, true));
        }
        prev = term;
    }
    Ok((sum, false))
}

/// Both sides of the positive-series equivalence for f(r) = Σ t_n r^{M_n}:
/// the block sum Σ 2^{−nα} t_n^p and ∫₀¹ f(r)^p ω(r) dr.
pub fn positive_series_norm(t: &[f64], p: f64, alpha: f64, w: &RadialWeight) -> Result<(f64, f64)> {
    if t.iter().any(|&x| x < 0.0) || !(p > 0.0) {
        return Err(Error::Invalid("need nonnegative terms and p > 0".into()));
    }
    if t.iter().all(|&x| x == 0.0) {
        return Ok((0.0, 0.0));
    }
    let (nw, _) = w.normalized();
    let s = coradii(&nw, alpha, t.len().saturating_sub(1))?;
    let marks: Vec<u64> = s.iter().map(|&x| mark(1.0 / x).0).collect();
    if marks.iter().any(|&m| m > MARK_CAP) {
        return Err(Error::Invalid("series reaches marks beyond 2^31".into()));
    }
    let block: f64 = t.iter().enumerate().map(|(n, x)| 2f64.powf(-(n as f64) * alpha) * x.powf(p)).sum();
    let top = *marks.last().unwrap() as usize;
    let rule = RadialRule::with_tail(top, |x| nw.density_s(x), |x| nw.tail_s(x));
    let vals: Vec<f64> = rule
        .nodes
        .iter()
        .map(|&r| {
            let lr = (-(1.0 - r)).ln_1p();
            let f: f64 = t.iter().zip(&marks).map(|(x, &m)| x * (m as f64 * lr).exp()).sum();
            f.powf(p)
        })
        .collect();
    Ok((block, rule.integrate(&vals)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marks_snap_only_near_integers() {
        assert_eq!(mark(4.0 - 1e-12), (4, true));
        assert_eq!(mark(4.3), (4, false));
        assert_eq!(mark(2f64.sqrt()), (1, false));
    }

    #[test]
    fn block_lookup() {
        let w = RadialWeight::constant(1.0).unwrap();
        let part = partition(&w, 1.0, 100).unwrap();
        assert_eq!(part.block_of(0), Some(0));
        assert_eq!(part.block_of(1), Some(0));
        assert_eq!(part.block_of(2), Some(1));
        assert_eq!(part.block_of(5), Some(2));
        assert_eq!(part.block_of(127), Some(6));
        assert_eq!(part.block_of(128), None);
    }
}
