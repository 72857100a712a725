//! Radial weights ω on [0, 1), their tails ŵ(r) = ∫_r^1 ω, and the
//! conditions built from them.
//!
//! Every family is evaluated in the co-radius s = 1 − r. The `_s` methods
//! take s directly and keep full precision arbitrarily close to r = 1.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grammar::{fmt_float, parse_call};
use crate::quad;
use crate::value::{Diagnostics, Method, NormValue, Verdict};

/// Weight families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// ω ≡ c.
    Const { c: f64 },
    /// ω(r) = (1 − r²)^α, α > −1.
    Std { alpha: f64 },
    /// ω(r) = (1 − r)^a, a > −1.
    Pow { a: f64 },
    /// ω(r) = (1 − r)^{−1} (log(e/(1 − r)))^{−β}, β > 1.
    LogPow { beta: f64 },
    /// ω(r) = ((1−r) L₁ ⋯ L_N L_{N+1}^α)^{−1} with L₁ = log(e/(1−r)) and
    /// L_{k+1} = 1 + log L_k; α > 1.
    LogProd { n: u32, alpha: f64 },
    /// Defined by its tail ŵ(r) = 2(1−r)cos((1−r)^{−1/2}) + 16(1−r)^{1/2}.
    Osc,
    /// Log-linear interpolation of positive samples, constant beyond the ends.
    Table { r: Vec<f64>, omega: Vec<f64>, path: String },
    /// u_p(r) = (ŵ(r)(1 − r))^{−1/p} built from a base weight.
    Up { base: Box<RadialWeight>, p: f64 },
}

/// A radial weight: a family, a positive scale factor and its total mass.
#[derive(Debug, Clone)]
pub struct RadialWeight {
    family: Family,
    scale: f64,
    mass: f64,
    table_tails: Arc<Vec<f64>>,
    moments: Arc<Mutex<HashMap<usize, f64>>>,
}

impl PartialEq for RadialWeight {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.scale == other.scale
    }
}

fn log_levels(s: f64, n: u32) -> (f64, f64) {
    // Returns (L₁⋯L_n, L_{n+1}).
    let mut l = 1.0 + (1.0 / s).ln();
    let mut prod = 1.0;
    for _ in 0..n {
        prod *= l;
        l = 1.0 + l.ln();
    }
    (prod, l)
}

fn std_tail(alpha: f64, s: f64) -> f64 {
    // ∫₀^s (σ(2−σ))^α dσ = 2^α Σ_k C(α,k)(−1/2)^k s^{k+α+1}/(k+α+1)
    let mut t = 1.0;
    let mut sum = 0.0;
    let x = -0.5 * s;
    for k in 0..4000 {
        let kf = k as f64;
        let term = t / (kf + alpha + 1.0);
        sum += term;
        if kf > alpha + 1.0 && term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        t *= (alpha - kf) / (kf + 1.0) * x;
        if t == 0.0 {
            break;
        }
    }
    2f64.powf(alpha) * s.powf(alpha + 1.0) * sum
}

impl RadialWeight {
    pub fn new(family: Family) -> Result<Self> {
        validate(&family)?;
        let table_tails = Arc::new(match &family {
            Family::Table { r, omega, .. } => table_knot_tails(r, omega),
            _ => Vec::new(),
        });
        let mut w = RadialWeight { family, scale: 1.0, mass: f64::NAN, table_tails, moments: Arc::default() };
        let m = match &w.family {
            Family::Up { .. } => {
                let q = quad::toward_zero(|s| w.base_density_s(s), 1.0, quad::TAIL_TOL);
                if !q.converged {
                    return Err(Error::DivergentMass("u_p weight is not integrable".into()));
                }
                q.value
            }
            _ => w.base_tail_s(1.0),
        };
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::DivergentMass(format!("total mass {m}")));
        }
        w.mass = m;
        Ok(w)
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(Family::Const { c })
    }

    pub fn standard(alpha: f64) -> Result<Self> {
        Self::new(Family::Std { alpha })
    }

    pub fn power(a: f64) -> Result<Self> {
        Self::new(Family::Pow { a })
    }

    pub fn logpow(beta: f64) -> Result<Self> {
        Self::new(Family::LogPow { beta })
    }

    pub fn logprod(n: u32, alpha: f64) -> Result<Self> {
        Self::new(Family::LogProd { n, alpha })
    }

    pub fn osc() -> Self {
        Self::new(Family::Osc).expect("osc weight has finite mass")
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Total mass ∫₀¹ ω = ŵ(0).
    pub fn mass(&self) -> f64 {
        self.scale * self.mass
    }

    /// The weight c·ω.
    pub fn scaled(&self, c: f64) -> Self {
        RadialWeight {
            family: self.family.clone(),
            scale: self.scale * c,
            mass: self.mass,
            table_tails: self.table_tails.clone(),
            moments: Arc::default(),
        }
    }

    /// The weight divided by its mass, and the factor applied.
    pub fn normalized(&self) -> (Self, f64) {
        let f = 1.0 / self.mass();
        (self.scaled(f), f)
    }

    pub fn is_normalized(&self) -> bool {
        (self.mass() - 1.0).abs() < 1e-12
    }

    /// Whether the tail is evaluated without quadrature.
    pub fn has_closed_tail(&self) -> bool {
        !matches!(self.family, Family::Up { .. })
    }

    fn base_density_s(&self, s: f64) -> f64 {
        match &self.family {
            Family::Const { c } => *c,
            Family::Std { alpha } => (s * (2.0 - s)).powf(*alpha),
            Family::Pow { a } => s.powf(*a),
            Family::LogPow { beta } => 1.0 / (s * (1.0 + (1.0 / s).ln()).powf(*beta)),
            Family::LogProd { n, alpha } => {
                let (prod, last) = log_levels(s, *n);
                1.0 / (s * prod * last.powf(*alpha))
            }
            Family::Osc => {
                let u = s.powf(-0.5);
                2.0 * u.cos() + u * (u.sin() + 8.0)
            }
            Family::Table { r, omega, .. } => table_density(r, omega, 1.0 - s),
            Family::Up { base, p } => (base.tail_s(s) * s).powf(-1.0 / p),
        }
    }

    fn base_tail_s(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match &self.family {
            Family::Const { c } => c * s,
            Family::Std { alpha } => std_tail(*alpha, s),
            Family::Pow { a } => s.powf(a + 1.0) / (a + 1.0),
            Family::LogPow { beta } => (1.0 + (1.0 / s).ln()).powf(1.0 - beta) / (beta - 1.0),
            Family::LogProd { n, alpha } => {
                let (_, last) = log_levels(s, *n);
                last.powf(1.0 - alpha) / (alpha - 1.0)
            }
            Family::Osc => 2.0 * s * s.powf(-0.5).cos() + 16.0 * s.sqrt(),
            Family::Table { r, omega, .. } => table_tail(r, omega, &self.table_tails, 1.0 - s),
            Family::Up { .. } => quad::toward_zero(|t| self.base_density_s(t), s, quad::TAIL_TOL).value,
        }
    }

    /// ω at co-radius s = 1 − r.
    pub fn density_s(&self, s: f64) -> f64 {
        self.scale * self.base_density_s(s)
    }

    /// ŵ at co-radius s = 1 − r.
    pub fn tail_s(&self, s: f64) -> f64 {
        self.scale * self.base_tail_s(s)
    }

    pub fn density(&self, r: f64) -> f64 {
        self.density_s(1.0 - r)
    }

    pub fn tail(&self, r: f64) -> f64 {
        self.tail_s(1.0 - r)
    }

    /// ψ_ω = ŵ/ω at co-radius s.
    pub fn distortion_s(&self, s: f64) -> f64 {
        self.base_tail_s(s) / self.base_density_s(s)
    }

    pub fn distortion(&self, r: f64) -> f64 {
        self.distortion_s(1.0 - r)
    }

    /// ∫₀¹ r^x ω(r) dr for x ≥ 0.
    pub fn moment(&self, x: f64) -> f64 {
        if x == 0.0 {
            return self.mass();
        }
        match &self.family {
            Family::Const { c } => return self.scale * c / (x + 1.0),
            Family::Std { alpha } if ((x - 1.0) / 2.0).fract() == 0.0 && (1.0..2e6).contains(&x) => {
                return self.scale * std_odd_moment(*alpha, ((x - 1.0) / 2.0) as usize);
            }
            Family::Pow { a } if x.fract() == 0.0 && x < 1e6 => {
                // B(x+1, a+1) = x! / ((a+1)(a+2)⋯(a+x+1))
                let mut v = 1.0 / (a + 1.0);
                for k in 1..=(x as usize) {
                    v *= k as f64 / (a + 1.0 + k as f64);
                }
                return self.scale * v;
            }
            _ => {}
        }
        if x >= 1.0 {
            // By parts: ∫ r^x ω = x ∫ r^{x−1} ŵ.
            let q = quad::toward_zero(|s| ((x - 1.0) * (-s).ln_1p()).exp() * self.base_tail_s(s), 1.0, quad::TAIL_TOL);
            self.scale * x * q.value
        } else {
            let q = quad::toward_zero(|s| (x * (-s).ln_1p()).exp() * self.base_density_s(s), 1.0, quad::TAIL_TOL);
            self.scale * q.value
        }
    }

    /// ω_n = ∫₀¹ r^{2n+1} ω(r) dr, memoized.
    pub fn moment_radial(&self, n: usize) -> f64 {
        if let Some(v) = self.moments.lock().expect("moment cache").get(&n) {
            return *v;
        }
        let v = self.moment((2 * n + 1) as f64);
        self.moments.lock().expect("moment cache").insert(n, v);
        v
    }

    /// Canonical spec string, re-parseable by [`parse_weight`] for every
    /// family except the derived u_p weights.
    pub fn spec(&self) -> String {
        let base = match &self.family {
            Family::Const { c } => format!("const(c={}", fmt_float(*c)),
            Family::Std { alpha } => format!("std(alpha={}", fmt_float(*alpha)),
            Family::Pow { a } => format!("pow(a={}", fmt_float(*a)),
            Family::LogPow { beta } => format!("logpow(beta={}", fmt_float(*beta)),
            Family::LogProd { n, alpha } => format!("logprod(n={n},alpha={}", fmt_float(*alpha)),
            Family::Osc => "osc(".to_string(),
            Family::Table { path, .. } => format!("table(path={path}"),
            Family::Up { base, p } => format!("up(p={},of={}", fmt_float(*p), base.spec()),
        };
        let sep = if base.ends_with('(') { "" } else { "," };
        if self.scale == 1.0 {
            format!("{base})")
        } else {
            format!("{base}{sep}scale={})", fmt_float(self.scale))
        }
    }
}

fn std_odd_moment(alpha: f64, n: usize) -> f64 {
    // ∫ r^{2n+1}(1−r²)^α dr = B(n+1, α+1)/2
    let mut v = 0.5 / (alpha + 1.0);
    for k in 1..=n {
        v *= k as f64 / (k as f64 + alpha + 1.0);
    }
    v
}

fn validate(f: &Family) -> Result<()> {
    let pos = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::param(name, v, "must be positive"))
        }
    };
    match f {
        Family::Const { c } => pos("c", *c),
        Family::Std { alpha } if *alpha <= -1.0 => {
            Err(Error::DivergentMass(format!("std weight with alpha = {alpha} ≤ −1")))
        }
        Family::Pow { a } if *a <= -1.0 => Err(Error::DivergentMass(format!("pow weight with a = {a} ≤ −1"))),
        Family::LogPow { beta } if *beta <= 1.0 => Err(Error::param("beta", *beta, "logpow needs beta > 1")),
        Family::LogProd { n, alpha } => {
            if *n == 0 {
                Err(Error::param("n", 0.0, "logprod needs n ≥ 1"))
            } else if *alpha <= 1.0 {
                Err(Error::param("alpha", *alpha, "logprod needs alpha > 1"))
            } else {
                Ok(())
            }
        }
        Family::Table { r, omega, .. } => {
            if r.is_empty() || r.len() != omega.len() {
                return Err(Error::Invalid("table needs matching, nonempty columns".into()));
            }
            if r.windows(2).any(|w| w[1] <= w[0]) || r[0] < 0.0 || *r.last().unwrap() >= 1.0 {
                return Err(Error::Invalid("table radii must increase strictly within [0, 1)".into()));
            }
            if omega.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
                return Err(Error::Invalid("table densities must be positive".into()));
            }
            Ok(())
        }
        Family::Up { p, .. } if *p <= 1.0 => Err(Error::param("p", *p, "u_p needs p > 1")),
        _ => Ok(()),
    }
}

fn table_density(r: &[f64], w: &[f64], x: f64) -> f64 {
    if x <= r[0] {
        return w[0];
    }
    let n = r.len();
    if x >= r[n - 1] {
        return w[n - 1];
    }
    let i = r.partition_point(|&v| v <= x) - 1;
    let t = (x - r[i]) / (r[i + 1] - r[i]);
    (w[i].ln() * (1.0 - t) + w[i + 1].ln() * t).exp()
}

fn loglin_integral(a: f64, b: f64, wa: f64, wb: f64) -> f64 {
    let h = b - a;
    let d = (wb / wa).ln();
    if d.abs() < 1e-9 {
        h * 0.5 * (wa + wb)
    } else {
        h * (wb - wa) / d
    }
}

fn table_knot_tails(r: &[f64], w: &[f64]) -> Vec<f64> {
    let n = r.len();
    let mut t = vec![0.0; n];
    t[n - 1] = w[n - 1] * (1.0 - r[n - 1]);
    for i in (0..n - 1).rev() {
        t[i] = t[i + 1] + loglin_integral(r[i], r[i + 1], w[i], w[i + 1]);
    }
    t
}

fn table_tail(r: &[f64], w: &[f64], knots: &[f64], x: f64) -> f64 {
    let n = r.len();
    if x >= r[n - 1] {
        return w[n - 1] * (1.0 - x);
    }
    if x <= r[0] {
        return knots[0] + w[0] * (r[0] - x);
    }
    let i = r.partition_point(|&v| v <= x) - 1;
    let wx = table_density(r, w, x);
    knots[i + 1] + loglin_integral(x, r[i + 1], wx, w[i + 1])
}

/// Reads a two-column `r,omega` CSV with a header line.
pub fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Invalid("empty table".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["r", "omega"] {
        return Err(Error::Invalid(format!("table header must be `r,omega`, got `{header}`")));
    }
    let (mut rs, mut ws) = (Vec::new(), Vec::new());
    for line in lines {
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Invalid(format!("bad table row `{line}`")))?;
        rs.push(crate::grammar::parse_float(a)?);
        ws.push(crate::grammar::parse_float(b)?);
    }
    Ok((rs, ws))
}

/// Parses `family(key=value, ...)`; every family also accepts `scale=`.
pub fn parse_weight(spec: &str) -> Result<RadialWeight> {
    let call = parse_call(spec)?;
    let keys: &[&str] = match call.name.as_str() {
        "const" => &["c", "scale"],
        "std" => &["alpha", "scale"],
        "pow" => &["a", "scale"],
        "logpow" => &["beta", "scale"],
        "logprod" => &["n", "alpha", "scale"],
        "osc" => &["scale"],
        "table" => &["path", "scale"],
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    call.expect_keys(keys)?;
    let family = match call.name.as_str() {
        "const" => Family::Const { c: call.float_or("c", 1.0)? },
        "std" => Family::Std { alpha: call.required("alpha")? },
        "pow" => Family::Pow { a: call.required("a")? },
        "logpow" => Family::LogPow { beta: call.required("beta")? },
        "logprod" => {
            let n = call.float_or("n", 1.0)?;
            if n.fract() != 0.0 || !(1.0..=16.0).contains(&n) {
                return Err(Error::param("n", n, "logprod needs an integer 1 ≤ n ≤ 16"));
            }
            Family::LogProd { n: n as u32, alpha: call.required("alpha")? }
        }
        "osc" => Family::Osc,
        "table" => {
            let path = call.raw("path").ok_or_else(|| Error::Parse("table requires `path=`".into()))?;
            let (r, omega) = read_table(Path::new(path))?;
            Family::Table { r, omega, path: path.to_string() }
        }
        _ => unreachable!(),
    };
    let w = RadialWeight::new(family)?;
    let scale = call.float_or("scale", 1.0)?;
    if !(scale > 0.0) {
        return Err(Error::param("scale", scale, "must be positive"));
    }
    Ok(if scale == 1.0 { w } else { w.scaled(scale) })
}

/// ŵ(r).
pub fn tail(w: &RadialWeight, r: f64) -> f64 {
    w.tail(r)
}

/// ψ_ω(r) = ŵ(r)/ω(r).
pub fn distortion(w: &RadialWeight, r: f64) -> f64 {
    w.distortion(r)
}

/// ω_n = ∫₀¹ r^{2n+1} ω.
pub fn moment_radial(w: &RadialWeight, n: usize) -> f64 {
    w.moment_radial(n)
}

/// Co-radii 2^{−j−m/4}, j = 0..40, m = 0..3, ending at 2^{−40}; descending.
pub fn diagnostic_coradii() -> Vec<f64> {
    let mut v: Vec<f64> = (0..160).map(|i| 2f64.powf(-(i as f64) / 4.0)).collect();
    v.push(2f64.powi(-40));
    v
}

/// The radii 1 − 2^{−j−m/4} of [`diagnostic_coradii`], ascending.
pub fn diagnostic_grid() -> Vec<f64> {
    diagnostic_coradii().into_iter().map(|s| 1.0 - s).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Class {
    Regular,
    RapidlyIncreasing,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightClassification {
    pub verdict: Class,
    /// Range of ψ_ω(r)/(1 − r) over the grid.
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_first: f64,
    pub ratio_last: f64,
    /// Fitted (α̂, β̂) when the verdict is Regular.
    pub exponents: Option<(f64, f64)>,
    pub grid: Vec<f64>,
}

const REGULAR_SPREAD: f64 = 100.0;
const RAPID_GROWTH: f64 = 10.0;

/// Regular when ψ_ω(r)/(1 − r) stays in a bounded band, rapidly increasing
/// when it grows by more than a factor 10 and keeps increasing at the end.
pub fn classify(w: &RadialWeight, grid: &[f64]) -> Result<WeightClassification> {
    if grid.len() < 8 || grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Invalid("classification grid must be increasing with ≥ 8 points".into()));
    }
    let last = *grid.last().unwrap();
    if last < 1.0 - 2f64.powi(-20) {
        return Err(Error::Invalid("classification grid must reach 1 − 2^−20".into()));
    }
    let ratios: Vec<f64> = grid
        .iter()
        .map(|&r| {
            let s = 1.0 - r;
            w.distortion_s(s) / s
        })
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let first = ratios[0];
    let lastv = *ratios.last().unwrap();
    let tail_n = 12.min(ratios.len() - 1);
    let increasing = ratios[ratios.len() - tail_n - 1..].windows(2).all(|p| p[1] > p[0]);
    let verdict = if lastv > RAPID_GROWTH * first && increasing {
        Class::RapidlyIncreasing
    } else if lo > 0.0 && hi / lo <= REGULAR_SPREAD && !increasing_without_bound(&ratios) {
        Class::Regular
    } else {
        Class::Undetermined
    };
    let exponents = if verdict == Class::Regular { Some(fit_exponents(w, grid)) } else { None };
    Ok(WeightClassification {
        verdict,
        ratio_min: lo,
        ratio_max: hi,
        ratio_first: first,
        ratio_last: lastv,
        exponents,
        grid: grid.to_vec(),
    })
}

fn increasing_without_bound(ratios: &[f64]) -> bool {
    // Strict growth over the whole final third of the grid, by more than 2×.
    let k = ratios.len() * 2 / 3;
    let tail = &ratios[k..];
    tail.windows(2).all(|p| p[1] > p[0]) && *tail.last().unwrap() > 2.0 * tail[0]
}

fn fit_exponents(w: &RadialWeight, grid: &[f64]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .filter(|&&r| r >= 0.5)
        .map(|&r| {
            let s = 1.0 - r;
            (s.ln(), w.tail_s(s).ln())
        })
        .collect();
    let (mut a, mut b) = (f64::INFINITY, 0.0f64);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let slope = (pts[i].1 - pts[j].1) / (pts[i].0 - pts[j].0);
            a = a.min(slope);
            b = b.max(slope);
        }
    }
    (a, b)
}

/// (α̂, β̂) with ((1−r)/(1−t))^α̂ ŵ(t) ≤ ŵ(r) ≤ ((1−r)/(1−t))^β̂ ŵ(t) on
/// the pairs r ≤ t of the diagnostic grid with r ≥ 1/2.
pub fn regularity_exponents(w: &RadialWeight) -> Result<(f64, f64)> {
    let c = classify(w, &diagnostic_grid())?;
    match c.exponents {
        Some(e) => Ok(e),
        None => Err(Error::Fit(format!("weight is classified {:?}, not Regular", c.verdict))),
    }
}

/// Divergence thresholds on θ/(p − 1).
pub const DIVERGENT_AT: f64 = 0.98;
pub const FINITE_BELOW: f64 = 0.95;

/// Local exponent θ of ŵ(r) ≈ (1 − r)^θ over the last three dyadic levels
/// of the diagnostic grid.
pub fn boundary_exponent(f: impl Fn(f64) -> f64) -> f64 {
    let s: Vec<f64> = (38..=40).map(|j| 2f64.powi(-j)).collect();
    let v: Vec<f64> = s.iter().map(|&x| f(x)).collect();
    let t1 = (v[0] / v[1]).ln() / (s[0] / s[1]).ln();
    let t2 = (v[1] / v[2]).ln() / (s[1] / s[2]).ln();
    0.5 * (t1 + t2)
}

fn detect(w: &RadialWeight, p: f64) -> (Verdict, f64) {
    let theta = boundary_exponent(|s| w.tail_s(s));
    let ratio = theta / (p - 1.0);
    let v = if ratio >= DIVERGENT_AT {
        Verdict::Divergent
    } else if ratio <= FINITE_BELOW {
        Verdict::Finite
    } else {
        Verdict::Undetermined
    };
    (v, ratio)
}

/// Verdict on ∫₀¹ ŵ(t)^{−1/(p−1)} dt < ∞.
pub fn condition_99(w: &RadialWeight, p: f64) -> Result<Verdict> {
    if !(p > 1.0) {
        return Err(Error::param("p", p, "needs p > 1"));
    }
    let (v, _) = detect(w, p);
    if v == Verdict::Finite {
        let e = -1.0 / (p - 1.0);
        let q = quad::toward_zero(|s| w.tail_s(s).powf(e), 1.0, quad::TAIL_TOL);
        if !q.converged {
            return Ok(Verdict::Undetermined);
        }
    }
    Ok(v)
}

/// M_p(ω) = sup_r (∫_r^1 ŵ^{−1/(p−1)})^{1−1/p} (∫_0^r (1−t)^{−p} ŵ)^{1/p}
/// over `grid`.
pub fn muckenhoupt(w: &RadialWeight, p: f64, grid: &[f64]) -> Result<NormValue> {
    if !(p > 1.0) {
        return Err(Error::param("p", p, "needs p > 1"));
    }
    if grid.is_empty() || grid.windows(2).any(|q| q[1] <= q[0]) || grid[0] < 0.0 || *grid.last().unwrap() >= 1.0 {
        return Err(Error::Invalid("muckenhoupt grid must increase within [0, 1)".into()));
    }
    let (verdict, ratio) = detect(w, p);
    if verdict == Verdict::Divergent {
        return Ok(NormValue::divergent(ratio, "∫ ŵ^{−1/(p−1)} diverges at r = 1"));
    }
    let e = -1.0 / (p - 1.0);
    let h = |s: f64| w.tail_s(s).powf(e);
    let g = |s: f64| s.powf(-p) * w.tail_s(s);
    let s: Vec<f64> = grid.iter().map(|r| 1.0 - r).collect();
    let n = s.len();
    let last = quad::toward_zero(h, s[n - 1], quad::TAIL_TOL);
    let mut f1 = vec![0.0; n];
    f1[n - 1] = last.value;
    for i in (0..n - 1).rev() {
        f1[i] = f1[i + 1] + quad::adaptive(&mut |x| h(x), s[i + 1], s[i], 1e-13);
    }
    let mut f2 = vec![0.0; n];
    let mut acc = quad::dyadic_between(g, s[0], 1.0);
    f2[0] = acc;
    for i in 1..n {
        acc += quad::adaptive(&mut |x| g(x), s[i], s[i - 1], 1e-13);
        f2[i] = acc;
    }
    let mut best = 0.0f64;
    let mut at = 0;
    for i in 0..n {
        let v = f1[i].powf(1.0 - 1.0 / p) * f2[i].powf(1.0 / p);
        if v > best {
            best = v;
            at = i;
        }
    }
    let diagnostics = Diagnostics {
        grid: n,
        degree: 0,
        last_increment: last.tail_ratio,
        exponent: Some(ratio),
        note: format!("sup attained at r = {}", grid[at]),
    };
    let mut out = NormValue::finite(best, Method::Quadrature, diagnostics);
    if verdict == Verdict::Undetermined || !last.converged {
        out.verdict = Verdict::Undetermined;
    }
    Ok(out)
}

/// The M_p grid: 1 − 2^{−j−m/4}, j = 0..40, m = 0..3.
pub fn muckenhoupt_grid() -> Vec<f64> {
    diagnostic_grid()
}

/// The weight u_p(r) = (ŵ(r)(1 − r))^{−1/p}.
pub fn u_p_weight(w: &RadialWeight, p: f64) -> Result<RadialWeight> {
    if !(p > 1.0) {
        return Err(Error::param("p", p, "needs p > 1"));
    }
    let theta = boundary_exponent(|s| (w.tail_s(s) * s).powf(-1.0 / p));
    if -theta >= DIVERGENT_AT {
        return Err(Error::DivergentMass(format!("u_p decays like (1−r)^{theta:.3}, not integrable")));
    }
    RadialWeight::new(Family::Up { base: Box::new(w.clone()), p })
}

/// ∫_a^1 ŵ(t) dt.
pub fn tail_integral(w: &RadialWeight, a: f64) -> f64 {
    quad::toward_zero(|s| w.tail_s(s), 1.0 - a, quad::TAIL_TOL).value
}

/// ω(S(a)) = ((1 − a)/π) ∫_a^1 ω(r) r dr.
pub fn carleson_mass(w: &RadialWeight, a: f64) -> f64 {
    // ∫_a^1 ω r dr = a ŵ(a) + ∫_a^1 ŵ
    let s = 1.0 - a;
    let inner = a * w.tail_s(s) + tail_integral(w, a);
    s / std::f64::consts::PI * inner
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_tail_series_matches_closed_forms() {
        assert!((std_tail(1.0, 1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((std_tail(-0.5, 1.0) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((std_tail(0.0, 0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn log_levels_are_at_least_one() {
        let (p, l) = log_levels(1.0, 3);
        assert_eq!((p, l), (1.0, 1.0));
        let (p, l) = log_levels(1e-30, 2);
        assert!(p > 1.0 && l > 1.0);
    }

    #[test]
    fn table_tail_is_exact_for_constant_samples() {
        let w = RadialWeight::new(Family::Table { r: vec![0.0, 0.5, 0.9], omega: vec![2.0, 2.0, 2.0], path: "-".into() })
            .unwrap();
        assert!((w.mass() - 2.0).abs() < 1e-14);
        assert!((w.tail(0.7) - 0.6).abs() < 1e-14);
    }
}
