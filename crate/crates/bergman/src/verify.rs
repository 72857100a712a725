//! Verification scenarios. Each one runs a corpus of cases, compares two
//! computed quantities per case and judges the spread of their ratios
//! against a window from the shipped fixture.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::analytic::{
    self, bergman_norm, dirichlet_norm, hardy_mean, lambda_norm, little_lambda_profile, m_infinity, mixed_norm,
    modulus_sup, norm_rule, tail_rule, AnalyticFunction,
};
use crate::decomposition::{
    self, block_criterion_lambda, decomposition_norm, is_omega_lacunary, lacunary_block_sums, lacunary_norm,
    lacunary_sup_test,
};
use crate::error::{Error, Result};
use crate::grammar::{fmt_float, parse_sci, sci};
use crate::operators::{
    self, dyadic_pieces, extrapolate_limit, hilbert_image_norm, lp_hat_norm, operator_norm_lower, operator_norm_sample,
    HilbertGram, OperatorSetting, RadialFn, SamplerConfig, SymbolCoeffs,
};
use crate::quad::{self, radial_nodes};
use crate::value::Verdict;
use crate::weights::{self, parse_weight, RadialWeight};

/// Registered scenario ids.
pub const SCENARIOS: [&str; 14] = [
    "TH-DEC",
    "COR-PREV",
    "TH-LAC",
    "TH-LACSUP",
    "TH-GORRO",
    "COR-HILB",
    "TH-MAIN-PQ",
    "TH-MAIN-QP",
    "TH-COMPACT",
    "TH-HS",
    "LEM-LIMITS",
    "PROP-LIP",
    "INEQ-MINFTY",
    "LEM-UP",
];

const WINDOWS_FIXTURE: &str = include_str!("../fixtures/windows.json");

/// Overrides for a scenario run. Unset fields fall back to the scenario's
/// own grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioConfig {
    pub weight: Option<String>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub degree: Option<usize>,
    pub seed: u64,
    /// Window overrides, keyed as in the fixture.
    pub windows: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseVerdict {
    Ok,
    Violation,
    Divergent,
    Info,
}

impl CaseVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseVerdict::Ok => "ok",
            CaseVerdict::Violation => "violation",
            CaseVerdict::Divergent => "divergent",
            CaseVerdict::Info => "info",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "ok" => CaseVerdict::Ok,
            "violation" => CaseVerdict::Violation,
            "divergent" => CaseVerdict::Divergent,
            "info" => CaseVerdict::Info,
            other => return Err(Error::Parse(format!("unknown case verdict `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioVerdict {
    /// Every checked ratio lies inside its window.
    Comparable,
    Violation,
    /// The quantities diverge together, as predicted.
    DivergenceConsistent,
    /// Evidence gathered, nothing decided.
    Inconclusive,
}

impl ScenarioVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioVerdict::Comparable => "comparable",
            ScenarioVerdict::Violation => "violation",
            ScenarioVerdict::DivergenceConsistent => "divergence-consistent",
            ScenarioVerdict::Inconclusive => "inconclusive",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "comparable" => ScenarioVerdict::Comparable,
            "violation" => ScenarioVerdict::Violation,
            "divergence-consistent" => ScenarioVerdict::DivergenceConsistent,
            "inconclusive" => ScenarioVerdict::Inconclusive,
            other => return Err(Error::Parse(format!("unknown scenario verdict `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseRecord {
    pub case_id: String,
    pub group: String,
    pub params: BTreeMap<String, String>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub verdict: CaseVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioStats {
    pub min: f64,
    pub max: f64,
    /// max / min.
    pub spread: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: String,
    pub cases: Vec<CaseRecord>,
    /// Over every spread-checked group.
    pub stats: Option<RatioStats>,
    pub groups: BTreeMap<String, RatioStats>,
    pub windows: BTreeMap<String, f64>,
    pub verdict: ScenarioVerdict,
    pub offending: Vec<String>,
    pub notes: Vec<String>,
    pub seeds: Vec<u64>,
    /// Wall time; never written to report files.
    pub runtime_ms: u128,
}

/// (min, max, max/min) of a nonempty list of finite values.
pub fn ratio_statistics(values: &[f64]) -> Result<RatioStats> {
    if values.is_empty() {
        return Err(Error::Invalid("ratio statistics of an empty list".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("ratio statistics need finite values".into()));
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = if min == max { 1.0 } else { max / min };
    Ok(RatioStats { min, max, spread, count: values.len() })
}

/// Default windows for `id` from the versioned fixture.
pub fn default_windows(id: &str) -> Result<BTreeMap<String, f64>> {
    let v: Value = serde_json::from_str(WINDOWS_FIXTURE).map_err(|e| Error::Parse(format!("window fixture: {e}")))?;
    let table = v["scenarios"][id]
        .as_object()
        .ok_or_else(|| Error::Invalid(format!("unknown scenario `{id}`")))?;
    table
        .iter()
        .map(|(k, x)| {
            x.as_f64()
                .map(|f| (k.clone(), f))
                .ok_or_else(|| Error::Parse(format!("window {id}.{k} is not a number")))
        })
        .collect()
}

/// Version tag of the window fixture.
pub fn windows_version() -> u64 {
    serde_json::from_str::<Value>(WINDOWS_FIXTURE).ok().and_then(|v| v["version"].as_u64()).unwrap_or(0)
}

fn canon(x: f64) -> f64 {
    parse_sci(&sci(x)).expect("sci output parses")
}

fn seed_for(base: u64, idx: u64) -> u64 {
    base ^ (idx + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn params(kv: &[(&str, String)]) -> BTreeMap<String, String> {
    kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn case(id: String, group: &str, kv: &[(&str, String)], lhs: f64, rhs: f64, verdict: CaseVerdict) -> CaseRecord {
    let verdict =
        if verdict == CaseVerdict::Ok && !(lhs.is_finite() && rhs.is_finite()) { CaseVerdict::Divergent } else { verdict };
    CaseRecord { case_id: id, group: group.to_string(), params: params(kv), lhs, rhs, ratio: lhs / rhs, verdict }
}

fn f(x: f64) -> String {
    fmt_float(x)
}

struct Run {
    id: &'static str,
    windows: BTreeMap<String, f64>,
    cases: Vec<CaseRecord>,
    checked: Vec<String>,
    offending: Vec<String>,
    notes: Vec<String>,
    seeds: Vec<u64>,
    divergence: bool,
    inconclusive: bool,
    started: Instant,
}

impl Run {
    fn new(id: &'static str, cfg: &ScenarioConfig) -> Result<Self> {
        let mut windows = default_windows(id)?;
        for (k, v) in &cfg.windows {
            if !windows.contains_key(k) {
                return Err(Error::Invalid(format!("scenario {id} has no window `{k}`")));
            }
            windows.insert(k.clone(), *v);
        }
        Ok(Run {
            id,
            windows,
            cases: Vec::new(),
            checked: Vec::new(),
            offending: Vec::new(),
            notes: Vec::new(),
            seeds: vec![cfg.seed],
            divergence: false,
            inconclusive: false,
            started: Instant::now(),
        })
    }

    fn window(&self, key: &str) -> f64 {
        self.windows[key]
    }

    fn finite_ratios(&self, group: &str) -> Vec<(usize, f64)> {
        self.cases
            .iter()
            .enumerate()
            .filter(|(_, c)| c.group == group && c.verdict == CaseVerdict::Ok && c.ratio.is_finite() && c.ratio > 0.0)
            .map(|(i, c)| (i, c.ratio))
            .collect()
    }

    /// Flags the extreme cases of `group` when its spread exceeds `window`.
    fn check_spread(&mut self, group: &str, window: f64) {
        self.checked.push(group.to_string());
        let r = self.finite_ratios(group);
        if r.is_empty() {
            return;
        }
        let (lo, hi) = r.iter().fold((r[0], r[0]), |(lo, hi), &x| {
            (if x.1 < lo.1 { x } else { lo }, if x.1 > hi.1 { x } else { hi })
        });
        let spread = hi.1 / lo.1;
        if spread > window {
            self.offending.push(format!(
                "{group}: spread {} exceeds {} ({} .. {})",
                sci(spread),
                sci(window),
                self.cases[lo.0].case_id,
                self.cases[hi.0].case_id
            ));
            self.cases[lo.0].verdict = CaseVerdict::Violation;
            self.cases[hi.0].verdict = CaseVerdict::Violation;
        }
    }

    fn finish(self) -> ScenarioReport {
        let runtime_ms = self.started.elapsed().as_millis();
        let mut cases = self.cases;
        for c in &mut cases {
            c.lhs = canon(c.lhs);
            c.rhs = canon(c.rhs);
            c.ratio = canon(c.ratio);
        }
        let mut groups = BTreeMap::new();
        let mut names: Vec<&str> = cases.iter().map(|c| c.group.as_str()).collect();
        names.dedup();
        names.sort();
        names.dedup();
        let ok = |c: &CaseRecord| c.verdict != CaseVerdict::Divergent && c.ratio.is_finite() && c.ratio > 0.0;
        for g in names {
            let v: Vec<f64> = cases.iter().filter(|c| c.group == g && ok(c)).map(|c| c.ratio).collect();
            if let Ok(s) = ratio_statistics(&v) {
                groups.insert(g.to_string(), canon_stats(s));
            }
        }
        let all: Vec<f64> =
            cases.iter().filter(|c| self.checked.contains(&c.group) && ok(c)).map(|c| c.ratio).collect();
        let stats = ratio_statistics(&all).ok().map(canon_stats);
        let mut offending = self.offending;
        for c in &cases {
            if c.verdict == CaseVerdict::Violation && !offending.iter().any(|o| o.contains(&c.case_id)) {
                offending.push(c.case_id.clone());
            }
        }
        let verdict = if !offending.is_empty() {
            ScenarioVerdict::Violation
        } else if self.divergence {
            ScenarioVerdict::DivergenceConsistent
        } else if self.inconclusive {
            ScenarioVerdict::Inconclusive
        } else {
            ScenarioVerdict::Comparable
        };
        ScenarioReport {
            scenario: self.id.to_string(),
            cases,
            stats,
            groups,
            windows: self.windows.into_iter().map(|(k, v)| (k, canon(v))).collect(),
            verdict,
            offending,
            notes: self.notes,
            seeds: self.seeds,
            runtime_ms,
        }
    }
}

fn canon_stats(s: RatioStats) -> RatioStats {
    RatioStats { min: canon(s.min), max: canon(s.max), spread: canon(s.spread), count: s.count }
}

/// Runs a registered scenario. Errors are configuration errors; failed
/// mathematical checks are reported through the verdict.
pub fn run_scenario(id: &str, cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let id: &'static str = SCENARIOS
        .iter()
        .find(|s| s.eq_ignore_ascii_case(id))
        .ok_or_else(|| Error::Invalid(format!("unknown scenario `{id}`; known: {}", SCENARIOS.join(", "))))?;
    let mut run = Run::new(id, cfg)?;
    match id {
        "TH-DEC" => th_dec(&mut run, cfg)?,
        "COR-PREV" => cor_prev(&mut run, cfg)?,
        "TH-LAC" => th_lac(&mut run, cfg)?,
        "TH-LACSUP" => th_lacsup(&mut run, cfg)?,
        "TH-GORRO" => th_gorro(&mut run, cfg)?,
        "COR-HILB" => cor_hilb(&mut run, cfg)?,
        "TH-MAIN-PQ" => th_main_pq(&mut run, cfg)?,
        "TH-MAIN-QP" => th_main_qp(&mut run, cfg)?,
        "TH-COMPACT" => th_compact(&mut run, cfg)?,
        "TH-HS" => th_hs(&mut run, cfg)?,
        "LEM-LIMITS" => lem_limits(&mut run, cfg)?,
        "PROP-LIP" => prop_lip(&mut run, cfg)?,
        "INEQ-MINFTY" => ineq_minfty(&mut run, cfg)?,
        "LEM-UP" => lem_up(&mut run, cfg)?,
        _ => unreachable!(),
    }
    Ok(run.finish())
}

fn weights_or(cfg: &ScenarioConfig, defaults: &[&str]) -> Result<Vec<RadialWeight>> {
    match &cfg.weight {
        Some(w) => Ok(vec![parse_weight(w)?]),
        None => defaults.iter().map(|w| parse_weight(w)).collect(),
    }
}

/// Thirty functions of degree ≤ `degree`: monomials, seeded random
/// polynomials and truncated kernels.
pub fn decomposition_corpus(degree: usize, seed: u64) -> Result<Vec<AnalyticFunction>> {
    let mut v = Vec::with_capacity(30);
    v.push(AnalyticFunction::monomial(0, 1.0).tagged("mono(m=0)".into()));
    for j in 0..9 {
        let m = (degree >> j).max(1);
        v.push(AnalyticFunction::monomial(m, 1.0).tagged(format!("mono(m={m})")));
    }
    let dists = ["unit", "sym", "sign"];
    for i in 0..10u64 {
        v.push(AnalyticFunction::random(degree, seed_for(seed, i), dists[i as usize % 3])?);
    }
    v.push(AnalyticFunction::log_kernel(degree));
    for s in [0.25, 0.5, 0.75, 1.0, 1.5, 2.0] {
        v.push(AnalyticFunction::binomial(s, degree));
    }
    v.push(AnalyticFunction::log_kernel((degree / 4).max(1)));
    v.push(AnalyticFunction::random((degree / 4).max(1), seed_for(seed, 10), "sign")?);
    v.push(AnalyticFunction::random((degree / 16).max(1), seed_for(seed, 11), "sym")?);
    Ok(v)
}

/// Fifty functions of mixed degree up to 512.
pub fn minfty_corpus(seed: u64) -> Result<Vec<AnalyticFunction>> {
    let mut v = Vec::with_capacity(50);
    for m in [0, 1, 2, 3, 4, 5, 7, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512] {
        v.push(AnalyticFunction::monomial(m, 1.0).tagged(format!("mono(m={m})")));
    }
    let degs = [8, 16, 32, 64, 128, 256, 512];
    let dists = ["unit", "sym", "sign"];
    for i in 0..15u64 {
        v.push(AnalyticFunction::random(degs[i as usize % 7], seed_for(seed, 100 + i), dists[i as usize % 3])?);
    }
    for d in [64, 128, 256, 512] {
        v.push(AnalyticFunction::log_kernel(d));
    }
    for s in [0.25, 0.5, 1.0, 1.5, 2.0] {
        for d in [128, 512] {
            v.push(AnalyticFunction::binomial(s, d));
        }
    }
    v.push(AnalyticFunction::binomial(0.75, 256));
    Ok(v)
}

fn profile(f: &AnalyticFunction, p: f64, nodes: &[f64]) -> Vec<f64> {
    nodes.iter().map(|&r| hardy_mean(f, p, r)).collect()
}

fn pq_grid(cfg: &ScenarioConfig, defaults: &[(f64, f64)]) -> Vec<(f64, f64)> {
    match (cfg.p, cfg.q) {
        (Some(p), Some(q)) => vec![(p, q)],
        (Some(p), None) => vec![(p, p)],
        _ => defaults.to_vec(),
    }
}

/// Spreads of every (weight, p, q, α) cell of the decomposition grid at one
/// corpus degree, with the cases.
fn dec_cells(
    weights: &[RadialWeight],
    pq: &[(f64, f64)],
    degree: usize,
    seed: u64,
) -> Result<Vec<(String, Vec<CaseRecord>)>> {
    let corpus = decomposition_corpus(degree, seed)?;
    let nodes = radial_nodes(degree);
    let mut ps: Vec<f64> = pq.iter().map(|x| x.0).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let profiles: Vec<Vec<Vec<f64>>> =
        corpus.par_iter().map(|g| ps.iter().map(|&p| profile(g, p, &nodes)).collect()).collect();
    let mut out = Vec::new();
    for w in weights {
        let (nw, _) = w.normalized();
        let rule = norm_rule(&nw, degree, 0.0, false);
        for alpha in [0.5, 1.0, 2.0] {
            let part = decomposition::partition(&nw, alpha, degree)?;
            for &(p, q) in pq {
                let pi = ps.iter().position(|&x| x == p).expect("p in grid");
                let cell = format!("{}|p={}|q={}|alpha={}", w.spec(), f(p), f(q), f(alpha));
                let cases: Vec<CaseRecord> = corpus
                    .par_iter()
                    .zip(&profiles)
                    .map(|(g, prof)| -> Result<CaseRecord> {
                        let lhs = decomposition_norm(g, p, q, &part)?.value;
                        let vals: Vec<f64> = prof[pi].iter().map(|m| m.powf(q)).collect();
                        let rhs = rule.integrate(&vals).powf(1.0 / q);
                        Ok(case(
                            format!("{cell}|{}|deg={degree}", g.tag),
                            &cell,
                            &[
                                ("weight", w.spec()),
                                ("p", f(p)),
                                ("q", f(q)),
                                ("alpha", f(alpha)),
                                ("f", g.tag.clone()),
                                ("degree", degree.to_string()),
                            ],
                            lhs,
                            rhs,
                            CaseVerdict::Ok,
                        ))
                    })
                    .collect::<Result<_>>()?;
                out.push((cell, cases));
            }
        }
    }
    Ok(out)
}

fn spread_of(cases: &[CaseRecord]) -> f64 {
    let v: Vec<f64> = cases.iter().filter(|c| c.ratio.is_finite() && c.ratio > 0.0).map(|c| c.ratio).collect();
    ratio_statistics(&v).map(|s| s.spread).unwrap_or(f64::NAN)
}

fn th_dec(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let weights = weights_or(cfg, &["const(c=1)", "pow(a=1)", "std(alpha=-0.5)", "logpow(beta=2)"])?;
    let pq = pq_grid(cfg, &[(2.0, 2.0), (2.0, 3.0), (3.0, 1.5)]);
    let degree = cfg.degree.unwrap_or(512);
    let full = dec_cells(&weights, &pq, degree, cfg.seed)?;
    let half = dec_cells(&weights, &pq, degree / 2, cfg.seed)?;
    let (w_spread, w_double) = (run.window("spread"), run.window("doubling"));
    for ((cell, cases), (_, small)) in full.into_iter().zip(half) {
        let (s1, s0) = (spread_of(&cases), spread_of(&small));
        run.cases.extend(cases);
        run.check_spread(&cell, w_spread);
        let ok = ((s1 / s0) - 1.0).abs() <= w_double;
        run.cases.push(case(
            format!("doubling|{cell}"),
            "doubling",
            &[("cell", cell.clone()), ("degrees", format!("{}->{degree}", degree / 2))],
            s1,
            s0,
            if ok { CaseVerdict::Ok } else { CaseVerdict::Violation },
        ));
    }
    run.notes.push(format!("corpus of 30 functions at degree {degree}, doubling compared against degree {}", degree / 2));
    Ok(())
}

fn hp_norm_range(g: &AnalyticFunction, p: f64, lo: usize, hi: usize) -> f64 {
    analytic::hardy_norm_poly(&analytic::partial_sum(g, lo, hi), p)
}

fn cor_prev(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let degree = cfg.degree.unwrap_or(512);
    let corpus = decomposition_corpus(degree, cfg.seed)?;
    let nodes = radial_nodes(degree);
    let (w_spread, w_agree) = (run.window("spread"), run.window("agree"));
    for (i, &(p, q, gamma)) in [(2.0, 2.0, 0.5), (2.0, 2.0, 1.0), (3.0, 1.5, 1.0)].iter().enumerate() {
        let a = q * gamma - 1.0;
        let (w, _) = weights::RadialWeight::power(a)?.normalized();
        let alpha = q * gamma;
        let part = decomposition::partition(&w, alpha, degree)?;
        let rule = norm_rule(&w, degree, 0.0, false);
        let tag = format!("i|p={}|q={}|gamma={}", f(p), f(q), f(gamma));
        let rows: Vec<(f64, f64, f64)> = corpus
            .par_iter()
            .map(|g| -> Result<(f64, f64, f64)> {
                let mut s = g.coeff(0).norm().powf(q);
                let mut n = 0;
                while (1usize << n) <= g.degree() {
                    let b = hp_norm_range(g, p, 1 << n, 1 << (n + 1));
                    s += 2f64.powf(-(n as f64) * q * gamma) * b.powf(q);
                    n += 1;
                }
                let vals: Vec<f64> = profile(g, p, &nodes).iter().map(|m| m.powf(q)).collect();
                Ok((s.powf(1.0 / q), rule.integrate(&vals).powf(1.0 / q), decomposition_norm(g, p, q, &part)?.value))
            })
            .collect::<Result<_>>()?;
        for (g, &(dy, int, dec)) in corpus.iter().zip(&rows) {
            let kv = [("p", f(p)), ("q", f(q)), ("gamma", f(gamma)), ("weight", w.spec()), ("f", g.tag.clone())];
            run.cases.push(case(format!("{tag}|integral|{}", g.tag), &format!("{tag}|integral"), &kv, dy, int, CaseVerdict::Ok));
            let agree = (dy / dec).max(dec / dy) <= w_agree;
            run.cases.push(case(
                format!("{tag}|partition|{}", g.tag),
                &format!("{tag}|partition"),
                &kv,
                dy,
                dec,
                if agree { CaseVerdict::Ok } else { CaseVerdict::Violation },
            ));
        }
        run.check_spread(&format!("{tag}|integral"), w_spread);
        if i == 0 {
            run.notes.push("(i): dyadic blocks [2^n, 2^(n+1)) against the pow weight partition with alpha = q*gamma".into());
        }
    }
    for &(p, q, beta) in &[(2.0, 2.0, 1.0), (2.0, 2.0, 1.5), (3.0, 1.5, 2.0)] {
        let (w, _) = weights::RadialWeight::logpow(q * beta)?.normalized();
        let alpha = q * beta - 1.0;
        let part = decomposition::partition(&w, alpha, degree)?;
        let rule = norm_rule(&w, degree, 0.0, false);
        let tag = format!("ii|p={}|q={}|beta={}", f(p), f(q), f(beta));
        let rows: Vec<(f64, f64, f64)> = corpus
            .par_iter()
            .map(|g| -> Result<(f64, f64, f64)> {
                let mut s = hp_norm_range(g, p, 0, 4).powf(q);
                let mut n = 1u32;
                while (1usize << (1u32 << n)) <= g.degree() {
                    let lo = 1usize << (1u32 << n);
                    let hi = 1usize << (1u32 << (n + 1)).min(62);
                    let b = hp_norm_range(g, p, lo, hi);
                    s += 2f64.powf(-(n as f64) * alpha) * b.powf(q);
                    n += 1;
                }
                let vals: Vec<f64> = profile(g, p, &nodes).iter().map(|m| m.powf(q)).collect();
                Ok((s.powf(1.0 / q), rule.integrate(&vals).powf(1.0 / q), decomposition_norm(g, p, q, &part)?.value))
            })
            .collect::<Result<_>>()?;
        for (g, &(dy, int, dec)) in corpus.iter().zip(&rows) {
            let kv = [("p", f(p)), ("q", f(q)), ("beta", f(beta)), ("weight", w.spec()), ("f", g.tag.clone())];
            run.cases.push(case(format!("{tag}|integral|{}", g.tag), &format!("{tag}|integral"), &kv, dy, int, CaseVerdict::Ok));
            run.cases.push(case(format!("{tag}|partition|{}", g.tag), &format!("{tag}|partition"), &kv, dy, dec, CaseVerdict::Ok));
        }
        run.check_spread(&format!("{tag}|integral"), w_spread);
        run.check_spread(&format!("{tag}|partition"), w_spread);
    }
    run.notes.push("(ii): doubly dyadic blocks [2^(2^n), 2^(2^(n+1))) against the logpow partition with alpha = q*beta - 1".into());
    Ok(())
}

/// Seeded ω-lacunary exponents below `limit`: each ratio
/// ŵ(1−1/n_k)/ŵ(1−1/n_{k+1}) is drawn from [λ, 1.5λ].
pub fn lacunary_exponents(w: &RadialWeight, lambda: f64, limit: u64, max_terms: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tail = |n: u64| w.tail_s(1.0 / n as f64);
    let mut n: u64 = rng.gen_range(1..=3);
    let mut v = vec![n];
    while v.len() < max_terms {
        let target = lambda * (1.0 + 0.5 * rng.gen::<f64>());
        let t0 = tail(n);
        if t0 / tail(limit) < target {
            break;
        }
        let (mut lo, mut hi) = (n, limit);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if t0 / tail(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        n = hi;
        v.push(n);
    }
    v
}

fn th_lac(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let weights = weights_or(cfg, &["const(c=1)", "logpow(beta=2)"])?;
    let qs: Vec<f64> = match cfg.q {
        Some(q) => vec![q],
        None => vec![1.0, 2.0, 3.0],
    };
    let lambda = 1.5;
    let w_spread = run.window("spread");
    for w in &weights {
        let (nw, _) = w.normalized();
        let part = decomposition::partition(&nw, 1.0, 1 << 22)?;
        let limit = (part.covered() - 1).min(1 << 22);
        let series: Vec<(Vec<u64>, Vec<f64>)> = (0..20u64)
            .map(|i| {
                let s = seed_for(cfg.seed, i);
                let e = lacunary_exponents(&nw, lambda, limit, 40, s);
                let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0xA5A5);
                let a = e.iter().map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 } * rng.gen_range(0.1..1.0)).collect();
                (e, a)
            })
            .collect();
        for (e, _) in &series {
            let chk = is_omega_lacunary(e, &nw, lambda)?;
            if !chk.lacunary {
                return Err(Error::Invalid(format!("generated exponents are not {lambda}-lacunary")));
            }
        }
        for &q in &qs {
            let group = format!("{}|q={}", w.spec(), f(q));
            for (i, (e, a)) in series.iter().enumerate() {
                let v = lacunary_norm(a, e, q, &nw)?.value;
                let sums = lacunary_block_sums(a, e, q, &part)?;
                for (name, s) in ["ii", "iii", "iv"].iter().zip(sums) {
                    run.cases.push(case(
                        format!("{group}|series={i}|{name}/v"),
                        &group,
                        &[("weight", w.spec()), ("q", f(q)), ("series", i.to_string()), ("sum", name.to_string()), ("terms", e.len().to_string())],
                        s,
                        v,
                        CaseVerdict::Ok,
                    ));
                }
            }
            run.check_spread(&group, w_spread);
        }
        run.seeds.extend((0..20u64).map(|i| seed_for(cfg.seed, i)));
    }
    // Σ 2^{n/q} z^{M_n} for the unit weight: the coefficient sums settle with
    // exponent p < q and keep growing with exponent q.
    let (p, q) = (2.0, 3.0);
    let (nw, _) = weights::RadialWeight::constant(1.0)?.normalized();
    let part = decomposition::partition(&nw, 1.0, 1 << 21)?;
    let exps: Vec<u64> = part.marks[..21].to_vec();
    let coeffs: Vec<f64> = (0..21).map(|n| 2f64.powf(n as f64 / q)).collect();
    let chk = is_omega_lacunary(&exps, &nw, 2.0)?;
    let growth = run.window("separate");
    for (e, accepted) in [(p, true), (q, false)] {
        let s10 = lacunary_norm(&coeffs[..11], &exps[..11], e, &nw)?.value;
        let s20 = lacunary_norm(&coeffs, &exps, e, &nw)?.value;
        let ok = ((s20 / s10) < growth) == accepted && chk.lacunary;
        run.cases.push(case(
            format!("separating|exponent={}", f(e)),
            "separating",
            &[("exponent", f(e)), ("expected", if accepted { "finite" } else { "infinite" }.into()), ("N", "10->20".into())],
            s20,
            s10,
            if ok { CaseVerdict::Ok } else { CaseVerdict::Violation },
        ));
    }
    run.notes.push(format!("separating series with exponents M_n = 2^n: accepted with exponent {p}, rejected with {q}"));
    Ok(())
}

fn th_lacsup(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let weights = weights_or(cfg, &["const(c=1)", "logpow(beta=2)"])?;
    for w in &weights {
        let (nw, _) = w.normalized();
        for beta in [0.5, 1.0] {
            for i in 0..5u64 {
                let s = seed_for(cfg.seed, i);
                let e = lacunary_exponents(&nw, 1.5, 1 << 31, 24, s);
                let a: Vec<f64> = e.iter().map(|&n| nw.tail_s(1.0 / n as f64).powf(-beta)).collect();
                let grown: Vec<f64> = a.iter().enumerate().map(|(k, x)| x * ((k + 1) * (k + 1)) as f64).collect();
                for (name, c, expect) in [("member", &a, true), ("grown", &grown, false)] {
                    let t = lacunary_sup_test(c, &e, &nw, beta)?;
                    let h = t.margins.len().div_ceil(2);
                    let first = t.margins[..h].iter().cloned().fold(0.0, f64::max);
                    let second = t.margins[h..].iter().cloned().fold(0.0, f64::max);
                    let ok = t.member == expect && e.len() >= 4;
                    run.cases.push(case(
                        format!("{}|beta={}|series={i}|{name}", w.spec(), f(beta)),
                        &format!("{}|beta={}", w.spec(), f(beta)),
                        &[
                            ("weight", w.spec()),
                            ("beta", f(beta)),
                            ("coefficients", name.to_string()),
                            ("member", t.member.to_string()),
                            ("terms", e.len().to_string()),
                        ],
                        second,
                        first,
                        if ok { CaseVerdict::Ok } else { CaseVerdict::Violation },
                    ));
                }
                run.seeds.push(s);
            }
        }
    }
    run.notes.push("member: a_k = w-hat(1-1/n_k)^(-beta); grown: a_k (k+1)^2; lhs/rhs = second-half/first-half max margin".into());
    Ok(())
}

fn th_gorro(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let w = parse_weight(cfg.weight.as_deref().unwrap_or("std(alpha=-0.5)"))?;
    let p = cfg.p.unwrap_or(2.0);
    let (nw, _) = w.normalized();
    let mp = weights::muckenhoupt(&nw, p, &weights::muckenhoupt_grid())?;
    run.notes.push(format!("M_p(omega) = {} ({:?})", sci(mp.value), mp.verdict));
    let levels = 24;
    let pieces = dyadic_pieces(levels);
    let expo = -1.0 / (p - 1.0);
    let piece_fn = |c: &[f64]| RadialFn::WeightPower {
        weight: nw.clone(),
        exponent: expo,
        pieces: pieces.iter().zip(c).filter(|(_, &x)| x != 0.0).map(|(&(lo, hi), &x)| (lo, hi, x)).collect(),
    };
    let gram = if p == 2.0 {
        let basis: Vec<RadialFn> = pieces
            .iter()
            .map(|&(lo, hi)| RadialFn::WeightPower { weight: nw.clone(), exponent: expo, pieces: vec![(lo, hi, 1.0)] })
            .collect();
        Some(HilbertGram::new(&basis, &nw))
    } else {
        None
    };
    let ratio = |c: &[f64]| -> Result<(f64, f64)> {
        let phi = piece_fn(c);
        let den = lp_hat_norm(&phi, p, &nw)?;
        if !den.is_finite() {
            return Ok((f64::INFINITY, f64::INFINITY));
        }
        let num = match &gram {
            Some(g) => g.quadratic(c).sqrt(),
            None => hilbert_image_norm(&phi, p, &nw)?.value,
        };
        Ok((num, den.value))
    };
    if mp.verdict == Verdict::Divergent {
        // φ_r on [r, 1 − (1 − r)²]: pieces j..2j for r = 1 − 2^{−j}.
        let mut rs = Vec::new();
        for j in 1..=12usize {
            let c: Vec<f64> = (0..=levels).map(|i| if i >= j && i < 2 * j { 1.0 } else { 0.0 }).collect();
            let (num, den) = ratio(&c)?;
            rs.push(num / den);
            run.cases.push(case(format!("phi_r_truncated|j={j}"), "phi_r_truncated", &[("j", j.to_string()), ("p", f(p)), ("weight", w.spec())], num, den, CaseVerdict::Info));
        }
        let escape = run.window("escape");
        let (r2, r12) = (rs[1], rs[11]);
        if r12 > escape * r2 {
            run.divergence = true;
            run.notes.push(format!("escape: ratio(j=12)/ratio(j=2) = {}", sci(r12 / r2)));
        } else {
            run.offending.push(format!("phi_r ratios grow only by {} between j=2 and j=12", sci(r12 / r2)));
        }
        return Ok(());
    }
    let w_spread = run.window("spread");
    for j in 0..=12usize {
        let c: Vec<f64> = (0..=levels).map(|i| if i >= j { 1.0 } else { 0.0 }).collect();
        let (num, den) = ratio(&c)?;
        run.cases.push(case(format!("phi_r|j={j}"), "ratios", &[("family", "phi_r".into()), ("j", j.to_string()), ("p", f(p)), ("weight", w.spec())], num, den, CaseVerdict::Ok));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..100 {
        let c: Vec<f64> = (0..=levels).map(|j| if j <= 12 { rng.gen::<f64>() } else { 0.0 }).collect();
        let (num, den) = ratio(&c)?;
        run.cases.push(case(format!("random|{i}"), "ratios", &[("family", "random".into()), ("sample", i.to_string()), ("p", f(p)), ("weight", w.spec())], num, den, CaseVerdict::Ok));
    }
    if let Some(g) = &gram {
        if !g.converged {
            run.inconclusive = true;
            run.notes.push("Gram coefficient tail did not settle".into());
        }
    }
    run.check_spread("ratios", w_spread);
    Ok(())
}

fn cor_hilb(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let cells: Vec<(String, f64)> = match (&cfg.weight, cfg.p) {
        (Some(w), p) => vec![(w.clone(), p.unwrap_or(2.0))],
        (None, Some(p)) => vec![("std(alpha=-0.5)".into(), p)],
        _ => vec![("std(alpha=-0.5)".into(), 2.0), ("std(alpha=0)".into(), 3.0), ("std(alpha=0.5)".into(), 3.0)],
    };
    let g = AnalyticFunction::log_kernel(1024);
    let w_spread = run.window("spread");
    for (k, (spec, p)) in cells.iter().enumerate() {
        let w = parse_weight(spec)?;
        let setting = OperatorSetting::new(*p, *p, &w)?;
        let group = format!("{}|p={}", w.spec(), f(*p));
        if setting.well_defined == Verdict::Divergent {
            run.notes.push(format!("{group}: the integral of w-hat^(-1/(p-1)) diverges, the operator is not defined"));
            run.divergence = true;
            continue;
        }
        let samples = if *p == 2.0 { 200 } else { 20 };
        let sc = SamplerConfig { samples, degree: 256, seed: seed_for(cfg.seed, k as u64) };
        run.seeds.push(sc.seed);
        let est = operator_norm_sample(&g, &setting, &sc)?;
        for (i, r) in est.ratios.iter().enumerate() {
            run.cases.push(case(format!("{group}|sample={i}"), &group, &[("weight", w.spec()), ("p", f(*p)), ("sample", i.to_string())], *r, 1.0, CaseVerdict::Ok));
        }
        run.check_spread(&group, w_spread);
    }
    run.notes.push("symbol log(1/(1-z)) truncated at degree 1024; lhs = ||Hf||/||f||".into());
    Ok(())
}

fn symbol_family(cfg: &ScenarioConfig, kernel: AnalyticFunction) -> Result<Vec<AnalyticFunction>> {
    Ok(vec![
        AnalyticFunction::monomial(1, 1.0).tagged("z".into()),
        AnalyticFunction::monomial(2, 1.0).tagged("z^2".into()),
        AnalyticFunction::log_kernel(2048),
        kernel,
        AnalyticFunction::random(8, seed_for(cfg.seed, 7), "unit")?,
    ])
}

fn th_main_pq(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let w = parse_weight(cfg.weight.as_deref().unwrap_or("std(alpha=-0.5)"))?;
    let p = cfg.p.unwrap_or(2.0);
    let q = cfg.q.unwrap_or(p);
    if q < p {
        return Err(Error::Invalid(format!("TH-MAIN-PQ needs q ≥ p (p={p}, q={q})")));
    }
    let setting = OperatorSetting::new(p, q, &w)?;
    if setting.well_defined == Verdict::Divergent {
        run.notes.push("the integral of w-hat^(-1/(p-1)) diverges; the operators are not defined".into());
        run.divergence = true;
        return Ok(());
    }
    let part = decomposition::partition(&setting.weight, 1.0, operators::TEST_DEGREE_CAP)?;
    let eta = 1.0 / p - 1.0 / q;
    let symbols = symbol_family(cfg, AnalyticFunction::binomial(0.5, 2048))?;
    let rows: Vec<(f64, f64)> = symbols
        .par_iter()
        .map(|g| -> Result<(f64, f64)> {
            let lo = operator_norm_lower(g, &setting, &part, 40)?.value;
            let rhs = lambda_norm(g, q, 1.0 / p, eta, &setting.weight)?.value;
            Ok((lo, rhs))
        })
        .collect::<Result<_>>()?;
    for (g, &(lo, rhs)) in symbols.iter().zip(&rows) {
        run.cases.push(case(g.tag.clone(), "symbols", &[("g", g.tag.clone()), ("p", f(p)), ("q", f(q)), ("weight", w.spec())], lo, rhs, CaseVerdict::Ok));
    }
    run.check_spread("symbols", run.window("spread"));
    let mut inverted = Vec::new();
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            if rows[i].1 > rows[j].1 && rows[i].0 < rows[j].0 {
                inverted.push(format!("{} < {}", symbols[i].tag, symbols[j].tag));
            }
        }
    }
    if inverted.is_empty() {
        run.notes.push("ordering preserved across the symbol family".into());
    } else {
        run.notes.push(format!("ordering inverted for: {}", inverted.join("; ")));
    }
    Ok(())
}

fn th_main_qp(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let w = parse_weight(cfg.weight.as_deref().unwrap_or("std(alpha=-0.5)"))?;
    let p = cfg.p.unwrap_or(3.0);
    let q = cfg.q.unwrap_or(2.0);
    if !(q < p) {
        return Err(Error::Invalid(format!("TH-MAIN-QP needs q < p (p={p}, q={q})")));
    }
    let setting = OperatorSetting::new(p, q, &w)?;
    if setting.well_defined == Verdict::Divergent {
        run.notes.push("the integral of w-hat^(-1/(p-1)) diverges; the operators are not defined".into());
        run.divergence = true;
        return Ok(());
    }
    let s = p * q / (p - q);
    let gamma = (1.0 - 1.0 / p) * s;
    let part = decomposition::partition(&setting.weight, 1.0, 64)?;
    let symbols = symbol_family(cfg, AnalyticFunction::binomial(0.1, 2048))?;
    let rows: Vec<(Vec<f64>, f64)> = symbols
        .par_iter()
        .map(|g| -> Result<(Vec<f64>, f64)> {
            let est = operator_norm_lower(g, &setting, &part, 0)?;
            let rhs = mixed_norm(&g.differentiate(), q, s, &setting.weight, gamma)?.value;
            Ok((est.ratios, rhs))
        })
        .collect::<Result<_>>()?;
    for (g, (r, rhs)) in symbols.iter().zip(&rows) {
        let lo = r.iter().cloned().fold(0.0, f64::max);
        let monotone = r.windows(2).all(|x| x[1] >= x[0]);
        let settled = r.len() == 3 && (r[2] - r[1]).abs() <= 0.1 * r[2];
        run.cases.push(case(
            g.tag.clone(),
            "symbols",
            &[
                ("g", g.tag.clone()),
                ("p", f(p)),
                ("q", f(q)),
                ("s", f(s)),
                ("weight", w.spec()),
                ("rho_ratios", r.iter().map(|x| sci(*x)).collect::<Vec<_>>().join(";")),
                ("monotone", monotone.to_string()),
                ("settled", settled.to_string()),
            ],
            lo,
            *rhs,
            CaseVerdict::Ok,
        ));
        if !(monotone && settled) {
            run.notes.push(format!("{}: rho ratios not monotonically settled", g.tag));
        }
    }
    run.check_spread("symbols", run.window("spread"));
    run.notes.push(format!("Q_rho at rho = 0.9, 0.95, 0.99; rhs = (int M_q^s(r,g') (1-r)^{} omega dr)^(1/s)", f(gamma)));
    Ok(())
}

/// Last value over the maximum of a profile.
fn decay_index(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    *v.last().unwrap() / m
}

fn th_compact(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let w = parse_weight(cfg.weight.as_deref().unwrap_or("std(alpha=-0.5)"))?;
    let p = cfg.p.unwrap_or(2.0);
    let q = cfg.q.unwrap_or(p);
    let degree = cfg.degree.unwrap_or(2048);
    let (nw, _) = w.normalized();
    let eta = (1.0 / p - 1.0 / q).max(0.0);
    let part = decomposition::partition(&nw, 1.0, degree)?;
    let symbols = vec![
        AnalyticFunction::monomial(2, 1.0).tagged("z^2".into()),
        AnalyticFunction::random(8, seed_for(cfg.seed, 3), "sym")?,
        AnalyticFunction::binomial(-0.5, degree),
        AnalyticFunction::log_kernel(degree),
        AnalyticFunction::binomial(0.5, degree),
    ];
    let levels = (degree as f64).log2().floor() as i32 - 2;
    let grid: Vec<f64> = (0..=levels).map(|j| 1.0 - 2f64.powi(-j)).collect();
    let cut = run.window("decay");
    for g in &symbols {
        let lam = little_lambda_profile(g, q, 1.0 / p, eta, &nw, &grid);
        let (_, prof) = block_criterion_lambda(g, q, p, eta, &part)?;
        // Blocks that lie completely inside the truncation degree.
        let full = (0..part.block_count()).filter(|&n| part.block_range(n).1 as usize <= degree).count().max(1);
        let blocks = &prof[..full.min(prof.len())];
        let (dl, db) = (decay_index(&lam), decay_index(blocks));
        let agree = (dl < cut) == (db < cut);
        if !agree {
            run.inconclusive = true;
        }
        run.cases.push(case(
            g.tag.clone(),
            "profiles",
            &[
                ("g", g.tag.clone()),
                ("lambda_decays", (dl < cut).to_string()),
                ("blocks_decay", (db < cut).to_string()),
                ("blocks", full.to_string()),
            ],
            dl,
            db,
            if agree { CaseVerdict::Ok } else { CaseVerdict::Info },
        ));
    }
    run.notes.push(format!("lhs = last/max of the little-lambda profile on r = 1 - 2^-j, j <= {levels}; rhs = last/max of the block profile"));
    Ok(())
}

fn th_hs(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let w = parse_weight(cfg.weight.as_deref().unwrap_or("std(alpha=-0.5)"))?;
    let k = cfg.degree.unwrap_or(2000);
    let symbols = vec![
        AnalyticFunction::monomial(2, 1.0).tagged("z^2".into()),
        AnalyticFunction::from_real(&[0.0, 1.0, 0.0, 3.0]).tagged("z+3z^3".into()),
        AnalyticFunction::random(8, seed_for(cfg.seed, 8), "unit")?,
    ];
    let settle = run.window("settle");
    let mut partials = Vec::new();
    for g in &symbols {
        match operators::hilbert_schmidt_partial(&SymbolCoeffs::from_function(g), &w, 4 * k) {
            Ok(s) => partials.push(s),
            Err(Error::WellDefined(msg)) => {
                run.notes.push(format!("{msg}; Hilbert–Schmidt sums are not formed"));
                run.divergence = true;
                return Ok(());
            }
            Err(e) => return Err(e),
        }
    }
    for (g, s) in symbols.iter().zip(&partials) {
        let (s1, s2, s4) = (s[k], s[2 * k], s[4 * k]);
        let d = dirichlet_norm(&g.without_constant()).value.powi(2);
        let kv = [("g", g.tag.clone()), ("K", k.to_string()), ("weight", w.spec())];
        match extrapolate_limit(s1, s2, s4) {
            Some(lim) => run.cases.push(case(format!("dirichlet|{}", g.tag), "dirichlet", &kv, lim, d, CaseVerdict::Ok)),
            None => run.cases.push(case(format!("dirichlet|{}", g.tag), "dirichlet", &kv, s4, d, CaseVerdict::Violation)),
        }
        let ok = (s2 - s1).abs() < settle * s1;
        run.cases.push(case(format!("settle|{}", g.tag), "settle", &kv, s2, s1, if ok { CaseVerdict::Ok } else { CaseVerdict::Violation }));
    }
    run.check_spread("dirichlet", run.window("dirichlet"));
    let s = operators::hilbert_schmidt_partial(&SymbolCoeffs::log_kernel(), &w, 8 * 500)?;
    let ks = [500usize, 1000, 2000, 4000];
    let xs: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
    let ys: Vec<f64> = ks.iter().map(|&k| s[k]).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let c = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let slope = run.window("slope");
    for &k in &ks[..3] {
        let d = s[2 * k] - s[k];
        let ok = c > 0.0 && d >= LN_2 * c / slope && d <= LN_2 * c * slope;
        run.cases.push(case(
            format!("logk|K={k}"),
            "logk",
            &[("K", k.to_string()), ("c", sci(c)), ("weight", w.spec())],
            d,
            LN_2 * c,
            if ok { CaseVerdict::Ok } else { CaseVerdict::Violation },
        ));
    }
    run.notes.push(format!("log kernel: S_K grows like {} log K", sci(c)));
    let ks: Vec<usize> = (1..=200).collect();
    let suma = operators::suma_ratio(&w, &ks)?;
    for (k, v) in ks.iter().zip(&suma) {
        let verdict = if v.is_finite() { CaseVerdict::Ok } else { CaseVerdict::Divergent };
        run.cases.push(case(format!("suma|k={k}"), "suma", &[("k", k.to_string()), ("weight", w.spec())], v.value, 1.0, verdict));
    }
    if suma.iter().any(|v| !v.is_finite()) {
        run.notes.push("the suma block sums do not decay for this weight".into());
        run.divergence = true;
    }
    run.check_spread("suma", run.window("suma"));
    Ok(())
}

fn lem_limits(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let ps: Vec<f64> = cfg.p.map(|p| vec![p]).unwrap_or_else(|| vec![1.5, 2.0, 3.0]);
    let s = 2f64.powi(-30);
    for &p in &ps {
        for delta in [-0.75, -0.5, -0.25, 0.0, 0.25, 0.5] {
            let alpha = p - 2.0 + delta;
            if alpha <= -1.0 {
                continue;
            }
            let w = RadialWeight::standard(alpha)?;
            let lim = w.distortion_s(s) / s;
            let target = 1.0 / (p - 1.0);
            let expect = if delta < 0.0 { Verdict::Finite } else { Verdict::Divergent };
            let mp = weights::muckenhoupt(&w, p, &weights::muckenhoupt_grid())?.verdict;
            let c99 = weights::condition_99(&w, p)?;
            let limit_side = if delta < 0.0 { lim > target } else { lim <= target * (1.0 + 1e-6) };
            let ok = mp == expect && c99 == expect && limit_side;
            run.cases.push(case(
                format!("p={}|alpha={}", f(p), f(alpha)),
                &format!("p={}", f(p)),
                &[
                    ("p", f(p)),
                    ("alpha", f(alpha)),
                    ("expected", format!("{expect:?}")),
                    ("muckenhoupt", format!("{mp:?}")),
                    ("condition_99", format!("{c99:?}")),
                ],
                lim,
                target,
                if ok { CaseVerdict::Ok } else { CaseVerdict::Violation },
            ));
        }
    }
    run.notes.push("lhs = psi(r)/(1-r) at 1-r = 2^-30, rhs = 1/(p-1)".into());
    Ok(())
}

fn lip_constants(rho: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let ts: Vec<f64> = (1..=60).map(|j| 2f64.powf(-(j as f64) / 2.0)).collect();
    let mut dini = 0.0f64;
    let mut b1 = 0.0f64;
    for &t in &ts {
        let lo = quad::toward_zero(|s| rho(s) / s, t, quad::TAIL_TOL).value;
        let hi = quad::dyadic_between(|s| rho(s) / (s * s), t, 1.0);
        dini = dini.max(lo / rho(t));
        b1 = b1.max(hi * t / rho(t));
    }
    (dini, b1)
}

fn prop_lip(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let w = parse_weight(cfg.weight.as_deref().unwrap_or("std(alpha=-0.5)"))?;
    let p = cfg.p.unwrap_or(2.0);
    let q = cfg.q.unwrap_or(p);
    let (nw, _) = w.normalized();
    let symbols = vec![
        AnalyticFunction::monomial(1, 1.0).tagged("z".into()),
        AnalyticFunction::monomial(2, 1.0).tagged("z^2".into()),
        AnalyticFunction::from_real(&[0.0, 1.0, 0.0, 3.0]).tagged("z+3z^3".into()),
        AnalyticFunction::log_kernel(2048),
        AnalyticFunction::binomial(-0.5, 2048),
        AnalyticFunction::random(8, seed_for(cfg.seed, 9), "sym")?,
    ];
    let (wd, wb, ws) = (run.window("dini"), run.window("b1"), run.window("spread"));
    for eta in [0.0, 0.25] {
        let rho = |t: f64| t.powf(1.0 / p) * if eta == 0.0 { 1.0 } else { nw.tail_s(t).powf(eta) };
        let (dini, b1) = lip_constants(&rho);
        let kv = [("eta", f(eta)), ("p", f(p)), ("weight", w.spec())];
        run.cases.push(case(format!("dini|eta={}", f(eta)), "dini", &kv, dini, wd, if dini <= wd { CaseVerdict::Ok } else { CaseVerdict::Violation }));
        run.cases.push(case(format!("b1|eta={}", f(eta)), "b1", &kv, b1, wb, if b1 <= wb { CaseVerdict::Ok } else { CaseVerdict::Violation }));
        let group = format!("modulus|eta={}", f(eta));
        let rows: Vec<(f64, f64)> = symbols
            .par_iter()
            .map(|g| -> Result<(f64, f64)> {
                let sup = (0..=16).map(|j| {
                    let t = 2f64.powi(-j);
                    modulus_sup(g, q, t) / rho(t)
                });
                let lhs = g.coeff(0).norm() + sup.fold(0.0, f64::max);
                Ok((lhs, lambda_norm(g, q, 1.0 / p, eta, &nw)?.value))
            })
            .collect::<Result<_>>()?;
        for (g, &(l, r)) in symbols.iter().zip(&rows) {
            run.cases.push(case(format!("{group}|{}", g.tag), &group, &[("g", g.tag.clone()), ("eta", f(eta)), ("q", f(q))], l, r, CaseVerdict::Ok));
        }
        run.check_spread(&group, ws);
    }
    run.notes.push("dini/b1 cases: lhs = measured constant, rhs = window".into());
    Ok(())
}

fn ineq_minfty(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let weights = weights_or(cfg, &["const(c=1)", "std(alpha=-0.5)", "std(alpha=1)"])?;
    let ps: Vec<f64> = cfg.p.map(|p| vec![p]).unwrap_or_else(|| vec![1.5, 2.0, 3.0]);
    let corpus = minfty_corpus(cfg.seed)?;
    let bound = run.window("bound");
    let mut degrees: Vec<usize> = corpus.iter().map(|g| g.degree()).collect();
    degrees.sort();
    degrees.dedup();
    let rules: BTreeMap<(usize, usize), (quad::RadialRule, quad::RadialRule)> = weights
        .iter()
        .enumerate()
        .flat_map(|(i, w)| degrees.iter().map(move |&d| (i, d, w)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(i, d, w)| ((i, d), (tail_rule(w, d), norm_rule(w, d, 0.0, true))))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let samples: Vec<(Vec<f64>, Vec<Vec<f64>>)> = corpus
        .par_iter()
        .map(|g| {
            let nodes = radial_nodes(g.degree());
            let minf = nodes.iter().map(|&r| m_infinity(g, r).upper).collect();
            let mp = ps.iter().map(|&p| profile(g, p, &nodes)).collect();
            (minf, mp)
        })
        .collect();
    for (wi, w) in weights.iter().enumerate() {
        for (pi, &p) in ps.iter().enumerate() {
            for (g, (minf, mp)) in corpus.iter().zip(&samples) {
                let (tr, nr) = &rules[&(wi, g.degree())];
                let lhs = tr.integrate(&minf.iter().map(|m| m.powf(p)).collect::<Vec<_>>());
                let norm = if p == 2.0 {
                    bergman_norm(g, p, w)?.value
                } else {
                    nr.integrate(&mp[pi].iter().map(|m| m.powf(p)).collect::<Vec<_>>())
                };
                let rhs = bound * norm;
                let ok = lhs <= rhs;
                run.cases.push(case(
                    format!("{}|p={}|{}", w.spec(), f(p), g.tag),
                    &format!("{}|p={}", w.spec(), f(p)),
                    &[("weight", w.spec()), ("p", f(p)), ("f", g.tag.clone()), ("slack", sci(rhs - lhs))],
                    lhs,
                    rhs,
                    if ok { CaseVerdict::Ok } else { CaseVerdict::Violation },
                ));
            }
        }
    }
    run.notes.push("lhs = int M_inf^p w-hat dr (upper bracket of M_inf), rhs = (pi/2) ||f||^p".into());
    Ok(())
}

/// Some(true) if `v`, sampled at quarter-octave steps ending at co-radius
/// 2^{−40}, stays in a band of width 100 and settles over the last 20
/// octaves; Some(false) if it drifts by more than 1.5 there.
fn bounded_band(v: &[f64]) -> Option<bool> {
    if v.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Some(false);
    }
    let (lo, hi) = (v.iter().cloned().fold(f64::INFINITY, f64::min), v.iter().cloned().fold(0.0, f64::max));
    let n = v.len() - 1;
    let end = v[n] / v[n - 80];
    if hi / lo <= 100.0 && (1.0 / 1.2..=1.2).contains(&end) {
        Some(true)
    } else if !(1.0 / 1.5..=1.5).contains(&end) || hi / lo > 1e4 {
        Some(false)
    } else {
        None
    }
}

fn lem_up(run: &mut Run, cfg: &ScenarioConfig) -> Result<()> {
    let specs: Vec<String> = match &cfg.weight {
        Some(w) => vec![w.clone()],
        None => ["std(alpha=-0.5)", "std(alpha=0)", "std(alpha=0.5)", "std(alpha=1.5)", "logpow(beta=2)"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    let ps: Vec<f64> = cfg.p.map(|p| vec![p]).unwrap_or_else(|| vec![2.0, 3.0]);
    let grid = weights::diagnostic_coradii();
    for spec in &specs {
        let (w, _) = parse_weight(spec)?.normalized();
        for &p in &ps {
            let mp = weights::muckenhoupt(&w, p, &weights::muckenhoupt_grid())?.verdict;
            let e = -1.0 / (p - 1.0);
            let c99 = weights::condition_99(&w, p)?;
            let ii = match c99 {
                Verdict::Divergent => Some(false),
                Verdict::Undetermined => None,
                Verdict::Finite => {
                    let v: Vec<f64> = grid
                        .iter()
                        .map(|&s| quad::toward_zero(|t| w.tail_s(t).powf(e), s, quad::TAIL_TOL).value / (s * w.tail_s(s).powf(e)))
                        .collect();
                    bounded_band(&v)
                }
            };
            let iii = match weights::u_p_weight(&w, p) {
                Ok(u) => match weights::classify(&u, &weights::diagnostic_grid())?.verdict {
                    weights::Class::Regular => Some(true),
                    weights::Class::RapidlyIncreasing => Some(false),
                    weights::Class::Undetermined => None,
                },
                Err(Error::DivergentMass(_)) => Some(false),
                Err(e) => return Err(e),
            };
            // Q vanishes at r = 0; judge it from r = 1/2 on.
            let iv: Vec<f64> = grid[4..]
                .iter()
                .map(|&s| s.powf(p - 1.0) / w.tail_s(s) * quad::dyadic_between(|t| w.tail_s(t) * t.powf(-p), s, 1.0))
                .collect();
            let iv_ok = bounded_band(&iv);
            let i = match mp {
                Verdict::Finite => Some(true),
                Verdict::Divergent => Some(false),
                Verdict::Undetermined => None,
            };
            let all = [i, ii, iii, iv_ok];
            let verdict = if all.iter().any(|x| x.is_none()) {
                CaseVerdict::Info
            } else if all.iter().all(|x| *x == i) {
                CaseVerdict::Ok
            } else {
                CaseVerdict::Violation
            };
            let show = |x: Option<bool>| x.map_or("undetermined".to_string(), |b| b.to_string());
            let ivmax = iv.iter().cloned().fold(0.0, f64::max);
            let ivmin = iv.iter().cloned().fold(f64::INFINITY, f64::min);
            run.cases.push(case(
                format!("{}|p={}", w.spec(), f(p)),
                "sweep",
                &[
                    ("weight", spec.clone()),
                    ("p", f(p)),
                    ("i_mp", show(i)),
                    ("ii_regular", show(ii)),
                    ("iii_up_regular", show(iii)),
                    ("iv_bounded", show(iv_ok)),
                ],
                ivmax,
                ivmin,
                verdict,
            ));
            if verdict == CaseVerdict::Info {
                run.inconclusive = true;
            }
        }
    }
    run.notes.push("lhs/rhs = max/min over the grid of (1-r)^(p-1)/w-hat(r) int_0^r w-hat/(1-t)^p".into());
    Ok(())
}

/// One CSV document with the fixed column order.
pub fn render_csv(report: &ScenarioReport) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    wtr.write_record(["scenario", "case_id", "param_json", "lhs", "rhs", "ratio", "verdict"]).map_err(io)?;
    for c in &report.cases {
        let pj = serde_json::to_string(&c.params).map_err(|e| Error::Io(e.to_string()))?;
        wtr.write_record([
            report.scenario.as_str(),
            c.case_id.as_str(),
            pj.as_str(),
            sci(c.lhs).as_str(),
            sci(c.rhs).as_str(),
            sci(c.ratio).as_str(),
            c.verdict.as_str(),
        ])
        .map_err(io)?;
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn stats_json(s: &RatioStats) -> Value {
    json!({"min": sci(s.min), "max": sci(s.max), "spread": sci(s.spread), "count": s.count})
}

/// The report as JSON with sorted keys and `%.12e` float strings.
pub fn report_json(report: &ScenarioReport) -> Value {
    let cases: Vec<Value> = report
        .cases
        .iter()
        .map(|c| {
            json!({
                "case_id": c.case_id,
                "group": c.group,
                "params": c.params,
                "lhs": sci(c.lhs),
                "rhs": sci(c.rhs),
                "ratio": sci(c.ratio),
                "verdict": c.verdict.as_str(),
            })
        })
        .collect();
    let groups: Map<String, Value> = report.groups.iter().map(|(k, s)| (k.clone(), stats_json(s))).collect();
    let windows: Map<String, Value> = report.windows.iter().map(|(k, v)| (k.clone(), Value::String(sci(*v)))).collect();
    json!({
        "scenario": report.scenario,
        "verdict": report.verdict.as_str(),
        "stats": report.stats.as_ref().map(stats_json),
        "groups": groups,
        "windows": windows,
        "offending": report.offending,
        "notes": report.notes,
        "seeds": report.seeds,
        "cases": cases,
    })
}

pub fn render_json(report: &ScenarioReport) -> Result<String> {
    serde_json::to_string_pretty(&report_json(report)).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string()))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    v[key].as_str().ok_or_else(|| Error::Parse(format!("report field `{key}` missing or not a string")))
}

fn float_field(v: &Value, key: &str) -> Result<f64> {
    parse_sci(str_field(v, key)?)
}

fn stats_from(v: &Value) -> Result<RatioStats> {
    Ok(RatioStats {
        min: float_field(v, "min")?,
        max: float_field(v, "max")?,
        spread: float_field(v, "spread")?,
        count: v["count"].as_u64().ok_or_else(|| Error::Parse("stats count".into()))? as usize,
    })
}

fn strings(v: &Value, key: &str) -> Result<Vec<String>> {
    v[key]
        .as_array()
        .ok_or_else(|| Error::Parse(format!("report field `{key}` is not a list")))?
        .iter()
        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| Error::Parse(format!("`{key}` entry"))))
        .collect()
}

/// Inverse of [`render_json`]; the runtime is not stored and reads back as 0.
pub fn parse_report_json(text: &str) -> Result<ScenarioReport> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let cases = v["cases"]
        .as_array()
        .ok_or_else(|| Error::Parse("cases".into()))?
        .iter()
        .map(|c| -> Result<CaseRecord> {
            let params = c["params"]
                .as_object()
                .ok_or_else(|| Error::Parse("params".into()))?
                .iter()
                .map(|(k, x)| Ok((k.clone(), x.as_str().ok_or_else(|| Error::Parse("param value".into()))?.to_string())))
                .collect::<Result<_>>()?;
            Ok(CaseRecord {
                case_id: str_field(c, "case_id")?.to_string(),
                group: str_field(c, "group")?.to_string(),
                params,
                lhs: float_field(c, "lhs")?,
                rhs: float_field(c, "rhs")?,
                ratio: float_field(c, "ratio")?,
                verdict: CaseVerdict::parse(str_field(c, "verdict")?)?,
            })
        })
        .collect::<Result<_>>()?;
    let groups = v["groups"]
        .as_object()
        .ok_or_else(|| Error::Parse("groups".into()))?
        .iter()
        .map(|(k, s)| Ok((k.clone(), stats_from(s)?)))
        .collect::<Result<_>>()?;
    let windows = v["windows"]
        .as_object()
        .ok_or_else(|| Error::Parse("windows".into()))?
        .iter()
        .map(|(k, s)| Ok((k.clone(), parse_sci(s.as_str().ok_or_else(|| Error::Parse("window".into()))?)?)))
        .collect::<Result<_>>()?;
    let seeds = v["seeds"]
        .as_array()
        .ok_or_else(|| Error::Parse("seeds".into()))?
        .iter()
        .map(|x| x.as_u64().ok_or_else(|| Error::Parse("seed".into())))
        .collect::<Result<_>>()?;
    Ok(ScenarioReport {
        scenario: str_field(&v, "scenario")?.to_string(),
        cases,
        stats: if v["stats"].is_null() { None } else { Some(stats_from(&v["stats"])?) },
        groups,
        windows,
        verdict: ScenarioVerdict::parse(str_field(&v, "verdict")?)?,
        offending: strings(&v, "offending")?,
        notes: strings(&v, "notes")?,
        seeds,
        runtime_ms: 0,
    })
}

/// Writes the report as `csv` or `json`.
pub fn write_report(report: &ScenarioReport, format: &str, path: &Path) -> Result<()> {
    let text = match format {
        "csv" => render_csv(report)?,
        "json" => render_json(report)?,
        other => return Err(Error::Invalid(format!("unknown report format `{other}` (csv or json)"))),
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_examples() {
        let s = ratio_statistics(&[1.0, 2.0, 4.0]).unwrap();
        assert_eq!((s.min, s.max, s.spread), (1.0, 4.0, 4.0));
        assert_eq!(ratio_statistics(&[3.0]).unwrap().spread, 1.0);
        assert!(ratio_statistics(&[]).is_err());
    }

    #[test]
    fn every_scenario_has_windows() {
        for id in SCENARIOS {
            default_windows(id).unwrap();
        }
        assert!(default_windows("NOPE").is_err());
    }

    #[test]
    fn lacunary_generator_respects_ratio() {
        let w = RadialWeight::constant(1.0).unwrap();
        let e = lacunary_exponents(&w, 2.0, 1 << 20, 30, 5);
        assert!(e.windows(2).all(|p| p[1] >= 2 * p[0]));
    }
}
