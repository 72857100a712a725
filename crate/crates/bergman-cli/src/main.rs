use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bergman::analytic::{self, parse_function, AnalyticFunction};
use bergman::decomposition::{self, block_norms};
use bergman::grammar::sci;
use bergman::operators::{self, OperatorSetting, SymbolCoeffs};
use bergman::verify::{self, ScenarioConfig, SCENARIOS};
use bergman::weights::{self, parse_weight};
use bergman::{Error, Verdict};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

const GRAMMARS: &str = "\
Weight-spec grammar (ASCII): `family` `(` key `=` float {`,` key `=` float} `)`; families const/std/logpow/logprod/osc/table; table takes `path=` to a two-column CSV `r,omega` with header. Exposed through every CLI subcommand's `--weight` flag.

  const(c=1)             ω ≡ c
  std(alpha=a)           (1 − r²)^a, a > −1
  pow(a=a)               (1 − r)^a, a > −1
  logpow(beta=b)         (1 − r)^{−1} log(e/(1 − r))^{−b}, b > 1
  logprod(n=N,alpha=a)   ((1−r) L₁⋯L_N L_{N+1}^a)^{−1}, a > 1
  osc                    tail 2(1−r)cos((1−r)^{−1/2}) + 16(1−r)^{1/2}
  table(path=FILE)       log-linear interpolation of r,omega samples
  Every family also takes scale=c.

Function-spec strings for the CLI: `poly(1,0,2.5)` (coefficient list), `logk(deg=2048)` for the truncated log(1/(1−z)), `binom(s=0.5,deg=2048)` for (1−z)^{−s} truncations, `rand(deg=512,seed=7,dist=unit)`; corpus files: one function-spec per line.

  mono(m=M,c=C)          C z^M
  rand dist is one of unit, sym, sign; deg defaults to 2048 for logk and binom.

Scenarios: TH-DEC COR-PREV TH-LAC TH-LACSUP TH-GORRO COR-HILB TH-MAIN-PQ
  TH-MAIN-QP TH-COMPACT TH-HS LEM-LIMITS PROP-LIP INEQ-MINFTY LEM-UP, or all.

Floats are printed as %.12e. Exit status: 0 success, 1 domain error,
2 usage error.";

#[derive(Parser)]
#[command(name = "bergman", version, about = "Weighted Bergman space computations", after_help = GRAMMARS)]
struct Cli {
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV (the default).
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Weight diagnostics.
    Weights {
        #[command(subcommand)]
        cmd: WeightsCmd,
    },
    /// Block partition table with block norms of a function.
    Decompose(DecomposeArgs),
    /// Coefficients of the generalized Hilbert operator H_g(f).
    Apply(ApplyArgs),
    /// Hilbert–Schmidt partial sums (K, S_K).
    Hs(HsArgs),
    /// Lacunary series checks and sums.
    Lacunary(LacunaryArgs),
    /// Run a verification scenario.
    Verify(VerifyArgs),
    /// Norms of a function.
    Norms(NormsArgs),
}

#[derive(Subcommand)]
enum WeightsCmd {
    /// Classification, regularity exponents, M_p and integrability of ŵ^{−1/(p−1)}.
    Inspect {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    weight: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 64)]
    max_degree: usize,
    /// Function whose blocks are measured; defaults to logk(deg=max-degree).
    #[arg(long)]
    f: Option<String>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Exponent in the contribution 2^{−nα}‖Δ_n f‖^q; defaults to p.
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Args)]
struct ApplyArgs {
    #[arg(long)]
    g: String,
    #[arg(long)]
    f: String,
    #[arg(long)]
    weight: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, default_value_t = 64)]
    kmax: usize,
}

#[derive(Args)]
struct HsArgs {
    /// Symbol; the bare name `logk` means the untruncated log kernel.
    #[arg(long)]
    g: String,
    #[arg(long)]
    weight: String,
    #[arg(long, default_value_t = 2000)]
    kmax: usize,
    /// Print every N-th partial sum.
    #[arg(long, default_value_t = 1)]
    every: usize,
}

#[derive(Args)]
struct LacunaryArgs {
    #[arg(long)]
    weight: String,
    /// Comma-separated increasing exponents n_k.
    #[arg(long, value_delimiter = ',')]
    exponents: Vec<u64>,
    /// Comma-separated coefficients a_k; all 1 when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    /// Also run the coefficient test for H(p, ∞, ŵ^β).
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Window override, e.g. `spread=20`; repeatable.
    #[arg(long = "window", value_parser = parse_window)]
    windows: Vec<(String, f64)>,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 1 when a scenario reports a violation.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct NormsArgs {
    #[arg(long)]
    f: String,
    #[arg(long)]
    weight: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
}

fn parse_window(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected key=value")?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::UnknownFamily(_) => 2,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: String) -> Failure {
    Failure { code: 2, msg }
}

/// Rows rendered identically as CSV or JSON strings.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    config: BTreeMap<&'static str, String>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new(), config: BTreeMap::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render(&self, json_out: bool) -> Result<String, Failure> {
        if json_out {
            let v = json!({ "config": self.config, "columns": self.columns, "rows": self.rows });
            return Ok(serde_json::to_string_pretty(&v).expect("json") + "\n");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Failure { code: 1, msg: e.to_string() };
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Failure { code: 1, msg: e.to_string() })?;
        Ok(String::from_utf8(bytes).expect("utf8"))
    }
}

fn verdict_str(v: Verdict) -> String {
    format!("{v:?}").to_lowercase()
}

fn weights_inspect(weight: &str, p: f64) -> Result<Table, Failure> {
    let w = parse_weight(weight)?;
    let grid = weights::diagnostic_grid();
    let c = weights::classify(&w, &grid)?;
    let mp = weights::muckenhoupt(&w, p, &weights::muckenhoupt_grid())?;
    let c99 = weights::condition_99(&w, p)?;
    let mut t = Table::new(&["key", "value"]);
    t.config.insert("weight", w.spec());
    t.config.insert("p", sci(p));
    t.push(vec!["weight".into(), w.spec()]);
    t.push(vec!["mass".into(), sci(w.mass())]);
    t.push(vec!["class".into(), format!("{:?}", c.verdict).to_lowercase()]);
    t.push(vec!["psi_ratio_min".into(), sci(c.ratio_min)]);
    t.push(vec!["psi_ratio_max".into(), sci(c.ratio_max)]);
    if let Some((a, b)) = c.exponents {
        t.push(vec!["alpha_hat".into(), sci(a)]);
        t.push(vec!["beta_hat".into(), sci(b)]);
    }
    t.push(vec!["mp_value".into(), sci(mp.value)]);
    t.push(vec!["mp_verdict".into(), verdict_str(mp.verdict)]);
    if let Some(e) = mp.diagnostics.exponent {
        t.push(vec!["boundary_exponent_ratio".into(), sci(e)]);
    }
    t.push(vec!["condition_99".into(), verdict_str(c99)]);
    Ok(t)
}

fn decompose(a: &DecomposeArgs) -> Result<Table, Failure> {
    let w = parse_weight(&a.weight)?;
    let (nw, _) = w.normalized();
    let part = decomposition::partition(&nw, a.alpha, a.max_degree)?;
    let f = match &a.f {
        Some(s) => parse_function(s)?,
        None => AnalyticFunction::log_kernel(a.max_degree),
    };
    if f.degree() > a.max_degree {
        return Err(usage(format!("function degree {} exceeds --max-degree {}", f.degree(), a.max_degree)));
    }
    let q = a.q.unwrap_or(a.p);
    let norms = block_norms(&f, a.p, &part);
    let mut t = Table::new(&["n", "r_n", "M_n", "block_lo", "block_hi", "block_Hp_norm", "weight", "contribution"]);
    t.config.insert("weight", w.spec());
    t.config.insert("alpha", sci(a.alpha));
    t.config.insert("f", f.tag.clone());
    t.config.insert("p", sci(a.p));
    t.config.insert("q", sci(q));
    for (row, b) in part.rows().iter().zip(&norms) {
        let wt = 2f64.powf(-(row.n as f64) * a.alpha);
        t.push(vec![
            row.n.to_string(),
            sci(row.r_n),
            row.m_n.to_string(),
            row.lo.to_string(),
            row.hi.to_string(),
            sci(*b),
            sci(wt),
            sci(wt * b.powf(q)),
        ]);
    }
    Ok(t)
}

fn apply(a: &ApplyArgs) -> Result<Table, Failure> {
    let w = parse_weight(&a.weight)?;
    let g = parse_function(&a.g)?;
    let f = parse_function(&a.f)?;
    let q = a.q.unwrap_or(a.p);
    let setting = OperatorSetting::new(a.p, q, &w)?;
    let h = operators::apply_generalized(&g, &f, a.kmax, &setting)?;
    let mut t = Table::new(&["k", "re", "im"]);
    t.config.insert("weight", w.spec());
    t.config.insert("g", g.tag.clone());
    t.config.insert("f", f.tag.clone());
    for k in 0..=a.kmax {
        let c = h.coeff(k);
        t.push(vec![k.to_string(), sci(c.re), sci(c.im)]);
    }
    Ok(t)
}

fn hs(a: &HsArgs) -> Result<Table, Failure> {
    let w = parse_weight(&a.weight)?;
    let (sym, tag) = if a.g.trim() == "logk" {
        (SymbolCoeffs::log_kernel(), "logk".to_string())
    } else {
        let g = parse_function(&a.g)?;
        (SymbolCoeffs::from_function(&g), g.tag)
    };
    if a.every == 0 {
        return Err(usage("--every must be positive".into()));
    }
    let s = operators::hilbert_schmidt_partial(&sym, &w, a.kmax)?;
    let mut t = Table::new(&["K", "S_K"]);
    t.config.insert("weight", w.spec());
    t.config.insert("g", tag);
    for (k, v) in s.iter().enumerate() {
        if k % a.every == 0 || k == a.kmax {
            t.push(vec![k.to_string(), sci(*v)]);
        }
    }
    Ok(t)
}

fn lacunary(a: &LacunaryArgs) -> Result<Table, Failure> {
    let w = parse_weight(&a.weight)?;
    let (nw, _) = w.normalized();
    if a.exponents.is_empty() {
        return Err(usage("--exponents is required".into()));
    }
    let coeffs = if a.coeffs.is_empty() { vec![1.0; a.exponents.len()] } else { a.coeffs.clone() };
    if coeffs.len() != a.exponents.len() {
        return Err(usage("--coeffs and --exponents differ in length".into()));
    }
    let chk = decomposition::is_omega_lacunary(&a.exponents, &nw, a.lambda)?;
    let top = *a.exponents.last().unwrap() as usize;
    let part = decomposition::partition(&nw, 1.0, top)?;
    let v = decomposition::lacunary_norm(&coeffs, &a.exponents, a.q, &nw)?;
    let sums = decomposition::lacunary_block_sums(&coeffs, &a.exponents, a.q, &part)?;
    let mut t = Table::new(&["key", "value"]);
    t.config.insert("weight", w.spec());
    t.config.insert("q", sci(a.q));
    t.config.insert("lambda", sci(a.lambda));
    t.push(vec!["lacunary".into(), chk.lacunary.to_string()]);
    t.push(vec!["min_ratio".into(), sci(chk.min_ratio)]);
    t.push(vec!["sum_ii".into(), sci(sums[0])]);
    t.push(vec!["sum_iii".into(), sci(sums[1])]);
    t.push(vec!["sum_iv".into(), sci(sums[2])]);
    t.push(vec!["sum_v".into(), sci(v.value)]);
    if let Some(beta) = a.beta {
        let s = decomposition::lacunary_sup_test(&coeffs, &a.exponents, &nw, beta)?;
        t.push(vec!["sup_margin".into(), sci(s.margin)]);
        t.push(vec!["sup_member".into(), s.member.to_string()]);
    }
    Ok(t)
}

fn norms(a: &NormsArgs) -> Result<Table, Failure> {
    let w = parse_weight(&a.weight)?;
    let f = parse_function(&a.f)?;
    let p = a.p;
    let mut t = Table::new(&["norm", "value"]);
    t.config.insert("weight", w.spec());
    t.config.insert("f", f.tag.clone());
    t.push(vec!["bergman_p_power".into(), sci(analytic::bergman_norm(&f, p, &w)?.value)]);
    t.push(vec!["bergman".into(), sci(analytic::bergman_norm_root(&f, p, &w)?)]);
    t.push(vec!["hardy".into(), sci(analytic::hardy_norm_poly(&f, p))]);
    if let Some(q) = a.q {
        t.push(vec!["mixed".into(), sci(analytic::mixed_norm(&f, p, q, &w, a.gamma)?.value)]);
    }
    if let Some(alpha) = a.alpha {
        let q = a.q.unwrap_or(p);
        t.push(vec!["lambda".into(), sci(analytic::lambda_norm(&f, q, alpha, a.eta, &w)?.value)]);
    }
    t.push(vec!["dirichlet".into(), sci(analytic::dirichlet_norm(&f).value)]);
    t.push(vec!["minfty_integral".into(), sci(analytic::minfty_integral(&f, p, &w))]);
    Ok(t)
}

fn verify_cmd(a: &VerifyArgs, json_out: bool) -> Result<(String, bool), Failure> {
    let ids: Vec<&str> = if a.scenario.eq_ignore_ascii_case("all") {
        SCENARIOS.to_vec()
    } else {
        vec![a.scenario.as_str()]
    };
    if let Some(id) = ids.iter().find(|id| !SCENARIOS.iter().any(|s| s.eq_ignore_ascii_case(id))) {
        return Err(usage(format!("unknown scenario `{id}`; known: {}", SCENARIOS.join(", "))));
    }
    let cfg = ScenarioConfig {
        weight: a.weight.clone(),
        p: a.p,
        q: a.q,
        degree: a.degree,
        seed: a.seed,
        windows: a.windows.iter().cloned().collect(),
    };
    let mut out = String::new();
    let mut violated = false;
    let mut reports: Vec<Value> = Vec::new();
    for (i, id) in ids.iter().enumerate() {
        let r = verify::run_scenario(id, &cfg)?;
        violated |= r.verdict == verify::ScenarioVerdict::Violation;
        eprintln!("{}: {} ({} cases)", r.scenario, r.verdict.as_str(), r.cases.len());
        if json_out {
            reports.push(verify::report_json(&r));
        } else {
            let csv = verify::render_csv(&r)?;
            // One header for concatenated reports.
            out.push_str(if i == 0 { &csv } else { csv.split_once('\n').map_or("", |x| x.1) });
        }
    }
    if json_out {
        let v = if reports.len() == 1 { reports.pop().unwrap() } else { Value::Array(reports) };
        out = serde_json::to_string_pretty(&v).expect("json") + "\n";
    }
    Ok((out, violated))
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.threads == 0 {
        return Err(usage("--threads must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| Failure { code: 1, msg: e.to_string() })?;
    let json_out = cli.json;
    let (text, path, fail) = match &cli.cmd {
        Cmd::Weights { cmd: WeightsCmd::Inspect { weight, p } } => (weights_inspect(weight, *p)?.render(json_out)?, None, false),
        Cmd::Decompose(a) => (decompose(a)?.render(json_out)?, None, false),
        Cmd::Apply(a) => (apply(a)?.render(json_out)?, None, false),
        Cmd::Hs(a) => (hs(a)?.render(json_out)?, None, false),
        Cmd::Lacunary(a) => (lacunary(a)?.render(json_out)?, None, false),
        Cmd::Norms(a) => (norms(a)?.render(json_out)?, None, false),
        Cmd::Verify(a) => {
            let (text, violated) = verify_cmd(a, json_out)?;
            (text, a.out.clone(), violated && a.strict)
        }
    };
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", p.display()) })?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure { code: 1, msg: e.to_string() })?;
        }
    }
    if fail {
        return Err(Failure { code: 1, msg: "scenario reported a violation".into() });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
