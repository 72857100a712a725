use std::process::{Command, Output};

fn bergman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergman")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn decompose_prints_the_dyadic_table() {
    let o = bergman(&["decompose", "--weight", "const(c=1)", "--alpha", "1", "--max-degree", "64"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0].join(","), "n,r_n,M_n,block_lo,block_hi,block_Hp_norm,weight,contribution");
    let marks: Vec<u64> = rows[1..].iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(marks, vec![1, 2, 4, 8, 16, 32, 64]);
    assert_eq!(rows[2][1], "5.000000000000e-01");
}

#[test]
fn json_and_csv_carry_the_same_numbers() {
    let args = ["decompose", "--weight", "std(alpha=1)", "--alpha", "0.5", "--max-degree", "100"];
    let csv = stdout(&bergman(&args));
    let mut j = args.to_vec();
    j.push("--json");
    let json: serde_json::Value = serde_json::from_str(&stdout(&bergman(&j))).unwrap();
    let rows = csv_rows(&csv);
    let cols: Vec<String> = json["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
    assert_eq!(cols, rows[0]);
    let jrows: Vec<Vec<String>> = json["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect())
        .collect();
    assert_eq!(jrows, rows[1..].to_vec());
    assert_eq!(json["config"]["weight"], "std(alpha=1)");
}

#[test]
fn weights_inspect_reports_the_verdicts() {
    let o = bergman(&["weights", "inspect", "--weight", "std(alpha=-0.5)", "--p", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("class,regular"));
    assert!(text.contains("mp_verdict,finite"));
    assert!(text.contains("condition_99,finite"));
    assert!(text.contains("alpha_hat,"));
}

#[test]
fn apply_reproduces_the_hilbert_matrix() {
    let o = bergman(&["apply", "--g", "logk(deg=64)", "--f", "mono(m=3)", "--weight", "std(alpha=-0.5)", "--kmax", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], vec!["k", "re", "im"]);
    for k in 0..=5 {
        let re: f64 = rows[k + 1][1].parse().unwrap();
        assert!((re - 1.0 / (k + 4) as f64).abs() < 1e-12);
    }
}

#[test]
fn exit_codes_separate_domain_and_usage_errors() {
    let o = bergman(&["apply", "--g", "logk(deg=8)", "--f", "poly(1,1)", "--weight", "const(c=1)", "--p", "2", "--kmax", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not well defined"));
    assert_eq!(bergman(&["norms", "--f", "sin(1)", "--weight", "const"]).status.code(), Some(2));
    assert_eq!(bergman(&["decompose", "--weight", "const", "--alpha", "x"]).status.code(), Some(2));
    assert_eq!(bergman(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bergman(&["verify", "--scenario", "TH-NOPE"]).status.code(), Some(2));
    assert_eq!(bergman(&["--threads", "0", "norms", "--f", "poly(1)", "--weight", "const"]).status.code(), Some(2));
}

#[test]
fn help_lists_both_grammars() {
    let o = bergman(&["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for needle in ["Weight-spec grammar", "const/std/logpow/logprod/osc/table", "poly(1,0,2.5)", "rand(deg=512,seed=7,dist=unit)", "TH-GORRO"] {
        assert!(text.contains(needle), "missing {needle}");
    }
}

#[test]
fn hs_prints_partial_sums() {
    let o = bergman(&["hs", "--g", "mono(m=2)", "--weight", "std(alpha=-0.5)", "--kmax", "100", "--every", "50"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.iter().skip(1).map(|r| r[0].as_str()).collect::<Vec<_>>(), vec!["0", "50", "100"]);
    let s: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(s.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn norms_and_lacunary_run() {
    let o = bergman(&["norms", "--f", "mono(m=3)", "--weight", "const(c=1)", "--p", "2"]);
    let text = stdout(&o);
    // 2 ∫ r^7 dr = 1/4
    assert!(text.contains("bergman_p_power,2.500000000000e-01"), "{text}");
    let o = bergman(&["lacunary", "--weight", "const(c=1)", "--exponents", "1,2,4,8", "--q", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("lacunary,true"));
    let o = bergman(&["lacunary", "--weight", "const(c=1)", "--exponents", "1,2,4", "--coeffs", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_writes_a_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let p = path.to_str().unwrap();
    let o = bergman(&["verify", "--scenario", "TH-GORRO", "--weight", "std(alpha=-0.5)", "--p", "2", "--out", p]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read(&path).unwrap();
    assert!(first.starts_with(b"scenario,case_id,param_json,lhs,rhs,ratio,verdict\n"));
    bergman(&["--threads", "4", "verify", "--scenario", "TH-GORRO", "--weight", "std(alpha=-0.5)", "--p", "2", "--out", p]);
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn verify_json_and_window_overrides() {
    let o = bergman(&["--json", "verify", "--scenario", "LEM-LIMITS"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["scenario"], "LEM-LIMITS");
    assert_eq!(v["verdict"], "comparable");
    let o = bergman(&["verify", "--scenario", "TH-GORRO", "--window", "spread=1.01", "--strict"]);
    assert_eq!(o.status.code(), Some(1));
    let o = bergman(&["verify", "--scenario", "TH-GORRO", "--window", "spread"]);
    assert_eq!(o.status.code(), Some(2));
}
