use std::collections::BTreeMap;

use bergman::verify::{
    default_windows, parse_report_json, ratio_statistics, render_csv, render_json, run_scenario, windows_version,
    write_report, CaseVerdict, ScenarioConfig, ScenarioReport, ScenarioVerdict, SCENARIOS,
};
use bergman::Error;
use proptest::prelude::*;

fn empty_report() -> ScenarioReport {
    ScenarioReport {
        scenario: "TH-DEC".into(),
        cases: Vec::new(),
        stats: None,
        groups: BTreeMap::new(),
        windows: BTreeMap::new(),
        verdict: ScenarioVerdict::Inconclusive,
        offending: Vec::new(),
        notes: Vec::new(),
        seeds: Vec::new(),
        runtime_ms: 0,
    }
}

#[test]
fn ratio_statistics_examples() {
    let s = ratio_statistics(&[1.0, 2.0, 4.0]).unwrap();
    assert_eq!((s.min, s.max, s.spread, s.count), (1.0, 4.0, 4.0, 3));
    assert_eq!(ratio_statistics(&[3.0, 3.0]).unwrap().spread, 1.0);
    assert!(matches!(ratio_statistics(&[]), Err(Error::Invalid(_))));
    assert!(ratio_statistics(&[1.0, f64::NAN]).is_err());
}

#[test]
fn every_scenario_has_a_window_table() {
    assert!(windows_version() >= 1);
    for id in SCENARIOS {
        default_windows(id).unwrap();
    }
    assert_eq!(default_windows("TH-DEC").unwrap()["spread"], 32.0);
}

#[test]
fn empty_report_renders_a_header_only() {
    let csv = render_csv(&empty_report()).unwrap();
    assert_eq!(csv, "scenario,case_id,param_json,lhs,rhs,ratio,verdict\n");
}

#[test]
fn unknown_scenarios_are_errors() {
    assert!(run_scenario("TH-NOPE", &ScenarioConfig::default()).is_err());
}

#[test]
fn lem_limits_report_round_trips() {
    let r = run_scenario("lem-limits", &ScenarioConfig::default()).unwrap();
    assert_eq!(r.scenario, "LEM-LIMITS");
    assert_eq!(r.verdict, ScenarioVerdict::Comparable);
    assert!(r.cases.iter().all(|c| c.verdict == CaseVerdict::Ok));
    let text = render_json(&r).unwrap();
    let back = parse_report_json(&text).unwrap();
    let mut expect = r.clone();
    expect.runtime_ms = 0;
    assert_eq!(back, expect);
    assert_eq!(render_json(&back).unwrap(), text);
}

#[test]
fn reports_are_deterministic_for_a_seed() {
    let cfg = ScenarioConfig { seed: 5, ..ScenarioConfig::default() };
    let a = render_csv(&run_scenario("TH-LACSUP", &cfg).unwrap()).unwrap();
    let b = render_csv(&run_scenario("TH-LACSUP", &cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = render_csv(&run_scenario("TH-LACSUP", &ScenarioConfig { seed: 6, ..cfg }).unwrap()).unwrap();
    assert_ne!(a, other);
}

#[test]
fn csv_rows_follow_the_schema() {
    let r = run_scenario("TH-LACSUP", &ScenarioConfig::default()).unwrap();
    let text = render_csv(&r).unwrap();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rd.records().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), r.cases.len());
    for (row, case) in rows.iter().zip(&r.cases) {
        assert_eq!(&row[1], case.case_id);
        let params: BTreeMap<String, String> = serde_json::from_str(&row[2]).unwrap();
        assert_eq!(params, case.params);
        assert_eq!(row[3].parse::<f64>().unwrap(), case.lhs);
        assert_eq!(&row[6], case.verdict.as_str());
    }
}

#[test]
fn tight_window_overrides_produce_violations() {
    let mut windows = BTreeMap::new();
    windows.insert("spread".to_string(), 1.01);
    let cfg = ScenarioConfig { windows, ..ScenarioConfig::default() };
    let r = run_scenario("TH-GORRO", &cfg).unwrap();
    assert_eq!(r.verdict, ScenarioVerdict::Violation);
    assert!(!r.offending.is_empty());
    assert_eq!(r.windows["spread"], 1.01);
    assert_eq!(r.cases.iter().filter(|c| c.verdict == CaseVerdict::Violation).count(), 2);
}

#[test]
fn gorro_escapes_for_the_unit_weight() {
    let cfg = ScenarioConfig { weight: Some("const(c=1)".into()), ..ScenarioConfig::default() };
    let r = run_scenario("TH-GORRO", &cfg).unwrap();
    assert_eq!(r.verdict, ScenarioVerdict::DivergenceConsistent);
}

#[test]
fn reports_are_written_in_both_formats() {
    let r = run_scenario("LEM-LIMITS", &ScenarioConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("r.csv");
    let json_path = dir.path().join("r.json");
    write_report(&r, "csv", &csv_path).unwrap();
    write_report(&r, "json", &json_path).unwrap();
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), render_csv(&r).unwrap());
    let back = parse_report_json(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(back.cases, r.cases);
    assert!(write_report(&r, "xml", &csv_path).is_err());
}

proptest! {
    #[test]
    fn spread_is_at_least_one(v in proptest::collection::vec(1e-6f64..1e6, 1..50)) {
        let s = ratio_statistics(&v).unwrap();
        prop_assert!(s.spread >= 1.0);
        prop_assert!(v.iter().all(|&x| s.min <= x && x <= s.max));
    }
}
