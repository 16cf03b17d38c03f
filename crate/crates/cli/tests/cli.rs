use std::process::{Command, Output};

use serde_json::Value;

fn latmass(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_latmass"));
    cmd.args(args).env_remove("LATMASS_CEILING");
    cmd
}

fn run(args: &[&str]) -> (i32, Vec<Value>) {
    parse(latmass(args).output().unwrap())
}

fn parse(out: Output) -> (i32, Vec<Value>) {
    let code = out.status.code().unwrap();
    let records: Vec<Value> = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (code, records)
}

fn of<'a>(records: &'a [Value], kind: &str) -> Vec<&'a Value> {
    records.iter().filter(|r| r["record"] == kind).collect()
}

fn num(v: &Value) -> &str {
    v["num"].as_str().unwrap()
}

const COUNT: [&str; 9] = [
    "count", "--form", "1,1,1", "--u", "1,0,0", "--p", "3", "--k", "1",
];

#[test]
fn count_methods_agree() {
    let mut args = COUNT.to_vec();
    args.extend(["--methods", "oracle,convolution"]);
    let (code, recs) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(recs.len(), 2);
    for r in &recs {
        assert_eq!(r["count"], 6);
        assert_eq!(r["agree"], true);
    }
    assert_eq!(recs[0]["method"], "ORACLE");
    assert_eq!(recs[1]["method"], "CONVOLUTION");
}

#[test]
fn count_with_pivot() {
    let mut args = COUNT.to_vec();
    args.extend(["--pivot", "1", "--methods", "closed-form,oracle"]);
    let (code, recs) = run(&args);
    assert_eq!(code, 0);
    assert!(recs
        .iter()
        .all(|r| r["count"] == 2 && r["subset"] == serde_json::json!([1])));
    assert_eq!(recs[0]["pivot"], 1);
}

#[test]
fn closed_form_without_pivot_reports_each() {
    let (code, recs) = run(&[
        "count",
        "--form",
        "1,1,2",
        "--u",
        "1,1,0",
        "--p",
        "3",
        "--k",
        "2",
        "--methods",
        "closed-form,oracle",
    ]);
    assert_eq!(code, 0);
    let pivots: Vec<&Value> = recs.iter().map(|r| &r["subset"]).collect();
    assert_eq!(pivots.len(), 4);
    assert_eq!(pivots[0], &serde_json::json!([1]));
    assert_eq!(pivots[2], &serde_json::json!([2]));
}

#[test]
fn count_rejects_even_prime() {
    let (code, recs) = run(&[
        "count", "--form", "1,1,1", "--u", "1,0,0", "--p", "2", "--k", "1",
    ]);
    assert_eq!(code, 2);
    assert_eq!(recs[0]["record"], "error");
    assert_eq!(recs[0]["kind"], "InvalidPrime");
}

#[test]
fn ceiling_from_environment() {
    let mut args = COUNT.to_vec();
    args.extend(["--methods", "oracle"]);
    let out = latmass(&args)
        .env("LATMASS_CEILING", "10")
        .output()
        .unwrap();
    let (code, recs) = parse(out);
    assert_eq!(code, 2);
    assert_eq!(recs[0]["kind"], "TooLarge");
    let out = latmass(&args)
        .env("LATMASS_CEILING", "oracle=27,convolution=3")
        .output()
        .unwrap();
    assert_eq!(parse(out).0, 0);
}

#[test]
fn mass_bound_totals() {
    for (c, general, closed) in [("3", "3", "1"), ("15", "45", "5")] {
        let (code, recs) = run(&["mass-bound", "--form", "1,1,1", "--u", "1,0,0", "--c", c]);
        assert_eq!(code, 0);
        let totals = of(&recs, "mass_total");
        assert_eq!(totals[0]["mode"], "GENERAL");
        assert_eq!(num(&totals[0]["total"]), general);
        assert_eq!(totals[1]["mode"], "DIAGONAL_CLOSED_FORM");
        assert_eq!(num(&totals[1]["total"]), closed);
    }
}

#[test]
fn mass_bound_gcd_violation() {
    let (code, recs) = run(&["mass-bound", "--form", "1,3,1", "--u", "0,1,0", "--c", "3"]);
    assert_eq!(code, 2);
    assert_eq!(recs[0]["kind"], "GcdHypothesisViolated");
    assert_eq!(recs[0]["prime"], 3);
}

#[test]
fn even_conductor_rejected() {
    let (code, recs) = run(&["mass-bound", "--form", "1,1,1", "--u", "1,0,0", "--c", "6"]);
    assert_eq!(code, 2);
    assert_eq!(recs[0]["kind"], "EvenConductor");
}

#[test]
fn class_bound_crosses_one() {
    let base = [
        "class-bound",
        "--form",
        "1,1,1",
        "--u",
        "1,0,0",
        "--mass-of-L",
        "1/48",
        "--c",
    ];
    let (_, recs) = run(&[&base[..], &["81"]].concat());
    assert_eq!(recs[0]["h_at_least"], "1");
    assert!(recs[0]["lo"]["approx"].as_f64().unwrap() < 1.0);
    let (code, recs) = run(&[&base[..], &["83"]].concat());
    assert_eq!(code, 0);
    assert_eq!(recs[0]["h_at_least"], "2");
}

#[test]
fn mass_bound_includes_class_bound() {
    let (_, recs) = run(&[
        "mass-bound",
        "--form",
        "1,1,1",
        "--u",
        "1,0,0",
        "--c",
        "83",
        "--mass-of-L",
        "1/48",
    ]);
    assert_eq!(of(&recs, "class_bound").len(), 1);
}

fn table_rows(recs: &[Value]) -> Vec<(u64, u64)> {
    recs.iter()
        .map(|r| (r["rank"].as_u64().unwrap(), r["c_max"].as_u64().unwrap()))
        .collect()
}

const TABLE: [(u64, u64); 8] = [
    (3, 81),
    (4, 49),
    (5, 23),
    (6, 23),
    (7, 23),
    (8, 33),
    (9, 23),
    (10, 19),
];

#[test]
fn table1_defaults_and_auto() {
    let (code, recs) = run(&["table1"]);
    assert_eq!(code, 0);
    assert_eq!(table_rows(&recs), TABLE);
    let (_, auto) = run(&["table1", "--delta", "1/2", "--c-lo", "auto"]);
    assert_eq!(table_rows(&auto), TABLE);
    assert!(auto[0]["c_lo"]["approx"].as_f64().unwrap() > 0.065);
}

#[test]
fn table1_csv_shape() {
    let out = latmass(&["table1", "--format", "csv"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rd.headers().unwrap().iter().next(), Some("record"));
    assert_eq!(rd.records().count(), 8);
}

#[test]
fn text_output_is_a_table() {
    let out = latmass(&["table1", "--format", "text"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("[conductor_bound]"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn cdelta_enclosure() {
    let (code, recs) = run(&["cdelta"]);
    assert_eq!(code, 0);
    assert_eq!(recs[0]["primes"], serde_json::json!([3, 5, 7]));
    let lo = recs[0]["lo"]["approx"].as_f64().unwrap();
    let hi = recs[0]["hi"]["approx"].as_f64().unwrap();
    assert!(0.065 <= lo && hi <= 0.0652 && hi - lo <= 1e-4);
}

#[test]
fn structure_record() {
    let (code, recs) = run(&[
        "structure",
        "--form",
        "1,9",
        "--p",
        "3",
        "--x",
        "3,1",
        "--y",
        "3,1",
    ]);
    assert_eq!(code, 0);
    let r = &recs[0];
    assert_eq!(r["order"], 1);
    assert_eq!(r["association"], "YES");
    assert_eq!(
        r["james"].as_array().unwrap().len(),
        r["critical_indices"].as_array().unwrap().len()
    );
    let (_, recs) = run(&[
        "structure",
        "--form",
        "1,1",
        "--p",
        "3",
        "--x",
        "3,0",
        "--precision",
        "3",
    ]);
    assert!(recs[0]["depth"].is_null());
    let (code, recs) = run(&[
        "structure",
        "--form",
        "1,1",
        "--p",
        "3",
        "--x",
        "9,0",
        "--precision",
        "2",
    ]);
    assert_eq!(code, 2);
    assert_eq!(recs[0]["kind"], "InvalidInput");
}

#[test]
fn job_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("job.json");
    std::fs::write(
        &job,
        r#"{"command": "count", "form": [1,1,1], "u": [1,0,0], "p": 3, "k": 1,
            "S": [1], "methods": ["oracle", "convolution"]}"#,
    )
    .unwrap();
    let (code, recs) = run(&["--job", job.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(recs.iter().all(|r| r["count"] == 2));

    std::fs::write(&job, r#"{"command": "table1", "format": "csv"}"#).unwrap();
    let out = latmass(&["--job", job.to_str().unwrap()]).output().unwrap();
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("record,"));

    std::fs::write(&job, r#"{"command": "table1", "colour": "red"}"#).unwrap();
    let out = latmass(&["--job", job.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(&job, r#"{"command": "count", "form": [1,1,1]}"#).unwrap();
    let out = latmass(&["--job", job.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = latmass(&["table1", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let recs: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(table_rows(&recs), TABLE);
}

#[test]
fn verify_small_grid() {
    let (code, recs) = run(&["verify", "--max-pk", "9", "--jobs", "2"]);
    assert_eq!(code, 0);
    let summary = &recs[0];
    assert_eq!(summary["record"], "verify_summary");
    assert_eq!(summary["violations"], 0);
    assert!(summary["cells"].as_u64().unwrap() >= 500);
    assert_eq!(of(&recs, "verify_property").len(), 8);
}

#[test]
fn verify_reports_injected_fault() {
    let (code, recs) = run(&["verify", "--max-pk", "3", "--inject-fault"]);
    assert_eq!(code, 1);
    let v = of(&recs, "violation");
    assert_eq!(v.len(), 1);
    assert_eq!(v[0]["property"], "oracle_convolution");
}

const JOBS: &[&[&str]] = &[
    &[
        "count",
        "--form",
        "1,1,1",
        "--u",
        "1,0,0",
        "--p",
        "3",
        "--k",
        "2",
        "--methods",
        "oracle,convolution,closed-form",
    ],
    &[
        "count", "--form", "1,3,5", "--u", "1,1,0", "--p", "5", "--k", "1", "-S", "1,2", "--r", "1",
    ],
    &[
        "mass-bound",
        "--form",
        "1,1,1",
        "--u",
        "1,1,1",
        "--c",
        "45",
        "--mass-of-L",
        "1/48",
    ],
    &[
        "class-bound",
        "--form",
        "1,1,1",
        "--u",
        "1,0,0",
        "--c",
        "83",
        "--mass-of-L",
        "1/48",
    ],
    &["table1"],
    &["cdelta", "--delta", "1/3"],
    &[
        "structure",
        "--form",
        "1,3,9",
        "--p",
        "3",
        "--x",
        "3,1,1",
        "--y",
        "3,2,1",
    ],
    &["verify", "--max-pk", "3"],
    &[
        "count", "--form", "1,1,1", "--u", "1,0,0", "--p", "9", "--k", "1",
    ],
    &["mass-bound", "--form", "1,3,1", "--u", "0,1,0", "--c", "3"],
];

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/records.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

#[test]
fn records_match_schema() {
    let validator = schema();
    for args in JOBS {
        let (_, recs) = run(args);
        let doc = Value::Array(recs);
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
}

#[test]
fn schema_rejects_malformed() {
    let validator = schema();
    let bad = serde_json::json!([{"record": "count", "count": -1}]);
    assert!(!validator.is_valid(&bad));
    let bad = serde_json::json!([{"record": "c_delta", "delta": {"num": "1", "den": "0", "approx": 0.0},
        "lo": 1, "hi": 1, "width": 1, "primes": []}]);
    assert!(!validator.is_valid(&bad));
}

/// How a JSON value appears in a CSV cell.
fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        Value::Object(o) if o.contains_key("num") => {
            format!("{}/{}", num(v), v["den"].as_str().unwrap())
        }
        other => other.to_string(),
    }
}

#[test]
fn csv_and_json_carry_the_same_values() {
    for args in JOBS {
        let (_, recs) = run(args);
        let out = latmass(&[&args[..], &["--format", "csv"]].concat())
            .output()
            .unwrap();
        let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
        let headers = rd.headers().unwrap().clone();
        let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), recs.len(), "{args:?}");
        for (row, rec) in rows.iter().zip(&recs) {
            for (h, cell) in headers.iter().zip(row.iter()) {
                let want = rec.get(h).map(|v| {
                    if v.is_array() && v.as_array().unwrap().iter().any(Value::is_object) {
                        v.to_string()
                    } else {
                        csv_cell(v)
                    }
                });
                assert_eq!(cell, want.unwrap_or_default(), "{args:?} column {h}");
            }
        }
    }
}
