#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pauligeo"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("pauligeo runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn schema() -> Value {
    let text = std::fs::read_to_string(crate_dir().join("schema/output.schema.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn golden_table() -> String {
    std::fs::read_to_string(crate_dir().join("tests/golden/table.csv")).unwrap()
}

/// `(args, expected exit code)` for every error path plus one success per command.
pub fn exit_code_matrix(schedule: &Path, bad_schedule: &Path) -> Vec<(Vec<String>, i32)> {
    let s = schedule.to_str().unwrap();
    let b = bad_schedule.to_str().unwrap();
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["classify", "1", "1", "1"], 0),
        (vec!["classify", "0.25", "0.25", "0.25", "--format", "json"], 0),
        (vec!["classify", "1", "1"], 2),
        (vec!["classify", "1", "x", "1"], 2),
        (vec!["classify", "NaN", "0", "0"], 2),
        (vec!["classify", "1", "1", "1", "--format", "yaml"], 2),
        (vec!["volume", "--region", "CPT"], 0),
        (vec!["volume", "--region", "CPT,TLG", "--method", "exact"], 0),
        (vec!["volume", "--region", "CPDIV", "--method", "exact"], 1),
        (vec!["volume", "--region", "CPT,CPDIV", "--method", "exact"], 1),
        (
            vec!["volume", "--region", "PT", "--method", "fr", "--samples", "1000"],
            1,
        ),
        (
            vec!["volume", "--region", "TLG", "--method", "fr", "--samples", "1000"],
            1,
        ),
        (
            vec!["volume", "--region", "CPT", "--method", "fr", "--samples", "1000"],
            0,
        ),
        (
            vec!["volume", "--region", "CPT,CPDIV", "--method", "mc", "--samples", "1000"],
            0,
        ),
        (vec!["volume", "--region", "FOO"], 2),
        (vec!["volume", "--region", ""], 2),
        (vec!["volume", "--region", "CPT", "--method", "bogus"], 2),
        (vec!["volume", "--region", "CPT", "--method", "mc", "--samples", "0"], 2),
        (
            vec!["volume", "--region", "CPT", "--method", "mc", "--samples", "-5"],
            2,
        ),
        (vec!["table", "--samples", "1000"], 0),
        (vec!["mesh", "--region", "CPT,EBC"], 0),
        (vec!["mesh", "--region", "CPDIV"], 1),
        (vec!["mesh", "--region", "NOPE"], 2),
        (vec!["sample", "--region", "CPT", "-n", "3", "--seed", "1"], 0),
        (
            vec![
                "sample",
                "--region",
                "CPT",
                "-n",
                "3",
                "--seed",
                "1",
                "--chunk-size",
                "0",
            ],
            2,
        ),
        (vec!["sample", "--region", "NOPE", "-n", "3"], 2),
        (vec!["sample", "--region", "CPT"], 2),
        (vec!["evolve", "--schedule", s, "-t", "1"], 0),
        (vec!["evolve", "--schedule", s, "--steps", "4"], 0),
        (vec!["evolve", "--schedule", s, "-t", "5"], 2),
        (vec!["evolve", "--schedule", b], 2),
        (vec!["evolve", "--schedule", "/nonexistent/schedule.json"], 2),
        (vec!["evolve"], 2),
        (vec!["evolve", "--target", "0.9", "0.8", "0.95"], 0),
        (vec!["evolve", "--target", "0.9", "-0.8", "0.95"], 1),
        (vec!["evolve", "--target", "0.9", "0.8"], 2),
        (vec!["frobnicate"], 2),
    ];
    cases
        .into_iter()
        .map(|(a, c)| (a.iter().map(|s| s.to_string()).collect(), c))
        .collect()
}

/// Runs the matrix and returns a description of each mismatch.
pub fn exit_code_mismatches() -> Vec<String> {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("depolarizing.json");
    let bad = dir.path().join("bad.json");
    std::fs::write(&good, r#"[{"duration": 1.0, "rates": [1.0, 1.0, 1.0]}]"#).unwrap();
    std::fs::write(&bad, r#"[{"duration": 1.0, "rates": [1.0, 1.0]}]"#).unwrap();
    exit_code_matrix(&good, &bad)
        .into_iter()
        .filter_map(|(args, want)| {
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let got = code(&refs);
            (got != want).then(|| format!("{args:?}: expected {want}, got {got}"))
        })
        .collect()
}

/// Compares a table CSV against the golden file: the first three columns must
/// match byte for byte, the seeded Monte Carlo value must sit within three
/// standard errors of the reported value.
pub fn table_mismatches(actual: &str) -> Vec<String> {
    let golden = golden_table();
    let mut problems = Vec::new();
    let g: Vec<&str> = golden.lines().collect();
    let a: Vec<&str> = actual.lines().collect();
    if g.len() != a.len() {
        problems.push(format!("{} rows vs {} golden", a.len(), g.len()));
        return problems;
    }
    if g[0] != a[0] {
        problems.push(format!("header {:?} vs {:?}", a[0], g[0]));
    }
    for (gl, al) in g.iter().zip(&a).skip(1) {
        let gc: Vec<&str> = gl.split(',').collect();
        let ac: Vec<&str> = al.split(',').collect();
        if ac.len() != 5 || gc[..3] != ac[..3] {
            problems.push(format!("row {al:?} vs golden {gl:?}"));
            continue;
        }
        let reported = parse_fraction(ac[1]);
        let mc: f64 = ac[3].parse().unwrap();
        let se: f64 = ac[4].parse().unwrap();
        if (mc - reported).abs() > 3.0 * se && mc != reported {
            problems.push(format!("{}: mc {mc} ± {se} vs {reported}", ac[0]));
        }
    }
    problems
}

pub fn parse_fraction(s: &str) -> f64 {
    match s.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

/// Validates `doc` against `schema`, covering the keywords the checked-in
/// schema uses. Returns one message per violation.
pub fn validate(schema: &Value, doc: &Value) -> Vec<String> {
    let mut errors = Vec::new();
    check(schema, schema, doc, "$", &mut errors);
    errors
}

fn resolve<'a>(root: &'a Value, r: &str) -> &'a Value {
    let path = r.strip_prefix("#/").expect("local ref");
    path.split('/').fold(root, |v, k| &v[k])
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        other => panic!("unsupported type {other}"),
    }
}

fn check(root: &Value, s: &Value, v: &Value, at: &str, errors: &mut Vec<String>) {
    let Some(obj) = s.as_object() else { return };
    if let Some(r) = obj.get("$ref").and_then(Value::as_str) {
        check(root, resolve(root, r), v, at, errors);
    }
    if let Some(t) = obj.get("type") {
        let ok = match t {
            Value::String(t) => type_matches(t, v),
            Value::Array(ts) => ts.iter().any(|t| type_matches(t.as_str().unwrap(), v)),
            _ => true,
        };
        if !ok {
            errors.push(format!("{at}: expected type {t}, got {v}"));
            return;
        }
    }
    if let Some(Value::Array(options)) = obj.get("enum") {
        if !options.contains(v) {
            errors.push(format!("{at}: {v} not in {options:?}"));
        }
    }
    if let Some(c) = obj.get("const") {
        if c != v {
            errors.push(format!("{at}: {v} != {c}"));
        }
    }
    if let (Some(min), Some(x)) = (obj.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            errors.push(format!("{at}: {x} < {min}"));
        }
    }
    if let Some(o) = v.as_object() {
        if let Some(Value::Array(req)) = obj.get("required") {
            for k in req {
                if !o.contains_key(k.as_str().unwrap()) {
                    errors.push(format!("{at}: missing {k}"));
                }
            }
        }
        let props = obj.get("properties").and_then(Value::as_object);
        for (k, child) in o {
            match props.and_then(|p| p.get(k)) {
                Some(ps) => check(root, ps, child, &format!("{at}.{k}"), errors),
                None if obj.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{at}: unexpected property {k}"))
                }
                None => {}
            }
        }
    }
    if let Some(a) = v.as_array() {
        if let Some(n) = obj.get("minItems").and_then(Value::as_u64) {
            if (a.len() as u64) < n {
                errors.push(format!("{at}: fewer than {n} items"));
            }
        }
        if let Some(n) = obj.get("maxItems").and_then(Value::as_u64) {
            if a.len() as u64 > n {
                errors.push(format!("{at}: more than {n} items"));
            }
        }
        if let Some(items) = obj.get("items") {
            for (i, x) in a.iter().enumerate() {
                check(root, items, x, &format!("{at}[{i}]"), errors);
            }
        }
    }
    if let Some(Value::Array(all)) = obj.get("allOf") {
        for sub in all {
            check(root, sub, v, at, errors);
        }
    }
    if let Some(Value::Array(one)) = obj.get("oneOf") {
        let passing = one.iter().filter(|sub| validate_at(root, sub, v)).count();
        if passing != 1 {
            errors.push(format!("{at}: {passing} oneOf branches match"));
        }
    }
    if let Some(cond) = obj.get("if") {
        if validate_at(root, cond, v) {
            if let Some(then) = obj.get("then") {
                check(root, then, v, at, errors);
            }
        }
    }
}

fn validate_at(root: &Value, s: &Value, v: &Value) -> bool {
    let mut errors = Vec::new();
    check(root, s, v, "$", &mut errors);
    errors.is_empty()
}
