//! Reports validate against docs/report.schema.json. The validator covers
//! the keywords the schema uses: type, enum, properties, required,
//! additionalProperties, items, minimum, maximum.

use ordanova::parse_table;
use ordanova_cli::{analyze, example_report, to_json, AnalyzeOptions, Report};
use serde_json::Value;

const SCHEMA: &str = include_str!("../../../docs/report.schema.json");

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.is_u64() || v.is_i64(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        other => panic!("unsupported type {other}"),
    }
}

fn validate(schema: &Value, v: &Value, path: &str, errors: &mut Vec<String>) {
    let s = schema.as_object().expect("schema node is an object");
    if let Some(t) = s.get("type") {
        let ok = match t {
            Value::String(name) => type_matches(name, v),
            Value::Array(names) => names.iter().any(|n| type_matches(n.as_str().unwrap(), v)),
            _ => panic!("bad type keyword"),
        };
        if !ok {
            errors.push(format!("{path}: expected type {t}, got {v}"));
            return;
        }
    }
    if let Some(Value::Array(allowed)) = s.get("enum") {
        if !allowed.contains(v) {
            errors.push(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(x) = v.as_f64() {
        if s.get("minimum").and_then(Value::as_f64).is_some_and(|m| x < m) {
            errors.push(format!("{path}: {x} below minimum"));
        }
        if s.get("maximum").and_then(Value::as_f64).is_some_and(|m| x > m) {
            errors.push(format!("{path}: {x} above maximum"));
        }
    }
    if let Value::Object(obj) = v {
        let props = s.get("properties").and_then(Value::as_object);
        if let Some(Value::Array(required)) = s.get("required") {
            for r in required {
                if !obj.contains_key(r.as_str().unwrap()) {
                    errors.push(format!("{path}: missing {r}"));
                }
            }
        }
        for (k, child) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(sub) => validate(sub, child, &format!("{path}.{k}"), errors),
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{path}: unexpected property {k}"))
                }
                None => {}
            }
        }
    }
    if let (Value::Array(items), Some(item_schema)) = (v, s.get("items")) {
        for (i, item) in items.iter().enumerate() {
            validate(item_schema, item, &format!("{path}[{i}]"), errors);
        }
    }
}

fn check(report: &Report) {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let json = to_json(report).unwrap();
    let value: Value = serde_json::from_str(&json).unwrap();
    let mut errors = Vec::new();
    validate(&schema, &value, "$", &mut errors);
    assert!(errors.is_empty(), "{errors:#?}");
    let back: Report = serde_json::from_str(&json).unwrap();
    assert_eq!(&back, report);
}

#[test]
fn example_reports_validate_and_round_trip() {
    check(&example_report("table3", &AnalyzeOptions::default()).unwrap());
    let opts = AnalyzeOptions { mc_reps: Some(200), seed: 5, ..AnalyzeOptions::default() };
    check(&example_report("table4", &opts).unwrap());
}

#[test]
fn edge_reports_validate() {
    // no variation at all, and two categories (adds the chi-square test)
    let flat = parse_table("lab,a,b,c\nA,3,0,0\nB,3,0,0\n").unwrap();
    let r = analyze("flat", &flat, &AnalyzeOptions { mc_reps: Some(100), ..AnalyzeOptions::default() }).unwrap();
    assert_eq!(r.statistics.ip_consistent, None);
    check(&r);
    let binary = parse_table("lab,low,high\nA,7,3\nB,2,8\nC,5,5\n").unwrap();
    let r = analyze("binary", &binary, &AnalyzeOptions::default()).unwrap();
    assert!(r.tests.iter().any(|t| t.method == "ip-chi2"));
    check(&r);
}

#[test]
fn validator_catches_violations() {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let mut value: Value =
        serde_json::from_str(&to_json(&example_report("table3", &AnalyzeOptions::default()).unwrap()).unwrap())
            .unwrap();
    value["tests"][0]["decision"] = Value::from("maybe");
    value["statistics"]["in"] = Value::from(1.5);
    value.as_object_mut().unwrap().remove("notes");
    value["extra"] = Value::from(1);
    let mut errors = Vec::new();
    validate(&schema, &value, "$", &mut errors);
    assert_eq!(errors.len(), 4, "{errors:#?}");
}

#[test]
fn numbers_keep_full_precision() {
    let r = example_report("table4", &AnalyzeOptions::default()).unwrap();
    let back: Report = serde_json::from_str(&to_json(&r).unwrap()).unwrap();
    assert_eq!(back.approximation.sigma2.to_bits(), r.approximation.sigma2.to_bits());
    assert_eq!(back.tests[0].thresholds[0].to_bits(), r.tests[0].thresholds[0].to_bits());
}
