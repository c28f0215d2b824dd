use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

const P: &str = r#"{"src": "discrete:2", "dst": "discrete:2",
    "cells": {"(a0,a0)": ["a"], "(a0,a1)": ["b", "c"], "(a1,a0)": [], "(a1,a1)": ["d"]}}"#;

#[test]
fn compose_reports_matrix_sizes() {
    let v = parse(&fdcalc_web::compose(P, P));
    assert_eq!(v["sizes"], serde_json::json!([[1, 4], [0, 1]]));
}

#[test]
fn difference_of_identity_is_representable() {
    let f = r#"{"kind": "Identity", "base": "Arr"}"#;
    let phi = r#"{"base": "Arr", "elems": {"0": ["x"], "1": ["y", "z"]}, "action": {"e": {"x": "y"}}}"#;
    let v = parse(&fdcalc_web::difference(f, phi, "0"));
    assert_eq!(v["tense"], true);
    // Arr(0, −) has one arrow into each object
    assert_eq!(v["difference"]["elems"]["0"].as_array().unwrap().len(), 1);
    assert_eq!(v["difference"]["elems"]["1"].as_array().unwrap().len(), 1);
}

#[test]
fn errors_come_back_as_json() {
    let v = parse(&fdcalc_web::compose("{", P));
    assert!(v["error"].as_str().unwrap().starts_with("Q:"));
    let v = parse(&fdcalc_web::verify("no-such-suite", 1, 3));
    assert!(v["error"].is_string());
}

#[test]
fn verify_runs_a_small_suite() {
    let v = parse(&fdcalc_web::verify("boolean-factorization", 4, 5));
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["instances"], 5);
    assert_eq!(parse(&fdcalc_web::suites()).as_array().unwrap().len(), 10);
}
