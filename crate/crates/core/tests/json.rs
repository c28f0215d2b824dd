use fdcalc::json::{
    category_from_json, category_to_json, expr_from_json, expr_to_json, profunctor_from_json, profunctor_to_json,
    render, sequence_from_json, sequence_to_json,
};
use fdcalc::random::{Bounds, Gen, Grammar};
use fdcalc::fincat::SeqMode;
use fdcalc::Error;
use serde_json::json;

#[test]
fn builtin_categories_round_trip() {
    for name in ["1", "Arr", "D2", "cospan", "idempotent", "chain:3", "discrete:2", "cyclic:3"] {
        let c = category_from_json(&json!(name)).unwrap();
        let table = category_to_json(&c);
        let back = category_from_json(&table).unwrap();
        assert_eq!(category_to_json(&back), table, "{}", name);
    }
}

#[test]
fn profunctor_cells_canonicalize() {
    let a = json!({"src": "D2", "dst": "Arr",
        "cells": {"(a0,0)": ["p"], "(a0,1)": ["q", "r"], "(a1,0)": [], "(a1,1)": ["s"]},
        "rightAction": {"e": {"a0": {"p": "q"}}}});
    let b = json!({"src": "D2", "dst": "Arr",
        "cells": {"(a1,1)": ["s"], "(a1,0)": [], "(a0,1)": ["r", "q"], "(a0,0)": ["p"]},
        "rightAction": {"e": {"a0": {"p": "q"}}}});
    let (pa, pb) = (profunctor_from_json(&a).unwrap(), profunctor_from_json(&b).unwrap());
    assert_eq!(render(&profunctor_to_json(&pa)), render(&profunctor_to_json(&pb)));
}

#[test]
fn unknown_functor_kind_points_at_kind() {
    match expr_from_json(&json!({"kind": "Exponential", "base": "Arr"})) {
        Err(Error::SchemaError { pointer, .. }) => assert_eq!(pointer, "/kind"),
        other => panic!("{:?}", other),
    }
}

#[test]
fn random_functors_round_trip() {
    let mut g = Gen::new(11);
    let b = Bounds {
        max_objects: 2,
        max_elems: 2,
        max_arity: 2,
    };
    for _ in 0..30 {
        let base = g.category(2);
        let f = g.functor(&base, &b, &Grammar::default()).unwrap();
        let v = expr_to_json(&f);
        let back = expr_from_json(&v).unwrap();
        assert_eq!(expr_to_json(&back), v);
    }
}

#[test]
fn random_sequences_round_trip() {
    let mut g = Gen::new(3);
    for _ in 0..20 {
        let base = g.category(2);
        let mode = if g.coin(0.5) { SeqMode::Soft } else { SeqMode::Strict };
        let s = g.sequence(&base, &base, 2, mode, 20).unwrap();
        let v = sequence_to_json(&s);
        assert_eq!(sequence_to_json(&sequence_from_json(&v).unwrap()), v);
    }
}
