use fdcalc::suites::{run_suite, SuiteOptions, SuiteReport, SUITES};
use fdcalc::Error;

fn opts(seed: u64) -> SuiteOptions {
    SuiteOptions {
        seed,
        ..SuiteOptions::default()
    }
}

#[test]
fn every_suite_passes_at_default_bounds() {
    for name in SUITES {
        let r = run_suite(name, &opts(1)).unwrap();
        assert!(r.passed(), "{}", r.render_text());
        assert!(r.instances > 0);
        assert!(!r.anchor.is_empty());
    }
}

#[test]
fn same_seed_same_bytes() {
    for name in ["delta-rules", "newton-unit", "chain-rule"] {
        let a = run_suite(name, &opts(5)).unwrap().to_json().to_string();
        let b = run_suite(name, &opts(5)).unwrap().to_json().to_string();
        assert_eq!(a, b, "{}", name);
    }
}

#[test]
fn reports_survive_serialization() {
    let r = run_suite("clairaut", &opts(2)).unwrap();
    let back: SuiteReport = serde_json::from_value(r.to_json()).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.render_text(), r.render_text());
}

#[test]
fn unknown_suite_is_an_error() {
    assert_eq!(
        run_suite("pentagon", &opts(1)).unwrap_err(),
        Error::UnknownSuite("pentagon".into())
    );
}
