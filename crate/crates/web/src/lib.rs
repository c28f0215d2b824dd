//! Browser bindings for the demo page in `www/`. Every export takes JSON text
//! and returns JSON text; failures come back as `{"error": "..."}` so the page
//! never has to catch an exception.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use fdcalc::funcalc::{delta_a, tense_certify};
use fdcalc::json::{expr_from_json, parse_str, presheaf_from_json, presheaf_to_json, profunctor_from_json, profunctor_to_json, render};
use fdcalc::random::Bounds;
use fdcalc::suites::{run_suite, SuiteOptions, SUITES};

/// Web demos keep suites short; the page runs on the main thread.
const MAX_CASES: usize = 20;

fn answer(r: Result<Value, String>) -> String {
    render(&r.unwrap_or_else(|e| json!({ "error": e })))
}

fn parse(label: &str, text: &str) -> Result<Value, String> {
    parse_str(text).map_err(|e| format!("{}: {}", label, e))
}

/// `Q ⊗ P`, with the cell sizes alongside for a quick look.
#[wasm_bindgen]
pub fn compose(q: &str, p: &str) -> String {
    answer((|| {
        let q = profunctor_from_json(&parse("Q", q)?).map_err(|e| format!("Q: {}", e))?;
        let p = profunctor_from_json(&parse("P", p)?).map_err(|e| format!("P: {}", e))?;
        let c = fdcalc::prof::compose(&q, &p).map_err(|e| e.to_string())?;
        Ok(json!({
            "composite": profunctor_to_json(&c.value),
            "sizes": c.value.cell_sizes(),
        }))
    })())
}

/// `Δ_A[F](Φ)` and whether `F` is certified tense.
#[wasm_bindgen]
pub fn difference(functor: &str, phi: &str, object: &str) -> String {
    answer((|| {
        let f = expr_from_json(&parse("F", functor)?).map_err(|e| format!("F: {}", e))?;
        let phi = presheaf_from_json(&parse("Φ", phi)?).map_err(|e| format!("Φ: {}", e))?;
        let a = f.dom().find_object(object).map_err(|e| e.to_string())?;
        let d = delta_a(&f, a, &phi).map_err(|e| e.to_string())?;
        Ok(json!({
            "difference": presheaf_to_json(&d.presheaf().0),
            "tense": tense_certify(&f).is_ok(),
        }))
    })())
}

/// One verification suite at small bounds.
#[wasm_bindgen]
pub fn verify(suite: &str, seed: u32, cases: u32) -> String {
    answer((|| {
        let opts = SuiteOptions {
            seed: seed as u64,
            bounds: Bounds {
                max_objects: 2,
                ..Bounds::default()
            },
            cases: Some((cases as usize).clamp(1, MAX_CASES)),
        };
        let r = run_suite(suite, &opts).map_err(|e| e.to_string())?;
        Ok(json!({ "passed": r.passed(), "text": r.render_text(), "report": r.to_json() }))
    })())
}

/// Suite names for the page's selector.
#[wasm_bindgen]
pub fn suites() -> String {
    render(&json!(SUITES))
}
