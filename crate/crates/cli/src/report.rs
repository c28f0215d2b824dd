//! Multi-suite output: `{"passed", "reports": [...]}` and its text table.

use serde_json::{json, Value};

use fdcalc::suites::SuiteReport;

pub fn to_json(reports: &[SuiteReport]) -> Value {
    json!({
        "passed": reports.iter().all(SuiteReport::passed),
        "reports": reports.iter().map(SuiteReport::to_json).collect::<Vec<_>>(),
    })
}

/// Accepts the wrapper above or a bare single report.
pub fn from_json(v: &Value) -> serde_json::Result<Vec<SuiteReport>> {
    match v.get("reports") {
        Some(list) => serde_json::from_value(list.clone()),
        None => serde_json::from_value(v.clone()).map(|r| vec![r]),
    }
}

pub fn render_all(reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&r.render_text());
        out.push('\n');
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite.as_str()).collect();
    if failed.is_empty() {
        out.push_str(&format!("{} of {} suites pass\n", reports.len(), reports.len()));
    } else {
        out.push_str(&format!("{} of {} suites fail: {}\n", failed.len(), reports.len(), failed.join(", ")));
    }
    out
}
