//! Browser entry points. Each takes problem-file JSON and returns a report
//! as JSON; the exit code the CLI would use is in `exit_code`.

use pnf_core::report::{self, AnalyzeOptions, CheckOptions, NormalizeOptions, Report};
use wasm_bindgen::prelude::*;

const EXAMPLES: [(&str, &str); 4] = [
    ("linearizable", include_str!("../../cli/tests/fixtures/linearizable.json")),
    ("three_phase", include_str!("../../cli/tests/fixtures/three_phase.json")),
    ("rank2", include_str!("../../cli/tests/fixtures/rank2.json")),
    ("resonant_11", include_str!("../../cli/tests/fixtures/resonant_11.json")),
];

fn finish(r: Report) -> String {
    let mut v: serde_json::Value = serde_json::from_str(&r.to_json()).expect("report is JSON");
    v["exit_code"] = r.exit_code().into();
    v["summary"] = r.summary().into();
    serde_json::to_string_pretty(&v).expect("serializable")
}

/// Names of the bundled example problems.
#[wasm_bindgen]
pub fn example_names() -> Vec<String> {
    EXAMPLES.iter().map(|(n, _)| n.to_string()).collect()
}

#[wasm_bindgen]
pub fn example(name: &str) -> Option<String> {
    EXAMPLES.iter().find(|(n, _)| *n == name).map(|(_, t)| t.to_string())
}

#[wasm_bindgen]
pub fn analyze(problem: &str, order: Option<u32>, k_max: Option<u32>) -> String {
    finish(report::analyze(problem, &AnalyzeOptions { order, k_max, degree_bound: None, timings: false }))
}

#[wasm_bindgen]
pub fn normalize(problem: &str, order: Option<u32>, theorem: u32, force: bool) -> String {
    let opts = NormalizeOptions { order, theorem, force, degree_bound: None, timings: false };
    finish(report::normalize(problem, &opts))
}

/// `b` may be a problem file or a `normalize` report.
#[wasm_bindgen]
pub fn check(a: &str, b: &str, diffeo: Option<String>, order: Option<u32>) -> String {
    finish(report::check(a, b, diffeo.as_deref(), &CheckOptions { order, timings: false }))
}
