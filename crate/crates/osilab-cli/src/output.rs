//! JSON rendering of reports and figure statistics.

use osilab::montecarlo::{FigureData, PresetReport, TrialRecord};
use serde_json::{json, Map, Value};

fn check_value(name: &str, r: &osilab::montecarlo::BoundReport) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), json!(name));
    m.insert("claimed".into(), json!(r.claimed));
    m.insert("direction".into(), json!(r.direction.as_str()));
    m.insert("empirical".into(), json!(r.empirical));
    m.insert("violation_rate".into(), json!(r.empirical_violation_rate));
    m.insert("allowed_failure".into(), json!(r.allowed_failure));
    m.insert("std_error".into(), json!(r.mc_std_error));
    m.insert("verdict".into(), json!(r.verdict.as_str()));
    if let Some(b) = &r.bound {
        m.insert(
            "bound".into(),
            json!({
                "factor": b.factor,
                "success_prob": b.success_prob,
                "squared": b.squared,
            }),
        );
    }
    Value::Object(m)
}

/// Report schema: preset, params, N, seed, then the primary check's
/// claimed/empirical/std_error/verdict flattened at the top level and the
/// full list under `checks`.
pub fn report_json(report: &PresetReport) -> String {
    let params: Map<String, Value> = report
        .params
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    let mut m = Map::new();
    m.insert("preset".into(), json!(report.preset));
    m.insert("params".into(), Value::Object(params));
    m.insert("N".into(), json!(report.trials));
    m.insert("seed".into(), json!(report.master_seed));
    if let Some(primary) = report.checks.first() {
        m.insert("claimed".into(), json!(primary.report.claimed));
        m.insert("empirical".into(), json!(primary.report.empirical));
        m.insert("std_error".into(), json!(primary.report.mc_std_error));
    }
    m.insert(
        "checks".into(),
        Value::Array(
            report
                .checks
                .iter()
                .map(|c| check_value(c.name, &c.report))
                .collect(),
        ),
    );
    m.insert("verdict".into(), json!(report.verdict().as_str()));
    serde_json::to_string_pretty(&Value::Object(m)).expect("valid json") + "\n"
}

pub fn records_json(records: &[TrialRecord]) -> String {
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            let aux: Map<String, Value> = r
                .aux
                .iter()
                .map(|(k, v)| (k.to_string(), json!(v)))
                .collect();
            json!({
                "trial_index": r.index,
                "seed": r.seed,
                "ratio": r.ratio,
                "injectivity_held": r.injectivity_held,
                "branch_label": r.branch_label,
                "aux": aux,
            })
        })
        .collect();
    serde_json::to_string_pretty(&Value::Array(rows)).expect("valid json") + "\n"
}

pub fn figure_json(data: &FigureData, trials: usize, seed: u64) -> String {
    let body = match data {
        FigureData::Summary { summaries, .. } => {
            let rows: Vec<Value> = summaries
                .iter()
                .map(|s| {
                    json!({
                        "panel": s.panel,
                        "method": s.method,
                        "median": s.median,
                        "p10": s.p10,
                        "p90": s.p90,
                        "median_bootstrap_se": s.median_bootstrap_se,
                    })
                })
                .collect();
            json!({ "summaries": rows })
        }
        FigureData::Histogram { series, .. } => {
            let rows: Vec<Value> = series
                .iter()
                .map(|s| {
                    json!({
                        "method": s.method,
                        "p99": s.p99,
                        "mass_above_1_3": s.mass_above_1_3,
                    })
                })
                .collect();
            json!({ "series": rows })
        }
    };
    let wrapped = json!({
        "preset": data.name(),
        "N": trials,
        "seed": seed,
        "stats": body,
    });
    serde_json::to_string_pretty(&wrapped).expect("valid json") + "\n"
}
