//! Flat `metric,parameter,value` tables for CSV and JSON output.
//!
//! CSV starts with a `# schema=1` line and a header; JSON is
//! `{"schema": 1, "kind": ..., "rows": [{"metric", "parameter", "value"}]}`.
//! Values are strings so the decimal rendering is carried verbatim.

use serde::Serialize;
use serde_json::json;

use crate::kps::Kps;
use crate::metrics::{ConnectivityReport, ResiliencyReport};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub metric: String,
    pub parameter: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub kind: String,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(kind: impl Into<String>) -> Self {
        Table { kind: kind.into(), rows: Vec::new() }
    }

    pub fn push(&mut self, metric: impl Into<String>, parameter: impl ToString, value: impl ToString) {
        self.rows.push(Row { metric: metric.into(), parameter: parameter.to_string(), value: value.to_string() });
    }

    pub fn extend(&mut self, other: Table) {
        self.rows.extend(other.rows);
    }

    /// First value recorded for `metric` at `parameter`.
    pub fn get(&self, metric: &str, parameter: &str) -> Option<&str> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.parameter == parameter)
            .map(|r| r.value.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={SCHEMA}\nmetric,parameter,value\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", csv_field(&r.metric), csv_field(&r.parameter), csv_field(&r.value)));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "schema": SCHEMA, "kind": self.kind, "rows": self.rows })
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn kps_rows(kps: &Kps) -> Table {
    let mut t = Table::new("kps");
    t.push("v", "", kps.v());
    t.push("n", "", kps.n());
    t.push("k", "", kps.k());
    t.push("q", "", kps.q());
    for (i, d) in kps.duals().iter().enumerate() {
        let p = i + 1;
        t.push("v_i", p, d.v());
        t.push("b_i", p, d.b());
        t.push("r_i", p, d.r());
        t.push("k_i", p, d.k());
        t.push("theta1_i", p, d.theta()[1]);
        t.push("theta2_i", p, d.theta()[2]);
    }
    for (tuple, count) in kps.n_table() {
        t.push("n_count", &tuple, count);
        t.push("lambda", &tuple, kps.lambda_count(&tuple).expect("tuple from I"));
        t.push("in_delta", &tuple, kps.in_delta(&tuple));
    }
    for (tuple, mu) in kps.mu_table() {
        t.push("mu", &tuple, mu);
    }
    t
}

pub fn connectivity_rows(r: &ConnectivityReport, places: u32) -> Table {
    let mut t = Table::new("connectivity");
    t.push("beta_mode", "", r.mode);
    t.push("pr1", "", r.pr1.render(places));
    for (eta, v) in &r.pr2_by_eta {
        t.push("pr2", eta, v.render(places));
    }
    for (eta, v) in &r.pr_by_eta {
        t.push("pr", eta, v.render(places));
    }
    t
}

pub fn resiliency_rows(r: &ResiliencyReport, places: u32) -> Table {
    let mut t = Table::new("resiliency");
    t.push("fail_mode", "", r.mode);
    for (s, v) in &r.fail_by_s {
        t.push("fail", s, v.render(places));
    }
    for w in &r.warnings {
        t.push("warning", "", w);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_shapes() {
        let mut t = Table::new("demo");
        t.push("pr1", "", "0.6981");
        t.push("warning", "", "a, b");
        assert_eq!(t.to_csv(), "# schema=1\nmetric,parameter,value\npr1,,0.6981\nwarning,,\"a, b\"\n");
        let j = t.to_json();
        assert_eq!(j["schema"], 1);
        assert_eq!(j["rows"][0]["value"], "0.6981");
        assert_eq!(t.get("pr1", ""), Some("0.6981"));
    }
}
