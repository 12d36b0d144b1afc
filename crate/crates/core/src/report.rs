//! Named checks and the JSON report envelope.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One re-verified equality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Check { name: name.into(), pass }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub candidates: u64,
    /// Wall time; the only field allowed to differ between identical runs.
    pub elapsed_ms: u64,
}

/// The JSON envelope every command prints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub found: bool,
    pub witness: Value,
    pub checks: Vec<Check>,
    pub stats: Stats,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            params: BTreeMap::new(),
            found: false,
            witness: Value::Null,
            checks: Vec::new(),
            stats: Stats::default(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

/// True if any number in `v` is not an integer.
pub fn has_float(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_f64(),
        Value::Array(items) => items.iter().any(has_float),
        Value::Object(map) => map.values().any(has_float),
        _ => false,
    }
}

/// Pretty JSON with keys in a fixed order.
pub fn emit_report(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report values are always serializable")
}

pub fn parse_report(s: &str) -> serde_json::Result<Report> {
    serde_json::from_str(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::PosRational;
    use proptest::prelude::*;

    #[test]
    fn empty_checks() {
        let s = emit_report(&Report::new("x"));
        assert!(s.contains("\"checks\": []"));
        assert!(s.contains("\"schema_version\": 1"));
    }

    #[test]
    fn rationals_are_strings() {
        let mut r = Report::new("hindman");
        r.witness = serde_json::to_value(vec![PosRational::frac(1, 3), PosRational::int(3)]).unwrap();
        let s = emit_report(&r);
        assert!(s.contains("\"1/3\"") && s.contains("\"3\""));
        assert!(!has_float(&serde_json::from_str(&s).unwrap()));
        assert!(has_float(&serde_json::json!({"a": [1, 0.5]})));
    }

    proptest! {
        #[test]
        fn round_trip(
            cmd in "[a-z-]{1,12}",
            params in proptest::collection::btree_map("[a-z]{1,6}", "[ -~]{0,10}", 0..5),
            found: bool,
            nums in proptest::collection::vec((1u64..1000, 1u64..1000), 0..6),
            checks in proptest::collection::vec(("[a-z ]{0,8}", any::<bool>()), 0..4),
            candidates: u64,
        ) {
            let mut r = Report::new(cmd);
            r.params = params;
            r.found = found;
            r.witness = serde_json::to_value(nums.iter().map(|&(a, b)| PosRational::frac(a, b)).collect::<Vec<_>>()).unwrap();
            r.checks = checks.into_iter().map(|(n, p)| Check::new(n, p)).collect();
            r.stats.candidates = candidates;
            let s = emit_report(&r);
            prop_assert_eq!(parse_report(&s).unwrap(), r.clone());
            prop_assert_eq!(emit_report(&parse_report(&s).unwrap()), s);
        }
    }
}
