//! Result records and their JSON / CSV serializations.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `pass` iff `deviation <= tolerance`. Non-finite deviations fail.
    pub fn new(name: &str, deviation: f64, tolerance: f64) -> Self {
        let deviation = if deviation.is_finite() {
            deviation.max(0.0)
        } else {
            f64::MAX
        };
        Self {
            name: name.to_string(),
            deviation,
            tolerance,
            pass: deviation <= tolerance,
        }
    }

    /// Zero-tolerance check of a boolean condition.
    pub fn exact(name: &str, holds: bool) -> Self {
        Self::new(name, if holds { 0.0 } else { 1.0 }, 0.0)
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ResultRecord {
    pub case: usize,
    pub command: String,
    pub suite: String,
    pub parameters: BTreeMap<String, Value>,
    pub values: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub artifacts: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl ResultRecord {
    pub fn new(command: &str, suite: &str) -> Self {
        Self {
            case: 0,
            command: command.to_string(),
            suite: suite.to_string(),
            parameters: BTreeMap::new(),
            values: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
            artifacts: BTreeMap::new(),
            note: None,
            wall_time_ms: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn value(&mut self, key: &str, v: f64) {
        self.values.insert(key.to_string(), v);
    }

    pub fn check(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Summary {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: Value,
    pub records: Vec<ResultRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: Value, mut records: Vec<ResultRecord>) -> Self {
        for (i, r) in records.iter_mut().enumerate() {
            r.case = i;
        }
        let passed = records.iter().filter(|r| r.pass).count();
        let summary = Summary {
            records: records.len(),
            passed,
            failed: records.len() - passed,
            pass: passed == records.len(),
        };
        Self {
            config,
            records,
            summary,
        }
    }

    pub fn write_json(&self, out: &mut impl Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)
    }

    /// One row per check: `case,command,suite,parameters,check,deviation,tolerance,pass`.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "case",
            "command",
            "suite",
            "parameters",
            "check",
            "deviation",
            "tolerance",
            "pass",
        ])?;
        for r in &self.records {
            let params = serde_json::to_string(&r.parameters).expect("json values serialize");
            for c in &r.checks {
                w.write_record([
                    r.case.to_string(),
                    r.command.clone(),
                    r.suite.clone(),
                    params.clone(),
                    c.name.clone(),
                    c.deviation.to_string(),
                    c.tolerance.to_string(),
                    c.pass.to_string(),
                ])?;
            }
        }
        w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_tolerance() {
        assert!(Check::new("a", 1e-11, 1e-10).pass);
        assert!(Check::new("a", 1e-10, 1e-10).pass);
        assert!(!Check::new("a", 2e-10, 1e-10).pass);
        assert!(!Check::new("a", f64::NAN, 1.0).pass);
        assert!(Check::exact("b", true).pass);
        assert!(!Check::exact("b", false).pass);
    }

    #[test]
    fn summary_counts_failures() {
        let mut bad = ResultRecord::new("x", "s");
        bad.check(Check::exact("c", false));
        let good = ResultRecord::new("x", "s");
        let report = Report::new(Value::Null, vec![good, bad]);
        assert_eq!(report.summary.failed, 1);
        assert!(!report.summary.pass);
        assert_eq!(report.records[1].case, 1);
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().ends_with(",false"));
    }

    #[test]
    fn floats_round_trip_through_json() {
        let mut r = ResultRecord::new("x", "s");
        let v = 1.0_f64 / 3.0 + 1e-17;
        r.value("v", v);
        let text = serde_json::to_string(&r).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["values"]["v"].as_f64().unwrap().to_bits(), v.to_bits());
    }
}
