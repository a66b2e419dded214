//! JSON result documents and their human-readable rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use bmhull::estimators::{EstimatorResult, RunMetadata};
use serde::{Deserialize, Serialize};

use crate::config::{Preset, Resolved, RunConfig};
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;
pub const JSON_DIGITS: usize = 12;
pub const TABLE_DIGITS: usize = 9;

/// `x` rounded to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("exponent notation parses")
}

/// Shortest decimal form of `x` rounded to `digits` significant digits,
/// in exponent notation when very small or very large.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let r = round_sig(x, digits);
    if r != 0.0 && r.is_finite() && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub n_samples: usize,
    pub n_capped_excluded: usize,
}

impl From<&EstimatorResult> for Estimate {
    fn from(r: &EstimatorResult) -> Self {
        Estimate {
            mean: round_sig(r.mean, JSON_DIGITS),
            std_error: round_sig(r.std_error, JSON_DIGITS),
            ci95_low: round_sig(r.ci95.0, JSON_DIGITS),
            ci95_high: round_sig(r.ci95.1, JSON_DIGITS),
            n_samples: r.n_samples,
            n_capped_excluded: r.n_capped_excluded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResultValue {
    Estimate(Estimate),
    Scalar(f64),
}

impl ResultValue {
    pub fn scalar(x: f64) -> Self {
        ResultValue::Scalar(round_sig(x, JSON_DIGITS))
    }

    pub fn value(&self) -> f64 {
        match self {
            ResultValue::Estimate(e) => e.mean,
            ResultValue::Scalar(x) => *x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// One row of the expected-area summary: bounds, exact value when known,
/// Monte Carlo estimate, and where the numbers come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaRow {
    pub quantity: String,
    pub lower_bound: Option<f64>,
    pub true_value: Option<f64>,
    pub mc_estimate: Estimate,
    pub upper_bound: Option<f64>,
    pub source: String,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub timestamp: String,
    pub command: String,
    pub software_version: String,
    pub preset: Preset,
    pub parameters: RunConfig,
    pub overrides: Vec<String>,
    pub results: BTreeMap<String, ResultValue>,
    pub reference_values: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<AreaRow>>,
    pub runs: Vec<RunMetadata>,
}

impl ResultDocument {
    pub fn new(command: &str, resolved: &Resolved) -> Self {
        ResultDocument {
            schema_version: SCHEMA_VERSION,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            command: command.to_string(),
            software_version: format!("bmhull {}", bmhull::VERSION),
            preset: resolved.config.preset,
            parameters: resolved.config.clone(),
            overrides: resolved.overrides.clone(),
            results: BTreeMap::new(),
            reference_values: BTreeMap::new(),
            checks: Vec::new(),
            table: None,
            runs: Vec::new(),
        }
    }

    pub fn scalar(&mut self, key: &str, x: f64) {
        self.results.insert(key.to_string(), ResultValue::scalar(x));
    }

    pub fn estimate(&mut self, key: &str, r: &EstimatorResult) {
        self.results
            .insert(key.to_string(), ResultValue::Estimate(Estimate::from(r)));
    }

    pub fn reference(&mut self, key: &str, x: f64) {
        self.reference_values
            .insert(key.to_string(), round_sig(x, JSON_DIGITS));
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn add_run(&mut self, meta: &RunMetadata) {
        let mut m = meta.clone();
        m.wall_time_s = round_sig(m.wall_time_s, 6);
        self.runs.push(m);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// The numeric payload alone; stable across reruns with the same seed.
    pub fn results_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.results)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn render(&self) -> String {
        let d = TABLE_DIGITS;
        let mut s = String::new();
        let _ = writeln!(s, "{} ({}, preset {})", self.command, self.software_version, self.preset);
        if let Some(rows) = &self.table {
            render_table(&mut s, rows);
        }
        let width = self
            .results
            .keys()
            .chain(self.reference_values.keys())
            .map(|k| k.len())
            .max()
            .unwrap_or(0);
        for (k, v) in &self.results {
            match v {
                ResultValue::Scalar(x) => {
                    let _ = writeln!(s, "  {k:<width$}  {}", fmt_sig(*x, d));
                }
                ResultValue::Estimate(e) => {
                    let _ = writeln!(
                        s,
                        "  {k:<width$}  {} ± {}  [{}, {}]  n={}{}",
                        fmt_sig(e.mean, d),
                        fmt_sig(e.std_error, d),
                        fmt_sig(e.ci95_low, d),
                        fmt_sig(e.ci95_high, d),
                        e.n_samples,
                        if e.n_capped_excluded > 0 {
                            format!(" capped={}", e.n_capped_excluded)
                        } else {
                            String::new()
                        }
                    );
                }
            }
        }
        if !self.reference_values.is_empty() {
            let _ = writeln!(s, "  reference values:");
            for (k, v) in &self.reference_values {
                let _ = writeln!(s, "  {k:<width$}  {}", fmt_sig(*v, d));
            }
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  [{}] {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        s
    }
}

fn render_table(s: &mut String, rows: &[AreaRow]) {
    let cell = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| fmt_sig(v, TABLE_DIGITS));
    let header = ["quantity", "lower bound", "true value", "MC estimate", "upper bound", "source"];
    let body: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.quantity.clone(),
                cell(r.lower_bound),
                r.true_value.map_or_else(|| "?".to_string(), |v| fmt_sig(v, TABLE_DIGITS)),
                format!(
                    "{} ± {}",
                    fmt_sig(r.mc_estimate.mean, TABLE_DIGITS),
                    fmt_sig(r.mc_estimate.std_error, 2)
                ),
                cell(r.upper_bound),
                r.source.clone(),
            ]
        })
        .collect();
    let mut w = header.map(str::len);
    for row in &body {
        for (i, c) in row.iter().enumerate() {
            w[i] = w[i].max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{c:<width$}", width = w[i]))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let _ = writeln!(s, "  {}", line(&header.map(String::from)));
    for (row, r) in body.iter().zip(rows) {
        let flag = if r.flags.is_empty() {
            String::new()
        } else {
            format!("  <- {}", r.flags.join("; "))
        };
        let _ = writeln!(s, "  {}{flag}", line(row));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(std::f64::consts::PI - 8.0 / 3.0, 12), "0.474925986923");
        assert_eq!(fmt_sig(0.5, 12), "0.5");
        assert_eq!(fmt_sig(3.2148261950649524, 9), "3.2148262");
        assert_eq!(round_sig(1234567.891, 3), 1230000.0);
        assert_eq!(round_sig(-0.000123456, 2), -0.00012);
        assert_eq!(fmt_sig(2.220446049250313e-16, 12), "2.22044604925e-16");
        assert_eq!(fmt_sig(-0.000123456, 2), "-0.00012");
        assert!(round_sig(f64::NAN, 3).is_nan());
    }

    #[test]
    fn untagged_values_round_trip() {
        let e = ResultValue::Estimate(Estimate {
            mean: 1.5,
            std_error: 0.25,
            ci95_low: 1.01,
            ci95_high: 1.99,
            n_samples: 10,
            n_capped_excluded: 0,
        });
        let s = ResultValue::scalar(0.1);
        for v in [e, s] {
            let j = serde_json::to_string(&v).unwrap();
            assert_eq!(serde_json::from_str::<ResultValue>(&j).unwrap(), v);
        }
    }
}
