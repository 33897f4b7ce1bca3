//! Machine-readable verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::scalar::{to_f64, Real};
use crate::squares::SquareReport;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportCheck {
    pub name: String,
    pub pass: bool,
    pub value: Value,
    pub expected: Value,
    pub residual: f64,
    /// Statement the check reproduces, or `"plumbing"`.
    pub paper_ref: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub params: BTreeMap<String, Value>,
    pub checks: Vec<ReportCheck>,
    pub overall: bool,
    pub timing_ms: u64,
    pub tool_version: String,
    /// Measured quantities that are reported without a verdict.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub observations: BTreeMap<String, Value>,
}

impl VerificationReport {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            params: BTreeMap::new(),
            checks: Vec::new(),
            overall: true,
            timing_ms: 0,
            tool_version: TOOL_VERSION.to_string(),
            observations: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn observe(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.observations.insert(key.to_string(), value.into());
        self
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        pass: bool,
        value: impl Into<Value>,
        expected: impl Into<Value>,
        residual: f64,
        paper_ref: &str,
    ) -> &mut Self {
        self.checks.push(ReportCheck {
            name: name.into(),
            pass,
            value: value.into(),
            expected: expected.into(),
            residual,
            paper_ref: paper_ref.to_string(),
        });
        self
    }

    /// Check whose value is the residual itself, passing below `eps`.
    pub fn push_residual<T: Real>(&mut self, name: impl Into<String>, residual: T, eps: T, paper_ref: &str) -> &mut Self {
        let r = to_f64(residual);
        let pass = residual.is_finite() && residual <= eps;
        self.push(name, pass, r, format!("< {:e}", to_f64(eps)), r, paper_ref)
    }

    /// Folds every line of a square report in under `prefix`.
    pub fn absorb_square<T: Real>(&mut self, prefix: &str, square: &SquareReport<T>, paper_ref: &str) -> &mut Self {
        for c in &square.checks {
            let r = to_f64(c.residual);
            self.push(format!("{prefix}.{}", c.name), c.pass, r, c.expected.clone(), r, paper_ref);
        }
        self
    }

    pub fn check(&self, name: &str) -> Option<&ReportCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Sorts checks by name and recomputes `overall`.
    pub fn finish(&mut self) -> &mut Self {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.overall = self.checks.iter().all(|c| c.pass);
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite JSON")
    }

    /// Human-readable summary, one line per check.
    pub fn to_text(&self) -> String {
        let mut out = format!("scenario {} ({})\n", self.scenario, self.tool_version);
        for (k, v) in &self.params {
            out.push_str(&format!("  param {k} = {v}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {}: value {} expected {} residual {:.3e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.expected,
                c.residual
            ));
        }
        for (k, v) in &self.observations {
            out.push_str(&format!("  observed {k} = {v}\n"));
        }
        out.push_str(&format!("overall: {}\n", if self.overall { "PASS" } else { "FAIL" }));
        out
    }
}
