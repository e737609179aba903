//! Named identity checks and their serialized form.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Outcome of one identity check. `pass` is always `residual <= tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    /// The identity being checked, written out.
    pub anchor: String,
    pub params: BTreeMap<String, f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckReport {
            id: id.into(),
            anchor: anchor.into(),
            params: BTreeMap::new(),
            residual,
            tolerance,
            // NaN residuals never pass
            pass: residual <= tolerance,
            wall_time_ms: 0.0,
            note: None,
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(id: impl Into<String>, anchor: impl Into<String>, tolerance: f64, why: impl Into<String>) -> Self {
        let mut r = Self::new(id, anchor, f64::INFINITY, tolerance);
        r.note = Some(why.into());
        r
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn elapsed(mut self, start: Instant) -> Self {
        self.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "{} {:<40} residual {:.3e} (tol {:.0e}) [{}] {:.1} ms",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.residual,
            self.tolerance,
            params.join(", "),
            self.wall_time_ms
        )
    }
}

/// Converts a fallible residual computation into a report, recording errors as failures.
pub fn check<F>(id: &str, anchor: &str, tolerance: f64, f: F) -> CheckReport
where
    F: FnOnce() -> crate::Result<f64>,
{
    let start = Instant::now();
    match f() {
        Ok(r) => CheckReport::new(id, anchor, r, tolerance),
        Err(e) => CheckReport::failed(id, anchor, tolerance, e.to_string()),
    }
    .elapsed(start)
}

pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
