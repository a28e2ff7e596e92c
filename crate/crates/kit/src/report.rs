//! Check records and verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::instance::{hex, InstanceDocument};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    /// Passes iff `residual ≤ threshold`; non-finite residuals fail and are
    /// stored as `f64::MAX` so the report stays valid JSON.
    pub fn measured(name: &str, anchor: &str, residual: f64, threshold: f64) -> Self {
        let pass = residual <= threshold;
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            residual: if residual.is_finite() { residual } else { f64::MAX },
            threshold,
            pass,
            detail: None,
        }
    }

    /// Residual 0 when `ok`, 1 otherwise, against threshold 0.
    pub fn boolean(name: &str, anchor: &str, ok: bool) -> Self {
        Self::measured(name, anchor, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn failed(name: &str, anchor: &str, detail: impl Into<String>) -> Self {
        CheckRecord {
            detail: Some(detail.into()),
            ..Self::measured(name, anchor, f64::MAX, 0.0)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A trial whose checks did not all pass, with the instance that reproduces it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub trial: usize,
    pub failed_checks: Vec<String>,
    pub instance: InstanceDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub instance_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<CheckRecord>,
    pub verdict: Verdict,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<FailureRecord>,
}

impl VerificationReport {
    pub fn new(instance_digest: String, checks: Vec<CheckRecord>) -> Self {
        let verdict = if checks.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        VerificationReport {
            instance_digest,
            suite: None,
            trials: None,
            seed: None,
            checks,
            verdict,
            elapsed_ms: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// Copy with timing zeroed, for byte comparisons.
    pub fn normalized(&self) -> Self {
        VerificationReport {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    /// One line per check, then the verdict.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {:<40} residual {:.3e}  threshold {:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.threshold
            ));
            if let Some(d) = &c.detail {
                out.push_str(&format!("  ({d})"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "verdict: {}  ({} checks, {} failing trials, {} ms)\n",
            if self.passed() { "pass" } else { "fail" },
            self.checks.len(),
            self.failures.len(),
            self.elapsed_ms
        ));
        out
    }
}

/// Worst case per check name: maximum residual, and pass only if every
/// record passed. Independent of the order of `records`.
pub fn aggregate<'a>(records: impl IntoIterator<Item = &'a CheckRecord>) -> Vec<CheckRecord> {
    let mut by_name: BTreeMap<&str, CheckRecord> = BTreeMap::new();
    for r in records {
        by_name
            .entry(r.name.as_str())
            .and_modify(|acc| {
                acc.pass &= r.pass;
                acc.threshold = acc.threshold.min(r.threshold);
                if r.residual > acc.residual {
                    acc.residual = r.residual;
                }
                acc.detail = match (acc.detail.take(), &r.detail) {
                    (Some(a), Some(b)) => Some(a.min(b.clone())),
                    (a, b) => a.or_else(|| b.clone()),
                };
            })
            .or_insert_with(|| r.clone());
    }
    by_name.into_values().collect()
}

/// Hex SHA-256 over a sequence of digests, in order.
pub fn combined_digest<'a>(digests: impl IntoIterator<Item = &'a str>) -> String {
    let mut h = Sha256::new();
    for d in digests {
        h.update(d.as_bytes());
        h.update(b"\n");
    }
    hex(&h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_records() {
        let ok = CheckRecord::boolean("a", "", true);
        let bad = CheckRecord::measured("b", "", 2.0, 1.0);
        assert!(VerificationReport::new(String::new(), vec![ok.clone()]).passed());
        assert!(!VerificationReport::new(String::new(), vec![ok, bad]).passed());
        assert!(VerificationReport::new(String::new(), vec![]).passed());
    }

    #[test]
    fn combined_digest_depends_on_order() {
        assert_ne!(combined_digest(["a", "b"]), combined_digest(["b", "a"]));
        assert_eq!(combined_digest(["a"]).len(), 64);
    }
}
