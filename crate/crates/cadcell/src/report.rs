//! Check reports and their JSON serialization.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: String,
    pub point: Vec<f64>,
    pub detail: String,
}

/// Outcome of one verification check. Serialized field order is part of the
/// report format; reports are diffed byte-for-byte in the determinism test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub check: String,
    pub paper_anchor: String,
    pub seed: u64,
    pub samples: BTreeMap<String, u64>,
    pub violations: Vec<Violation>,
    pub inconclusive_fraction: f64,
    pub verdict: Verdict,
    pub millis: u64,
}

/// Recorded violations are capped; the full count stays in `samples`.
const MAX_RECORDED_VIOLATIONS: usize = 32;

/// Accumulates one check's evidence and assembles the report.
pub struct ReportBuilder {
    suite: String,
    check: String,
    paper_anchor: String,
    seed: u64,
    samples: BTreeMap<String, u64>,
    violations: Vec<Violation>,
    violations_total: u64,
    queries: u64,
    inconclusive: u64,
    start: Instant,
    cap: f64,
}

impl ReportBuilder {
    pub fn new(
        suite: impl Into<String>,
        check: impl Into<String>,
        paper_anchor: impl Into<String>,
        seed: u64,
        inconclusive_cap: f64,
    ) -> ReportBuilder {
        ReportBuilder {
            suite: suite.into(),
            check: check.into(),
            paper_anchor: paper_anchor.into(),
            seed,
            samples: BTreeMap::new(),
            violations: Vec::new(),
            violations_total: 0,
            queries: 0,
            inconclusive: 0,
            start: Instant::now(),
            cap: inconclusive_cap,
        }
    }

    pub fn check_id(&self) -> &str {
        &self.check
    }

    pub fn count(&mut self, key: &str, n: u64) {
        *self.samples.entry(key.to_string()).or_insert(0) += n;
    }

    /// Record one decided query (pass or violation).
    pub fn decided(&mut self) {
        self.queries += 1;
    }

    /// Record one query the oracle could not decide.
    pub fn inconclusive(&mut self) {
        self.queries += 1;
        self.inconclusive += 1;
    }

    pub fn violation(&mut self, kind: &str, point: &[f64], detail: impl Into<String>) {
        self.queries += 1;
        self.violations_total += 1;
        if self.violations.len() < MAX_RECORDED_VIOLATIONS {
            self.violations.push(Violation {
                kind: kind.to_string(),
                point: point.to_vec(),
                detail: detail.into(),
            });
        }
    }

    pub fn violations_so_far(&self) -> u64 {
        self.violations_total
    }

    pub fn finish(mut self) -> CheckReport {
        let frac = if self.queries == 0 {
            0.0
        } else {
            self.inconclusive as f64 / self.queries as f64
        };
        self.samples.insert("queries".into(), self.queries);
        self.samples
            .insert("violations_total".into(), self.violations_total);
        let verdict = if self.violations_total > 0 {
            Verdict::Fail
        } else if frac > self.cap {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        CheckReport {
            suite: self.suite,
            check: self.check,
            paper_anchor: self.paper_anchor,
            seed: self.seed,
            samples: self.samples,
            violations: self.violations,
            inconclusive_fraction: frac,
            verdict,
            millis: self.start.elapsed().as_millis() as u64,
        }
    }
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Copy with wall time zeroed; written reports must be byte-identical
    /// across runs with the same seed.
    pub fn canonical(&self) -> CheckReport {
        let mut r = self.clone();
        r.millis = 0;
        r
    }
}

/// Serialize a report set deterministically (sorted by suite then check id).
pub fn reports_to_json(reports: &[CheckReport]) -> String {
    let mut sorted: Vec<CheckReport> = reports.iter().map(|r| r.canonical()).collect();
    sorted.sort_by(|a, b| (a.suite.clone(), a.check.clone()).cmp(&(b.suite.clone(), b.check.clone())));
    serde_json::to_string_pretty(&sorted).expect("report serialization")
}
