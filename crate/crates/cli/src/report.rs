use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use qkz_core::{FamilyDescriptor, Status};

use crate::config::{Fault, Suite};

pub const DETERMINISM_NOTE: &str =
    "exact rational arithmetic, no random sampling; record order is fixed by the suite definitions and independent of the worker count";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    ExactZero,
    /// Control checks that must not vanish.
    Fails,
}

/// Result of one check as it appears in the report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Done(Status),
    Error(String),
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    /// `exact-zero`, `fails-at-grade-m`, `error` or `skipped`.
    pub status: String,
    pub grade: Option<usize>,
    pub expected: Expect,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub wall_time_ms: u64,
}

impl CheckRecord {
    pub fn new(name: String, anchor: &str, expected: Expect, outcome: Outcome, wall_time_ms: u64) -> Self {
        let (status, grade, pass, detail) = match outcome {
            Outcome::Done(s) => {
                let pass = s.is_zero() == (expected == Expect::ExactZero);
                (s.to_string(), s.grade(), pass, None)
            }
            Outcome::Error(e) => ("error".to_string(), None, false, Some(e)),
            Outcome::Skipped(e) => ("skipped".to_string(), None, false, Some(e)),
        };
        CheckRecord { name, anchor: anchor.to_string(), status, grade, expected, pass, detail, wall_time_ms }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    #[serde(rename = "D")]
    pub d: usize,
    pub determinism: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub family: FamilyDescriptor,
    pub suite: Suite,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    pub environment: Environment,
    pub checks: Vec<CheckRecord>,
    /// Sample substitutions and similar remarks.
    pub notes: Vec<String>,
    pub passed: usize,
    pub failed: usize,
}

impl Report {
    pub fn new(family: FamilyDescriptor, suite: Suite, fault: Option<Fault>, checks: Vec<CheckRecord>, notes: Vec<String>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let failed = checks.len() - passed;
        let environment = Environment {
            d: family.d,
            determinism: DETERMINISM_NOTE.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        Report { family, suite, fault, environment, checks, notes, passed, failed }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Copy with every timing field set to zero.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.wall_time_ms = 0;
        }
        r
    }

    pub fn summary(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
        let mut out = String::new();
        let f = &self.family;
        let _ = writeln!(out, "family {} N={} D={}", f.family.name(), f.n, f.d);
        if let Some(fault) = self.fault {
            let _ = writeln!(out, "fault  {}", fault.name());
        }
        let _ = writeln!(out, "{:<width$}  {:<20}  {:<10}  {:>4}  {:>8}", "check", "status", "expected", "ok", "ms");
        for c in &self.checks {
            let expected = match c.expected {
                Expect::ExactZero => "exact-zero",
                Expect::Fails => "fails",
            };
            let ok = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{:<width$}  {:<20}  {:<10}  {:>4}  {:>8}", c.name, c.status, expected, ok, c.wall_time_ms);
            if let (false, Some(d)) = (c.pass, &c.detail) {
                let _ = writeln!(out, "    {d}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(out, "{} passed, {} failed", self.passed, self.failed);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qkz_core::FamilyKind;

    #[test]
    fn records_and_summary() {
        let checks = vec![
            CheckRecord::new("a".into(), "x", Expect::ExactZero, Outcome::Done(Status::ExactZero), 3),
            CheckRecord::new("b".into(), "x", Expect::Fails, Outcome::Done(Status::FailsAtGrade(1)), 1),
            CheckRecord::new("c".into(), "x", Expect::ExactZero, Outcome::Done(Status::FailsAtGrade(2)), 1),
            CheckRecord::new("d".into(), "x", Expect::ExactZero, Outcome::Skipped("no input".into()), 0),
        ];
        let r = Report::new(FamilyDescriptor::new(FamilyKind::Rational, 2, 4), Suite::All, None, checks, vec![]);
        assert_eq!((r.passed, r.failed), (2, 2));
        assert_eq!(r.checks[2].status, "fails-at-grade-2");
        assert_eq!(r.checks[2].grade, Some(2));
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.summary().contains("2 passed, 2 failed"));
        assert!(r.without_timing().checks.iter().all(|c| c.wall_time_ms == 0));
    }
}
