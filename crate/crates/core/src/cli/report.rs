//! The flat JSON report shared by every subcommand.
//!
//! Objects are `serde_json::Map`s, which keep keys sorted, and nothing
//! depends on time, paths or thread scheduling, so equal argv and seed give
//! byte-identical files.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::report::{CertReport, CheckOutcome, Status};

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    /// Arguments after the program name, without `--out` and its value.
    pub argv: Vec<String>,
    pub settings: Value,
    pub oracle: String,
    pub checks: Vec<CheckOutcome>,
    pub result: Value,
    pub flags: Vec<String>,
}

impl RunReport {
    pub fn status(&self) -> Status {
        CertReport::new(self.checks.clone()).overall
    }

    pub fn to_json(&self) -> Value {
        let cert = CertReport::new(self.checks.clone());
        json!({
            "command": self.command,
            "argv": self.argv,
            "settings": self.settings,
            "oracle": self.oracle,
            "status": cert.overall,
            "checks": self.checks,
            "violations": cert.violations(),
            "result": self.result,
            "flags": self.flags,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }

    pub fn to_pretty(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json()).expect("report values are finite JSON");
        text.push('\n');
        text
    }

    pub fn summary(&self) -> String {
        let cert = CertReport::new(self.checks.clone());
        let mut out = String::new();
        let _ = writeln!(out, "{} on {}: {}", self.command, self.oracle, cert.overall);
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = write!(out, "  {:<12} {:<width$}  {:>5} instances  max residual {:.3e}", c.status.to_string(), c.name, c.instances, c.residual);
            if let Some(cx) = &c.counterexample {
                let _ = write!(out, "\n  {:<12} {:<width$}  at {}", "", "", cx);
            }
            out.push('\n');
        }
        for c in cert.violations() {
            let _ = writeln!(out, "violated: {c}");
        }
        for c in self.checks.iter().filter(|c| c.status == Status::Inconclusive) {
            let _ = writeln!(out, "inconclusive: {} ({})", c.name, c.citation);
        }
        for f in &self.flags {
            let _ = writeln!(out, "flag: {f}");
        }
        out
    }
}
