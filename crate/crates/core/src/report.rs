//! Named residual checks and the versioned JSON report.

use serde::Serialize;
use serde_json::Value;
use std::fmt::Write as _;

pub const SCHEMA: &str = "gks-report/1";

/// Default tolerances.
pub mod tol {
    /// Exact-polynomial derivative paths.
    pub const EXACT: f64 = 1e-8;
    /// Central finite-difference fallback.
    pub const FINITE_DIFF: f64 = 1e-4;
    pub const FD_STEP: f64 = 1e-5;
    /// Integer Clifford identities evaluated in floating point.
    pub const CLIFFORD: f64 = 1e-12;
    pub const KILLING: f64 = 1e-9;
    pub const RHO_MODULE: f64 = 1e-7;
    pub const WEITZENBOCK: f64 = 1e-6;
    pub const ALGEBRAIC: f64 = 1e-10;
    pub const TWO_FORM: f64 = 1e-12;
    /// Relative Monte-Carlo quadrature tolerance.
    pub const QUADRATURE: f64 = 0.01;
    pub const TANGENCY: f64 = 1e-10;
    pub const UNIT_SPINOR: f64 = 1e-6;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when the value is at most the tolerance.
    Upper,
    /// Passes when the value is at least the threshold.
    Lower,
}

impl Bound {
    fn is_upper(&self) -> bool {
        *self == Bound::Upper
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Bound::is_upper")]
    pub bound: Bound,
}

impl Check {
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            max_residual: residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            bound: Bound::Upper,
        }
    }

    /// A witness that must stay bounded away from zero.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Check {
        Check {
            name: name.into(),
            max_residual: value,
            tolerance: threshold,
            pass: value.is_finite() && value >= threshold,
            bound: Bound::Lower,
        }
    }

    /// A boolean outcome, encoded as residual 0 (holds) or 1 (fails).
    pub fn holds(name: impl Into<String>, ok: bool) -> Check {
        Check::at_most(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub params: Value,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl Report {
    pub fn new(command: impl Into<String>, params: Value, seed: u64) -> Report {
        Report {
            schema: SCHEMA,
            command: command.into(),
            params,
            seed,
            checks: Vec::new(),
            pass: true,
            details: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn with_details(mut self, details: Value) -> Report {
        self.details = Some(details);
        self
    }

    /// Re-evaluates every check called `name` against `tolerance`; returns
    /// whether any check matched.
    pub fn override_tolerance(&mut self, name: &str, tolerance: f64) -> bool {
        let mut hit = false;
        for c in self.checks.iter_mut().filter(|c| c.name == name) {
            c.tolerance = tolerance;
            c.pass = c.max_residual.is_finite()
                && match c.bound {
                    Bound::Upper => c.max_residual <= tolerance,
                    Bound::Lower => c.max_residual >= tolerance,
                };
            hit = true;
        }
        self.pass = self.checks.iter().all(|c| c.pass);
        hit
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{} (seed {})", self.command, self.seed);
        let _ = writeln!(out, "{:<width$}  {:>12}  {:>12}  pass", "check", "residual", "tolerance");
        for c in &self.checks {
            let rel = if c.bound == Bound::Lower { ">=" } else { "<=" };
            let _ = writeln!(
                out,
                "{:<width$}  {:>12.3e}  {}{:>10.1e}  {}",
                c.name,
                c.max_residual,
                rel,
                c.tolerance,
                if c.pass { "ok" } else { "FAIL" }
            );
        }
        let _ = writeln!(out, "result: {}", if self.pass { "pass" } else { "FAIL" });
        out
    }
}
