//! Residual-based verification reports.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluated: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<usize>,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        // NaN compares false, so it fails
        let passed = residual <= tol;
        Check {
            name: name.into(),
            residual,
            tol,
            passed,
            evaluated: None,
            skipped: None,
        }
    }

    pub fn with_counts(mut self, evaluated: usize, skipped: usize) -> Self {
        self.evaluated = Some(evaluated);
        self.skipped = Some(skipped);
        self
    }

    /// A yes/no verdict recorded as residual 0 or 1.
    pub fn verdict(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, if ok { 0.0 } else { 1.0 }, 0.5)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            checks: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, residual: f64, tol: f64) -> &mut Self {
        self.checks.push(Check::new(name, residual, tol));
        self
    }

    pub fn push(&mut self, c: Check) -> &mut Self {
        self.checks.push(c);
        self
    }

    /// Append another report's checks under a name prefix.
    pub fn absorb(&mut self, other: Report) -> &mut Self {
        for mut c in other.checks {
            c.name = format!("{}/{}", other.name, c.name);
            self.checks.push(c);
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Largest residual over all checks.
    pub fn residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.residual)
            .fold(0.0, |a, b| if b.is_nan() || b > a { b } else { a })
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} [{}]",
            self.name,
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            write!(
                f,
                "  {:<width$}  {:<4}  residual {:.3e}  tol {:.1e}",
                c.name,
                if c.passed { "ok" } else { "FAIL" },
                c.residual,
                c.tol
            )?;
            if let (Some(e), Some(s)) = (c.evaluated, c.skipped) {
                write!(f, "  ({e} evaluated, {s} skipped)")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_fails_and_dominates() {
        let mut r = Report::new("x");
        r.check("a", 1e-3, 1e-2).check("b", f64::NAN, 1.0);
        assert!(!r.passed());
        assert!(r.residual().is_nan());
        assert_eq!(r.failures().len(), 1);
    }
}
