//! Structured-text verification reports: diffable, deterministic, one block
//! per check.

use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub check: String,
    pub status: bool,
    pub metric: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub title: String,
    pub checks: Vec<CheckLine>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Report { title: title.to_string(), checks: Vec::new(), notes: Vec::new() }
    }

    pub fn add(&mut self, check: &str, status: bool, metric: f64, tolerance: f64) {
        self.checks.push(CheckLine {
            check: check.to_string(),
            status,
            metric,
            tolerance,
            detail: String::new(),
        });
    }

    pub fn add_detailed(&mut self, check: &str, status: bool, metric: f64, tolerance: f64, detail: &str) {
        self.checks.push(CheckLine {
            check: check.to_string(),
            status,
            metric,
            tolerance,
            detail: detail.to_string(),
        });
    }

    pub fn note(&mut self, s: &str) {
        self.notes.push(s.to_string());
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.status)
    }

    pub fn failed_checks(&self) -> Vec<&CheckLine> {
        self.checks.iter().filter(|c| !c.status).collect()
    }

    fn fmt_value(x: f64) -> String {
        if x.is_infinite() {
            if x > 0.0 { "inf".into() } else { "-inf".into() }
        } else {
            format!("{x:.9e}")
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "report = {}", self.title);
        let _ = writeln!(s, "status = {}", if self.pass() { "pass" } else { "fail" });
        let _ = writeln!(s);
        for c in &self.checks {
            let _ = writeln!(s, "check = {}", c.check);
            let _ = writeln!(s, "status = {}", if c.status { "pass" } else { "fail" });
            let _ = writeln!(s, "metric = {}", Self::fmt_value(c.metric));
            let _ = writeln!(s, "tolerance = {}", Self::fmt_value(c.tolerance));
            if !c.detail.is_empty() {
                let _ = writeln!(s, "detail = {}", c.detail);
            }
            let _ = writeln!(s);
        }
        for n in &self.notes {
            let _ = writeln!(s, "note = {n}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format_is_stable() {
        let mut r = Report::new("demo");
        r.add("alpha", true, 1.0e-3, 2.0e-3);
        r.add("beta", false, f64::INFINITY, 0.5);
        let t = r.to_text();
        assert!(t.contains("report = demo"));
        assert!(t.contains("status = fail"));
        assert!(t.contains("check = alpha"));
        assert!(t.contains("metric = inf"));
        assert!(!r.pass());
        assert_eq!(r.failed_checks().len(), 1);
    }
}
