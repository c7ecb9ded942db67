//! Structured text reports for verification experiments.
//!
//! Reports render to a stable key/value text format so that identical
//! configurations produce byte-identical output; wall-clock runtime is
//! carried separately and excluded from the deterministic body.

use crate::rng::GENERATOR;

pub const SCHEMA_VERSION: u32 = 1;

/// Experiment verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every check passed within its pinned tolerance.
    Confirmed,
    /// At least one check landed outside its tolerance.
    Refuted,
    /// Not enough data to decide either way.
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Confirmed => write!(f, "CONFIRMED"),
            Verdict::Refuted => write!(f, "REFUTED"),
            Verdict::Inconclusive => write!(f, "INCONCLUSIVE"),
        }
    }
}

/// One report: config echo, measurement lines, optional tables, verdict.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    config: Vec<(String, String)>,
    measurements: Vec<(String, String)>,
    tables: Vec<(String, String)>,
    notes: Vec<String>,
    pub verdict: Verdict,
    /// Seconds; excluded from the deterministic body.
    pub runtime: Option<f64>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, seed: u64) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            seed,
            config: Vec::new(),
            measurements: Vec::new(),
            tables: Vec::new(),
            notes: Vec::new(),
            verdict: Verdict::Inconclusive,
            runtime: None,
        }
    }

    pub fn config(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn measure(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.measurements.push((key.to_string(), value.to_string()));
        self
    }

    pub fn table(&mut self, title: &str, body: impl Into<String>) -> &mut Self {
        self.tables.push((title.to_string(), body.into()));
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    /// The deterministic body: everything except runtime.
    pub fn render_deterministic(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("schema: {SCHEMA_VERSION}\n"));
        out.push_str(&format!("experiment: {}\n", self.experiment));
        out.push_str(&format!("generator: {GENERATOR}\n"));
        out.push_str(&format!("seed: {}\n", self.seed));
        for (k, v) in &self.config {
            out.push_str(&format!("config.{k}: {v}\n"));
        }
        for (k, v) in &self.measurements {
            out.push_str(&format!("measure.{k}: {v}\n"));
        }
        for (title, body) in &self.tables {
            out.push_str(&format!("table.{title}:\n"));
            for line in body.lines() {
                out.push_str(&format!("  {line}\n"));
            }
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }

    /// Full render: deterministic body plus the runtime line, if set.
    pub fn render(&self) -> String {
        let mut out = self.render_deterministic();
        if let Some(rt) = self.runtime {
            out.push_str(&format!("runtime_seconds: {rt:.3}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_stable_and_excludes_runtime() {
        let mut r = ExperimentReport::new("demo", 42);
        r.config("graph", "P3")
            .measure("tv", 0.01)
            .table("counts", "a 1\nb 2")
            .note("all cells covered");
        r.verdict = Verdict::Confirmed;
        r.runtime = Some(1.234);
        let det = r.render_deterministic();
        assert!(det.contains("schema: 1"));
        assert!(det.contains("config.graph: P3"));
        assert!(det.contains("  a 1"));
        assert!(det.contains("verdict: CONFIRMED"));
        assert!(!det.contains("runtime"));
        assert!(r.render().contains("runtime_seconds: 1.234"));

        let mut r2 = ExperimentReport::new("demo", 42);
        r2.config("graph", "P3")
            .measure("tv", 0.01)
            .table("counts", "a 1\nb 2")
            .note("all cells covered");
        r2.verdict = Verdict::Confirmed;
        r2.runtime = Some(9.876);
        assert_eq!(det, r2.render_deterministic());
    }

    #[test]
    fn verdict_display() {
        assert_eq!(Verdict::Confirmed.to_string(), "CONFIRMED");
        assert_eq!(Verdict::Refuted.to_string(), "REFUTED");
        assert_eq!(Verdict::Inconclusive.to_string(), "INCONCLUSIVE");
    }
}
