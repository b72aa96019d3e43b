//! Experiment reports and tolerance checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceKind {
    /// `|m - v| ≤ tol`.
    Abs,
    /// `|m - v| ≤ tol |v|`.
    Rel,
    /// `m ≤ v + tol`.
    AtMost,
    /// `m ≥ v - tol`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub label: String,
    pub value: f64,
    pub tolerance: f64,
    pub kind: ToleranceKind,
}

impl Target {
    pub fn satisfied_by(&self, m: f64) -> bool {
        if !m.is_finite() {
            return false;
        }
        match self.kind {
            ToleranceKind::Abs => (m - self.value).abs() <= self.tolerance,
            ToleranceKind::Rel => (m - self.value).abs() <= self.tolerance * self.value.abs(),
            ToleranceKind::AtMost => m <= self.value + self.tolerance,
            ToleranceKind::AtLeast => m >= self.value - self.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub parameters: BTreeMap<String, String>,
    pub measured: Vec<Measured>,
    pub targets: Vec<Target>,
    pub pass: bool,
    pub seed: u64,
    pub runtime_ms: u64,
    pub notes: String,
}

impl ExperimentReport {
    pub fn measured_value(&self, label: &str) -> Option<f64> {
        self.measured
            .iter()
            .find(|m| m.label == label)
            .map(|m| m.value)
    }

    /// Labels of targets that are not met.
    pub fn failures(&self) -> Vec<&str> {
        self.targets
            .iter()
            .filter(|t| {
                !self
                    .measured_value(&t.label)
                    .is_some_and(|m| t.satisfied_by(m))
            })
            .map(|t| t.label.as_str())
            .collect()
    }

    /// Recomputes `pass` from the targets.
    pub fn evaluate(&mut self) {
        self.pass = !self.targets.is_empty() && self.failures().is_empty();
    }
}

/// Spread of a family of positive ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioStatistic {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub spread: f64,
}

impl RatioStatistic {
    /// `None` when the family is empty or contains a nonpositive ratio.
    pub fn from_ratios(ratios: &[f64]) -> Option<Self> {
        if ratios.is_empty() || ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return None;
        }
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        Some(Self {
            min_ratio: min,
            max_ratio: max,
            spread: max / min,
        })
    }
}

/// Accumulates measurements and targets for one experiment instance.
#[derive(Debug, Clone, Default)]
pub struct ReportBuilder {
    measured: Vec<Measured>,
    targets: Vec<Target>,
    notes: Vec<String>,
}

impl ReportBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn measure(&mut self, label: impl Into<String>, value: f64) -> &mut Self {
        self.measured.push(Measured {
            label: label.into(),
            value,
        });
        self
    }

    /// Records `value` and a target for it.
    pub fn check(
        &mut self,
        label: impl Into<String>,
        value: f64,
        target: f64,
        tolerance: f64,
        kind: ToleranceKind,
    ) -> &mut Self {
        let label = label.into();
        self.measure(label.clone(), value);
        self.targets.push(Target {
            label,
            value: target,
            tolerance,
            kind,
        });
        self
    }

    pub fn at_most(&mut self, label: impl Into<String>, value: f64, bound: f64) -> &mut Self {
        self.check(label, value, bound, 0.0, ToleranceKind::AtMost)
    }

    pub fn at_least(&mut self, label: impl Into<String>, value: f64, bound: f64) -> &mut Self {
        self.check(label, value, bound, 0.0, ToleranceKind::AtLeast)
    }

    /// Records min, max and spread of a ratio family, with `spread < limit`.
    pub fn ratio_family(
        &mut self,
        prefix: &str,
        ratios: &[f64],
        limit: f64,
    ) -> Option<RatioStatistic> {
        match RatioStatistic::from_ratios(ratios) {
            Some(st) => {
                self.measure(format!("{prefix}min_ratio"), st.min_ratio);
                self.measure(format!("{prefix}max_ratio"), st.max_ratio);
                self.check(
                    format!("{prefix}spread"),
                    st.spread,
                    limit,
                    0.0,
                    ToleranceKind::AtMost,
                );
                Some(st)
            }
            None => {
                self.check(
                    format!("{prefix}spread"),
                    f64::NAN,
                    limit,
                    0.0,
                    ToleranceKind::AtMost,
                );
                self.note(format!("{prefix}ratio family empty or nonpositive"));
                None
            }
        }
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn finish(
        self,
        experiment_id: String,
        parameters: BTreeMap<String, String>,
        seed: u64,
    ) -> ExperimentReport {
        let mut r = ExperimentReport {
            experiment_id,
            parameters,
            measured: self.measured,
            targets: self.targets,
            pass: false,
            seed,
            runtime_ms: 0,
            notes: self.notes.join("; "),
        };
        r.evaluate();
        r
    }
}
