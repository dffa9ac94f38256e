//! Pass/fail reports for the exhaustive checkers.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A single witness against a checked property.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    /// The formula or law that failed, rendered.
    pub formula: String,
    /// Assignment, witnesses, or both sides of a mismatched equation.
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CheckStats {
    pub formulas_checked: u64,
    pub cases_checked: u64,
    pub max_depth: usize,
}

/// Outcome of an exhaustive or sampled verification run. Failing reports
/// always carry at least one counterexample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub counterexamples: Vec<Counterexample>,
    pub stats: CheckStats,
}

impl CheckReport {
    pub fn passing() -> CheckReport {
        CheckReport {
            verdict: Verdict::Pass,
            counterexamples: Vec::new(),
            stats: CheckStats::default(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn push_counterexample(&mut self, formula: impl Into<String>, detail: impl Into<String>) {
        self.verdict = Verdict::Fail;
        self.counterexamples.push(Counterexample {
            formula: formula.into(),
            detail: detail.into(),
        });
    }

    /// Merge another report in, keeping its counterexamples and summing
    /// statistics.
    pub fn absorb(&mut self, other: CheckReport) {
        if other.verdict == Verdict::Fail {
            self.verdict = Verdict::Fail;
        }
        self.counterexamples.extend(other.counterexamples);
        self.stats.formulas_checked += other.stats.formulas_checked;
        self.stats.cases_checked += other.stats.cases_checked;
        self.stats.max_depth = self.stats.max_depth.max(other.stats.max_depth);
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::Pass => write!(
                f,
                "pass ({} formulas, {} cases, depth {})",
                self.stats.formulas_checked, self.stats.cases_checked, self.stats.max_depth
            ),
            Verdict::Fail => {
                writeln!(f, "fail ({} counterexamples)", self.counterexamples.len())?;
                for c in self.counterexamples.iter().take(5) {
                    writeln!(f, "  {} -- {}", c.formula, c.detail)?;
                }
                Ok(())
            }
        }
    }
}
