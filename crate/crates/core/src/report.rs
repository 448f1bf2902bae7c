//! Report types shared by the sampled checkers.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Outcome of a sampled condition check.
///
/// `extremal` is the minimum of the tested quantity over the sample, and
/// `witness` is the configuration attaining it, stored as flat coordinate
/// blocks so that the check can be replayed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub verdict: Verdict,
    pub extremal: f64,
    pub witness: Option<Witness>,
    pub samples: usize,
    /// Samples discarded because a segment left the admissible domain.
    pub discarded: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Free-form diagnostics (worst violations, companion values).
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Extremal sample configuration: named coordinate blocks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub fields: Vec<(String, Vec<f64>)>,
}

impl Witness {
    pub fn new() -> Self {
        Self { fields: Vec::new() }
    }

    pub fn with(mut self, name: &str, data: impl IntoIterator<Item = f64>) -> Self {
        self.fields.push((name.to_string(), data.into_iter().collect()));
        self
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, d)| d.as_slice())
    }
}

impl Default for Witness {
    fn default() -> Self {
        Self::new()
    }
}

/// Two-sided estimate outcome: the raw sides of the inequality and the
/// implied constant `lhs / rhs`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; the inequality under test holds with a finite positive
    /// constant exactly when this is finite and positive.
    pub c_impl: f64,
    pub resolution: usize,
    pub seed: u64,
    pub flags: Vec<String>,
    pub notes: Vec<String>,
}

impl EstimateReport {
    pub fn new(estimate: &str, lhs: f64, rhs: f64, resolution: usize, seed: u64) -> Self {
        Self {
            estimate: estimate.to_string(),
            lhs,
            rhs,
            c_impl: lhs / rhs,
            resolution,
            seed,
            flags: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.c_impl.is_finite() && self.c_impl > 0.0
    }
}
