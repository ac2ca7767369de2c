use std::fmt;

use serde::{Deserialize, Serialize};

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    pub fn and(self, other: Verdict) -> Verdict {
        Verdict::from_bool(self.is_pass() && other.is_pass())
    }

    pub fn all(items: impl IntoIterator<Item = Verdict>) -> Verdict {
        Verdict::from_bool(items.into_iter().all(Verdict::is_pass))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// One (operator, function) pair of an invariance run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceEntry {
    pub operator: String,
    pub function: String,
    pub residual_max: f64,
    /// Magnitude the residual is compared against (worst sample).
    pub scale: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub entries: Vec<InvarianceEntry>,
    pub n_samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub verdict: Verdict,
}

impl InvarianceReport {
    pub(crate) fn new(entries: Vec<InvarianceEntry>, n_samples: usize, tol: f64, seed: u64) -> Self {
        let verdict = Verdict::all(entries.iter().map(|e| e.verdict));
        InvarianceReport {
            entries,
            n_samples,
            tol,
            seed,
            verdict,
        }
    }

    /// Largest residual over all entries.
    pub fn residual_max(&self) -> f64 {
        self.entries.iter().map(|e| e.residual_max).fold(0.0, f64::max)
    }

    /// Function labels in first-seen order.
    pub fn functions(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.function) {
                out.push(e.function.clone());
            }
        }
        out
    }

    /// Verdict and worst residual for one function across all operators.
    pub fn function_summary(&self, label: &str) -> (Verdict, f64) {
        let es: Vec<&InvarianceEntry> = self.entries.iter().filter(|e| e.function == label).collect();
        (
            Verdict::all(es.iter().map(|e| e.verdict)),
            es.iter().map(|e| e.residual_max).fold(0.0, f64::max),
        )
    }

    pub fn failing(&self) -> impl Iterator<Item = &InvarianceEntry> {
        self.entries.iter().filter(|e| !e.verdict.is_pass())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rows: usize,
    pub cols: usize,
    /// Pivot magnitudes of the best sample.
    pub pivots: Vec<f64>,
    pub rank: usize,
    pub expected: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub n_jet_vars: usize,
    pub algebra_rank: usize,
    pub expected: usize,
    pub family_size: usize,
    pub independence_rank: usize,
    pub invariance: Verdict,
    pub verdict: Verdict,
}

impl fmt::Display for CompletenessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} − {} = {}, family {}, rank {}, invariance {}, {}",
            self.n_jet_vars,
            self.algebra_rank,
            self.expected,
            self.family_size,
            self.independence_rank,
            self.invariance,
            self.verdict
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEntry {
    pub operator: String,
    /// Worst least-squares residual over samples.
    pub residual: f64,
    pub scale: f64,
    /// Fitted scalar part (`σ` or `ρ`) at the first sample.
    pub scalar: C64,
    /// Largest fitted skew coefficient at the first sample.
    pub skew_max: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub tensor: String,
    pub entries: Vec<CovarianceEntry>,
    pub verdict: Verdict,
}
