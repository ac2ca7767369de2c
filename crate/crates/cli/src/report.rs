use std::time::{SystemTime, UNIX_EPOCH};

use invforge::verify::Verdict;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const SCHEMA: u32 = 1;

/// Run metadata that may differ between otherwise identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub generated_unix: u64,
}

impl Header {
    pub fn now() -> Self {
        Header {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            generated_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub paper_anchor: String,
    pub residual_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<usize>,
    pub verdict: Verdict,
    /// Operators under which the check failed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failing: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, verdict: Verdict) -> Self {
        CheckRecord {
            name: name.into(),
            paper_anchor: anchor.into(),
            residual_max: None,
            rank: None,
            expected: None,
            verdict,
            failing: Vec::new(),
            detail: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub header: Header,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub verdict: Verdict,
}

impl ReportDocument {
    /// Sorts checks by name and derives the overall verdict.
    pub fn new(config: RunConfig, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let verdict = Verdict::all(checks.iter().map(|c| c.verdict));
        ReportDocument {
            schema: SCHEMA,
            header: Header::now(),
            config,
            checks,
            verdict,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Layer, RunConfig};

    #[test]
    fn json_round_trip_is_lossless() {
        let config = RunConfig::resolve("verify", &Layer::parse("algebra = AE\ntol = 1e-9", "t").unwrap(), None).unwrap();
        let mut a = CheckRecord::new("invariance/b", "anchor", Verdict::Pass);
        a.residual_max = Some(0.1 + 0.2);
        let mut b = CheckRecord::new("independence-rank", "anchor", Verdict::Fail);
        b.rank = Some(6);
        b.expected = Some(7);
        b.failing = vec!["J_12".into()];
        let doc = ReportDocument::new(config, vec![a, b]);
        assert_eq!(doc.checks[0].name, "independence-rank");
        assert_eq!(doc.verdict, Verdict::Fail);
        let back: ReportDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
    }
}
