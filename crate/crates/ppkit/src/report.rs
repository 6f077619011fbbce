//! JSON report envelope shared by all subcommands.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "ppkit-report v1";

/// One named pass/fail check inside a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }

    /// `value < limit`, with both numbers in the detail.
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value < limit, format!("{value:.6e} < {limit:.6e}"))
    }
}

/// Settings of one invocation, echoed verbatim into its report.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub domain: Option<String>,
    pub seed: u64,
    pub nodes: Option<usize>,
    pub tol: Option<f64>,
    pub levels: Option<usize>,
    pub out: Option<String>,
    pub format: String,
    /// Command-specific flags, as given.
    pub extra: serde_json::Map<String, Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub timestamp: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub body: Value,
}

impl Report {
    pub fn new(config: RunConfig, checks: Vec<Check>, body: Value) -> Self {
        Self {
            schema: SCHEMA,
            command: config.command.clone(),
            pass: checks.iter().all(|c| c.pass),
            config,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            checks,
            body,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
