//! Structured run reports shared by the CLI and the library checks.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, details: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            details: details.into(),
        }
    }
}

/// One report per CLI run. Optional sections are omitted when empty so the
/// JSON stays small and stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub tolerances: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossings: Option<Vec<Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, config: Value, tolerances: Value) -> Self {
        Self {
            tool: "wallcross".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            tolerances,
            degree: None,
            certificate: None,
            crossings: None,
            delta: None,
            result: None,
            checks: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}
