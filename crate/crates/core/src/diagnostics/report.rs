//! Serializable diagnostic records.

use serde::{Deserialize, Serialize};

/// One checked quantity: `pass` is `value ≤ tolerance` unless built otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub name: String,
    /// Which identity or estimate the check exercises.
    pub anchor: String,
    pub params: serde_json::Value,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl DiagnosticRecord {
    /// Record passing when `value ≤ tolerance` (NaN fails).
    pub fn at_most(
        name: impl Into<String>,
        anchor: impl Into<String>,
        value: f64,
        tolerance: f64,
    ) -> Self {
        DiagnosticRecord {
            name: name.into(),
            anchor: anchor.into(),
            params: serde_json::Value::Null,
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    /// Record with an explicit verdict (for sign or monotonicity checks).
    pub fn verdict(
        name: impl Into<String>,
        anchor: impl Into<String>,
        value: f64,
        tolerance: f64,
        pass: bool,
    ) -> Self {
        DiagnosticRecord {
            name: name.into(),
            anchor: anchor.into(),
            params: serde_json::Value::Null,
            value,
            tolerance,
            pass,
        }
    }

    pub fn with_params(mut self, params: serde_json::Value) -> Self {
        self.params = params;
        self
    }
}
