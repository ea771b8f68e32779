use std::fmt;

use serde::{Deserialize, Serialize};

/// Errors produced by the evidence, combination, indicator and document layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid interval [{lower}, {upper}]: bounds must satisfy 0 <= lower <= upper <= 1")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("invalid assessment: {0}")]
    InvalidAssessment(String),

    #[error("invalid rating scale: {0}")]
    InvalidScale(String),

    #[error("invalid body of evidence: {0}")]
    InvalidBody(String),

    /// The two sources share no overlapping focal pair, so K is undefined.
    /// `step` is 1-based: step `s` fuses source `s` into the running result.
    #[error("total conflict at combination step {step}: sources are completely contradictory")]
    TotalConflict { step: usize },

    #[error("value {value} is not covered by any rating interval; uncovered gaps: {}", format_gaps(.gaps))]
    UnmappedValue { value: f64, gaps: Vec<(f64, f64)> },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("JSON parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("document failed validation:\n{}", format_diagnostics(.0))]
    Validation(Vec<Diagnostic>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// One finding from document validation, addressed by wire field name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn warning(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.field, self.message)
    }
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("  {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn format_gaps(gaps: &[(f64, f64)]) -> String {
    if gaps.is_empty() {
        return "none".to_string();
    }
    gaps.iter()
        .map(|(lo, hi)| format!("({lo}, {hi})"))
        .collect::<Vec<_>>()
        .join(", ")
}
