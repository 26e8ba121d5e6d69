//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite evaluation in {context}: {detail}")]
    NonFinite { context: String, detail: String },

    /// The scalar solver was handed an interval whose endpoint values do
    /// not straddle the target level. Carries both endpoint values so a
    /// caller can see how the declared function class was violated.
    #[error("bracket endpoints do not straddle target: g({lo}) = {g_lo}, g({hi}) = {g_hi}")]
    BracketFailure {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    /// Geometric expansion of a bracket never produced a sign change.
    /// `trace` records the probed points and function values.
    #[error("bracket expansion failed after {} probes; trace: {}", trace.len(), format_trace(trace))]
    BracketExpansion { trace: Vec<(f64, f64)> },

    #[error("root solve did not converge after {iterations} iterations; bracket [{lo}, {hi}], residual {residual:e}")]
    NoConvergence {
        iterations: usize,
        lo: f64,
        hi: f64,
        residual: f64,
    },

    #[error("function class violation: {0}")]
    ClassViolation(String),

    #[error("declared shape `{declared}` contradicts sampling probe: {probed}")]
    ProbeMismatch { declared: String, probed: String },

    #[error("one-sided derivative at 1 ({side}) unavailable: {detail}")]
    DerivativeUnavailable { side: String, detail: String },

    #[error("matrix is singular or badly conditioned: {detail}")]
    SingularMatrix { detail: String },

    #[error("internal consistency check failed: {0}")]
    InternalCheck(String),

    #[error("json: {0}")]
    Json(String),
}

fn format_trace(trace: &[(f64, f64)]) -> String {
    let mut s = String::new();
    for (i, (x, g)) in trace.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        // keep error messages bounded for pathological expansions
        if i >= 8 {
            s.push_str("...");
            break;
        }
        s.push_str(&format!("g({x:.6e}) = {g:.6e}"));
    }
    s
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
