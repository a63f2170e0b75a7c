use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    /// `offset` is a 1-based character position in the input.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("domain error: negative exponent of {0} evaluated at zero")]
    Domain(char),
    #[error("degenerate polynomial in l at m = {m}: {reason}")]
    Degenerate { m: Complex64, reason: String },
    #[error("root finder did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackError {
    #[error("bad seed: {0}")]
    Seed(String),
    #[error("ramification near m = {m} (t = {t}): |dA/dl| = {dadl:e}")]
    Ramification { t: f64, m: Complex64, dadl: f64 },
    #[error("step size underflow at t = {t}")]
    NonConvergence { t: f64 },
    #[error("path endpoints do not match: {0}")]
    Mismatch(String),
    #[error("invalid path spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolError {
    #[error("loop is not closed")]
    NotClosed,
    #[error("winding {winding} is {distance} away from an integer")]
    AmbiguousWinding { winding: f64, distance: f64 },
    #[error("tame symbol extrapolation unstable: {outer} vs {inner}")]
    ExtrapolationUnstable { outer: Complex64, inner: Complex64 },
    #[error("no rational p/q with q <= {q_max} within {tol:e} of {value}")]
    NoRational { value: f64, q_max: i64, tol: f64 },
    #[error("no recognitions supplied")]
    Empty,
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Form(#[from] FormError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JonesError {
    #[error("growth fit needs at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error("regulator needs a closed loop")]
    NotClosed,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("unknown knot '{0}'")]
    UnknownKnot(String),
    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}
