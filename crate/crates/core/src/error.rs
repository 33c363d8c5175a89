use thiserror::Error;

use crate::scheme::SchemeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("closure of {scheme} is singular: {reason}")]
    SingularClosure { scheme: SchemeId, reason: String },

    #[error("{scheme} takes {expected} free parameters, got {got}")]
    InvalidParamCount {
        scheme: SchemeId,
        expected: usize,
        got: usize,
    },

    #[error("grid with {n_intervals} intervals is too small for boundary depth {depth} (need at least {min})")]
    GridTooSmall {
        n_intervals: usize,
        depth: usize,
        min: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("matrix A is singular to working precision (pivot {pivot:e} at row {row})")]
    SingularA { row: usize, pivot: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("node {node} is not a boundary node of {scheme}")]
    InvalidNode { scheme: SchemeId, node: usize },

    #[error("omega must lie in (0, pi], got {0}")]
    OmegaOutOfRange(f64),

    #[error("denominator of the modified wavenumber vanishes at omega = {omega}")]
    DenominatorVanishes { omega: f64 },

    #[error("{component} error never reaches sigma = {sigma} at node {node}")]
    NoCrossing {
        node: usize,
        component: ErrorComponent,
        sigma: f64,
    },

    #[error("eigenvalue computation did not converge")]
    EigenFailure,

    #[error("no feasible point found: every evaluated member hit the penalty")]
    NoFeasiblePoint,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("non-positive pressure or density at t = {t} (node x={ix}, y={iy})")]
    NegativePressure { t: f64, ix: usize, iy: usize },

    #[error("degenerate error sequence: {0}")]
    DegenerateErrors(String),

    #[error("malformed scheme file: {0}")]
    SchemeFormat(String),
}

/// Which part of the modified wavenumber a resolution error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ErrorComponent {
    Dispersive,
    Dissipative,
}

impl std::fmt::Display for ErrorComponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ErrorComponent::Dispersive => f.write_str("dispersive"),
            ErrorComponent::Dissipative => f.write_str("dissipative"),
        }
    }
}
