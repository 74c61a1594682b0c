//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("metric is not positive definite at node {node} (g11={g11}, det={det})")]
    NonSpdMetric { node: usize, g11: f64, det: f64 },

    #[error("constructed graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("chart resolution too small: nu={nu}, nv={nv} (need >= 2)")]
    ResolutionTooSmall { nu: usize, nv: usize },

    #[error("seam node counts differ: {left} vs {right}")]
    SeamMismatch { left: usize, right: usize },

    #[error("source node set is empty")]
    EmptySource,

    #[error("node {0} is outside the manifold (index out of range)")]
    NodeOutOfRange(usize),

    #[error("operation requires a single grid chart; use the graph backend instead")]
    NotAGrid,

    #[error("fast marching does not support this metric (needs g12 = 0)")]
    UnsupportedMetric,

    #[error("window exhausted before stabilization: {0}; increase window")]
    WindowExhausted(String),

    #[error("target sequence does not escape the window (d(x0, K_n) must increase strictly)")]
    NotEscaping,

    #[error("ray certified span too short: have {have}, need {need}")]
    SpanTooShort { have: f64, need: f64 },

    #[error("sublevel set {{f <= {level}}} is empty; increase window or decrease n")]
    EmptySublevel { level: f64 },

    #[error("level band at a1={a1} or sublevel at a2={a2} is empty")]
    EmptyBand { a1: f64, a2: f64 },

    #[error("degenerate level pair: a1={a1} must exceed a2={a2}")]
    DegenerateBand { a1: f64, a2: f64 },

    #[error("fields have disjoint reliable regions")]
    DisjointReliable,

    #[error("exhaustion ball of radius {radius} exceeds the joint reliable region")]
    ExhaustionUnreliable { radius: f64 },

    #[error("ray is too short for the end partition radii")]
    RayTooShort,

    #[error("end partition did not stabilize over the tested radii")]
    EndsUnstable,

    #[error("unknown scenario `{0}` (expected plane | cylinder | capped_half_cylinder | pants)")]
    UnknownScenario(String),

    #[error("limit did not converge: {0}")]
    NotConverged(String),

    #[error("spec file error at line {line}: {msg}")]
    SpecParse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
