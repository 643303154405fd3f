use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {x} lies outside the domain [{a}, {b}]")]
    Domain { x: f64, a: f64, b: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("period {period} exceeds max_period {max}")]
    PeriodLimit { period: usize, max: usize },
    #[error("unknown map family `{0}`")]
    UnknownFamily(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("node {0} has no trapping region (attracting node)")]
    NoRegion(usize),
    #[error("no window of period {period} in [{lo}, {hi}]")]
    WindowNotFound { period: usize, lo: f64, hi: f64 },
    #[error("classification failed at depth {depth}: {reason}")]
    Classification { depth: usize, reason: String },
    #[error("index {index} out of range 0..={max}")]
    OutOfRange { index: i64, max: i64 },
    #[error("orbit escaped the itinerary cells at step {step}")]
    Escape { step: usize },
    #[error("word `{0}` is not admissible")]
    Inadmissible(String),
    #[error("shift is reducible: no dense orbit")]
    Reducible,
    #[error("node {0} is not a Cantor node")]
    NotCantor(usize),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
