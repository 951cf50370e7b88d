use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("engineering spec invalid: {0}")]
    InvalidSpec(String),

    #[error("class '{class}' is degenerate: {reason}")]
    DegenerateClass { class: String, reason: String },

    #[error("score has zero pooled variance (S'CS <= tolerance)")]
    ZeroVariance,

    #[error("weight-of-evidence rescaling undefined: d'T = {dt} <= 0")]
    WoeSign { dt: f64 },

    #[error("constraint system is infeasible{0}")]
    Infeasible(String),

    #[error("objective is unbounded below over the feasible set")]
    Unbounded,

    #[error("iteration limit reached after {0} iterations")]
    MaxIterations(usize),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("no sign change found for the line-search bracket after {0} expansions")]
    NoRoot(usize),

    #[error("{0}")]
    Data(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
