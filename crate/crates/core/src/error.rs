use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("infeasible power split: discriminant {discriminant:.3e} < 0")]
    InfeasiblePower { discriminant: f64 },

    #[error("degenerate quadratic: leading coefficient {0:.3e}")]
    DegenerateQuadratic(f64),

    #[error("phase boundary infeasible for amplitude {amplitude:.3e} and margin {margin:.3e}")]
    PhaseInfeasible { amplitude: f64, margin: f64 },

    #[error("probability {0} outside (0, 1)")]
    Domain(f64),

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("C({n}, {k}) = {count} supports exceeds the budget of {limit}; shrink the grid")]
    CombinatorialBudget { n: usize, k: usize, count: u128, limit: u128 },

    #[error("invalid experiment spec:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("config: {0}")]
    Config(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { field: field.into(), reason: reason.into() }
    }
}
