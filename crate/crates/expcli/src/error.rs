use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("not converged: {0}")]
    Convergence(String),
    #[error("oracle deviation {deviation:.3e} in {check} (N = {n_bath}) exceeds {tolerance:.1e}")]
    OracleDeviation {
        check: String,
        n_bath: usize,
        deviation: f64,
        tolerance: f64,
    },
    #[error("strict mode: degenerate ground level in sector {n} (N = {n_bath})")]
    Degenerate { n_bath: usize, n: usize },
    #[error(transparent)]
    Core(spinbath_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config syntax: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("metadata: {0}")]
    Serialize(#[from] toml::ser::Error),
}

impl From<spinbath_core::Error> for CliError {
    fn from(e: spinbath_core::Error) -> Self {
        match e {
            spinbath_core::Error::NotConverged { .. } => Self::Convergence(e.to_string()),
            other => Self::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Parse(_) | Self::Degenerate { .. } => 2,
            Self::Convergence(_) => 3,
            Self::OracleDeviation { .. } => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
