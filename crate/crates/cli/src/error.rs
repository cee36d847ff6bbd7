use thiserror::Error;

/// Failures of a CLI run, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<fiberent::Error> for CliError {
    fn from(e: fiberent::Error) -> Self {
        use fiberent::Error as E;
        match e {
            E::NoConvergence(_) | E::NonFinite | E::NotHermitian(_) | E::InvalidDensity(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}
