use udw_core::Error;

/// Failure of a run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or inconsistent configuration (exit 2).
    Config(String),
    /// Convergence was required and not reached (exit 3).
    NotConverged(String),
    /// Anything else (exit 1).
    Run(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Run(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::NotConverged(m) => write!(f, "not converged: {m}"),
            CliError::Run(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::ZeroMode
            | Error::ModelFieldMismatch { .. }
            | Error::TooFewCutoffs { .. }
            | Error::MalformedWord(_)
            | Error::OpenSpinorIndex(_)
            | Error::CoincidentTimes(_)
            | Error::OutsideSpace(_)
            | Error::IncompatibleState(_)
            | Error::NotApplicable(_) => CliError::Config(e.to_string()),
            Error::CoincidenceLimit | Error::NotImplemented(_) => CliError::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(e.to_string())
    }
}
