use std::fmt;

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Design infeasible (exit 2).
    Infeasible(String),
    /// Verification ran and failed (exit 3).
    VerifyFailed(String),
    /// Bad spec, grid, arguments or input files (exit 4).
    Input(String),
    /// Numerical breakdown or I/O failure while writing (exit 1).
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => 2,
            CliError::VerifyFailed(_) => 3,
            CliError::Input(_) => 4,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Infeasible(m) => write!(f, "design infeasible: {m}"),
            CliError::VerifyFailed(m) => write!(f, "verification failed: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<sqzsta::Error> for CliError {
    fn from(e: sqzsta::Error) -> Self {
        use sqzsta::Error::*;
        match e {
            DesignInfeasible { .. } | SignSplit(_) => CliError::Infeasible(e.to_string()),
            IllPosed { .. } | Unsupported(_) | Consistency(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("csv: {e}"))
    }
}
