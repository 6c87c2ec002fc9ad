use std::fmt;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<xxchain::Error> for CliError {
    fn from(e: xxchain::Error) -> Self {
        use xxchain::Error as E;
        match e {
            E::InvalidArgument(_) | E::PreconditionViolation(_) | E::ResourceLimit { .. } => {
                CliError::Usage(e.to_string())
            }
            E::NumericFailure { .. } => CliError::Numeric(e.to_string()),
            E::Io(_) | E::Csv(_) => CliError::Io(e.to_string()),
            E::Json(ref j) if j.is_io() => CliError::Io(e.to_string()),
            E::Json(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
