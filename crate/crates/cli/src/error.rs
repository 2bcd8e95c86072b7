use thiserror::Error;

/// Failure of one CLI invocation, mapped onto a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("missing argument: {0}")]
    MissingDependency(String),

    #[error(transparent)]
    Core(#[from] reserve_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 parse, 3 range or infeasible, 4 missing flag dependency, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use reserve_core::Error as E;
        match self {
            CliError::Parse(_) => 2,
            CliError::Range(_) => 3,
            CliError::MissingDependency(_) => 4,
            CliError::Core(e) => match e {
                E::InvalidScheme(_)
                | E::InvalidProblem(_)
                | E::InvalidRoster(_)
                | E::UnknownCategory(_)
                | E::Shape(_)
                | E::NotAdditive(_) => 2,
                E::PeriodOutOfRange { .. } | E::RosterExhausted { .. } | E::BlockLength { .. } => 3,
                E::DegenerateCycle(_) | E::Contract(_) => 1,
            },
            CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
