use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use clvr_core::{ClvrError, ErrorKind};

#[derive(Debug)]
pub enum CliError {
    Core(ClvrError),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    /// 2 bad input or config, 3 file system, 4 too large for brute force,
    /// 5 numeric failure during execution.
    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Io => 3,
                ErrorKind::Tractability => 4,
                ErrorKind::Numeric => 5,
            },
        };
        ExitCode::from(code)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<ClvrError> for CliError {
    fn from(e: ClvrError) -> Self {
        CliError::Core(e)
    }
}
