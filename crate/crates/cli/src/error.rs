use std::fmt::Display;
use std::path::Path;

use gyroprior_core::Error as CoreError;

/// Command failure, classified by who has to fix it.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config files or missing inputs. Nothing was processed.
    #[error("config error: {0}")]
    Config(String),
    /// Input files are malformed or inconsistent.
    #[error("data error: {0}")]
    Data(String),
    /// A computation or an output write failed.
    #[error("processing error: {0}")]
    Processing(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Processing(_) => 4,
        }
    }

    pub fn config(msg: impl Display) -> Self {
        CliError::Config(msg.to_string())
    }

    pub fn data(msg: impl Display) -> Self {
        CliError::Data(msg.to_string())
    }

    pub fn processing(msg: impl Display) -> Self {
        CliError::Processing(msg.to_string())
    }

    /// Prefixes the message with `path`, keeping the class.
    pub fn at(self, path: &Path) -> Self {
        let p = path.display();
        match self {
            CliError::Config(m) => CliError::Config(format!("{p}: {m}")),
            CliError::Data(m) => CliError::Data(format!("{p}: {m}")),
            CliError::Processing(m) => CliError::Processing(format!("{p}: {m}")),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config(_) => CliError::Config(e.to_string()),
            CoreError::Dimension { .. }
            | CoreError::OutOfBounds { .. }
            | CoreError::InsufficientData(_)
            | CoreError::Interval { .. }
            | CoreError::Alignment(_)
            | CoreError::Data(_) => CliError::Data(e.to_string()),
            CoreError::Boundary { .. }
            | CoreError::Calibration(_)
            | CoreError::RankDeficient { .. }
            | CoreError::DegeneratePoint { .. } => CliError::Processing(e.to_string()),
        }
    }
}

/// Reading inputs fails as a data error.
pub(crate) fn read_error(path: &Path, e: impl Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

/// Writing outputs fails as a processing error.
pub(crate) fn write_error(path: &Path, e: impl Display) -> CliError {
    CliError::Processing(format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_distinct_exit_codes() {
        assert_eq!(CliError::from(CoreError::Config("x")).exit_code(), 2);
        assert_eq!(CliError::from(CoreError::Data("x")).exit_code(), 3);
        assert_eq!(CliError::from(CoreError::RankDeficient { null_dimension: 2 }).exit_code(), 4);
    }
}
