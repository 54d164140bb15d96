use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invalid parameters:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(#[from] phaseclass::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Invalid(_) => 2,
            CliError::Numerical(_) | CliError::Io { .. } => 3,
        }
    }
}
