use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] netblow::Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_verification() => 3,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            CliError::Core(e) => e.kind(),
            CliError::Input(_) => "input",
            CliError::Io(_) => "io",
        };
        json!({ "error": { "kind": kind, "message": self.to_string(), "exit_code": self.exit_code() } })
    }
}
