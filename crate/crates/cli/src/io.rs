use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable file, bad JSON or a schema violation.
    Input(String),
    Core(pcsp_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<pcsp_core::Error> for CliError {
    fn from(e: pcsp_core::Error) -> Self {
        CliError::Core(e)
    }
}

/// Parses a JSON artifact; schema errors name the offending field path.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|msg| CliError::Input(format!("{}: {msg}", path.display())))
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.inner().to_string()
        } else {
            format!("at {path}: {}", e.inner())
        }
    })
}
