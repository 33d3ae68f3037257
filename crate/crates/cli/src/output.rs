//! Output sink selection (stdout or file) shared by all subcommands.

use std::io::Write;
use std::path::PathBuf;

use crate::run::CliError;

pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn from(path: Option<PathBuf>) -> Self {
        match path {
            Some(p) => Sink::File(p),
            None => Sink::Stdout,
        }
    }

    /// Write the fully rendered bytes in one shot so identical runs produce
    /// identical files.
    pub fn write_all(&self, bytes: &[u8]) -> Result<(), CliError> {
        match self {
            Sink::Stdout => {
                std::io::stdout()
                    .write_all(bytes)
                    .map_err(CliError::Io)?;
                Ok(())
            }
            Sink::File(path) => {
                if let Some(parent) = path.parent() {
                    if !parent.as_os_str().is_empty() {
                        std::fs::create_dir_all(parent).map_err(CliError::Io)?;
                    }
                }
                std::fs::write(path, bytes).map_err(CliError::Io)
            }
        }
    }
}
