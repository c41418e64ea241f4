pub mod check;
pub mod gii_demo;
pub mod region_n2;
pub mod spinboson;
pub mod sweep_mub;

use crate::CliError;
use std::path::Path;

pub fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::other(format!("cannot write {}: {e}", path.display())))
}
