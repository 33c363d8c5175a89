pub mod analyze;
pub mod export;
pub mod optimize;
pub mod solve;
pub mod verify;

use std::path::Path;

use compact_conserve::{bundled, SchemeDefinition, SchemeFile, SchemeId};

use crate::error::{CliError, CliResult};

/// A bundled id when `source` names one, otherwise a scheme file path.
pub fn load_scheme(source: &str) -> CliResult<SchemeDefinition> {
    if let Ok(id) = source.parse::<SchemeId>() {
        return Ok(bundled(id));
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(CliError::input(anyhow::anyhow!(
            "{source:?} is neither a bundled scheme (P1, P2, P3) nor an existing file"
        )));
    }
    let file = SchemeFile::read(path).map_err(|e| CliError::from(e).context(format!("loading {source}")))?;
    Ok(file.to_definition()?)
}

pub fn parse_id(source: &str) -> CliResult<SchemeId> {
    Ok(source.parse::<SchemeId>()?)
}
