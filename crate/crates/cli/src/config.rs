//! Optional TOML defaults, overridden by explicit flags.
//!
//! ```toml
//! out = "results"
//!
//! [optimize]
//! seed = 7
//! generations = 200
//!
//! [solve]
//! n = [65, 129, 257]
//! t_final = 10.0
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub analyze: AnalyzeDefaults,
    #[serde(default)]
    pub optimize: OptimizeDefaults,
    #[serde(default)]
    pub solve: SolveDefaults,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeDefaults {
    pub n: Option<Vec<usize>>,
    pub refine: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeDefaults {
    pub seed: Option<u64>,
    pub generations: Option<usize>,
    pub population: Option<usize>,
    pub allow_initial: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveDefaults {
    pub n: Option<Vec<usize>>,
    pub t_final: Option<f64>,
    pub epsilon: Option<f64>,
    pub mach: Option<f64>,
    pub travel: Option<f64>,
    pub snapshots: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(e).context(format!("cannot read config {}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::input(e).context(format!("invalid config {}", path.display())))
    }
}
