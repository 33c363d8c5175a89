use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Output directory, created on first use.
pub struct OutDir(PathBuf);

impl OutDir {
    pub fn new(path: PathBuf) -> CliResult<Self> {
        std::fs::create_dir_all(&path)
            .map_err(|e| CliError::input(e).context(format!("cannot create {}", path.display())))?;
        Ok(Self(path))
    }

    pub fn join(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    pub fn write(&self, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
        let path = self.join(name);
        write_atomic(&path, contents)?;
        Ok(path)
    }
}

/// Write to a sibling temporary file and rename it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let wrap = |e: std::io::Error| CliError::input(e).context(format!("cannot write {}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    tmp.write_all(contents).map_err(wrap)?;
    tmp.as_file().sync_all().map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

/// Small CSV builder; every value is written with round-trip precision.
pub struct Csv(String);

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self(header.join(",") + "\n")
    }

    pub fn row(&mut self, fields: &[&dyn std::fmt::Debug]) {
        for (k, f) in fields.iter().enumerate() {
            if k > 0 {
                self.0.push(',');
            }
            let _ = write!(self.0, "{f:?}");
        }
        self.0.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0.into_bytes()
    }
}
