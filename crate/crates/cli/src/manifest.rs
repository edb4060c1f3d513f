use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{CliError, IoContext};

pub const MANIFEST: &str = "manifest.json";

/// Record of one command invocation, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, A: Serialize> {
    pub command: &'static str,
    pub tool_version: &'static str,
    /// Every flag after defaults are applied.
    pub arguments: &'a A,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<String>,
    /// Command-specific facts such as vertex counts.
    pub details: serde_json::Value,
    pub wall_time_secs: f64,
}

/// Output directory that remembers which files were written to it.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
    start: Instant,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).at(root)?;
        Ok(OutputDir { root: root.to_path_buf(), written: Vec::new(), start: Instant::now() })
    }

    /// Creates `name` (which may contain subdirectories) and hands the
    /// writer to `f`.
    pub fn write<T>(
        &mut self,
        name: &str,
        f: impl FnOnce(fs::File) -> Result<T, gac_core::GacError>,
    ) -> Result<T, CliError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).at(parent)?;
        }
        let file = fs::File::create(&path).at(&path)?;
        let out = f(file)?;
        self.written.push(name.to_string());
        Ok(out)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let path = self.root.join(name);
        let mut text =
            serde_json::to_string_pretty(value).map_err(|source| CliError::Json { path: path.clone(), source })?;
        text.push('\n');
        fs::write(&path, text).at(&path)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn finish<A: Serialize>(
        mut self,
        command: &'static str,
        arguments: &A,
        seed: Option<u64>,
        inputs: Vec<PathBuf>,
        details: serde_json::Value,
    ) -> Result<(), CliError> {
        let manifest = RunManifest {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            arguments,
            seed,
            inputs,
            outputs: self.written.clone(),
            details,
            wall_time_secs: self.start.elapsed().as_secs_f64(),
        };
        self.write_json(MANIFEST, &manifest)
    }
}
