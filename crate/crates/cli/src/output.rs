use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;
use windflow::conic::SolverOptions;

use crate::Failure;

/// Describes one command invocation; written as `manifest.json` beside its
/// outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub inputs: Vec<String>,
    pub seed: Option<u64>,
    pub solver: SolverOptions,
    pub version: &'static str,
    pub git_describe: &'static str,
    pub outputs: Vec<String>,
    pub wall_ms: f64,
}

/// Collects files for one output directory and finishes with its manifest.
pub struct OutputDir {
    dir: PathBuf,
    written: Vec<String>,
    started: Instant,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))
            .map_err(Failure::Input)?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
        let path = self.dir.join(name);
        fs::write(&path, contents)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Input)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value)
            .context("serializing output")
            .map_err(Failure::Input)?;
        text.push('\n');
        self.write(name, text)
    }

    /// Writes CSV produced by `fill` into `name`.
    pub fn write_csv(
        &mut self,
        name: &str,
        fill: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>,
    ) -> Result<(), Failure> {
        let mut buf = Vec::new();
        fill(&mut buf)
            .with_context(|| format!("formatting {name}"))
            .map_err(Failure::Input)?;
        self.write(name, buf)
    }

    pub fn finish(mut self, command: &str, inputs: Vec<String>, seed: Option<u64>, solver: SolverOptions) -> Result<(), Failure> {
        let manifest = RunManifest {
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            inputs,
            seed,
            solver,
            version: env!("CARGO_PKG_VERSION"),
            git_describe: env!("WINDFLOW_GIT_DESCRIBE"),
            outputs: self.written.clone(),
            wall_ms: self.started.elapsed().as_secs_f64() * 1e3,
        };
        self.write_json("manifest.json", &manifest)
    }
}
