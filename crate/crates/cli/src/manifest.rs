use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance of one run: what was asked, with which configuration, on which
/// inputs, producing which files. Contains no timestamps so identical runs
/// produce identical manifests.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: RunConfig,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileDigest>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            tool: "wcr",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed: config.seed,
            config: config.clone(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    /// Records every output, sorted, then writes `manifest.json` into
    /// `out_dir`.
    pub fn write(mut self, out_dir: &Path, outputs: &[String]) -> Result<(), CliError> {
        let mut outputs = outputs.to_vec();
        outputs.sort();
        outputs.dedup();
        for rel in outputs {
            let sha256 = sha256_file(&out_dir.join(&rel))?;
            self.outputs.push(FileDigest { path: rel, sha256 });
        }
        let mut text = serde_json::to_string_pretty(&self).map_err(|e| CliError::Data(e.to_string()))?;
        text.push('\n');
        let path = out_dir.join(MANIFEST_FILE);
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}
