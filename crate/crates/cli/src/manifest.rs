//! Outputs are staged in memory and written only once a command has
//! succeeded; the manifest goes last.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::formats::to_json;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub inputs: Vec<FileDigest>,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub exit_code: i32,
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn digest(path: &Path, bytes: &[u8]) -> FileDigest {
    FileDigest { path: path.display().to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 }
}

pub struct Run {
    command: String,
    arguments: Vec<String>,
    started: Instant,
    inputs: Vec<FileDigest>,
    staged: Vec<(PathBuf, Vec<u8>)>,
}

impl Run {
    pub fn new(command: &str, arguments: Vec<String>) -> Self {
        Self { command: command.into(), arguments, started: Instant::now(), inputs: Vec::new(), staged: Vec::new() }
    }

    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.inputs.push(digest(path, &bytes));
        Ok(bytes)
    }

    pub fn read_text(&mut self, path: &Path) -> Result<String, CliError> {
        String::from_utf8(self.read(path)?).map_err(|_| CliError::Usage(format!("{}: not UTF-8", path.display())))
    }

    pub fn stage(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.staged.push((path, bytes));
    }

    /// Writes every staged file, then the manifest at `manifest`.
    ///
    /// On failure the files already written are removed again.
    pub fn commit(self, manifest: &Path, exit_code: i32) -> Result<RunManifest, CliError> {
        let mut written: Vec<PathBuf> = Vec::new();
        let result = (|| {
            let mut outputs = Vec::new();
            for (path, bytes) in &self.staged {
                write_new(path, bytes, &mut written)?;
                outputs.push(digest(path, bytes));
            }
            let m = RunManifest {
                command: self.command.clone(),
                arguments: self.arguments.clone(),
                inputs: self.inputs.clone(),
                tool_version: env!("CARGO_PKG_VERSION").into(),
                wall_time_s: self.started.elapsed().as_secs_f64(),
                exit_code,
                outputs,
            };
            write_new(manifest, &to_json(&m)?, &mut written)?;
            Ok(m)
        })();
        if result.is_err() {
            for p in written.iter().rev() {
                let _ = fs::remove_file(p);
            }
        }
        result
    }
}

fn write_new(path: &Path, bytes: &[u8], written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::Io(format!("{}: {e}", path.display())));
    }
    written.push(path.to_path_buf());
    Ok(())
}
