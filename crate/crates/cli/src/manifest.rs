use std::path::{Path, PathBuf};

use serde::Serialize;

/// Record of one batch run. Contains nothing time- or host-dependent, so
/// reruns write identical bytes.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    /// Output root; task paths below are relative to it.
    pub output: String,
    pub tool_version: &'static str,
    pub tasks: Vec<TaskStatus>,
}

#[derive(Debug, Serialize)]
pub struct TaskStatus {
    pub id: String,
    pub status: String,
    pub path: String,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>, output: &Path) -> Self {
        RunManifest {
            command: command.to_string(),
            config,
            seed,
            inputs: Vec::new(),
            output: output.display().to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            tasks: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), pfold_core::Error> {
        pfold_core::codecs::write_json(path, self)
    }
}

/// `path` relative to `root` when possible, with `/` separators.
pub fn relative(path: &Path, root: &Path) -> String {
    let rel: PathBuf = path.strip_prefix(root).map(Path::to_path_buf).unwrap_or_else(|_| path.to_path_buf());
    rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect::<Vec<_>>().join("/")
}
