use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::format::FORMAT_TAG;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Envelope of every command's output. Nothing in it depends on the clock
/// unless timing was asked for, so identical inputs give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub format: &'static str,
    pub command: &'static str,
    pub inputs: Vec<InputDigest>,
    pub warnings: Vec<String>,
    pub results: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        RunReport {
            format: FORMAT_TAG,
            command,
            inputs: Vec::new(),
            warnings: Vec::new(),
            results: serde_json::Value::Null,
            timing_ms: None,
        }
    }
}

/// Reads a file and records its digest.
pub fn read_input(path: &Path, inputs: &mut Vec<InputDigest>) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    inputs.push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
    String::from_utf8(bytes).map_err(|_| anyhow::anyhow!("{}: not UTF-8", path.display()))
}
