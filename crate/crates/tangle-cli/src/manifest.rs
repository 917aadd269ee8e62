use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cache::CACHE_FORMAT_VERSION;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Record of one command run. `args` replays it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub parameters: BTreeMap<String, String>,
    pub format_version: u32,
    pub parameter_hash: String,
    pub tool_version: String,
    pub seconds: f64,
    /// Per-level `(level, states, seconds)` for enumerations.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<(usize, usize, f64)>,
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>, parameters: BTreeMap<String, String>) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        for (k, v) in &parameters {
            h.update(format!(";{k}={v}").as_bytes());
        }
        Self {
            command: command.to_string(),
            args,
            parameters,
            format_version: CACHE_FORMAT_VERSION,
            parameter_hash: hex::encode(h.finalize()),
            tool_version: TOOL_VERSION.to_string(),
            seconds: 0.0,
            levels: Vec::new(),
        }
    }

    /// Writes `<out>.manifest.json`.
    pub fn write_beside(&self, out: &Path) -> std::io::Result<()> {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(name, text + "\n")
    }
}
