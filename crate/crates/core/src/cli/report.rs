//! Report envelope and atomic file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;

pub const FAMILY_CAVEAT: &str = "sup-type values are lower bounds: the supremum runs over a finite ball family";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config_fingerprint: String,
    pub results: serde_json::Value,
    pub warnings: Vec<String>,
    /// Only filled with `--timing`, so default reports stay byte-stable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<u64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// SHA-256 over the canonical config JSON and the raw input bytes.
pub fn fingerprint(cfg: &ExperimentConfig, inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(cfg).expect("config serializes"));
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

/// Write through a sibling temp file and rename into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp: PathBuf = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

/// CSV with a header row; numbers use shortest round-trip formatting.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
