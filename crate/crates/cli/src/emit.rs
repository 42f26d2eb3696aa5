//! Artifact emission: provenance headers, atomic file writes, stdout
//! fallback.

use anyhow::{Context, Result};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;

/// Comment-line provenance header: tool version, master seed, and the full
/// resolved configuration. Deliberately free of timestamps so identical runs
/// emit identical bytes.
pub fn provenance(config: &RunConfig) -> String {
    format!(
        "# qperc {}\n# master_seed = {}\n# config = {}\n",
        env!("CARGO_PKG_VERSION"),
        config.master_seed,
        serde_json::to_string(config).expect("config serializes"),
    )
}

pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}.{suffix}", prefix.display()))
}

/// Writes through a temporary file and renames, so partial artifacts are
/// never left behind under the final name.
pub fn atomic_write(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let tmp = PathBuf::from(format!("{}.tmp", path.display()));
    {
        let mut file = std::fs::File::create(&tmp)
            .with_context(|| format!("creating {}", tmp.display()))?;
        file.write_all(content.as_bytes())
            .with_context(|| format!("writing {}", tmp.display()))?;
        file.sync_all().ok();
    }
    std::fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into place", tmp.display()))?;
    Ok(())
}

/// Writes to the configured output path, or stdout when none is set.
pub fn deliver(config: &RunConfig, body: &str) -> Result<()> {
    match &config.output {
        Some(path) => {
            atomic_write(path, body)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
