//! Artifact writing: every output file gets a JSON sidecar recording the
//! configuration hash, tool version, subcommand and effective seed, so a
//! result can always be traced back to the exact inputs that produced it.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub struct ArtifactWriter {
    directory: PathBuf,
    config_sha256: String,
    subcommand: String,
    seed: u64,
    threads: usize,
}

impl ArtifactWriter {
    pub fn new(
        directory: &Path,
        config_text: &str,
        subcommand: &str,
        seed: u64,
        threads: usize,
    ) -> std::io::Result<Self> {
        fs::create_dir_all(directory)?;
        let digest = Sha256::digest(config_text.as_bytes());
        let config_sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            directory: directory.to_path_buf(),
            config_sha256,
            subcommand: subcommand.to_string(),
            seed,
            threads,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.directory.join(name)
    }

    /// Write `contents` to `name` plus the `<name>.meta.json` sidecar.
    pub fn write(&self, name: &str, contents: &[u8]) -> std::io::Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, contents)?;
        let sidecar = serde_json::json!({
            "config_sha256": self.config_sha256,
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": self.subcommand,
            "seed": self.seed,
            "threads": self.threads,
            "file": name,
        });
        fs::write(
            self.directory.join(format!("{name}.meta.json")),
            serde_json::to_string_pretty(&sidecar).expect("sidecar serializes"),
        )?;
        Ok(path)
    }
}
