//! Run directories: artifacts plus a manifest with checksums.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use nliso::config::KeyValues;
use nliso::shapes::{io::write_mask, GridSet};
use nliso::Result;

pub const MANIFEST: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Output directory collecting the files of one run.
pub struct RunDir {
    root: PathBuf,
    artifacts: Vec<String>,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(RunDir {
            root: root.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        fs::write(self.path(name), contents)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl serde::Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text)
    }

    /// One JSON object per line.
    pub fn write_lines<T: serde::Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut text = String::new();
        for r in rows {
            text.push_str(&serde_json::to_string(r)?);
            text.push('\n');
        }
        self.write(name, text)
    }

    pub fn write_mask(&mut self, name: &str, set: &GridSet) -> Result<()> {
        let path = self.path(name);
        write_mask(set, &path)?;
        self.artifacts.push(name.to_string());
        let car = path.with_extension("json");
        self.artifacts
            .push(car.file_name().expect("sidecar name").to_string_lossy().into_owned());
        Ok(())
    }

    /// Registers a file written by other code.
    pub fn adopt(&mut self, name: &str) {
        self.artifacts.push(name.to_string());
    }

    /// Writes the manifest; `error` marks the run failed.
    pub fn seal(&self, command: &str, config: &KeyValues, error: Option<&str>) -> Result<()> {
        let rendered = config.render();
        let mut names = self.artifacts.clone();
        names.sort();
        names.dedup();
        let mut artifacts = Vec::new();
        for name in &names {
            if let Ok(bytes) = fs::read(self.path(name)) {
                artifacts.push(json!({ "path": name, "sha256": sha256_hex(&bytes) }));
            }
        }
        let settings: serde_json::Map<String, Value> =
            config.iter().map(|(k, v)| (k.to_string(), Value::String(v.to_string()))).collect();
        let manifest = json!({
            "command": command,
            "status": if error.is_some() { "failed" } else { "ok" },
            "error": error,
            "seed": config.get_raw("seed"),
            "config": settings,
            "config_hash": sha256_hex(rendered.as_bytes()),
            "artifacts": artifacts,
        });
        fs::write(self.path(MANIFEST), serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(())
    }
}
