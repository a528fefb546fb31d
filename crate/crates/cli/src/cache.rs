//! On-disk cache of experiment results, enabled by `DARWINISM_CACHE_DIR`.

use std::path::PathBuf;

use darwinism::experiments::{ExperimentResult, ExperimentSpec};
use darwinism::Result;
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "DARWINISM_CACHE_DIR";

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(|d| Self { dir: d.into() })
    }

    /// Model files are inlined into the spec, so the key covers their contents too.
    pub fn key(spec: &ExperimentSpec) -> Result<String> {
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update([0]);
        h.update(serde_json::to_vec(spec)?);
        Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A corrupt or unreadable entry counts as a miss.
    pub fn get(&self, spec: &ExperimentSpec) -> Option<ExperimentResult> {
        let text = std::fs::read_to_string(self.path(&Self::key(spec).ok()?)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, spec: &ExperimentSpec, result: &ExperimentResult) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.path(&Self::key(spec)?);
        crate::commands::write_atomic(&path, |f| Ok(serde_json::to_writer(f, result)?))
    }
}
