//! Content-addressed JSON cache for expensive series.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Bumped whenever the I-function or q normalization changes, so stale
/// entries are never read back.
pub const CONVENTION_VERSION: &str = "ifun-k0/q-scaled-(-(n+1))^(n+1)/v1";

/// The fields a cached value depends on.
#[derive(Clone, Debug, Serialize)]
pub struct CacheKey {
    pub subcommand: String,
    pub n: usize,
    pub lambda: String,
    pub order: usize,
    pub k: usize,
    pub zmax: i64,
    pub i: usize,
    pub convention: &'static str,
}

impl CacheKey {
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("key serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

/// Where a value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Hit,
    Computed,
    /// The stored entry was unreadable and has been replaced.
    Repaired,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(&self, key: &CacheKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", key.digest())))
    }

    /// Loads `key`, or computes and stores it. A corrupt entry is recomputed
    /// and overwritten with a warning on stderr.
    pub fn get_or_compute<T, E>(&self, key: &CacheKey, compute: impl FnOnce() -> Result<T, E>) -> Result<(T, Source), E>
    where
        T: Serialize + DeserializeOwned,
    {
        let Some(path) = self.path_for(key) else {
            return compute().map(|v| (v, Source::Computed));
        };
        let mut source = Source::Computed;
        if let Ok(text) = fs::read_to_string(&path) {
            match serde_json::from_str(&text) {
                Ok(v) => return Ok((v, Source::Hit)),
                Err(e) => {
                    eprintln!("warning: corrupt cache entry {} ({e}); recomputing", path.display());
                    source = Source::Repaired;
                }
            }
        }
        let value = compute()?;
        if let Err(e) = self.store(&path, &value) {
            eprintln!("warning: could not write cache entry {}: {e}", path.display());
        }
        Ok((value, source))
    }

    fn store<T: Serialize>(&self, path: &Path, value: &T) -> std::io::Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec(value)?)?;
        fs::rename(tmp, path)
    }
}
