//! On-disk result cache: one JSON file per key, written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::SCHEMA_VERSION;

pub const CACHE_ENV: &str = "WEIGHTFN_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    version: u32,
    key: String,
    value: T,
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

/// Canonical key text and its sha256 digest in hex.
pub fn cache_key(parts: &[(&str, String)]) -> (String, String) {
    let text = parts.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
    let digest = Sha256::digest(text.as_bytes());
    let hex = digest.iter().map(|b| format!("{b:02x}")).collect();
    (text, hex)
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    /// The explicit directory if given, else the environment variable, else none.
    pub fn resolve(explicit: Option<&Path>) -> Option<Cache> {
        if let Some(p) = explicit {
            return Some(Cache::new(p));
        }
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Cache::new)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, digest: &str) -> PathBuf {
        self.root.join(format!("{digest}.json"))
    }

    /// Returns the cached value, or `None` after a warning if the entry is unreadable.
    pub fn load<T: for<'de> Deserialize<'de>>(&self, parts: &[(&str, String)]) -> Option<T> {
        let (text, digest) = cache_key(parts);
        let path = self.path(&digest);
        let raw = fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<Entry<T>>(&raw) {
            Ok(e) if e.version == SCHEMA_VERSION && e.key == text => Some(e.value),
            Ok(_) => {
                eprintln!("warning: stale cache entry {}, recomputing", path.display());
                None
            }
            Err(err) => {
                eprintln!("warning: corrupt cache entry {} ({err}), recomputing", path.display());
                None
            }
        }
    }

    pub fn store<T: Serialize>(&self, parts: &[(&str, String)], value: &T) -> Result<()> {
        let (text, digest) = cache_key(parts);
        fs::create_dir_all(&self.root).map_err(io_err)?;
        let entry = Entry { version: SCHEMA_VERSION, key: text, value };
        let body = serde_json::to_vec(&entry).map_err(|e| Error::Parse(e.to_string()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root).map_err(io_err)?;
        tmp.write_all(&body).map_err(io_err)?;
        tmp.persist(self.path(&digest)).map_err(|e| io_err(e.error))?;
        Ok(())
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("cache I/O: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        let key = [("n", "3".to_string())];
        assert_eq!(c.load::<Vec<u32>>(&key), None);
        c.store(&key, &vec![1u32, 2, 3]).unwrap();
        assert_eq!(c.load::<Vec<u32>>(&key), Some(vec![1, 2, 3]));
        let (_, digest) = cache_key(&key);
        fs::write(dir.path().join(format!("{digest}.json")), "{not json").unwrap();
        assert_eq!(c.load::<Vec<u32>>(&key), None);
    }

    #[test]
    fn key_is_stable() {
        let a = cache_key(&[("sign", "plus".into()), ("n", "2".into())]);
        let b = cache_key(&[("sign", "plus".into()), ("n", "2".into())]);
        assert_eq!(a, b);
        assert_eq!(a.1.len(), 64);
    }
}
