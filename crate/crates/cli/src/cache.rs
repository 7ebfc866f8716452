//! On-disk cache of |Q|_{L²} per (N, p, solver settings).
//!
//! The file is a single JSON object mapping keys to entries. A file that
//! fails to parse is replaced, with a warning on stderr.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use knorm_core::ground_state::{compute_norms, solve_ground_state, QNorms, SolverConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "KNORM_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub q_l2: f64,
    pub q0: f64,
}

pub struct Cache {
    path: PathBuf,
    entries: BTreeMap<String, Entry>,
    dirty: bool,
}

/// KNORM_CACHE if set, else the user cache directory, else the working directory.
pub fn default_path() -> PathBuf {
    if let Some(p) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(p);
    }
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")));
    match base {
        Some(dir) => dir.join("knorm").join("q_l2.json"),
        None => PathBuf::from(".knorm_cache.json"),
    }
}

/// Short digest of the solver settings, so entries from other grids are not reused.
pub fn grid_key(cfg: &SolverConfig) -> String {
    let json = serde_json::to_string(cfg).expect("solver config serializes");
    let digest = Sha256::digest(json.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn key(dim: u32, p: f64, cfg: &SolverConfig) -> String {
    format!("N={dim};p={p:?};grid={}", grid_key(cfg))
}

impl Cache {
    pub fn open(path: &Path) -> Cache {
        let entries = match fs::read_to_string(path) {
            Ok(text) => match serde_json::from_str(&text) {
                Ok(map) => map,
                Err(err) => {
                    eprintln!("warning: cache {} is corrupt ({err}); rebuilding it", path.display());
                    return Cache { path: path.to_path_buf(), entries: BTreeMap::new(), dirty: true };
                }
            },
            Err(_) => BTreeMap::new(),
        };
        Cache { path: path.to_path_buf(), entries, dirty: false }
    }

    pub fn lookup(&self, dim: u32, p: f64, cfg: &SolverConfig) -> Option<Entry> {
        self.entries.get(&key(dim, p, cfg)).copied()
    }

    pub fn insert(&mut self, dim: u32, p: f64, cfg: &SolverConfig, entry: Entry) {
        let k = key(dim, p, cfg);
        if self.entries.get(&k) != Some(&entry) {
            self.entries.insert(k, entry);
            self.dirty = true;
        }
    }

    /// |Q|_{L²} from the cache, solving on a miss.
    pub fn q_l2(&mut self, dim: u32, p: f64, cfg: &SolverConfig) -> knorm_core::Result<f64> {
        if let Some(e) = self.lookup(dim, p, cfg) {
            return Ok(e.q_l2);
        }
        let (entry, _) = solve_entry(dim, p, cfg)?;
        self.insert(dim, p, cfg, entry);
        Ok(entry.q_l2)
    }

    /// Writes the map back if it changed. Failures only warn: the cache is an
    /// optimization.
    pub fn save(&mut self) {
        if !self.dirty {
            return;
        }
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            let _ = fs::create_dir_all(dir);
        }
        let text = serde_json::to_string_pretty(&self.entries).expect("cache serializes");
        match fs::write(&self.path, text + "\n") {
            Ok(()) => self.dirty = false,
            Err(err) => eprintln!("warning: could not write cache {}: {err}", self.path.display()),
        }
    }
}

pub fn solve_entry(dim: u32, p: f64, cfg: &SolverConfig) -> knorm_core::Result<(Entry, QNorms)> {
    let q = solve_ground_state(dim, p, cfg)?;
    let norms = compute_norms(&q)?;
    Ok((Entry { q_l2: norms.q_l2, q0: q.q0 }, norms))
}
