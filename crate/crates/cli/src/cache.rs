//! Lazily built, disk-cached factor sieves.
//!
//! Cache files live in `$ERGOLAB_CACHE_DIR`, else `$XDG_CACHE_HOME/ergolab`,
//! else `~/.cache/ergolab`, and are named `spf-{limit}.bin`. A failure to
//! read or write the cache is reported as a note and never aborts a run.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use ergolab::arith::FactorSieve;

use crate::{CliError, CliResult};

/// Largest limit a 32-bit table can hold.
pub const MAX_SIEVE_LIMIT: u64 = u32::MAX as u64 - 1;

pub fn default_cache_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os("ERGOLAB_CACHE_DIR") {
        return Some(PathBuf::from(d));
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(d).join("ergolab"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("ergolab"))
}

pub fn cache_file(dir: &Path, limit: u64) -> PathBuf {
    dir.join(format!("spf-{limit}.bin"))
}

/// Holds the largest sieve built so far and hands it out for any smaller
/// limit.
#[derive(Debug, Default)]
pub struct SieveCache {
    dir: Option<PathBuf>,
    current: Option<Arc<FactorSieve>>,
    pub notes: Vec<String>,
}

impl SieveCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir, current: None, notes: Vec::new() }
    }

    pub fn from_env() -> Self {
        Self::new(default_cache_dir())
    }

    /// A sieve with limit at least `limit`.
    pub fn get(&mut self, limit: u64) -> CliResult<Arc<FactorSieve>> {
        let limit = limit.max(2);
        if let Some(s) = &self.current {
            if s.limit() >= limit {
                return Ok(s.clone());
            }
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(CliError::Resources(format!(
                "a sieve up to {limit} is needed, beyond the 32-bit table maximum {MAX_SIEVE_LIMIT}"
            )));
        }
        let sieve = match self.load(limit) {
            Some(s) => s,
            None => {
                let s = FactorSieve::new(limit)?;
                self.store(&s);
                s
            }
        };
        let sieve = Arc::new(sieve);
        self.current = Some(sieve.clone());
        Ok(sieve)
    }

    /// Smallest cached sieve covering `limit`.
    fn load(&mut self, limit: u64) -> Option<FactorSieve> {
        let dir = self.dir.as_ref()?;
        let mut candidates: Vec<u64> = std::fs::read_dir(dir)
            .ok()?
            .filter_map(|e| {
                let name = e.ok()?.file_name().into_string().ok()?;
                name.strip_prefix("spf-")?.strip_suffix(".bin")?.parse::<u64>().ok()
            })
            .filter(|&l| l >= limit)
            .collect();
        candidates.sort_unstable();
        for l in candidates {
            let path = cache_file(dir, l);
            match FactorSieve::read_cache(&path) {
                Ok(s) if s.limit() == l => return Some(s),
                Ok(_) => self.notes.push(format!("ignoring {}: limit does not match its name", path.display())),
                Err(e) => self.notes.push(format!("ignoring {}: {e}", path.display())),
            }
        }
        None
    }

    fn store(&mut self, sieve: &FactorSieve) {
        let Some(dir) = &self.dir else { return };
        let path = cache_file(dir, sieve.limit());
        // write under a temporary name so readers never see a partial file
        let tmp = dir.join(format!("spf-{}.bin.{}.tmp", sieve.limit(), std::process::id()));
        let result = std::fs::create_dir_all(dir)
            .map_err(ergolab::Error::from)
            .and_then(|_| sieve.write_cache(&tmp))
            .and_then(|_| std::fs::rename(&tmp, &path).map_err(ergolab::Error::from));
        if let Err(e) = result {
            let _ = std::fs::remove_file(&tmp);
            self.notes.push(format!("could not write sieve cache {}: {e}", path.display()));
        }
    }
}
