//! Persistent table of known factorizations.
//!
//! File format, one entry per line:
//!
//! ```text
//! # comment
//! 513 = 3^3 * 19
//! 4294967297 = 641 * 6700417
//! ```
//!
//! The exponent is omitted when it is 1. Every entry is re-verified on load
//! (product and primality of each listed prime), so a hand-edited table can
//! never inject a wrong factorization.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::RwLock;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::arith::Factorization;

/// Factorizations of the composite and prime values of `2^m - 1` and
/// `2^m + 1` for `m <= 128`.
const TWO_POWER_TABLE: &str = include_str!("../data/two_power_factors.txt");

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Map from integer to its factorization.
///
/// Readers share the map; inserts take the write lock, so any number of
/// threads may factor through one cache.
#[derive(Debug, Default)]
pub struct FactorCache {
    entries: RwLock<BTreeMap<BigUint, Factorization>>,
    dirty: AtomicBool,
}

impl FactorCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// A cache holding the built-in `2^m +- 1` table.
    pub fn seeded() -> Self {
        let cache = Self::new();
        cache.seed_two_power_tables();
        cache
    }

    /// Adds the built-in `2^m +- 1` table without marking the cache dirty.
    pub fn seed_two_power_tables(&self) {
        let table = Self::parse(TWO_POWER_TABLE).expect("built-in table verifies");
        let mut entries = self.entries.write().expect("cache lock poisoned");
        for (k, v) in table.into_entries() {
            entries.entry(k).or_insert(v);
        }
    }

    /// Loads a cache file; a missing file gives an empty cache.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, CacheError> {
        let path = path.as_ref();
        match fs::read_to_string(path) {
            Ok(text) => Self::parse(&text),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Self::new()),
            Err(source) => Err(CacheError::Io {
                path: path.to_owned(),
                source,
            }),
        }
    }

    /// Parses the text format. Line numbers in errors are 1-based.
    pub fn parse(text: &str) -> Result<Self, CacheError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f = parse_line(line).map_err(|reason| CacheError::Parse {
                line: idx + 1,
                reason,
            })?;
            entries.insert(f.value().clone(), f);
        }
        Ok(FactorCache {
            entries: RwLock::new(entries),
            dirty: AtomicBool::new(false),
        })
    }

    /// Writes every entry sorted by value, atomically (temp file + rename),
    /// and clears the dirty flag.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CacheError> {
        let path = path.as_ref();
        let io_err = |source| CacheError::Io {
            path: path.to_owned(),
            source,
        };
        let file_name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "factors".into());
        let tmp = path.with_file_name(format!(".{file_name}.tmp"));
        {
            let mut out = io::BufWriter::new(fs::File::create(&tmp).map_err(io_err)?);
            out.write_all(self.to_text().as_bytes()).map_err(io_err)?;
            out.flush().map_err(io_err)?;
        }
        fs::rename(&tmp, path).map_err(io_err)?;
        self.dirty.store(false, Ordering::SeqCst);
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let entries = self.entries.read().expect("cache lock poisoned");
        let mut text = String::new();
        for (value, f) in entries.iter() {
            text.push_str(&format!("{value} = {f}\n"));
        }
        text
    }

    pub fn get(&self, n: &BigUint) -> Option<Factorization> {
        self.entries
            .read()
            .expect("cache lock poisoned")
            .get(n)
            .cloned()
    }

    /// Records a factorization. Trivial values (1) are not stored.
    pub fn insert(&self, f: Factorization) {
        if f.value().is_one() {
            return;
        }
        let mut entries = self.entries.write().expect("cache lock poisoned");
        if !entries.contains_key(f.value()) {
            entries.insert(f.value().clone(), f);
            self.dirty.store(true, Ordering::SeqCst);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether entries were inserted since the last load or save.
    pub fn is_dirty(&self) -> bool {
        self.dirty.load(Ordering::SeqCst)
    }

    pub fn entries(&self) -> Vec<Factorization> {
        self.entries
            .read()
            .expect("cache lock poisoned")
            .values()
            .cloned()
            .collect()
    }

    fn into_entries(self) -> BTreeMap<BigUint, Factorization> {
        self.entries.into_inner().expect("cache lock poisoned")
    }
}

impl Clone for FactorCache {
    fn clone(&self) -> Self {
        FactorCache {
            entries: RwLock::new(self.entries.read().expect("cache lock poisoned").clone()),
            dirty: AtomicBool::new(self.is_dirty()),
        }
    }
}

impl PartialEq for FactorCache {
    fn eq(&self, other: &Self) -> bool {
        *self.entries.read().expect("cache lock poisoned")
            == *other.entries.read().expect("cache lock poisoned")
    }
}

fn parse_integer(s: &str) -> Result<BigUint, String> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a decimal integer, found {s:?}"));
    }
    s.parse::<BigUint>().map_err(|e| format!("{s:?}: {e}"))
}

fn parse_line(line: &str) -> Result<Factorization, String> {
    let (lhs, rhs) = line
        .split_once('=')
        .ok_or_else(|| "missing '='".to_string())?;
    let value = parse_integer(lhs)?;
    if value < BigUint::from(2u32) {
        return Err("value must be at least 2".into());
    }
    let mut factors = Vec::new();
    for part in rhs.split('*') {
        let (p, e) = match part.split_once('^') {
            Some((p, e)) => {
                let e: u32 = e
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad exponent {:?}", e.trim()))?;
                (parse_integer(p)?, e)
            }
            None => (parse_integer(part)?, 1),
        };
        factors.push((p, e));
    }
    Factorization::new(value, factors).map_err(|e| e.to_string())
}
