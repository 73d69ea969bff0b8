//! On-disk 6j table, one file per level.
//!
//! Layout (little endian): magic `b"SIXJ"`, format version `u32`, `r: u32`,
//! entry count `u64`, then fixed-width records of six `u16` colors, the log
//! magnitude `f64` and the phase as two `f64`. Entries are keyed by the exact
//! tuple: symmetric tuples share magnitudes but not always signs.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use sixjtv::qarith::{Level, SignedLog};
use sixjtv::sixj::Sextuple;

const MAGIC: &[u8; 4] = b"SIXJ";
const VERSION: u32 = 1;
const HEADER: usize = 4 + 4 + 4 + 8;
const RECORD: usize = 6 * 2 + 3 * 8;

pub struct SixjCache {
    path: PathBuf,
    r: u32,
    entries: BTreeMap<[u16; 6], SignedLog>,
    dirty: bool,
}

fn corrupt(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

impl SixjCache {
    pub fn file_for(dir: &Path, r: u32) -> PathBuf {
        dir.join(format!("sixj-r{r}.bin"))
    }

    /// Opens the table for `lvl`, starting empty when no file exists.
    pub fn open(dir: &Path, lvl: &Level) -> io::Result<Self> {
        let path = Self::file_for(dir, lvl.r());
        let mut cache = Self { path, r: lvl.r(), entries: BTreeMap::new(), dirty: false };
        match fs::read(&cache.path) {
            Ok(bytes) => cache.decode(&bytes)?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        Ok(cache)
    }

    fn decode(&mut self, b: &[u8]) -> io::Result<()> {
        if b.len() < HEADER || &b[0..4] != MAGIC {
            return Err(corrupt("not a 6j cache file"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(b[i..i + 4].try_into().unwrap());
        if u32_at(4) != VERSION {
            return Err(corrupt("unsupported cache version"));
        }
        if u32_at(8) != self.r {
            return Err(corrupt("cache file is for another level"));
        }
        let n = u64::from_le_bytes(b[12..20].try_into().unwrap()) as usize;
        if b.len() != HEADER + n * RECORD {
            return Err(corrupt("truncated cache file"));
        }
        let f64_at = |i: usize| f64::from_le_bytes(b[i..i + 8].try_into().unwrap());
        for k in 0..n {
            let o = HEADER + k * RECORD;
            let tuple: [u16; 6] = std::array::from_fn(|j| u16::from_le_bytes(b[o + 2 * j..o + 2 * j + 2].try_into().unwrap()));
            let v = SignedLog::new(f64_at(o + 12), Complex64::new(f64_at(o + 20), f64_at(o + 28)));
            self.entries.insert(tuple, v);
        }
        Ok(())
    }

    fn key(s: &Sextuple) -> [u16; 6] {
        s.0.map(|x| x as u16)
    }

    pub fn get(&self, s: &Sextuple) -> Option<SignedLog> {
        self.entries.get(&Self::key(s)).copied()
    }

    pub fn insert(&mut self, s: &Sextuple, v: SignedLog) {
        self.entries.insert(Self::key(s), v);
        self.dirty = true;
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Writes the table if it changed since it was opened.
    pub fn save(&mut self) -> io::Result<()> {
        if !self.dirty {
            return Ok(());
        }
        let mut b = Vec::with_capacity(HEADER + self.entries.len() * RECORD);
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&VERSION.to_le_bytes());
        b.extend_from_slice(&self.r.to_le_bytes());
        b.extend_from_slice(&(self.entries.len() as u64).to_le_bytes());
        for (t, v) in &self.entries {
            for x in t {
                b.extend_from_slice(&x.to_le_bytes());
            }
            for x in [v.log_mag, v.phase.re, v.phase.im] {
                b.extend_from_slice(&x.to_le_bytes());
            }
        }
        if let Some(dir) = self.path.parent() {
            fs::create_dir_all(dir)?;
        }
        let tmp = self.path.with_extension("tmp");
        fs::write(&tmp, b)?;
        fs::rename(&tmp, &self.path)?;
        self.dirty = false;
        Ok(())
    }
}
