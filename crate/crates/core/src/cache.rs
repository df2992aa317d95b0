//! Append-only results cache: one JSON object per line, keyed by a content
//! hash of (group table, subgroup, shifts, k, kind).

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::group::{Elem, GroupTable};
use crate::nilprob::ShiftTuple;
use crate::structure::SubgroupRef;

pub const SCHEMA_VERSION: u32 = 1;
pub const CACHE_FILE: &str = "np-cache.jsonl";
pub const CACHE_DIR_ENV: &str = "NILPROB_CACHE_DIR";

#[derive(Debug, Serialize, Deserialize)]
struct Line {
    schema: u32,
    key: String,
    kind: String,
    value: serde_json::Value,
}

#[derive(Serialize)]
struct KeyMaterial<'a> {
    table: &'a str,
    h: &'a [Elem],
    shifts: Option<&'a [Elem]>,
    k: usize,
    kind: &'a str,
}

/// Cache key for `np(H; shifts)` (`shifts = Some`) or a supremum (`None`).
pub fn cache_key(g: &GroupTable, h: &SubgroupRef, shifts: Option<&ShiftTuple>, k: usize, kind: &str) -> String {
    let table = g.content_hash();
    let material = KeyMaterial { table: &table, h: h.elements(), shifts: shifts.map(|s| s.as_slice()), k, kind };
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    hex::encode(Sha256::digest(&bytes))
}

pub struct ResultCache {
    path: PathBuf,
    entries: Mutex<HashMap<String, serde_json::Value>>,
    writer: Mutex<File>,
}

impl ResultCache {
    /// Opens (creating if needed) the cache file in `dir`. Lines with another
    /// schema version or that fail to parse are ignored.
    pub fn open(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(CACHE_FILE);
        let mut entries = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(&path)?).lines() {
                let line = line?;
                if let Ok(parsed) = serde_json::from_str::<Line>(&line) {
                    if parsed.schema == SCHEMA_VERSION {
                        entries.insert(parsed.key, parsed.value);
                    }
                }
            }
        }
        let writer = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(ResultCache { path, entries: Mutex::new(entries), writer: Mutex::new(writer) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let entries = self.entries.lock().expect("cache lock");
        entries.get(key).and_then(|v| serde_json::from_value(v.clone()).ok())
    }

    pub fn put<T: Serialize>(&self, key: &str, kind: &str, value: &T) -> Result<()> {
        let value = serde_json::to_value(value)?;
        let mut entries = self.entries.lock().expect("cache lock");
        if entries.contains_key(key) {
            return Ok(());
        }
        let line = Line { schema: SCHEMA_VERSION, key: key.to_string(), kind: kind.to_string(), value: value.clone() };
        let mut w = self.writer.lock().expect("cache writer lock");
        serde_json::to_writer(&mut *w, &line)?;
        w.write_all(b"\n")?;
        w.flush()?;
        entries.insert(key.to_string(), value);
        Ok(())
    }
}
