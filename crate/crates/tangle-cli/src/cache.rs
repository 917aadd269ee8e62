//! Resumable checkpoints of transfer-matrix runs.
//!
//! One file per parameter set, named by its hash and rewritten after every
//! completed level. The header repeats the format version and the hash; a
//! file is only used when both match.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use tangle_core::table::CountTable;
use tangle_core::tm::{Count, EnumerateOptions, Enumerator, Tally};
use tangle_core::{Error, Result};

pub const CACHE_FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"TNGLCKPT";

/// Directory from `TANGLE_CACHE_DIR`, else the platform cache directory.
pub fn default_cache_dir() -> PathBuf {
    match std::env::var_os("TANGLE_CACHE_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => dirs::cache_dir()
            .unwrap_or_else(std::env::temp_dir)
            .join("tangle"),
    }
}

/// Hash of everything that changes the states of a run. The target order and
/// thread count are left out: the first is stored in the file, the second
/// never changes any output.
pub fn parameter_hash(opts: &EnumerateOptions) -> String {
    let text = format!(
        "tangle-checkpoint;v={};legs={};tangencies={};cost={};disconnected={};symmetric={};groups={}",
        CACHE_FORMAT_VERSION,
        opts.legs,
        opts.tangencies,
        opts.tangency_cost,
        opts.allow_disconnected,
        opts.symmetric,
        opts.tracks_groups(),
    );
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub struct Checkpoint {
    /// Target order of the run that wrote the file.
    pub target: usize,
    /// Next level to process.
    pub level: usize,
    pub table: CountTable,
    pub entries: Vec<(usize, usize, Vec<u8>, Tally)>,
}

impl Checkpoint {
    /// Whether the pending states are complete for a run to `target`. Moves
    /// past the original target were never generated, so only levels below
    /// `target + 2 - cost` can be continued beyond it.
    pub fn extends_to(&self, target: usize, cost: usize) -> bool {
        target <= self.target || self.level + cost <= self.target + 1
    }
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, opts: &EnumerateOptions) -> PathBuf {
        self.dir.join(format!("{}.ckpt", parameter_hash(opts)))
    }

    pub fn save(&self, e: &Enumerator) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let opts = e.options();
        let path = self.path_for(opts);
        let tmp = path.with_extension("ckpt.tmp");
        {
            let mut w = BufWriter::with_capacity(1 << 20, File::create(&tmp)?);
            w.write_all(MAGIC)?;
            w.write_all(&CACHE_FORMAT_VERSION.to_le_bytes())?;
            w.write_all(&hex_bytes(&parameter_hash(opts)))?;
            put_u64(&mut w, opts.max_vertices as u64)?;
            put_u64(&mut w, e.level() as u64)?;
            put_bytes(&mut w, e.table().to_csv().as_bytes())?;
            put_u64(&mut w, e.frontier_len() as u64)?;
            for (ahead, half, key, tally) in e.frontier_entries() {
                put_u64(&mut w, ahead as u64)?;
                put_u64(&mut w, half as u64)?;
                put_bytes(&mut w, key)?;
                put_u64(&mut w, tally.terms().len() as u64)?;
                for ((p2, k), c) in tally.terms() {
                    w.write_all(&p2.to_le_bytes())?;
                    w.write_all(&k.to_le_bytes())?;
                    put_bytes(&mut w, &c.to_bytes())?;
                }
            }
            w.flush()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// The checkpoint for `opts`, if one exists. A file with another format
    /// version is an error; a file whose hash differs is ignored.
    pub fn load(&self, opts: &EnumerateOptions) -> Result<Option<Checkpoint>> {
        let path = self.path_for(opts);
        if !path.exists() {
            return Ok(None);
        }
        match read_checkpoint(&path, opts) {
            Err(Error::CacheMismatch) => Ok(None),
            other => other.map(Some),
        }
    }

    pub fn remove(&self, opts: &EnumerateOptions) -> Result<()> {
        let path = self.path_for(opts);
        if path.exists() {
            fs::remove_file(path)?;
        }
        Ok(())
    }
}

fn read_checkpoint(path: &Path, opts: &EnumerateOptions) -> Result<Checkpoint> {
    let mut r = BufReader::with_capacity(1 << 20, File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::CacheMismatch);
    }
    let mut v = [0u8; 4];
    r.read_exact(&mut v)?;
    let found = u32::from_le_bytes(v);
    if found != CACHE_FORMAT_VERSION {
        return Err(Error::CacheVersion {
            found,
            expected: CACHE_FORMAT_VERSION,
        });
    }
    let mut hash = [0u8; 32];
    r.read_exact(&mut hash)?;
    if hash[..] != hex_bytes(&parameter_hash(opts))[..] {
        return Err(Error::CacheMismatch);
    }
    let target = get_u64(&mut r)? as usize;
    let level = get_u64(&mut r)? as usize;
    let csv = String::from_utf8(get_bytes(&mut r)?).map_err(|_| Error::CacheMismatch)?;
    let table = if csv.lines().count() <= 1 {
        CountTable::new(opts.legs, 0)?.with_tangency_cost(opts.tangency_cost)
    } else {
        CountTable::from_csv_with_cost(&csv, Some(level.saturating_sub(1)), opts.tangency_cost)?
    };
    let count = get_u64(&mut r)? as usize;
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let ahead = get_u64(&mut r)? as usize;
        let half = get_u64(&mut r)? as usize;
        let key = get_bytes(&mut r)?;
        let n = get_u64(&mut r)? as usize;
        let mut terms = Vec::with_capacity(n);
        for _ in 0..n {
            let mut m = [0u8; 4];
            r.read_exact(&mut m)?;
            let p2 = u16::from_le_bytes([m[0], m[1]]);
            let k = u16::from_le_bytes([m[2], m[3]]);
            terms.push(((p2, k), Count::from_bytes(&get_bytes(&mut r)?)));
        }
        entries.push((ahead, half, key, Tally::from_terms(terms)));
    }
    Ok(Checkpoint {
        target,
        level,
        table,
        entries,
    })
}

fn hex_bytes(h: &str) -> Vec<u8> {
    hex::decode(h).expect("hash is hex")
}

fn put_u64(w: &mut impl Write, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn put_bytes(w: &mut impl Write, b: &[u8]) -> Result<()> {
    put_u64(w, b.len() as u64)?;
    w.write_all(b)?;
    Ok(())
}

fn get_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_bytes(r: &mut impl Read) -> Result<Vec<u8>> {
    let len = get_u64(r)? as usize;
    let mut b = vec![0u8; len];
    r.read_exact(&mut b)?;
    Ok(b)
}
