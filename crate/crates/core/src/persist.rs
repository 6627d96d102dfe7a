//! Versioned binary files for distance sketches and public PageRank stores.
//!
//! Both formats are little-endian and start with an 8-byte magic, a format
//! version and the checksum of the graph they were computed on. Loading
//! refuses a file whose checksum or parameters differ from the caller's.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::io::GraphChecksum;
use crate::model::VertexId;
use crate::ppr::PprStore;
use crate::sketch::{DistanceSketchSet, SketchEntry};

const SKETCH_MAGIC: &[u8; 8] = b"PPGKSKT\0";
const STORE_MAGIC: &[u8; 8] = b"PPGKPPR\0";
const VERSION: u32 = 1;

fn corrupt(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::format(path, e.to_string())
}

fn write_header(w: &mut impl Write, magic: &[u8; 8], checksum: GraphChecksum) -> std::io::Result<()> {
    w.write_all(magic)?;
    w.write_u32::<LE>(VERSION)?;
    w.write_all(&checksum.0)
}

fn read_header(r: &mut impl Read, magic: &[u8; 8], path: &Path) -> Result<GraphChecksum> {
    let mut m = [0u8; 8];
    r.read_exact(&mut m).map_err(|e| corrupt(path, e))?;
    if &m != magic {
        return Err(Error::format(path, "wrong file type"));
    }
    let version = r.read_u32::<LE>().map_err(|e| corrupt(path, e))?;
    if version != VERSION {
        return Err(Error::format(path, format!("unsupported version {version}")));
    }
    let mut sum = [0u8; 32];
    r.read_exact(&mut sum).map_err(|e| corrupt(path, e))?;
    Ok(GraphChecksum(sum))
}

fn check_graph(path: &Path, found: GraphChecksum, expected: GraphChecksum) -> Result<()> {
    if found != expected {
        return Err(Error::ChecksumMismatch {
            what: path.display().to_string(),
            expected: expected.to_hex(),
            found: found.to_hex(),
        });
    }
    Ok(())
}

fn write_offsets(w: &mut impl Write, offsets: &[usize]) -> std::io::Result<()> {
    w.write_u64::<LE>(offsets.len() as u64 - 1)?;
    w.write_u64::<LE>(*offsets.last().unwrap() as u64)?;
    for &o in offsets {
        w.write_u64::<LE>(o as u64)?;
    }
    Ok(())
}

fn read_offsets(r: &mut impl Read, path: &Path) -> Result<Vec<usize>> {
    let n = r.read_u64::<LE>().map_err(|e| corrupt(path, e))? as usize;
    let total = r.read_u64::<LE>().map_err(|e| corrupt(path, e))? as usize;
    let mut offsets = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        offsets.push(r.read_u64::<LE>().map_err(|e| corrupt(path, e))? as usize);
    }
    if offsets.last() != Some(&total) {
        return Err(Error::format(path, "offset table does not match entry count"));
    }
    Ok(offsets)
}

fn expect_eof(r: &mut impl Read, path: &Path) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe).map_err(|e| corrupt(path, e))? {
        0 => Ok(()),
        _ => Err(Error::format(path, "trailing bytes")),
    }
}

pub fn save_sketches(sk: &DistanceSketchSet, checksum: GraphChecksum, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        write_header(&mut w, SKETCH_MAGIC, checksum)?;
        w.write_f64::<LE>(sk.factor())?;
        w.write_u64::<LE>(sk.rng_seed())?;
        w.write_u32::<LE>(sk.repetitions())?;
        write_offsets(&mut w, sk.offsets())?;
        for e in sk.all_entries() {
            w.write_u32::<LE>(e.seed.0)?;
            w.write_u32::<LE>(e.dist)?;
        }
        w.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

/// Loads sketches built with `factor` and `rng_seed` on the graph with
/// `checksum`.
pub fn load_sketches(
    path: &Path,
    checksum: GraphChecksum,
    factor: f64,
    rng_seed: u64,
) -> Result<DistanceSketchSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let found = read_header(&mut r, SKETCH_MAGIC, path)?;
    check_graph(path, found, checksum)?;
    let f = r.read_f64::<LE>().map_err(|e| corrupt(path, e))?;
    let seed = r.read_u64::<LE>().map_err(|e| corrupt(path, e))?;
    let reps = r.read_u32::<LE>().map_err(|e| corrupt(path, e))?;
    if f.to_bits() != factor.to_bits() || seed != rng_seed {
        return Err(Error::ParameterMismatch(format!(
            "{} holds factor {f} seed {seed}, requested factor {factor} seed {rng_seed}",
            path.display()
        )));
    }
    let offsets = read_offsets(&mut r, path)?;
    let total = *offsets.last().unwrap();
    let mut entries = Vec::with_capacity(total);
    for _ in 0..total {
        let seed = r.read_u32::<LE>().map_err(|e| corrupt(path, e))?;
        let dist = r.read_u32::<LE>().map_err(|e| corrupt(path, e))?;
        entries.push(SketchEntry {
            seed: VertexId(seed),
            dist,
        });
    }
    expect_eof(&mut r, path)?;
    DistanceSketchSet::from_parts(f, reps, seed, offsets, entries)
}

pub fn save_store(store: &PprStore, checksum: GraphChecksum, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        write_header(&mut w, STORE_MAGIC, checksum)?;
        w.write_f64::<LE>(store.alpha())?;
        w.write_f64::<LE>(store.eps())?;
        write_offsets(&mut w, store.offsets())?;
        for &(v, s) in store.all_entries() {
            w.write_u32::<LE>(v.0)?;
            w.write_f64::<LE>(s)?;
        }
        w.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

/// Loads a public PageRank store computed with `alpha` and `eps` on the graph
/// with `checksum`.
pub fn load_store(path: &Path, checksum: GraphChecksum, alpha: f64, eps: f64) -> Result<PprStore> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let found = read_header(&mut r, STORE_MAGIC, path)?;
    check_graph(path, found, checksum)?;
    let a = r.read_f64::<LE>().map_err(|e| corrupt(path, e))?;
    let e = r.read_f64::<LE>().map_err(|e| corrupt(path, e))?;
    if a.to_bits() != alpha.to_bits() || e.to_bits() != eps.to_bits() {
        return Err(Error::ParameterMismatch(format!(
            "{} holds alpha {a} eps {e}, requested alpha {alpha} eps {eps}",
            path.display()
        )));
    }
    let offsets = read_offsets(&mut r, path)?;
    let total = *offsets.last().unwrap();
    let mut entries = Vec::with_capacity(total);
    for _ in 0..total {
        let v = r.read_u32::<LE>().map_err(|e| corrupt(path, e))?;
        let s = r.read_f64::<LE>().map_err(|e| corrupt(path, e))?;
        entries.push((VertexId(v), s));
    }
    expect_eof(&mut r, path)?;
    PprStore::from_parts(a, e, offsets, entries)
}
