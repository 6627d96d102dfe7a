//! On-disk file set for a public-private graph.
//!
//! A dataset directory holds five tab-separated data files plus a manifest:
//!
//! | file                | columns              |
//! |---------------------|----------------------|
//! | `vertices.tsv`      | `id name`            |
//! | `public-edges.tsv`  | `u v` (`u < v`)      |
//! | `private-edges.tsv` | `owner u v` (`u < v`)|
//! | `public-attrs.tsv`  | `v keyword`          |
//! | `private-attrs.tsv` | `owner v keyword`    |
//!
//! Each file starts with a header row; data rows are sorted by their leading
//! columns. All files are UTF-8 with LF endings. The manifest records counts
//! and a SHA-256 digest of every data file, and the graph checksum derived
//! from those digests keys the binary sketch and PageRank artifacts.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::STOPWORDS_VERSION;
use crate::model::{AttributeStore, KeywordSet, PPGraph, PrivateGraph, PublicGraph, VertexId};

pub const FORMAT_NAME: &str = "ppgk-fileset";
pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.tsv";

pub const VERTICES: &str = "vertices.tsv";
pub const PUBLIC_EDGES: &str = "public-edges.tsv";
pub const PRIVATE_EDGES: &str = "private-edges.tsv";
pub const PUBLIC_ATTRS: &str = "public-attrs.tsv";
pub const PRIVATE_ATTRS: &str = "private-attrs.tsv";

/// Data files in checksum order.
pub const DATA_FILES: [&str; 5] = [VERTICES, PUBLIC_EDGES, PRIVATE_EDGES, PUBLIC_ATTRS, PRIVATE_ATTRS];

const HEADERS: [&str; 5] = ["id\tname", "u\tv", "owner\tu\tv", "v\tkeyword", "owner\tv\tkeyword"];

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphChecksum(pub [u8; 32]);

impl GraphChecksum {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s.trim()).ok()?;
        Some(GraphChecksum(bytes.try_into().ok()?))
    }
}

impl fmt::Display for GraphChecksum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for GraphChecksum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphChecksum({})", self.to_hex())
    }
}

/// Parsed `manifest.tsv`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub version: u32,
    pub stopwords_version: u32,
    pub cutoff: Option<NaiveDate>,
    pub n_vertices: usize,
    pub n_public_edges: usize,
    pub n_private_vertices: usize,
    pub n_private_edges: usize,
    pub file_sha256: BTreeMap<String, String>,
    pub graph_checksum: GraphChecksum,
}

struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn check_field(s: &str, what: &str) -> Result<()> {
    if s.is_empty() || s.contains(['\t', '\n', '\r']) {
        return Err(Error::InvalidParameter(format!(
            "{what} {s:?} cannot be stored in a TSV column"
        )));
    }
    Ok(())
}

fn write_data_file(g: &PPGraph, index: usize, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{}", HEADERS[index])?;
    match DATA_FILES[index] {
        VERTICES => {
            for (i, name) in g.names().iter().enumerate() {
                writeln!(out, "{i}\t{name}")?;
            }
        }
        PUBLIC_EDGES => {
            for (a, b) in g.public().edges() {
                writeln!(out, "{a}\t{b}")?;
            }
        }
        PRIVATE_EDGES => {
            for pg in g.private_graphs() {
                for &(a, b) in pg.edges() {
                    writeln!(out, "{}\t{a}\t{b}", pg.owner())?;
                }
            }
        }
        PUBLIC_ATTRS => {
            for (v, set) in g.attributes().public_entries() {
                for k in set.iter() {
                    writeln!(out, "{v}\t{k}")?;
                }
            }
        }
        PRIVATE_ATTRS => {
            for ((u, v), set) in g.attributes().private_entries() {
                for k in set.iter() {
                    writeln!(out, "{u}\t{v}\t{k}")?;
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn validate_fields(g: &PPGraph) -> Result<()> {
    for name in g.names() {
        check_field(name, "vertex name")?;
    }
    for (_, set) in g.attributes().public_entries() {
        set.iter().try_for_each(|k| check_field(k, "keyword"))?;
    }
    for (_, set) in g.attributes().private_entries() {
        set.iter().try_for_each(|k| check_field(k, "keyword"))?;
    }
    Ok(())
}

fn combine(digests: &[(String, [u8; 32])]) -> GraphChecksum {
    let mut h = Sha256::new();
    for (name, d) in digests {
        h.update(name.as_bytes());
        h.update(b"\t");
        h.update(hex::encode(d).as_bytes());
        h.update(b"\n");
    }
    GraphChecksum(h.finalize().into())
}

fn file_digests(g: &PPGraph) -> Vec<(String, [u8; 32])> {
    (0..DATA_FILES.len())
        .map(|i| {
            let mut w = HashingWriter {
                inner: io::sink(),
                hasher: Sha256::new(),
            };
            write_data_file(g, i, &mut w).expect("sink never fails");
            (DATA_FILES[i].to_owned(), w.hasher.finalize().into())
        })
        .collect()
}

/// Checksum of the serialized data files, computed without touching disk.
pub fn graph_checksum(g: &PPGraph) -> GraphChecksum {
    combine(&file_digests(g))
}

fn write_manifest(
    out: &mut impl Write,
    g: &PPGraph,
    cutoff: Option<NaiveDate>,
    digests: &[(String, [u8; 32])],
) -> io::Result<()> {
    writeln!(out, "format\t{FORMAT_NAME}")?;
    writeln!(out, "version\t{FORMAT_VERSION}")?;
    writeln!(out, "stopwords_version\t{STOPWORDS_VERSION}")?;
    match cutoff {
        Some(d) => writeln!(out, "cutoff\t{}", d.format("%Y-%m-%d"))?,
        None => writeln!(out, "cutoff\tNA")?,
    }
    writeln!(out, "n_vertices\t{}", g.vertex_count())?;
    writeln!(out, "n_public_edges\t{}", g.public().edge_count())?;
    writeln!(out, "n_private_vertices\t{}", g.private_vertex_count())?;
    writeln!(out, "n_private_edges\t{}", g.private_edges().len())?;
    for (name, d) in digests {
        writeln!(out, "sha256:{name}\t{}", hex::encode(d))?;
    }
    writeln!(out, "graph_checksum\t{}", combine(digests))
}

fn sibling(dir: &Path, tag: &str) -> PathBuf {
    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".into());
    dir.with_file_name(format!(".{name}.{tag}-{}", std::process::id()))
}

/// Writes the file set into `dir`. Files are first written to a sibling
/// temporary directory which then replaces `dir`, so a failed save leaves any
/// previous contents untouched.
pub fn save(g: &PPGraph, dir: &Path, cutoff: Option<NaiveDate>) -> Result<GraphChecksum> {
    validate_fields(g)?;
    let tmp = sibling(dir, "tmp");
    if tmp.exists() {
        fs::remove_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
    }
    fs::create_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;

    let result = (|| {
        let mut digests = Vec::new();
        for (i, name) in DATA_FILES.iter().enumerate() {
            let path = tmp.join(name);
            let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = HashingWriter {
                inner: BufWriter::new(file),
                hasher: Sha256::new(),
            };
            write_data_file(g, i, &mut w)
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(&path, e))?;
            digests.push((name.to_string(), w.hasher.finalize().into()));
        }
        let path = tmp.join(MANIFEST);
        let mut m = BufWriter::new(File::create(&path).map_err(|e| Error::io(&path, e))?);
        write_manifest(&mut m, g, cutoff, &digests)
            .and_then(|_| m.flush())
            .map_err(|e| Error::io(&path, e))?;
        Ok(combine(&digests))
    })();
    let checksum = match result {
        Ok(c) => c,
        Err(e) => {
            let _ = fs::remove_dir_all(&tmp);
            return Err(e);
        }
    };

    if dir.exists() {
        let old = sibling(dir, "old");
        fs::rename(dir, &old).map_err(|e| Error::io(dir, e))?;
        if let Err(e) = fs::rename(&tmp, dir) {
            let _ = fs::rename(&old, dir);
            return Err(Error::io(dir, e));
        }
        let _ = fs::remove_dir_all(&old);
    } else {
        fs::rename(&tmp, dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(checksum)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut kv = BTreeMap::new();
    for line in text.lines() {
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(&path, format!("bad manifest line {line:?}")))?;
        kv.insert(k.to_owned(), v.to_owned());
    }
    let get = |k: &str| {
        kv.get(k)
            .map(String::as_str)
            .ok_or_else(|| Error::format(&path, format!("manifest lacks {k}")))
    };
    let num = |k: &str| -> Result<usize> {
        get(k)?
            .parse()
            .map_err(|_| Error::format(&path, format!("{k} is not a count")))
    };
    if get("format")? != FORMAT_NAME {
        return Err(Error::format(&path, "not a ppgk file set"));
    }
    let version: u32 = get("version")?
        .parse()
        .map_err(|_| Error::format(&path, "bad version"))?;
    if version != FORMAT_VERSION {
        return Err(Error::format(&path, format!("unsupported version {version}")));
    }
    let cutoff = match get("cutoff")? {
        "NA" => None,
        s => Some(
            NaiveDate::parse_from_str(s, "%Y-%m-%d")
                .map_err(|_| Error::format(&path, "bad cutoff"))?,
        ),
    };
    let mut file_sha256 = BTreeMap::new();
    for name in DATA_FILES {
        file_sha256.insert(name.to_owned(), get(&format!("sha256:{name}"))?.to_owned());
    }
    let graph_checksum = GraphChecksum::from_hex(get("graph_checksum")?)
        .ok_or_else(|| Error::format(&path, "bad graph checksum"))?;
    Ok(Manifest {
        version,
        stopwords_version: num("stopwords_version")? as u32,
        cutoff,
        n_vertices: num("n_vertices")?,
        n_public_edges: num("n_public_edges")?,
        n_private_vertices: num("n_private_vertices")?,
        n_private_edges: num("n_private_edges")?,
        file_sha256,
        graph_checksum,
    })
}

/// Reads one data file, verifying its digest against the manifest, and hands
/// each data row (split on tabs) to `row`.
fn read_rows<F>(dir: &Path, name: &str, manifest: &Manifest, mut row: F) -> Result<()>
where
    F: FnMut(&[&str], &Path) -> Result<()>,
{
    let path = dir.join(name);
    let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut reader = BufReader::new(file);
    let mut hasher = Sha256::new();
    let mut line = String::new();
    let mut first = true;
    loop {
        line.clear();
        let n = reader.read_line(&mut line).map_err(|e| Error::io(&path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(line.as_bytes());
        let body = line
            .strip_suffix('\n')
            .ok_or_else(|| Error::format(&path, "missing final newline"))?;
        if first {
            first = false;
            let idx = DATA_FILES.iter().position(|f| *f == name).unwrap();
            if body != HEADERS[idx] {
                return Err(Error::format(&path, format!("unexpected header {body:?}")));
            }
            continue;
        }
        let cols: Vec<&str> = body.split('\t').collect();
        row(&cols, &path)?;
    }
    let found = hex::encode(hasher.finalize());
    let expected = &manifest.file_sha256[name];
    if &found != expected {
        return Err(Error::ChecksumMismatch {
            what: path.display().to_string(),
            expected: expected.clone(),
            found,
        });
    }
    Ok(())
}

fn parse_id(s: &str, path: &Path) -> Result<VertexId> {
    s.parse::<u32>()
        .map(VertexId)
        .map_err(|_| Error::format(path, format!("bad vertex id {s:?}")))
}

fn expect_cols(cols: &[&str], n: usize, path: &Path) -> Result<()> {
    if cols.len() != n {
        return Err(Error::format(path, format!("expected {n} columns, got {}", cols.len())));
    }
    Ok(())
}

/// Loads and verifies a file set.
pub fn load(dir: &Path) -> Result<(PPGraph, Manifest)> {
    let manifest = read_manifest(dir)?;

    let mut names = Vec::with_capacity(manifest.n_vertices);
    read_rows(dir, VERTICES, &manifest, |c, p| {
        expect_cols(c, 2, p)?;
        let id = parse_id(c[0], p)?;
        if id.index() != names.len() {
            return Err(Error::format(p, format!("vertex ids not dense at {id}")));
        }
        names.push(c[1].to_owned());
        Ok(())
    })?;
    let n = names.len();

    let mut edges = Vec::with_capacity(manifest.n_public_edges);
    read_rows(dir, PUBLIC_EDGES, &manifest, |c, p| {
        expect_cols(c, 2, p)?;
        edges.push((parse_id(c[0], p)?, parse_id(c[1], p)?));
        Ok(())
    })?;
    let public = PublicGraph::from_edges(n, edges)?;

    let mut private: BTreeMap<VertexId, Vec<(VertexId, VertexId)>> = BTreeMap::new();
    read_rows(dir, PRIVATE_EDGES, &manifest, |c, p| {
        expect_cols(c, 3, p)?;
        let owner = parse_id(c[0], p)?;
        private
            .entry(owner)
            .or_default()
            .push((parse_id(c[1], p)?, parse_id(c[2], p)?));
        Ok(())
    })?;
    let private = private
        .into_iter()
        .map(|(owner, e)| PrivateGraph::new(owner, e))
        .collect::<Result<Vec<_>>>()?;

    let mut public_kw: BTreeMap<VertexId, Vec<String>> = BTreeMap::new();
    read_rows(dir, PUBLIC_ATTRS, &manifest, |c, p| {
        expect_cols(c, 2, p)?;
        public_kw
            .entry(parse_id(c[0], p)?)
            .or_default()
            .push(c[1].to_owned());
        Ok(())
    })?;
    let mut private_kw: BTreeMap<(VertexId, VertexId), Vec<String>> = BTreeMap::new();
    read_rows(dir, PRIVATE_ATTRS, &manifest, |c, p| {
        expect_cols(c, 3, p)?;
        private_kw
            .entry((parse_id(c[0], p)?, parse_id(c[1], p)?))
            .or_default()
            .push(c[2].to_owned());
        Ok(())
    })?;
    let mut attrs = AttributeStore::new();
    for (v, k) in public_kw {
        attrs.set_public(v, KeywordSet::new(k)?);
    }
    for ((u, v), k) in private_kw {
        attrs.set_private(u, v, KeywordSet::new(k)?);
    }

    let g = PPGraph::new(names, public, private, attrs)?;
    let found = graph_checksum(&g);
    if found != manifest.graph_checksum {
        return Err(Error::ChecksumMismatch {
            what: dir.join(MANIFEST).display().to_string(),
            expected: manifest.graph_checksum.to_hex(),
            found: found.to_hex(),
        });
    }
    Ok((g, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Topology;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn sample() -> PPGraph {
        let public = PublicGraph::from_edges(4, [(v(0), v(1)), (v(1), v(2))]).unwrap();
        let pg = PrivateGraph::new(v(0), [(v(0), v(3)), (v(2), v(3))]).unwrap();
        let mut attrs = AttributeStore::new();
        attrs.set_public(v(1), KeywordSet::new(["graph", "sql"]).unwrap());
        attrs.set_private(v(0), v(3), KeywordSet::new(["xml"]).unwrap());
        let names = ["Ann", "Bo Li", "Cé", "Dan 0001"].map(String::from).to_vec();
        PPGraph::new(names, public, [pg], attrs).unwrap()
    }

    #[test]
    fn round_trip_and_layout() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("set");
        let g = sample();
        let sum = save(&g, &out, NaiveDate::from_ymd_opt(2015, 1, 1)).unwrap();
        assert_eq!(sum, graph_checksum(&g));
        let (back, m) = load(&out).unwrap();
        assert_eq!(back, g);
        assert_eq!(m.n_private_edges, 2);
        assert_eq!(m.cutoff, NaiveDate::from_ymd_opt(2015, 1, 1));
        assert_eq!(
            fs::read_to_string(out.join(PRIVATE_EDGES)).unwrap(),
            "owner\tu\tv\n0\t0\t3\n0\t2\t3\n"
        );
        assert_eq!(
            fs::read_to_string(out.join(PUBLIC_ATTRS)).unwrap(),
            "v\tkeyword\n1\tgraph\n1\tsql\n"
        );
    }

    #[test]
    fn save_replaces_existing_directory() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("set");
        fs::create_dir(&out).unwrap();
        fs::write(out.join("stale.txt"), "x").unwrap();
        save(&sample(), &out, None).unwrap();
        assert!(!out.join("stale.txt").exists());
        assert_eq!(load(&out).unwrap().0.vertex_count(), 4);
        let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }

    #[test]
    fn tampering_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("set");
        save(&sample(), &out, None).unwrap();
        let p = out.join(PUBLIC_EDGES);
        fs::write(&p, "u\tv\n0\t1\n").unwrap();
        assert!(matches!(load(&out), Err(Error::ChecksumMismatch { .. })));
    }

    #[test]
    fn names_with_tabs_are_rejected() {
        let public = PublicGraph::from_edges(1, []).unwrap();
        let g = PPGraph::new(vec!["a\tb".into()], public, [], AttributeStore::new()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(save(&g, &dir.path().join("x"), None).is_err());
        assert!(!dir.path().join("x").exists());
    }

    #[test]
    fn checksum_tracks_content() {
        let g = sample();
        let public = PublicGraph::from_edges(4, [(v(0), v(1))]).unwrap();
        let h = PPGraph::new(g.names().to_vec(), public, [], AttributeStore::new()).unwrap();
        assert_ne!(graph_checksum(&g), graph_checksum(&h));
        assert_eq!(h.public().vertex_count(), 4);
    }
}
