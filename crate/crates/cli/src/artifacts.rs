//! On-disk artifact formats and the run manifest.
//!
//! Text tables and JSON-lines files open with a `#` comment naming the
//! config hash and master seed; readers skip `#` lines.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use antiflow::{CnsOutcome, CommunityPartition, Cycle, TxGraph};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const GRAPH: &str = "graph.csv";
pub const INGEST: &str = "ingest.json";
pub const COMMUNITIES: &str = "communities.jsonl";
pub const CYCLES: &str = "cycles.jsonl";
pub const PATHS: &str = "paths.jsonl";
pub const PATH_SUMMARY: &str = "paths.json";
pub const CENTRALITY: &str = "centrality.csv";
pub const R_PRIME: &str = "r_prime.csv";
pub const CNS: &str = "cns.csv";
pub const REPORT: &str = "report.json";
pub const MANIFEST: &str = "manifest.json";

pub fn embedding_file(run: usize) -> String {
    format!("embeddings/run_{run:03}.emb")
}

pub fn embedding_meta_file(run: usize) -> String {
    format!("embeddings/run_{run:03}.json")
}

pub fn header_line(config_hash: &str, seed: u64) -> String {
    format!("# antiflow config={config_hash} seed={seed}\n")
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = File::open(path).map_err(Error::io(path))?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(Error::io(path))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

/// Writes through a sibling temporary file and renames it into place, so a
/// crash never leaves a half-written artifact under the final name.
pub fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(Error::io(dir))?;
    }
    let tmp = path.with_extension("partial");
    let file = File::create(&tmp).map_err(Error::io(&tmp))?;
    let mut w = BufWriter::new(file);
    body(&mut w)?;
    w.flush().map_err(Error::io(&tmp))?;
    drop(w);
    fs::rename(&tmp, path).map_err(Error::io(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Internal(e.to_string()))?;
        w.write_all(b"\n").map_err(Error::io(path))
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(Error::io(path))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| Error::artifact(path, e))
}

pub fn write_jsonl<T: Serialize>(path: &Path, header: &str, records: &[T]) -> Result<()> {
    write_atomic(path, |w| {
        w.write_all(header.as_bytes()).map_err(Error::io(path))?;
        for r in records {
            serde_json::to_writer(&mut *w, r).map_err(|e| Error::Internal(e.to_string()))?;
            w.write_all(b"\n").map_err(Error::io(path))?;
        }
        Ok(())
    })
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).map_err(Error::io(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(Error::io(path))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::artifact(path, format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityRecord {
    pub community: usize,
    pub size: usize,
    pub nodes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: usize,
    pub community: usize,
    pub length: usize,
    pub nodes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub path: usize,
    pub community: usize,
    pub length: usize,
    pub nodes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub config_hash: String,
    pub seed: u64,
    pub paths: usize,
    pub truncated: bool,
    pub limit: usize,
    pub communities: Vec<usize>,
    pub path_nodes: usize,
    /// Accounts on both a path and a cycle.
    pub shared_nodes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub config_hash: String,
    pub seed: u64,
    pub input_sha256: String,
    pub rows: usize,
    pub self_loops: usize,
    pub malformed_rows: usize,
    pub removed_by_cleaning: usize,
    pub edges: usize,
    pub nodes: usize,
    /// First malformed rows skipped in lenient mode.
    pub diagnostics: Vec<String>,
}

/// Sidecar of one embedding file; `tokens[i]` labels row `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMeta {
    pub config_hash: String,
    pub seed: u64,
    pub run: usize,
    pub p: f64,
    pub q: f64,
    pub walk_seed: u64,
    pub train_seed: u64,
    pub rows: usize,
    pub dim: usize,
    pub tokens: Vec<String>,
}

pub fn community_records(g: &TxGraph, p: &CommunityPartition) -> Vec<CommunityRecord> {
    p.communities()
        .iter()
        .enumerate()
        .map(|(c, m)| CommunityRecord {
            community: c,
            size: m.len(),
            nodes: m.iter().map(|&v| g.token(v).to_string()).collect(),
        })
        .collect()
}

fn node_ids(g: &TxGraph, path: &Path, tokens: &[String]) -> Result<Vec<usize>> {
    tokens
        .iter()
        .map(|t| g.node_of(t).ok_or_else(|| Error::artifact(path, format!("unknown account {t}"))))
        .collect()
}

pub fn read_partition(g: &TxGraph, path: &Path) -> Result<CommunityPartition> {
    let mut records: Vec<CommunityRecord> = read_jsonl(path)?;
    records.sort_by_key(|r| r.community);
    let lists = records
        .iter()
        .map(|r| node_ids(g, path, &r.nodes))
        .collect::<Result<Vec<_>>>()?;
    CommunityPartition::from_communities(g.node_count(), lists).map_err(|e| Error::artifact(path, e))
}

pub fn cycle_records(g: &TxGraph, cycles: &[Cycle]) -> Vec<CycleRecord> {
    cycles
        .iter()
        .enumerate()
        .map(|(i, c)| CycleRecord {
            cycle: i,
            community: c.community,
            length: c.len(),
            nodes: c.nodes.iter().map(|&v| g.token(v).to_string()).collect(),
        })
        .collect()
}

pub fn read_cycles(g: &TxGraph, p: &CommunityPartition, path: &Path) -> Result<Vec<Cycle>> {
    let records: Vec<CycleRecord> = read_jsonl(path)?;
    let mut out = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if r.cycle != i {
            return Err(Error::artifact(path, format!("cycle ids must run 0.. in order, found {} at {i}", r.cycle)));
        }
        let c = Cycle::new(node_ids(g, path, &r.nodes)?, r.community);
        c.validate(g, p).map_err(|e| Error::artifact(path, format!("cycle {i}: {e}")))?;
        out.push(c);
    }
    Ok(out)
}

/// Cycle records without a graph, for the report stage.
pub fn read_cycle_records(path: &Path) -> Result<Vec<CycleRecord>> {
    let records: Vec<CycleRecord> = read_jsonl(path)?;
    for (i, r) in records.iter().enumerate() {
        if r.cycle != i {
            return Err(Error::artifact(path, format!("cycle ids must run 0.. in order, found {} at {i}", r.cycle)));
        }
    }
    Ok(records)
}

/// Table cell for a CNS outcome: the ratio, `inf` for unbounded, empty for
/// disregarded.
pub fn encode_outcome(o: &CnsOutcome<f64>) -> String {
    match o {
        CnsOutcome::Score(x) => format!("{x}"),
        CnsOutcome::Unbounded => "inf".into(),
        CnsOutcome::Disregarded => String::new(),
    }
}

pub fn decode_outcome(s: &str) -> std::result::Result<CnsOutcome<f64>, String> {
    let s = s.trim();
    match s {
        "" => Ok(CnsOutcome::Disregarded),
        "inf" => Ok(CnsOutcome::Unbounded),
        _ => {
            let x: f64 = s.parse().map_err(|_| format!("bad value `{s}`"))?;
            if !x.is_finite() || x < 0.0 {
                return Err(format!("value `{s}` is not a finite non-negative ratio"));
            }
            Ok(CnsOutcome::Score(x))
        }
    }
}

pub fn csv_writer(path: &Path, header: &str, w: &mut BufWriter<File>) -> Result<()> {
    w.write_all(header.as_bytes()).map_err(Error::io(path))
}

pub fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let f = File::open(path).map_err(Error::io(path))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(f))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityRow {
    pub community_id: usize,
    pub node: String,
    pub measure: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RPrimeRow {
    pub run: usize,
    pub p: f64,
    pub q: f64,
    pub cycle: usize,
    pub r_prime: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnsRow {
    pub cycle: usize,
    pub measure: String,
    pub r_subgraph: f64,
    pub r_random: f64,
    pub samples: usize,
    pub cns: String,
}

pub fn write_rows<T: Serialize>(path: &Path, header: &str, rows: &[T]) -> Result<()> {
    write_atomic(path, |w| {
        csv_writer(path, header, w)?;
        let mut cw = csv::Writer::from_writer(&mut *w);
        for r in rows {
            cw.serialize(r).map_err(|e| Error::Internal(e.to_string()))?;
        }
        cw.flush().map_err(Error::io(path))
    })
}

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv_reader(path)?;
    let mut out = Vec::new();
    for (i, row) in r.deserialize().enumerate() {
        out.push(row.map_err(|e| Error::artifact(path, format!("row {}: {e}", i + 1)))?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StageRecord {
    /// Hash over the stage's config subset and input hashes.
    pub key: String,
    pub config_hash: String,
    pub seed: u64,
    /// False while the stage is running or after it failed.
    pub valid: bool,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub stages: BTreeMap<String, StageRecord>,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            version: 1,
            stages: BTreeMap::new(),
        }
    }
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        if path.exists() {
            read_json(&path)
        } else {
            Ok(Manifest::default())
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join(MANIFEST), self)
    }
}

/// One problem found by [`verify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub stage: String,
    pub path: Option<PathBuf>,
    pub problem: String,
}

/// Checks every recorded output against its hash.
pub fn verify(dir: &Path, manifest: &Manifest) -> Vec<Finding> {
    let mut out = Vec::new();
    for (stage, rec) in &manifest.stages {
        if !rec.valid {
            out.push(Finding {
                stage: stage.clone(),
                path: None,
                problem: "stage did not complete".into(),
            });
        }
        for (rel, want) in &rec.outputs {
            let problem = match sha256_file(&dir.join(rel)) {
                Ok(h) if &h == want => continue,
                Ok(_) => "content differs from recorded hash".to_string(),
                Err(_) => "missing".to_string(),
            };
            out.push(Finding {
                stage: stage.clone(),
                path: Some(PathBuf::from(rel)),
                problem,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_cells_round_trip() {
        for o in [CnsOutcome::Score(0.1 + 0.2), CnsOutcome::Score(0.0), CnsOutcome::Unbounded, CnsOutcome::Disregarded] {
            assert_eq!(decode_outcome(&encode_outcome(&o)).unwrap(), o);
        }
        assert!(decode_outcome("-1").is_err());
        assert!(decode_outcome("x").is_err());
        assert!(decode_outcome("NaN").is_err());
    }

    #[test]
    fn rows_round_trip_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let rows = vec![RPrimeRow {
            run: 0,
            p: 0.25,
            q: 0.25,
            cycle: 3,
            r_prime: encode_outcome(&CnsOutcome::Score(1.0 / 3.0)),
        }];
        write_rows(&path, &header_line("abc", 7), &rows).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# antiflow config=abc seed=7\nrun,p,q,cycle,r_prime\n"));
        let back: Vec<RPrimeRow> = read_rows(&path).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn verify_flags_edits() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "x").unwrap();
        let mut m = Manifest::default();
        m.stages.insert(
            "s".into(),
            StageRecord {
                valid: true,
                outputs: [("a.txt".to_string(), sha256_file(&dir.path().join("a.txt")).unwrap())].into(),
                ..Default::default()
            },
        );
        assert!(verify(dir.path(), &m).is_empty());
        fs::write(dir.path().join("a.txt"), "y").unwrap();
        assert_eq!(verify(dir.path(), &m).len(), 1);
    }
}
