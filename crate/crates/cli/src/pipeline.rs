//! Stage execution with content-addressed caching.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use antiflow::graph::write_edge_list;
use antiflow::{
    build_graph, detect_paths, parse_edge_list, CnsOutcome, CommunityPartition, Cycle, Embedding, LengthBounds,
    Measure, ParseMode, ParseOptions, TxGraph,
};
use serde_json::json;

use crate::analysis;
use crate::artifacts::*;
use crate::config::{hash_json, PipelineConfig};
use crate::error::{Error, Result, StageContext};
use crate::report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Communities,
    Cycles,
    Paths,
    Embed,
    Centrality,
    Score,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Communities,
        Stage::Cycles,
        Stage::Paths,
        Stage::Embed,
        Stage::Centrality,
        Stage::Score,
        Stage::Report,
    ];

    /// Stages of a full run, in order. Path enumeration is on demand only.
    pub const PIPELINE: [Stage; 7] = [
        Stage::Ingest,
        Stage::Communities,
        Stage::Cycles,
        Stage::Embed,
        Stage::Centrality,
        Stage::Score,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Communities => "communities",
            Stage::Cycles => "cycles",
            Stage::Paths => "paths",
            Stage::Embed => "embed",
            Stage::Centrality => "centrality",
            Stage::Score => "score",
            Stage::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageStatus {
    pub stage: Stage,
    pub cached: bool,
}

struct Input {
    name: String,
    path: PathBuf,
    producer: Option<Stage>,
}

/// An output directory plus the config driving it.
pub struct Workspace {
    cfg: PipelineConfig,
    dir: PathBuf,
    manifest: Manifest,
    force: bool,
    graph: Option<(String, Arc<TxGraph>)>,
}

impl Workspace {
    pub fn open(cfg: PipelineConfig, force: bool) -> Result<Self> {
        cfg.validate()?;
        let dir = cfg.output.clone();
        std::fs::create_dir_all(&dir).map_err(Error::io(&dir))?;
        let manifest = Manifest::load(&dir)?;
        Ok(Workspace {
            cfg,
            dir,
            manifest,
            force,
            graph: None,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    fn header(&self) -> String {
        header_line(&self.cfg.hash(), self.cfg.seed)
    }

    fn artifact(&self, rel: &str, producer: Stage) -> Input {
        Input {
            name: rel.to_string(),
            path: self.dir.join(rel),
            producer: Some(producer),
        }
    }

    fn inputs(&self, stage: Stage) -> Vec<Input> {
        let graph = || self.artifact(GRAPH, Stage::Ingest);
        let comms = || self.artifact(COMMUNITIES, Stage::Communities);
        let cycles = || self.artifact(CYCLES, Stage::Cycles);
        match stage {
            Stage::Ingest => vec![Input {
                name: "input".into(),
                path: self.cfg.input.clone(),
                producer: None,
            }],
            Stage::Communities | Stage::Embed => vec![graph()],
            Stage::Cycles => vec![graph(), comms()],
            Stage::Paths | Stage::Centrality => vec![graph(), comms(), cycles()],
            Stage::Score => {
                let mut v = vec![graph(), comms(), cycles(), self.artifact(CENTRALITY, Stage::Centrality)];
                for r in 0..self.cfg.grid().len() {
                    v.push(self.artifact(&embedding_file(r), Stage::Embed));
                    v.push(self.artifact(&embedding_meta_file(r), Stage::Embed));
                }
                v
            }
            Stage::Report => vec![
                comms(),
                cycles(),
                self.artifact(R_PRIME, Stage::Score),
                self.artifact(CNS, Stage::Score),
            ],
        }
    }

    fn config_subset(&self, stage: Stage) -> serde_json::Value {
        let c = &self.cfg;
        let s = &c.scoring;
        match stage {
            Stage::Ingest => json!({"delimiter": c.delimiter, "parse_mode": c.parse_mode, "clean": c.clean}),
            Stage::Communities => json!({"seed": c.seed, "communities": c.communities}),
            Stage::Cycles => json!({"cycles": c.cycles}),
            Stage::Paths => json!({"paths": c.paths}),
            Stage::Embed => json!({
                "seed": c.seed, "walk": c.walk, "train": c.train,
                "deterministic": c.deterministic, "grid": c.grid(),
            }),
            Stage::Centrality => json!({}),
            Stage::Score => json!({"seed": c.seed, "m": s.m, "dispersion": s.dispersion, "grid": c.grid()}),
            Stage::Report => json!({"percentile": s.percentile, "variant": s.variant, "flag_top": s.flag_top, "m": s.m}),
        }
    }

    fn check_inputs(&self, stage: Stage, inputs: &[Input]) -> Result<BTreeMap<String, String>> {
        let mut hashes = BTreeMap::new();
        for i in inputs {
            match i.producer {
                None => {
                    if !i.path.is_file() {
                        return Err(Error::artifact(&i.path, format!("{}: input file not found", stage.name())));
                    }
                }
                Some(p) => {
                    let fresh = self.manifest.stages.get(p.name()).is_some_and(|r| r.valid);
                    if !fresh || !i.path.is_file() {
                        return Err(Error::MissingArtifact {
                            stage: stage.name(),
                            required: p.name(),
                            path: i.path.clone(),
                        });
                    }
                }
            }
            hashes.insert(i.name.clone(), sha256_file(&i.path)?);
        }
        Ok(hashes)
    }

    fn up_to_date(&self, stage: Stage, key: &str) -> bool {
        let Some(rec) = self.manifest.stages.get(stage.name()) else {
            return false;
        };
        rec.valid
            && rec.key == key
            && rec
                .outputs
                .iter()
                .all(|(rel, h)| sha256_file(&self.dir.join(rel)).is_ok_and(|x| &x == h))
    }

    /// Runs `stage`, or reuses its previous outputs when the inputs and the
    /// relevant config are unchanged.
    pub fn run_stage(&mut self, stage: Stage) -> Result<StageStatus> {
        let inputs = self.inputs(stage);
        let hashes = self.check_inputs(stage, &inputs)?;
        let key = hash_json(&json!({
            "stage": stage.name(),
            "config": self.config_subset(stage),
            "inputs": hashes,
        }));
        if !self.force && self.up_to_date(stage, &key) {
            return Ok(StageStatus { stage, cached: true });
        }
        let mut record = StageRecord {
            key,
            config_hash: self.cfg.hash(),
            seed: self.cfg.seed,
            valid: false,
            inputs: hashes.clone(),
            outputs: BTreeMap::new(),
        };
        self.manifest.stages.insert(stage.name().into(), record.clone());
        self.manifest.save(&self.dir)?;

        let outputs = self.execute(stage, &hashes)?;
        for rel in outputs {
            let h = sha256_file(&self.dir.join(&rel))?;
            record.outputs.insert(rel, h);
        }
        record.valid = true;
        self.manifest.stages.insert(stage.name().into(), record);
        self.manifest.save(&self.dir)?;
        Ok(StageStatus { stage, cached: false })
    }

    fn graph(&mut self, hashes: &BTreeMap<String, String>) -> Result<Arc<TxGraph>> {
        let h = &hashes[GRAPH];
        if let Some((cached, g)) = &self.graph {
            if cached == h {
                return Ok(g.clone());
            }
        }
        let path = self.dir.join(GRAPH);
        let f = File::open(&path).map_err(Error::io(&path))?;
        let parsed = parse_edge_list(BufReader::new(f), ParseOptions::default()).map_err(|e| Error::artifact(&path, e))?;
        let g = Arc::new(build_graph(&parsed.edges).map_err(|e| Error::artifact(&path, e))?);
        self.graph = Some((h.clone(), g.clone()));
        Ok(g)
    }

    fn partition(&self, g: &TxGraph) -> Result<CommunityPartition> {
        read_partition(g, &self.dir.join(COMMUNITIES))
    }

    fn cycles(&self, g: &TxGraph, p: &CommunityPartition) -> Result<Vec<Cycle>> {
        read_cycles(g, p, &self.dir.join(CYCLES))
    }

    fn execute(&mut self, stage: Stage, hashes: &BTreeMap<String, String>) -> Result<Vec<String>> {
        match stage {
            Stage::Ingest => self.ingest(hashes),
            Stage::Communities => {
                let g = self.graph(hashes)?;
                let p = analysis::communities(&g, &self.cfg).stage("communities")?;
                write_jsonl(&self.dir.join(COMMUNITIES), &self.header(), &community_records(&g, &p))?;
                Ok(vec![COMMUNITIES.into()])
            }
            Stage::Cycles => {
                let g = self.graph(hashes)?;
                let p = self.partition(&g)?;
                let cycles = analysis::cycles(&g, &p, &self.cfg).stage("cycles")?;
                write_jsonl(&self.dir.join(CYCLES), &self.header(), &cycle_records(&g, &cycles))?;
                Ok(vec![CYCLES.into()])
            }
            Stage::Paths => self.paths(hashes),
            Stage::Embed => self.embed(hashes),
            Stage::Centrality => self.centrality(hashes),
            Stage::Score => self.score(hashes),
            Stage::Report => self.report(),
        }
    }

    fn ingest(&mut self, hashes: &BTreeMap<String, String>) -> Result<Vec<String>> {
        let path = self.cfg.input.clone();
        let f = File::open(&path).map_err(|e| Error::artifact(&path, e))?;
        let opts = ParseOptions {
            delimiter: self.cfg.delimiter as u8,
            mode: self.cfg.parse_mode,
        };
        let parsed = parse_edge_list(BufReader::new(f), opts).stage("ingest")?;
        let parsed_edges = parsed.edges.len();
        let edges = antiflow::graph::clean_filter_with(parsed.edges, &self.cfg.clean);
        let g = build_graph(&edges).stage("ingest")?;
        write_atomic(&self.dir.join(GRAPH), |w| write_edge_list(&edges, w, b',').stage("ingest"))?;
        let summary = IngestSummary {
            config_hash: self.cfg.hash(),
            seed: self.cfg.seed,
            input_sha256: hashes["input"].clone(),
            rows: parsed_edges + parsed.self_loops + parsed.diagnostics.len(),
            self_loops: parsed.self_loops,
            malformed_rows: parsed.diagnostics.len(),
            removed_by_cleaning: parsed_edges - edges.len(),
            edges: g.edge_count(),
            nodes: g.node_count(),
            diagnostics: parsed.diagnostics.iter().take(100).map(|d| d.to_string()).collect(),
        };
        debug_assert!(self.cfg.parse_mode == ParseMode::Lenient || summary.malformed_rows == 0);
        write_json(&self.dir.join(INGEST), &summary)?;
        self.graph = None;
        Ok(vec![GRAPH.into(), INGEST.into()])
    }

    fn paths(&mut self, hashes: &BTreeMap<String, String>) -> Result<Vec<String>> {
        let g = self.graph(hashes)?;
        let p = self.partition(&g)?;
        let cycles = self.cycles(&g, &p)?;
        let pc = &self.cfg.paths;
        let bounds = LengthBounds {
            min: pc.min_len,
            max: pc.max_len,
        };
        let rep = detect_paths(&g, &p, &cycles, bounds, pc.limit).stage("paths")?;
        let records: Vec<PathRecord> = rep
            .paths
            .iter()
            .enumerate()
            .map(|(i, path)| PathRecord {
                path: i,
                community: path.community,
                length: path.len(),
                nodes: path.nodes.iter().map(|&v| g.token(v).to_string()).collect(),
            })
            .collect();
        write_jsonl(&self.dir.join(PATHS), &self.header(), &records)?;
        let summary = PathSummary {
            config_hash: self.cfg.hash(),
            seed: self.cfg.seed,
            paths: rep.paths.len(),
            truncated: rep.truncated,
            limit: pc.limit,
            communities: rep.communities.clone(),
            path_nodes: rep.path_nodes.len(),
            shared_nodes: rep.shared_nodes.iter().map(|&v| g.token(v).to_string()).collect(),
        };
        write_json(&self.dir.join(PATH_SUMMARY), &summary)?;
        Ok(vec![PATHS.into(), PATH_SUMMARY.into()])
    }

    fn embed(&mut self, hashes: &BTreeMap<String, String>) -> Result<Vec<String>> {
        let g = self.graph(hashes)?;
        let mut outputs = Vec::new();
        for run in analysis::runs(&self.cfg) {
            let emb = analysis::embed_run(&g, &self.cfg, &run).stage("embed")?;
            let file = embedding_file(run.run);
            write_atomic(&self.dir.join(&file), |w| emb.write_binary(w).stage("embed"))?;
            let meta = EmbeddingMeta {
                config_hash: self.cfg.hash(),
                seed: self.cfg.seed,
                run: run.run,
                p: run.p,
                q: run.q,
                walk_seed: run.walk_seed,
                train_seed: run.train_seed,
                rows: emb.rows(),
                dim: emb.dim(),
                tokens: g.tokens().to_vec(),
            };
            let meta_file = embedding_meta_file(run.run);
            write_json(&self.dir.join(&meta_file), &meta)?;
            outputs.push(file);
            outputs.push(meta_file);
        }
        Ok(outputs)
    }

    fn centrality(&mut self, hashes: &BTreeMap<String, String>) -> Result<Vec<String>> {
        let g = self.graph(hashes)?;
        let p = self.partition(&g)?;
        let cycles = self.cycles(&g, &p)?;
        let tables = analysis::centrality(&g, &p, &cycles).stage("centrality")?;
        let rows: Vec<CentralityRow> = tables
            .iter()
            .flat_map(|t| {
                t.nodes.iter().zip(&t.values).map(|(&v, &x)| CentralityRow {
                    community_id: t.scope,
                    node: g.token(v).to_string(),
                    measure: t.measure.name().to_string(),
                    value: x,
                })
            })
            .collect();
        write_rows(&self.dir.join(CENTRALITY), &self.header(), &rows)?;
        Ok(vec![CENTRALITY.into()])
    }

    fn measure_values(&self, g: &TxGraph, p: &CommunityPartition) -> Result<Vec<Vec<Option<f64>>>> {
        let path = self.dir.join(CENTRALITY);
        let rows: Vec<CentralityRow> = read_rows(&path)?;
        let mut values = vec![vec![None; g.node_count()]; Measure::ALL.len()];
        for (i, r) in rows.iter().enumerate() {
            let bad = |m: String| Error::artifact(&path, format!("row {}: {m}", i + 1));
            let m = Measure::from_name(&r.measure).ok_or_else(|| bad(format!("unknown measure {}", r.measure)))?;
            let v = g.node_of(&r.node).ok_or_else(|| bad(format!("unknown account {}", r.node)))?;
            if p.community_of(v) != r.community_id {
                return Err(bad(format!("account {} is not in community {}", r.node, r.community_id)));
            }
            values[Measure::ALL.iter().position(|&x| x == m).expect("listed")][v] = Some(r.value);
        }
        Ok(values)
    }

    fn load_embedding(&self, g: &TxGraph, run: &analysis::RunSpec) -> Result<Embedding> {
        let meta_path = self.dir.join(embedding_meta_file(run.run));
        let meta: EmbeddingMeta = read_json(&meta_path)?;
        if meta.tokens != g.tokens() || meta.p != run.p || meta.q != run.q {
            return Err(Error::artifact(&meta_path, "embedding does not match the current graph and grid"));
        }
        let path = self.dir.join(embedding_file(run.run));
        let f = File::open(&path).map_err(Error::io(&path))?;
        let emb = Embedding::read_binary(BufReader::new(f)).map_err(|e| Error::artifact(&path, e))?;
        if emb.rows() != g.node_count() {
            return Err(Error::artifact(&path, "row count differs from the graph"));
        }
        Ok(emb)
    }

    fn score(&mut self, hashes: &BTreeMap<String, String>) -> Result<Vec<String>> {
        let g = self.graph(hashes)?;
        let p = self.partition(&g)?;
        let cycles = self.cycles(&g, &p)?;
        let mut rp_rows = Vec::new();
        for run in analysis::runs(&self.cfg) {
            let emb = self.load_embedding(&g, &run)?;
            let res = analysis::r_prime_run(&p, &cycles, &emb, &self.cfg, run.run).stage("score")?;
            rp_rows.extend(res.iter().enumerate().map(|(c, r)| RPrimeRow {
                run: run.run,
                p: run.p,
                q: run.q,
                cycle: c,
                r_prime: encode_outcome(&r.outcome),
            }));
        }
        let values = self.measure_values(&g, &p)?;
        let table = analysis::cns_table(&p, &cycles, &values, &self.cfg).stage("score")?;
        let cns_rows: Vec<CnsRow> = table
            .iter()
            .enumerate()
            .flat_map(|(c, per)| {
                per.iter().zip(Measure::ALL).map(move |(r, m)| CnsRow {
                    cycle: c,
                    measure: m.name().to_string(),
                    r_subgraph: r.r_subgraph,
                    r_random: r.r_random,
                    samples: r.sample_count,
                    cns: encode_outcome(&r.outcome),
                })
            })
            .collect();
        write_rows(&self.dir.join(R_PRIME), &self.header(), &rp_rows)?;
        write_rows(&self.dir.join(CNS), &self.header(), &cns_rows)?;
        Ok(vec![R_PRIME.into(), CNS.into()])
    }

    fn report(&mut self) -> Result<Vec<String>> {
        let cycles = read_cycle_records(&self.dir.join(CYCLES))?;
        let mut comms: Vec<CommunityRecord> = read_jsonl(&self.dir.join(COMMUNITIES))?;
        comms.sort_by_key(|c| c.community);
        let sizes: Vec<usize> = comms.iter().map(|c| c.nodes.len()).collect();
        let (runs, r_primes) = read_r_prime(&self.dir.join(R_PRIME), cycles.len(), &self.cfg)?;
        let cns = read_cns(&self.dir.join(CNS), cycles.len())?;
        let rep = report::build(&self.cfg, &runs, &cycles, &sizes, &r_primes, &cns).stage("report")?;
        write_json(&self.dir.join(REPORT), &rep)?;
        Ok(vec![REPORT.into()])
    }
}

type RunGrid = Vec<(f64, f64)>;

/// Reads `r_prime.csv` into the run grid and `r′[run][cycle]`.
pub fn read_r_prime(path: &Path, cycles: usize, cfg: &PipelineConfig) -> Result<(RunGrid, Vec<Vec<CnsOutcome<f64>>>)> {
    let rows: Vec<RPrimeRow> = read_rows(path)?;
    let bad = |m: String| Error::artifact(path, m);
    if rows.is_empty() {
        let grid = cfg.grid();
        let empty = vec![Vec::new(); grid.len()];
        return if cycles == 0 {
            Ok((grid, empty))
        } else {
            Err(bad("no rows".into()))
        };
    }
    let runs = rows.iter().map(|r| r.run).max().expect("non-empty") + 1;
    let mut grid: Vec<Option<(f64, f64)>> = vec![None; runs];
    let mut table: Vec<Vec<Option<CnsOutcome<f64>>>> = vec![vec![None; cycles]; runs];
    for (i, r) in rows.iter().enumerate() {
        let at = |m: &str| bad(format!("row {}: {m}", i + 1));
        if r.cycle >= cycles {
            return Err(at("cycle id out of range"));
        }
        match grid[r.run] {
            None => grid[r.run] = Some((r.p, r.q)),
            Some(pq) if pq != (r.p, r.q) => return Err(at("run has inconsistent p, q")),
            _ => {}
        }
        let slot = &mut table[r.run][r.cycle];
        if slot.is_some() {
            return Err(at("duplicate (run, cycle)"));
        }
        *slot = Some(decode_outcome(&r.r_prime).map_err(|e| at(&e))?);
    }
    let grid = grid
        .into_iter()
        .enumerate()
        .map(|(k, g)| g.ok_or_else(|| bad(format!("run {k} has no rows"))))
        .collect::<Result<Vec<_>>>()?;
    let table = table
        .into_iter()
        .enumerate()
        .map(|(k, run)| {
            run.into_iter()
                .enumerate()
                .map(|(c, x)| x.ok_or_else(|| bad(format!("run {k} lacks cycle {c}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((grid, table))
}

/// Reads `cns.csv` into per-cycle outcomes in `Measure::ALL` order.
pub fn read_cns(path: &Path, cycles: usize) -> Result<Vec<Vec<CnsOutcome<f64>>>> {
    let rows: Vec<CnsRow> = read_rows(path)?;
    let mut table: Vec<Vec<Option<CnsOutcome<f64>>>> = vec![vec![None; Measure::ALL.len()]; cycles];
    for (i, r) in rows.iter().enumerate() {
        let at = |m: String| Error::artifact(path, format!("row {}: {m}", i + 1));
        let m = Measure::from_name(&r.measure).ok_or_else(|| at(format!("unknown measure {}", r.measure)))?;
        let mi = Measure::ALL.iter().position(|&x| x == m).expect("listed");
        let slot = table
            .get_mut(r.cycle)
            .ok_or_else(|| at("cycle id out of range".into()))?
            .get_mut(mi)
            .expect("five measures");
        if slot.is_some() {
            return Err(at("duplicate (cycle, measure)".into()));
        }
        *slot = Some(decode_outcome(&r.cns).map_err(at)?);
    }
    table
        .into_iter()
        .enumerate()
        .map(|(c, per)| {
            per.into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::artifact(path, format!("cycle {c} lacks a measure")))
        })
        .collect()
}

/// Runs every stage of [`Stage::PIPELINE`] in order.
pub fn run_pipeline(cfg: PipelineConfig, force: bool) -> Result<Vec<StageStatus>> {
    let mut ws = Workspace::open(cfg, force)?;
    Stage::PIPELINE.iter().map(|&s| ws.run_stage(s)).collect()
}
