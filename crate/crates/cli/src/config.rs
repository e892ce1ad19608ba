//! Pipeline configuration: one TOML file with a complete default set.

use std::path::{Path, PathBuf};

use antiflow::cycles::{LengthBounds, DEFAULT_PATH_LIMIT};
use antiflow::scoring::DispersionMode;
use antiflow::{CentralityVariant, CleanThresholds, ParseMode, TrainMode, TrainParams, WalkParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub delimiter: char,
    pub parse_mode: ParseMode,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    /// Single-threaded training and CNS sampling; reports are bit-reproducible.
    pub deterministic: bool,
    pub clean: CleanThresholds,
    pub communities: CommunityConfig,
    pub cycles: LengthBounds,
    pub paths: PathConfig,
    pub walk: WalkConfig,
    pub train: TrainConfig,
    pub scoring: ScoringConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::from("edges.csv"),
            output: PathBuf::from("out"),
            delimiter: ',',
            parse_mode: ParseMode::Strict,
            seed: 0,
            threads: 0,
            deterministic: true,
            clean: CleanThresholds::default(),
            communities: CommunityConfig::default(),
            cycles: LengthBounds::CYCLES,
            paths: PathConfig::default(),
            walk: WalkConfig::default(),
            train: TrainConfig::default(),
            scoring: ScoringConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommunityConfig {
    pub resolution: f64,
}

impl Default for CommunityConfig {
    fn default() -> Self {
        CommunityConfig { resolution: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathConfig {
    pub min_len: usize,
    pub max_len: usize,
    pub limit: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            min_len: LengthBounds::PATHS.min,
            max_len: LengthBounds::PATHS.max,
            limit: DEFAULT_PATH_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkConfig {
    pub walk_length: usize,
    pub walks_per_node: usize,
    pub alias_cache: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        let w = WalkParams::default();
        WalkConfig {
            walk_length: w.walk_length,
            walks_per_node: w.walks_per_node,
            alias_cache: w.alias_cache,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dimension: usize,
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let t = TrainParams::default();
        TrainConfig {
            dimension: t.dimension,
            window: t.window,
            negative_samples: t.negative_samples,
            epochs: t.epochs,
            learning_rate: t.learning_rate,
            min_learning_rate: t.min_learning_rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    /// `k` points `p = q = 2i/k`, `i = 1..=k`.
    #[default]
    Diagonal,
    /// Cartesian product of `grid_p × grid_q` evenly spaced values in (0, 2].
    Full,
    /// The `k` pairs listed in `points`.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    pub k: usize,
    pub grid: GridMode,
    pub grid_p: usize,
    pub grid_q: usize,
    /// `[p, q]` pairs for the explicit grid.
    pub points: Vec<[f64; 2]>,
    /// Random comparison sets per CNS evaluation.
    pub m: usize,
    pub percentile: f64,
    pub variant: CentralityVariant,
    pub dispersion: DispersionMode,
    /// Number of top-ranked cycles whose accounts are flagged in the report.
    pub flag_top: usize,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            k: 8,
            grid: GridMode::Diagonal,
            grid_p: 0,
            grid_q: 0,
            points: Vec::new(),
            m: 100,
            percentile: 75.0,
            variant: CentralityVariant::Degree,
            dispersion: DispersionMode::SetRelative,
            flag_top: 3,
        }
    }
}

fn spaced(count: usize) -> impl Iterator<Item = f64> {
    (1..=count).map(move |i| 2.0 * i as f64 / count as f64)
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(Error::Usage(m));
        if !self.delimiter.is_ascii() {
            return usage("delimiter must be a single ASCII character".into());
        }
        if !(self.communities.resolution > 0.0) {
            return usage("communities.resolution must be positive".into());
        }
        if self.cycles.min < 2 || self.cycles.min > self.cycles.max {
            return usage("cycles: need 2 <= min_len <= max_len".into());
        }
        if self.paths.min_len < 1 || self.paths.min_len > self.paths.max_len {
            return usage("paths: need 1 <= min_len <= max_len".into());
        }
        if self.walk.walk_length == 0 || self.walk.walks_per_node == 0 {
            return usage("walk_length and walks_per_node must be at least 1".into());
        }
        self.train_params(0).validate().map_err(|e| Error::Usage(e.to_string()))?;
        let s = &self.scoring;
        if s.m == 0 {
            return usage("scoring.m must be at least 1".into());
        }
        if !(s.percentile > 0.0 && s.percentile < 100.0) {
            return usage("scoring.percentile must lie in (0, 100)".into());
        }
        match s.grid {
            GridMode::Diagonal if s.k == 0 => return usage("scoring.k must be at least 1".into()),
            GridMode::Full if s.grid_p == 0 || s.grid_q == 0 || s.grid_p * s.grid_q != s.k => {
                return usage("full grid needs grid_p * grid_q == k".into())
            }
            GridMode::Explicit if s.k == 0 || s.points.len() != s.k => {
                return usage("explicit grid needs k == number of points, k >= 1".into())
            }
            GridMode::Explicit if s.points.iter().flatten().any(|&x| !(x > 0.0 && x.is_finite())) => {
                return usage("grid points must be positive".into())
            }
            _ => {}
        }
        Ok(())
    }

    /// `(p, q)` of each embedding run, in run order.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        let s = &self.scoring;
        match s.grid {
            GridMode::Diagonal => spaced(s.k).map(|x| (x, x)).collect(),
            GridMode::Full => spaced(s.grid_p).flat_map(|p| spaced(s.grid_q).map(move |q| (p, q))).collect(),
            GridMode::Explicit => s.points.iter().map(|&[p, q]| (p, q)).collect(),
        }
    }

    pub fn walk_params(&self, p: f64, q: f64, seed: u64) -> WalkParams {
        WalkParams {
            p,
            q,
            walk_length: self.walk.walk_length,
            walks_per_node: self.walk.walks_per_node,
            seed,
            alias_cache: self.walk.alias_cache,
        }
    }

    pub fn train_params(&self, seed: u64) -> TrainParams {
        let t = &self.train;
        TrainParams {
            dimension: t.dimension,
            window: t.window,
            negative_samples: t.negative_samples,
            epochs: t.epochs,
            learning_rate: t.learning_rate,
            min_learning_rate: t.min_learning_rate,
            seed,
            mode: if self.deterministic {
                TrainMode::Deterministic
            } else {
                TrainMode::Parallel
            },
        }
    }

    /// Hash of every setting that can change results; excludes file
    /// locations and the thread budget.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.input = PathBuf::new();
        c.output = PathBuf::new();
        c.threads = 0;
        hash_json(&c)
    }
}

pub fn hash_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serialisable");
    hex::encode(Sha256::digest(bytes))
}
