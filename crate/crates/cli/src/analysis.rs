//! In-memory computation behind each pipeline stage.

use antiflow::centrality::{community_tables, scatter};
use antiflow::scoring::{aggregate_r, cns, r_prime, spread_number, AdditiveMeasure, RunValue};
use antiflow::seed::derive;
use antiflow::train::embed;
use antiflow::{
    detect_communities, detect_cycles, CentralityVariant, CentralityVector, CnsOutcome, CnsResult,
    CommunityId, CommunityPartition, Cycle, Embedding, Measure, ScoreCard, TxGraph,
};
use rayon::prelude::*;

use crate::config::PipelineConfig;

pub const STAGE_COMMUNITIES: u64 = 1;
pub const STAGE_WALK: u64 = 2;
pub const STAGE_TRAIN: u64 = 3;
pub const STAGE_R_PRIME: u64 = 4;
pub const STAGE_CNS: u64 = 5;

pub fn communities(g: &TxGraph, cfg: &PipelineConfig) -> antiflow::Result<CommunityPartition> {
    detect_communities(g, cfg.communities.resolution, derive(cfg.seed, STAGE_COMMUNITIES, 0))
}

pub fn cycles(g: &TxGraph, p: &CommunityPartition, cfg: &PipelineConfig) -> antiflow::Result<Vec<Cycle>> {
    detect_cycles(g, p, cfg.cycles)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub run: usize,
    pub p: f64,
    pub q: f64,
    pub walk_seed: u64,
    pub train_seed: u64,
}

pub fn runs(cfg: &PipelineConfig) -> Vec<RunSpec> {
    cfg.grid()
        .into_iter()
        .enumerate()
        .map(|(i, (p, q))| RunSpec {
            run: i,
            p,
            q,
            walk_seed: derive(cfg.seed, STAGE_WALK, i as u64),
            train_seed: derive(cfg.seed, STAGE_TRAIN, i as u64),
        })
        .collect()
}

pub fn embed_run(g: &TxGraph, cfg: &PipelineConfig, run: &RunSpec) -> antiflow::Result<Embedding> {
    embed(g, &cfg.walk_params(run.p, run.q, run.walk_seed), &cfg.train_params(run.train_seed))
}

/// Maps `f` over cycles; sequential when `sequential` is set. Every cycle
/// has its own seed, so both paths give the same output.
fn per_cycle<T, F>(cycles: &[Cycle], sequential: bool, f: F) -> antiflow::Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &Cycle) -> antiflow::Result<T> + Sync,
{
    if sequential {
        cycles.iter().enumerate().map(|(c, x)| f(c, x)).collect()
    } else {
        cycles.par_iter().enumerate().map(|(c, x)| f(c, x)).collect()
    }
}

/// r′ of every cycle under one embedding.
pub fn r_prime_run(
    p: &CommunityPartition,
    cycles: &[Cycle],
    emb: &Embedding,
    cfg: &PipelineConfig,
    run: usize,
) -> antiflow::Result<Vec<CnsResult<f64>>> {
    let emb = emb.cast::<f64>();
    per_cycle(cycles, cfg.deterministic, |c, cycle| {
        let seed = derive(cfg.seed, STAGE_R_PRIME, ((run as u64) << 32) | c as u64);
        r_prime(p, cycle, &emb, cfg.scoring.m, seed, cfg.scoring.dispersion)
    })
}

/// Communities that contain at least one cycle, ascending.
pub fn cycle_communities(cycles: &[Cycle]) -> Vec<CommunityId> {
    let mut c: Vec<CommunityId> = cycles.iter().map(|c| c.community).collect();
    c.sort_unstable();
    c.dedup();
    c
}

pub fn centrality(
    g: &TxGraph,
    p: &CommunityPartition,
    cycles: &[Cycle],
) -> antiflow::Result<Vec<CentralityVector<f64>>> {
    community_tables(g, p, &cycle_communities(cycles), &Measure::ALL)
}

/// Graph-wide per-node values of each measure, in `Measure::ALL` order.
pub fn measure_values(node_count: usize, tables: &[CentralityVector<f64>]) -> Vec<Vec<Option<f64>>> {
    Measure::ALL.iter().map(|&m| scatter(node_count, tables, m)).collect()
}

/// CNS of every cycle under each measure; `values` follows `Measure::ALL`.
pub fn cns_table(
    p: &CommunityPartition,
    cycles: &[Cycle],
    values: &[Vec<Option<f64>>],
    cfg: &PipelineConfig,
) -> antiflow::Result<Vec<Vec<CnsResult<f64>>>> {
    per_cycle(cycles, cfg.deterministic, |c, cycle| {
        values
            .iter()
            .enumerate()
            .map(|(mi, v)| {
                let seed = derive(cfg.seed, STAGE_CNS, ((mi as u64) << 32) | c as u64);
                cns(p, &cycle.nodes, &AdditiveMeasure(v), cfg.scoring.m, seed)
            })
            .collect()
    })
}

/// Spread numbers, normalised series and `R` for every cycle.
///
/// `r_primes[k][c]` is cycle `c` in run `k`; `cns[c]` follows `Measure::ALL`.
pub fn score_cards(
    runs: &[(f64, f64)],
    r_primes: &[Vec<CnsOutcome<f64>>],
    cns: &[Vec<CnsOutcome<f64>>],
    percentile: f64,
    variant: CentralityVariant,
) -> antiflow::Result<Vec<ScoreCard>> {
    let spread = spread_number(r_primes, percentile)?;
    let mut cards: Vec<ScoreCard> = (0..cns.len())
        .map(|c| {
            let mut card = ScoreCard::new(c);
            card.r_prime_per_run = runs
                .iter()
                .zip(r_primes)
                .enumerate()
                .map(|(k, (&(p, q), run))| RunValue {
                    run: k,
                    p,
                    q,
                    r_prime: run[c],
                })
                .collect();
            card.spread_number = spread[c];
            let m = &cns[c];
            card.cns_betweenness = m[0];
            card.cns_degree = m[1];
            card.cns_closeness = m[2];
            card.cns_con = m[3];
            card.cns_pagerank = m[4];
            card
        })
        .collect();
    aggregate_r(&mut cards, variant);
    Ok(cards)
}

/// Spearman correlation of two score vectors over entries defined in both,
/// with average ranks for ties. `None` below two common entries.
pub fn spearman(a: &[Option<f64>], b: &[Option<f64>]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = a
        .iter()
        .zip(b)
        .filter_map(|(&a, &b)| Some((a?, b?)))
        .unzip();
    if x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(&x), ranks(&y));
    let mean = (x.len() as f64 + 1.0) / 2.0;
    let (mut num, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        num += (a - mean) * (b - mean);
        sx += (a - mean).powi(2);
        sy += (b - mean).powi(2);
    }
    if sx == 0.0 || sy == 0.0 {
        return None;
    }
    Some(num / (sx * sy).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}
