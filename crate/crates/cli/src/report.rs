//! The final ranked report.

use antiflow::scoring::{NormalizedScores, RunValue};
use antiflow::{CentralityVariant, CnsOutcome, ScoreCard};
use serde::{Deserialize, Serialize};

use crate::analysis::{score_cards, spearman};
use crate::artifacts::CycleRecord;
use crate::config::PipelineConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunPoint {
    pub run: usize,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnsScores {
    pub betweenness: CnsOutcome<f64>,
    pub degree: CnsOutcome<f64>,
    pub closeness: CnsOutcome<f64>,
    pub con: CnsOutcome<f64>,
    pub pagerank: CnsOutcome<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCycle {
    /// 1-based position by `r`; absent when `r` is undefined.
    pub rank: Option<usize>,
    pub cycle: usize,
    pub community: usize,
    pub community_size: usize,
    pub length: usize,
    pub accounts: Vec<String>,
    pub r: Option<f64>,
    /// `R` under the other centrality variant.
    pub r_alternative: Option<f64>,
    pub spread_number: Option<f64>,
    pub r_prime: Vec<RunValue<f64>>,
    pub cns: CnsScores,
    pub normalized: NormalizedScores<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cycles: usize,
    pub ranked: usize,
    pub unranked: usize,
    pub nonzero_spread: usize,
    /// Spearman correlation between `R` under the degree and PageRank variants.
    pub variant_rank_correlation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config_hash: String,
    pub seed: u64,
    pub variant: CentralityVariant,
    pub percentile: f64,
    pub samples: usize,
    pub runs: Vec<RunPoint>,
    pub summary: Summary,
    /// Cycles with a defined `R`, highest first.
    pub ranking: Vec<RankedCycle>,
    /// Cycles whose `R` is undefined, by cycle id.
    pub unranked: Vec<RankedCycle>,
    /// Accounts of the top `flag_top` ranked cycles, sorted.
    pub flagged_accounts: Vec<String>,
}

fn other(v: CentralityVariant) -> CentralityVariant {
    match v {
        CentralityVariant::Degree => CentralityVariant::PageRank,
        CentralityVariant::PageRank => CentralityVariant::Degree,
    }
}

/// Builds the report. `r_primes[k][c]` is cycle `c` in run `k`; `cns[c]`
/// follows `Measure::ALL`; `sizes[community]` is the community size.
pub fn build(
    cfg: &PipelineConfig,
    runs: &[(f64, f64)],
    cycles: &[CycleRecord],
    sizes: &[usize],
    r_primes: &[Vec<CnsOutcome<f64>>],
    cns: &[Vec<CnsOutcome<f64>>],
) -> antiflow::Result<Report> {
    let s = &cfg.scoring;
    let cards = score_cards(runs, r_primes, cns, s.percentile, s.variant)?;
    let alt = score_cards(runs, r_primes, cns, s.percentile, other(s.variant))?;
    let by_variant = |v: CentralityVariant| -> Vec<Option<f64>> {
        if v == s.variant { &cards } else { &alt }.iter().map(|c| c.r).collect()
    };
    let correlation = spearman(&by_variant(CentralityVariant::Degree), &by_variant(CentralityVariant::PageRank));

    let entry = |card: &ScoreCard, alt: &ScoreCard| {
        let rec = &cycles[card.cycle];
        RankedCycle {
            rank: None,
            cycle: card.cycle,
            community: rec.community,
            community_size: sizes.get(rec.community).copied().unwrap_or(0),
            length: rec.length,
            accounts: rec.nodes.clone(),
            r: card.r,
            r_alternative: alt.r,
            spread_number: card.spread_number,
            r_prime: card.r_prime_per_run.clone(),
            cns: CnsScores {
                betweenness: card.cns_betweenness,
                degree: card.cns_degree,
                closeness: card.cns_closeness,
                con: card.cns_con,
                pagerank: card.cns_pagerank,
            },
            normalized: card.normalized,
        }
    };
    let (mut ranking, unranked): (Vec<RankedCycle>, Vec<RankedCycle>) =
        cards.iter().zip(&alt).map(|(c, a)| entry(c, a)).partition(|e| e.r.is_some());
    ranking.sort_by(|a, b| b.r.partial_cmp(&a.r).expect("finite R").then(a.cycle.cmp(&b.cycle)));
    for (i, e) in ranking.iter_mut().enumerate() {
        e.rank = Some(i + 1);
    }
    let mut flagged: Vec<String> = ranking.iter().take(s.flag_top).flat_map(|e| e.accounts.clone()).collect();
    flagged.sort();
    flagged.dedup();

    Ok(Report {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        variant: s.variant,
        percentile: s.percentile,
        samples: s.m,
        runs: runs
            .iter()
            .enumerate()
            .map(|(run, &(p, q))| RunPoint { run, p, q })
            .collect(),
        summary: Summary {
            cycles: cards.len(),
            ranked: ranking.len(),
            unranked: unranked.len(),
            nonzero_spread: cards.iter().filter(|c| c.spread_number.is_some_and(|x| x > 0.0)).count(),
            variant_rank_correlation: correlation,
        },
        ranking,
        unranked,
        flagged_accounts: flagged,
    })
}
