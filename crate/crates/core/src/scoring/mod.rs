//! Community-normalised scores, embedding dispersion, spread numbers and the
//! aggregate anti-centrality score `R`.

mod aggregate;
mod cns;
mod spread;

pub use aggregate::{aggregate_r, min_max_normalize, r_formula, CentralityVariant, CycleScoreCard, NormalizedScores, RunValue};
pub use cns::{
    cns, dispersion, r_prime, AdditiveMeasure, AnchoredDispersion, CnsOutcome, CnsResult, DispersionMode,
    SetDispersion, SetScore,
};
pub use spread::{percentile, spread_number};
