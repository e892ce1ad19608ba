use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::community::CommunityPartition;
use crate::cycles::Cycle;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::scalar::Real;
use crate::seed;

/// Scores a node set. CNS compares the subject's score with the mean score
/// of random same-size sets from its community.
pub trait SetScore<T> {
    fn score(&self, nodes: &[NodeId]) -> Result<T>;
}

/// Sum of a per-node measure. `values` is indexed by graph node; nodes with
/// `None` are outside the measure's domain.
pub struct AdditiveMeasure<'a, T>(pub &'a [Option<T>]);

impl<T: Real> SetScore<T> for AdditiveMeasure<'_, T> {
    fn score(&self, nodes: &[NodeId]) -> Result<T> {
        nodes
            .iter()
            .map(|&v| self.0.get(v).copied().flatten().ok_or(Error::UnknownNode(v)))
            .sum()
    }
}

/// Internal spread of a set: `Σ_{v∈S} Σ_{u∈S} ‖e(u) − e(v)‖`.
pub struct SetDispersion<'a, T>(pub &'a EmbeddingMatrix<T>);

impl<T: Real> SetScore<T> for SetDispersion<'_, T> {
    fn score(&self, nodes: &[NodeId]) -> Result<T> {
        dispersion(self.0, nodes)
    }
}

/// Distance of a set to a fixed anchor set: `Σ_{v∈S} Σ_{u∈A} ‖e(u) − e(v)‖`.
pub struct AnchoredDispersion<'a, T> {
    pub embedding: &'a EmbeddingMatrix<T>,
    pub anchor: &'a [NodeId],
}

impl<T: Real> SetScore<T> for AnchoredDispersion<'_, T> {
    fn score(&self, nodes: &[NodeId]) -> Result<T> {
        for &v in nodes.iter().chain(self.anchor) {
            self.embedding.row_checked(v)?;
        }
        Ok(nodes
            .iter()
            .flat_map(|&v| self.anchor.iter().map(move |&u| (u, v)))
            .map(|(u, v)| self.embedding.distance(u, v))
            .sum())
    }
}

/// Sum of pairwise embedding distances over ordered pairs of `nodes`; each
/// unordered pair counts twice.
pub fn dispersion<T: Real>(embedding: &EmbeddingMatrix<T>, nodes: &[NodeId]) -> Result<T> {
    for &v in nodes {
        embedding.row_checked(v)?;
    }
    let mut half = T::zero();
    for (i, &v) in nodes.iter().enumerate() {
        for &u in &nodes[i + 1..] {
            half = half + embedding.distance(u, v);
        }
    }
    Ok(half + half)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum CnsOutcome<T> {
    Score(T),
    /// The community has fewer nodes outside the subject than the subject
    /// itself, so no comparison set exists.
    Disregarded,
    /// Random sets scored zero while the subject did not; ranks above every
    /// finite score.
    Unbounded,
}

impl<T: Copy> CnsOutcome<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            CnsOutcome::Score(x) => Some(*x),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CnsResult<T> {
    pub r_subgraph: T,
    pub r_random: T,
    pub outcome: CnsOutcome<T>,
    pub sample_count: usize,
}

/// Community-normalised score of `subject` under `measure`.
///
/// Draws `m` uniform subsets of size `|subject|`, without replacement, from
/// the subject's community minus the subject. `0 / 0` is 1.
pub fn cns<T: Real, M: SetScore<T>>(
    partition: &CommunityPartition,
    subject: &[NodeId],
    measure: &M,
    m: usize,
    seed: u64,
) -> Result<CnsResult<T>> {
    if m == 0 {
        return Err(Error::InvalidParam("sample count m must be at least 1".into()));
    }
    let Some(&first) = subject.first() else {
        return Err(Error::InvalidParam("empty subject".into()));
    };
    if let Some(&v) = subject.iter().find(|&&v| v >= partition.node_count()) {
        return Err(Error::UnknownNode(v));
    }
    let home = partition.community_of(first);
    if let Some(&v) = subject.iter().find(|&&v| partition.community_of(v) != home) {
        return Err(Error::SpansCommunities(home, partition.community_of(v)));
    }

    let pool: Vec<NodeId> = partition
        .members(home)
        .iter()
        .copied()
        .filter(|v| !subject.contains(v))
        .collect();
    let r_subgraph = measure.score(subject)?;
    let k = subject.len();
    if pool.len() < k {
        return Ok(CnsResult {
            r_subgraph,
            r_random: T::zero(),
            outcome: CnsOutcome::Disregarded,
            sample_count: 0,
        });
    }

    let mut rng = seed::rng(seed);
    let mut sample = vec![0; k];
    // running mean: exact when every sample scores the same
    let mut r_random = T::zero();
    for drawn in 1..=m {
        for (slot, i) in sample.iter_mut().zip(index::sample(&mut rng, pool.len(), k)) {
            *slot = pool[i];
        }
        let x = measure.score(&sample)?;
        r_random = r_random + (x - r_random) / T::from_count(drawn);
    }
    let outcome = if r_random > T::zero() {
        CnsOutcome::Score(r_subgraph / r_random)
    } else if r_subgraph == T::zero() {
        CnsOutcome::Score(T::one())
    } else {
        CnsOutcome::Unbounded
    };
    Ok(CnsResult {
        r_subgraph,
        r_random,
        outcome,
        sample_count: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DispersionMode {
    /// Each set is scored by its own internal spread.
    #[default]
    SetRelative,
    /// Every set is scored by its distances to the cycle's nodes.
    Anchored,
}

/// Dispersion ratio of one cycle for one embedding run.
pub fn r_prime<T: Real>(
    partition: &CommunityPartition,
    cycle: &Cycle,
    embedding: &EmbeddingMatrix<T>,
    m: usize,
    seed: u64,
    mode: DispersionMode,
) -> Result<CnsResult<T>> {
    match mode {
        DispersionMode::SetRelative => cns(partition, &cycle.nodes, &SetDispersion(embedding), m, seed),
        DispersionMode::Anchored => {
            let measure = AnchoredDispersion {
                embedding,
                anchor: &cycle.nodes,
            };
            cns(partition, &cycle.nodes, &measure, m, seed)
        }
    }
}
