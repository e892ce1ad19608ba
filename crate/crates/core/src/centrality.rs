//! Per-node centrality measures on (community) subgraphs.
//!
//! Distances are directed hop counts. Betweenness, degree, closeness and CON
//! only need field arithmetic and are generic over [`Scalar`], so they can be
//! evaluated exactly over rationals; PageRank needs a [`Real`].

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::{CommunityId, CommunityPartition};
use crate::error::{Error, Result};
use crate::graph::{NodeId, TxGraph};
use crate::scalar::{Real, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Betweenness,
    Degree,
    Closeness,
    Con,
    PageRank,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Betweenness,
        Measure::Degree,
        Measure::Closeness,
        Measure::Con,
        Measure::PageRank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Betweenness => "betweenness",
            Measure::Degree => "degree",
            Measure::Closeness => "closeness",
            Measure::Con => "con",
            Measure::PageRank => "pagerank",
        }
    }

    pub fn from_name(s: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Values of one measure over the members of one community, keyed by parent
/// graph node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityVector<S> {
    pub measure: Measure,
    pub scope: CommunityId,
    pub nodes: Vec<NodeId>,
    pub values: Vec<S>,
}

/// Brandes betweenness: `B(v) = Σ σ_st(v) / σ_st` over ordered pairs of
/// distinct `s, t` different from `v`. Unreachable pairs contribute nothing.
pub fn betweenness<S: Scalar>(g: &TxGraph) -> Vec<S> {
    let n = g.node_count();
    let mut bc = vec![S::zero(); n];
    let mut sigma = vec![S::zero(); n];
    let mut delta = vec![S::zero(); n];
    let mut dist = vec![usize::MAX; n];
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut order: Vec<NodeId> = Vec::with_capacity(n);
    let mut queue = VecDeque::new();

    for s in 0..n {
        for v in order.drain(..) {
            sigma[v] = S::zero();
            delta[v] = S::zero();
            dist[v] = usize::MAX;
            preds[v].clear();
        }
        sigma[s] = S::one();
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.out_neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] = sigma[w].clone() + sigma[v].clone();
                    preds[w].push(v);
                }
            }
        }
        for &w in order.iter().rev() {
            let coeff = (S::one() + delta[w].clone()) / sigma[w].clone();
            for &v in &preds[w] {
                delta[v] = delta[v].clone() + sigma[v].clone() * coeff.clone();
            }
            if w != s {
                bc[w] = bc[w].clone() + delta[w].clone();
            }
        }
    }
    bc
}

/// `D(v) = (in-degree + out-degree) / |V|`.
pub fn degree_centrality<S: Scalar>(g: &TxGraph) -> Vec<S> {
    let n = S::from_count(g.node_count());
    g.nodes()
        .map(|v| S::from_count(g.in_degree(v) + g.out_degree(v)) / n.clone())
        .collect()
}

/// Sum of hop distances from every node that reaches `v`, found by BFS over
/// reversed edges.
fn incoming_distance_sum(g: &TxGraph, v: NodeId, dist: &mut [usize], queue: &mut VecDeque<NodeId>) -> usize {
    dist.fill(usize::MAX);
    dist[v] = 0;
    queue.clear();
    queue.push_back(v);
    let mut sum = 0;
    while let Some(x) = queue.pop_front() {
        sum += dist[x];
        for &u in g.in_neighbors(x) {
            if dist[u] == usize::MAX {
                dist[u] = dist[x] + 1;
                queue.push_back(u);
            }
        }
    }
    sum
}

/// `CL(v) = 1 / Σ d(u, v)` over nodes `u` with a directed path to `v`;
/// zero when no node reaches `v`.
pub fn closeness<S: Scalar>(g: &TxGraph) -> Vec<S> {
    let mut dist = vec![usize::MAX; g.node_count()];
    let mut queue = VecDeque::new();
    g.nodes()
        .map(|v| match incoming_distance_sum(g, v, &mut dist, &mut queue) {
            0 => S::zero(),
            sum => S::one() / S::from_count(sum),
        })
        .collect()
}

/// `|N_out(u) ∩ N_out(v)|`.
pub fn common_out_neighbors(g: &TxGraph, u: NodeId, v: NodeId) -> usize {
    let (a, b) = (g.out_neighbors(u), g.out_neighbors(v));
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// `CON(v) = Σ_{u ≠ v} |N_out(u) ∩ N_out(v)|`.
///
/// Each out-neighbour `x` of `v` is shared with the other `in_degree(x) - 1`
/// nodes pointing at it, which gives the sum in `O(out_degree(v))`.
pub fn con_score<S: Scalar>(g: &TxGraph) -> Vec<S> {
    g.nodes()
        .map(|v| {
            let shared: usize = g.out_neighbors(v).iter().map(|&x| g.in_degree(x) - 1).sum();
            S::from_count(shared)
        })
        .collect()
}

pub const PAGERANK_MAX_ITERATIONS: usize = 1000;

/// Weighted PageRank by power iteration. Dangling nodes spread their mass
/// uniformly. Stops when the L1 change drops below `tol`.
pub fn pagerank<T: Real>(g: &TxGraph, damping: f64, tol: f64) -> Result<Vec<T>> {
    pagerank_with_limit(g, damping, tol, PAGERANK_MAX_ITERATIONS)
}

pub fn pagerank_with_limit<T: Real>(g: &TxGraph, damping: f64, tol: f64, max_iterations: usize) -> Result<Vec<T>> {
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::InvalidParam(format!("damping must lie in (0, 1), got {damping}")));
    }
    let n = g.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let d = T::from_f64_lossy(damping);
    let nf = T::from_count(n);
    let out_weight: Vec<T> = g
        .nodes()
        .map(|v| g.out_attrs(v).iter().map(|a| T::from_f64_lossy(a.weight)).sum())
        .collect();
    let mut rank = vec![T::one() / nf; n];
    let mut next = vec![T::zero(); n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iterations {
        let dangling: T = g
            .nodes()
            .filter(|&v| g.out_degree(v) == 0)
            .map(|v| rank[v])
            .sum();
        let base = (T::one() - d) / nf + d * dangling / nf;
        next.fill(base);
        for u in g.nodes() {
            if out_weight[u] > T::zero() {
                let share = d * rank[u] / out_weight[u];
                for (&v, a) in g.out_neighbors(u).iter().zip(g.out_attrs(u)) {
                    next[v] = next[v] + share * T::from_f64_lossy(a.weight);
                }
            }
        }
        residual = rank
            .iter()
            .zip(&next)
            .map(|(a, b)| (*a - *b).abs().to_f64_lossy())
            .sum();
        std::mem::swap(&mut rank, &mut next);
        if residual < tol {
            return Ok(rank);
        }
    }
    Err(Error::PageRankDiverged {
        iterations: max_iterations,
        residual,
    })
}

pub const PAGERANK_DAMPING: f64 = 0.85;
pub const PAGERANK_TOLERANCE: f64 = 1e-12;

/// Computes `measure` over the induced subgraph of one community.
pub fn community_measure(
    g: &TxGraph,
    partition: &CommunityPartition,
    community: CommunityId,
    measure: Measure,
) -> Result<CentralityVector<f64>> {
    let sub = g.induce_subgraph(partition.members(community))?;
    let values = match measure {
        Measure::Betweenness => betweenness(&sub.graph),
        Measure::Degree => degree_centrality(&sub.graph),
        Measure::Closeness => closeness(&sub.graph),
        Measure::Con => con_score(&sub.graph),
        Measure::PageRank => pagerank(&sub.graph, PAGERANK_DAMPING, PAGERANK_TOLERANCE)?,
    };
    Ok(CentralityVector {
        measure,
        scope: community,
        nodes: sub.parent,
        values,
    })
}

/// Every measure in `measures` for each listed community, in parallel over
/// communities. Output is ordered by community, then by `measures`.
pub fn community_tables(
    g: &TxGraph,
    partition: &CommunityPartition,
    communities: &[CommunityId],
    measures: &[Measure],
) -> Result<Vec<CentralityVector<f64>>> {
    let tables: Result<Vec<Vec<CentralityVector<f64>>>> = communities
        .par_iter()
        .map(|&c| {
            measures
                .iter()
                .map(|&m| community_measure(g, partition, c, m))
                .collect()
        })
        .collect();
    Ok(tables?.into_iter().flatten().collect())
}

/// Spreads per-community vectors of one measure into a graph-wide array
/// (communities are disjoint, so values never collide). Nodes outside the
/// given tables hold `None`.
pub fn scatter(node_count: usize, tables: &[CentralityVector<f64>], measure: Measure) -> Vec<Option<f64>> {
    let mut out = vec![None; node_count];
    for t in tables.iter().filter(|t| t.measure == measure) {
        for (&v, &x) in t.nodes.iter().zip(&t.values) {
            out[v] = Some(x);
        }
    }
    out
}
