//! Louvain modularity optimisation on the undirected weighted projection.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, TxGraph};
use crate::seed;

pub type CommunityId = usize;

/// A partition of the node set into disjoint non-empty communities.
///
/// Community ids are canonical: communities are numbered in order of their
/// smallest member, and each member list is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityPartition {
    assignment: Vec<CommunityId>,
    communities: Vec<Vec<NodeId>>,
}

impl CommunityPartition {
    /// Canonicalises an arbitrary labelling (any label values) of nodes `0..n`.
    pub fn from_labels<L: Copy + Eq + std::hash::Hash>(labels: &[L]) -> Self {
        let mut relabel: HashMap<L, CommunityId> = HashMap::new();
        let mut communities: Vec<Vec<NodeId>> = Vec::new();
        let assignment = labels
            .iter()
            .enumerate()
            .map(|(v, l)| {
                let c = *relabel.entry(*l).or_insert_with(|| {
                    communities.push(Vec::new());
                    communities.len() - 1
                });
                communities[c].push(v);
                c
            })
            .collect();
        CommunityPartition {
            assignment,
            communities,
        }
    }

    /// Builds a partition from explicit member lists, which must cover
    /// `0..node_count` exactly once.
    pub fn from_communities(node_count: usize, communities: Vec<Vec<NodeId>>) -> Result<Self> {
        let mut labels = vec![usize::MAX; node_count];
        for (c, members) in communities.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::InvalidParam(format!("community {c} is empty")));
            }
            for &v in members {
                if v >= node_count {
                    return Err(Error::UnknownNode(v));
                }
                if labels[v] != usize::MAX {
                    return Err(Error::InvalidParam(format!("node {v} assigned twice")));
                }
                labels[v] = c;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidParam(format!("node {v} has no community")));
        }
        Ok(Self::from_labels(&labels))
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn community_of(&self, v: NodeId) -> CommunityId {
        self.assignment[v]
    }

    pub fn members(&self, c: CommunityId) -> &[NodeId] {
        &self.communities[c]
    }

    pub fn communities(&self) -> &[Vec<NodeId>] {
        &self.communities
    }

    pub fn assignment(&self) -> &[CommunityId] {
        &self.assignment
    }
}

/// Symmetric weighted adjacency; `self_loops[i]` holds the internal weight of
/// an aggregated node.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl Level {
    fn from_graph(g: &TxGraph) -> Level {
        let n = g.node_count();
        let mut maps: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n];
        for (u, v, a) in g.edges() {
            *maps[u].entry(v).or_default() += a.weight;
            *maps[v].entry(u).or_default() += a.weight;
        }
        Level {
            adj: maps.into_iter().map(sorted_entries).collect(),
            self_loops: vec![0.0; n],
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Node strength: incident weight, counting an internal loop twice.
    fn strength(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|e| e.1).sum::<f64>() + 2.0 * self.self_loops[i]
    }

    fn aggregate(&self, labels: &[usize], count: usize) -> Level {
        let mut maps: Vec<HashMap<usize, f64>> = vec![HashMap::new(); count];
        let mut self_loops = vec![0.0; count];
        for i in 0..self.len() {
            let ci = labels[i];
            self_loops[ci] += self.self_loops[i];
            for &(j, w) in &self.adj[i] {
                let cj = labels[j];
                if ci == cj {
                    // each internal undirected edge is visited from both ends
                    self_loops[ci] += w / 2.0;
                } else {
                    *maps[ci].entry(cj).or_default() += w;
                }
            }
        }
        Level {
            adj: maps.into_iter().map(sorted_entries).collect(),
            self_loops,
        }
    }
}

fn sorted_entries(m: HashMap<usize, f64>) -> Vec<(usize, f64)> {
    let mut v: Vec<(usize, f64)> = m.into_iter().collect();
    v.sort_unstable_by_key(|e| e.0);
    v
}

const MIN_GAIN: f64 = 1e-12;

/// One local-moving phase. Returns labels compacted to `0..count` and whether
/// any node moved.
fn local_moving(level: &Level, resolution: f64, rng: &mut impl rand::Rng) -> (Vec<usize>, usize, bool) {
    let n = level.len();
    let strength: Vec<f64> = (0..n).map(|i| level.strength(i)).collect();
    let m2: f64 = strength.iter().sum();
    let mut label: Vec<usize> = (0..n).collect();
    let mut total: Vec<f64> = strength.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut moved_any = false;
    let mut links: Vec<f64> = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    loop {
        let mut moved = false;
        for &i in &order {
            if level.adj[i].is_empty() {
                continue;
            }
            let own = label[i];
            touched.clear();
            for &(j, w) in &level.adj[i] {
                let c = label[j];
                // edge weights are positive, so zero means unseen
                if links[c] == 0.0 {
                    touched.push(c);
                }
                links[c] += w;
            }
            let k = strength[i];
            total[own] -= k;
            let gain = |c: usize, links: &[f64]| links[c] - resolution * total[c] * k / m2;
            let mut best = own;
            let mut best_gain = gain(own, &links);
            for &c in &touched {
                let g = gain(c, &links);
                if g > best_gain + MIN_GAIN {
                    best = c;
                    best_gain = g;
                }
            }
            total[best] += k;
            if best != own {
                label[i] = best;
                moved = true;
                moved_any = true;
            }
            for &c in &touched {
                links[c] = 0.0;
            }
            links[own] = 0.0;
        }
        if !moved {
            break;
        }
    }

    let mut compact: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::with_capacity(n);
    for &l in &label {
        let next = compact.len();
        out.push(*compact.entry(l).or_insert(next));
    }
    let count = compact.len();
    (out, count, moved_any)
}

/// Partitions `g` by Louvain modularity optimisation on its undirected
/// projection, where the weights of `u -> v` and `v -> u` are summed.
///
/// The node visiting order of every level is shuffled from `seed`, so the
/// result is deterministic for fixed `(g, resolution, seed)`.
pub fn detect_communities(g: &TxGraph, resolution: f64, seed: u64) -> Result<CommunityPartition> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidParam(format!("resolution must be positive, got {resolution}")));
    }
    let mut level = Level::from_graph(g);
    let mut membership: Vec<usize> = (0..g.node_count()).collect();
    for depth in 0u64.. {
        let mut rng = seed::stream_rng(seed, depth);
        let (labels, count, moved) = local_moving(&level, resolution, &mut rng);
        if !moved {
            break;
        }
        for m in membership.iter_mut() {
            *m = labels[*m];
        }
        level = level.aggregate(&labels, count);
    }
    Ok(CommunityPartition::from_labels(&membership))
}

/// Modularity of a partition on the undirected weighted projection.
pub fn modularity(g: &TxGraph, partition: &CommunityPartition, resolution: f64) -> f64 {
    let level = Level::from_graph(g);
    let strength: Vec<f64> = (0..level.len()).map(|i| level.strength(i)).collect();
    let m2: f64 = strength.iter().sum();
    if m2 == 0.0 {
        return 0.0;
    }
    let mut internal = vec![0.0; partition.len()];
    let mut total = vec![0.0; partition.len()];
    for i in 0..level.len() {
        let c = partition.community_of(i);
        total[c] += strength[i];
        for &(j, w) in &level.adj[i] {
            if partition.community_of(j) == c {
                internal[c] += w;
            }
        }
    }
    internal
        .iter()
        .zip(&total)
        .map(|(&l, &t)| l / m2 - resolution * (t / m2) * (t / m2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{graph, random_digraph};

    fn two_cliques() -> TxGraph {
        let mut edges = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in 0..5 {
                    if i != j {
                        edges.push((base + i, base + j));
                    }
                }
            }
        }
        edges.push((4, 5));
        graph(10, &edges)
    }

    #[test]
    fn two_cliques_split_and_match_brute_force_optimum() {
        let g = two_cliques();
        // brute force over every 2-partition (and the trivial one)
        let mut best = (f64::NEG_INFINITY, 0u32);
        for mask in 0u32..(1 << 9) {
            let labels: Vec<u32> = (0..10).map(|i| if i == 9 { 0 } else { mask >> i & 1 }).collect();
            let q = modularity(&g, &CommunityPartition::from_labels(&labels), 1.0);
            if q > best.0 + 1e-12 {
                best = (q, mask);
            }
        }
        let opt_labels: Vec<u32> = (0..10).map(|i| if i == 9 { 0 } else { best.1 >> i & 1 }).collect();
        let optimum = CommunityPartition::from_labels(&opt_labels);
        assert_eq!(optimum.communities(), &[vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]]);

        for seed in 0..5 {
            let p = detect_communities(&g, 1.0, seed).unwrap();
            assert_eq!(p, optimum);
        }
    }

    #[test]
    fn no_edges_gives_singletons() {
        let g = graph(4, &[]);
        let p = detect_communities(&g, 1.0, 3).unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn partition_is_valid_and_deterministic() {
        let mut rng = seed::rng(5);
        let g = random_digraph(&mut rng, 60, 0.05, true);
        let a = detect_communities(&g, 1.0, 9).unwrap();
        let b = detect_communities(&g, 1.0, 9).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<NodeId> = a.communities().concat();
        all.sort_unstable();
        assert_eq!(all, (0..60).collect::<Vec<_>>());
        for (c, members) in a.communities().iter().enumerate() {
            assert!(!members.is_empty());
            assert!(members.iter().all(|&v| a.community_of(v) == c));
        }
        // louvain never does worse than singletons
        let singletons = CommunityPartition::from_labels(&(0..60).collect::<Vec<_>>());
        assert!(modularity(&g, &a, 1.0) > modularity(&g, &singletons, 1.0));
    }

    #[test]
    fn from_communities_validates() {
        assert!(CommunityPartition::from_communities(3, vec![vec![0, 1], vec![2]]).is_ok());
        assert!(CommunityPartition::from_communities(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(CommunityPartition::from_communities(3, vec![vec![0, 1]]).is_err());
        assert!(CommunityPartition::from_communities(3, vec![vec![0, 1, 2], vec![]]).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(detect_communities(&graph(0, &[]), 1.0, 0), Err(Error::EmptyGraph)));
        assert!(detect_communities(&graph(2, &[(0, 1)]), 0.0, 0).is_err());
    }
}
