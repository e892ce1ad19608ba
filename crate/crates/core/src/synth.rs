//! Seeded synthetic transaction networks with planted cycles.
//!
//! Each community is split into clusters: dense directed random graphs
//! inside a cluster, sparser links between clusters of the same community
//! and a handful of edges across communities. Every node also sits on one of
//! `layer_count` layers and unplanted edges only run from a layer to the
//! next (mod `layer_count`), so every unplanted directed cycle has a length
//! divisible by `layer_count` and walks never hit dead ends by construction.
//!
//! Planted cycles step through consecutive layers and come in three kinds:
//! * `anti_central`: fresh low-degree accounts, one per cluster, each fed
//!   from and paying out to members of its own cluster, chained into a cycle.
//! * `central`: a cycle through the highest-degree members of a community.
//! * `random`: a cycle through uniformly chosen members of a community.

use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, TransactionEdge, TxGraph};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attachment {
    AntiCentral,
    Central,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedCycleSpec {
    pub length: usize,
    pub attachment: Attachment,
    /// Home community; round-robin over communities when absent.
    #[serde(default)]
    pub community: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub community_count: usize,
    /// Inclusive range of community sizes before planting.
    pub community_size_range: (usize, usize),
    pub clusters_per_community: usize,
    /// Edge probability from a node to each member of its cluster on the next layer.
    pub intra_density: f64,
    /// Same, towards members of the other clusters of its community.
    pub cluster_link_density: f64,
    pub inter_edge_count: usize,
    /// In- and out-edges each anti-central account has into its cluster.
    pub anchor_edges: usize,
    /// Layers of the base orientation; above the longest cycle of interest
    /// the unplanted graph has no short cycles.
    pub layer_count: usize,
    pub planted_cycles: Vec<PlantedCycleSpec>,
    pub year: i32,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        let planted = |length, attachment, community| PlantedCycleSpec {
            length,
            attachment,
            community: Some(community),
        };
        SynthSpec {
            community_count: 5,
            community_size_range: (190, 210),
            clusters_per_community: 4,
            intra_density: 0.6,
            cluster_link_density: 0.05,
            inter_edge_count: 40,
            anchor_edges: 4,
            layer_count: 7,
            planted_cycles: vec![
                planted(4, Attachment::AntiCentral, 0),
                planted(3, Attachment::Central, 1),
                planted(4, Attachment::Central, 2),
                planted(3, Attachment::Random, 3),
                planted(4, Attachment::Random, 4),
                planted(5, Attachment::Random, 1),
            ],
            year: 2015,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        let (lo, hi) = self.community_size_range;
        if self.community_count == 0 || lo == 0 || lo > hi {
            return bad("need at least one community and a non-empty size range".into());
        }
        if self.clusters_per_community == 0 || self.clusters_per_community > lo {
            return bad("clusters per community must lie in [1, minimum community size]".into());
        }
        if self.layer_count < 2 {
            return bad("layer_count must be at least 2".into());
        }
        for d in [self.intra_density, self.cluster_link_density] {
            if !(0.0..1.0).contains(&d) {
                return bad(format!("density {d} outside [0, 1)"));
            }
        }
        for (i, c) in self.planted_cycles.iter().enumerate() {
            if !(3..=6).contains(&c.length) {
                return bad(format!("planted cycle {i} has length {} outside [3, 6]", c.length));
            }
            if c.community.is_some_and(|h| h >= self.community_count) {
                return bad(format!("planted cycle {i} targets a missing community"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedCycle {
    pub index: usize,
    pub attachment: Attachment,
    pub community: usize,
    /// Account tokens in cycle order.
    pub nodes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Generated communities, as account tokens, including planted accounts.
    pub communities: Vec<Vec<String>>,
    pub planted: Vec<PlantedCycle>,
}

impl GroundTruth {
    pub fn positives(&self) -> impl Iterator<Item = &PlantedCycle> {
        self.planted.iter().filter(|c| c.attachment == Attachment::AntiCentral)
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub edges: Vec<TransactionEdge>,
    pub graph: TxGraph,
    pub truth: GroundTruth,
}

struct Builder<R> {
    rng: R,
    amount: LogNormal<f64>,
    year: i32,
    edges: Vec<TransactionEdge>,
    pairs: std::collections::HashSet<(usize, usize)>,
    degree: Vec<usize>,
}

fn token(v: usize) -> String {
    format!("A{v:06}")
}

impl<R: Rng> Builder<R> {
    fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || !self.pairs.insert((u, v)) {
            return false;
        }
        let tx_count = self.rng.random_range(1..=4u64);
        let average = loop {
            let a = self.amount.sample(&mut self.rng);
            if a < 9_000.0 {
                break a;
            }
        };
        let total_amount = (average * tx_count as f64 * 100.0).round() / 100.0;
        self.edges.push(TransactionEdge {
            source: token(u),
            target: token(v),
            tx_count,
            total_amount: total_amount.max(0.01),
            start_year: self.year,
            end_year: self.year,
        });
        for x in [u, v] {
            if x >= self.degree.len() {
                self.degree.resize(x + 1, 0);
            }
            self.degree[x] += 1;
        }
        true
    }

    fn degree(&self, v: usize) -> usize {
        self.degree.get(v).copied().unwrap_or(0)
    }
}

/// Generates a network and its ground truth. Output is a pure function of
/// the spec.
pub fn generate(spec: &SynthSpec) -> Result<SynthOutput> {
    spec.validate()?;
    let mut rng = seed::rng(spec.seed);
    let layers = spec.layer_count;
    let (lo, hi) = spec.community_size_range;
    let sizes: Vec<usize> = (0..spec.community_count).map(|_| rng.random_range(lo..=hi)).collect();
    for (i, c) in spec.planted_cycles.iter().enumerate() {
        let home = c.community.unwrap_or(i % spec.community_count);
        if c.length > sizes[home] {
            return Err(Error::Infeasible(format!(
                "planted cycle {i} of length {} exceeds community {home} of size {}",
                c.length, sizes[home]
            )));
        }
    }

    // members[c][k] = nodes of cluster k in community c
    let mut members: Vec<Vec<Vec<usize>>> = Vec::with_capacity(sizes.len());
    let mut layer = Vec::new();
    let mut next = 0;
    for &s in &sizes {
        let mut clusters = vec![Vec::new(); spec.clusters_per_community];
        for i in 0..s {
            clusters[i % spec.clusters_per_community].push(next + i);
        }
        layer.resize(next + s, 0);
        for c in &clusters {
            let mut slots: Vec<usize> = (0..c.len()).map(|i| i % layers).collect();
            slots.shuffle(&mut rng);
            for (&v, l) in c.iter().zip(slots) {
                layer[v] = l;
            }
        }
        next += s;
        members.push(clusters);
    }
    let base = next;

    let mut b = Builder {
        rng,
        amount: LogNormal::new(1000f64.ln(), 0.75).expect("valid lognormal"),
        year: spec.year,
        edges: Vec::new(),
        pairs: Default::default(),
        degree: vec![0; base],
    };
    let follows = |layer: &[usize], u: usize, v: usize| layer[v] == (layer[u] + 1) % layers;

    for clusters in &members {
        for (ku, cu) in clusters.iter().enumerate() {
            for &u in cu {
                for (kv, cv) in clusters.iter().enumerate() {
                    let p = if ku == kv { spec.intra_density } else { spec.cluster_link_density };
                    for &v in cv {
                        if follows(&layer, u, v) && b.rng.random_bool(p) {
                            b.add_edge(u, v);
                        }
                    }
                }
            }
        }
    }

    if spec.community_count > 1 {
        let community_of: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| std::iter::repeat_n(c, s)).collect();
        let mut added = 0;
        let mut attempts = 0;
        while added < spec.inter_edge_count && attempts < 1000 * spec.inter_edge_count.max(1) {
            attempts += 1;
            let u = b.rng.random_range(0..base);
            let v = b.rng.random_range(0..base);
            if community_of[u] != community_of[v] && follows(&layer, u, v) {
                added += b.add_edge(u, v) as usize;
            }
        }
    }

    let mut communities: Vec<Vec<usize>> = members.iter().map(|c| c.concat()).collect();
    let mut planted = Vec::with_capacity(spec.planted_cycles.len());
    for (i, pc) in spec.planted_cycles.iter().enumerate() {
        let home = pc.community.unwrap_or(i % spec.community_count);
        let len = pc.length;
        let start = b.rng.random_range(0..layers);
        let at = |j: usize| (start + j) % layers;
        let cycle: Vec<usize> = match pc.attachment {
            Attachment::AntiCentral => {
                let mut fresh = Vec::with_capacity(len);
                for j in 0..len {
                    let cluster = &members[home][j % spec.clusters_per_community];
                    let on = |l: usize| -> Vec<usize> { cluster.iter().copied().filter(|&x| layer[x] == l).collect() };
                    let sources = on((at(j) + layers - 1) % layers);
                    let sinks = on((at(j) + 1) % layers);
                    if sources.len().min(sinks.len()) < spec.anchor_edges {
                        return Err(Error::Infeasible(format!(
                            "cluster layer of {} nodes too small for {} anchor edges",
                            sources.len().min(sinks.len()),
                            spec.anchor_edges
                        )));
                    }
                    let v = next;
                    next += 1;
                    layer.push(at(j));
                    for k in index::sample(&mut b.rng, sources.len(), spec.anchor_edges) {
                        b.add_edge(sources[k], v);
                    }
                    for k in index::sample(&mut b.rng, sinks.len(), spec.anchor_edges) {
                        b.add_edge(v, sinks[k]);
                    }
                    fresh.push(v);
                }
                communities[home].extend(&fresh);
                fresh
            }
            Attachment::Central => {
                let mut cycle: Vec<usize> = Vec::with_capacity(len);
                for j in 0..len {
                    let hub = communities[home]
                        .iter()
                        .copied()
                        .filter(|&v| layer[v] == at(j) && !cycle.contains(&v))
                        .max_by_key(|&v| (b.degree(v), std::cmp::Reverse(v)));
                    cycle.push(hub.ok_or_else(|| Error::Infeasible(format!("community {home} has an empty layer")))?);
                }
                cycle
            }
            Attachment::Random => {
                let mut cycle: Vec<usize> = Vec::with_capacity(len);
                for j in 0..len {
                    let pool: Vec<usize> = communities[home]
                        .iter()
                        .copied()
                        .filter(|&v| layer[v] == at(j) && !cycle.contains(&v))
                        .collect();
                    let v = pool
                        .choose(&mut b.rng)
                        .ok_or_else(|| Error::Infeasible(format!("community {home} has an empty layer")))?;
                    cycle.push(*v);
                }
                cycle
            }
        };
        for j in 0..len {
            b.add_edge(cycle[j], cycle[(j + 1) % len]);
        }
        planted.push(PlantedCycle {
            index: i,
            attachment: pc.attachment,
            community: home,
            nodes: cycle.into_iter().map(token).collect(),
        });
    }

    let graph = build_graph(&b.edges)?;
    let truth = GroundTruth {
        communities: communities
            .into_iter()
            .map(|c| c.into_iter().map(token).filter(|t| graph.node_of(t).is_some()).collect())
            .collect(),
        planted,
    };
    Ok(SynthOutput {
        edges: b.edges,
        graph,
        truth,
    })
}
