//! Transaction records, cleaning, and the immutable directed graph.

mod edges;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use edges::{
    clean_filter, clean_filter_with, parse_edge_list, write_edge_list, CleanThresholds, ParseMode,
    ParseOptions, ParseReport, TransactionEdge,
};

/// Dense node index in `[0, node_count)`.
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeAttr {
    /// Total amount transferred; the weight used by every algorithm.
    pub weight: f64,
    pub tx_count: u64,
}

/// Weighted directed graph in compressed sparse row form.
///
/// Account tokens are remapped to dense indices; out- and in-neighbour lists
/// are sorted by index so edge lookups are binary searches.
#[derive(Debug, Clone, PartialEq)]
pub struct TxGraph {
    tokens: Vec<String>,
    index: HashMap<String, NodeId>,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    out_attrs: Vec<EdgeAttr>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
}

impl TxGraph {
    /// Builds a graph from explicit node tokens and indexed edges.
    ///
    /// Nodes without edges are kept. Rejects unknown indices, self-loops,
    /// repeated tokens and duplicate ordered pairs.
    pub fn from_parts(tokens: Vec<String>, edges: Vec<(NodeId, NodeId, EdgeAttr)>) -> Result<Self> {
        let n = tokens.len();
        let mut index = HashMap::with_capacity(n);
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidParam(format!("repeated node token {t}")));
            }
        }

        let mut edges = edges;
        for &(u, v, _) in &edges {
            if u >= n {
                return Err(Error::UnknownNode(u));
            }
            if v >= n {
                return Err(Error::UnknownNode(v));
            }
            if u == v {
                return Err(Error::SelfLoop(tokens[u].clone()));
            }
        }
        edges.sort_by_key(|&(u, v, _)| (u, v));
        if let Some(w) = edges.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::DuplicateEdge {
                from: tokens[w[0].0].clone(),
                to: tokens[w[0].1].clone(),
            });
        }

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(u, v, _) in &edges {
            out_offsets[u + 1] += 1;
            in_offsets[v + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets = edges.iter().map(|e| e.1).collect();
        let out_attrs = edges.iter().map(|e| e.2).collect();

        // Sources arrive in increasing order because edges are sorted by source.
        let mut in_sources = vec![0; edges.len()];
        let mut cursor = in_offsets.clone();
        for &(u, v, _) in &edges {
            in_sources[cursor[v]] = u;
            cursor[v] += 1;
        }

        Ok(TxGraph {
            tokens,
            index,
            out_offsets,
            out_targets,
            out_attrs,
            in_offsets,
            in_sources,
        })
    }

    pub fn node_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.node_count()
    }

    pub fn token(&self, v: NodeId) -> &str {
        &self.tokens[v]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn node_of(&self, token: &str) -> Option<NodeId> {
        self.index.get(token).copied()
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn out_attrs(&self, v: NodeId) -> &[EdgeAttr] {
        &self.out_attrs[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_neighbors(u).binary_search(&v).is_ok()
    }

    pub fn edge(&self, u: NodeId, v: NodeId) -> Option<EdgeAttr> {
        let i = self.out_neighbors(u).binary_search(&v).ok()?;
        Some(self.out_attrs(u)[i])
    }

    /// All edges, ordered by `(source, target)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, EdgeAttr)> + '_ {
        self.nodes().flat_map(move |u| {
            self.out_neighbors(u)
                .iter()
                .zip(self.out_attrs(u))
                .map(move |(&v, &a)| (u, v, a))
        })
    }

    /// Subgraph on `nodes` with every edge whose endpoints both lie in the set.
    ///
    /// The induced graph numbers its nodes in increasing parent order, so
    /// inducing on every node reproduces `self`.
    pub fn induce_subgraph(&self, nodes: &[NodeId]) -> Result<InducedSubgraph> {
        let mut parent: Vec<NodeId> = nodes.to_vec();
        parent.sort_unstable();
        parent.dedup();
        if let Some(&bad) = parent.iter().find(|&&v| v >= self.node_count()) {
            return Err(Error::UnknownNode(bad));
        }
        let local: HashMap<NodeId, NodeId> = parent.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (i, &u) in parent.iter().enumerate() {
            for (&v, &attr) in self.out_neighbors(u).iter().zip(self.out_attrs(u)) {
                if let Some(&j) = local.get(&v) {
                    edges.push((i, j, attr));
                }
            }
        }
        let tokens = parent.iter().map(|&v| self.tokens[v].clone()).collect();
        let graph = TxGraph::from_parts(tokens, edges)?;
        Ok(InducedSubgraph { graph, parent })
    }
}

/// An induced subgraph together with the parent index of each of its nodes.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: TxGraph,
    pub parent: Vec<NodeId>,
}

/// Builds the graph of already-cleaned edges.
///
/// Node indices follow first appearance (source before target, row order).
/// Each ordered pair may appear once; weight is the total amount.
pub fn build_graph(edges: &[TransactionEdge]) -> Result<TxGraph> {
    let mut tokens: Vec<String> = Vec::new();
    let mut index: HashMap<&str, NodeId> = HashMap::new();
    let mut indexed = Vec::with_capacity(edges.len());
    for e in edges {
        let mut ids = [0; 2];
        for (slot, t) in ids.iter_mut().zip([e.source.as_str(), e.target.as_str()]) {
            *slot = *index.entry(t).or_insert_with(|| {
                tokens.push(t.to_string());
                tokens.len() - 1
            });
        }
        let [u, v] = ids;
        let attr = EdgeAttr {
            weight: e.total_amount,
            tx_count: e.tx_count,
        };
        indexed.push((u, v, attr));
    }
    TxGraph::from_parts(tokens, indexed)
}
