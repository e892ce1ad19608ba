//! Second-order biased random walks.
//!
//! A walk that just moved `t -> v` picks the next node `x` among the
//! out-neighbours of `v` with probability proportional to `w(v, x)` times
//! `1/p` when `x == t`, `1` when the edge `t -> x` exists, and `1/q`
//! otherwise. The first step of a walk has no `t` and is weight-proportional.

use std::num::NonZeroUsize;
use std::sync::Arc;

use lru::LruCache;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alias::AliasTable;
use crate::error::{Error, Result};
use crate::graph::{NodeId, TxGraph};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WalkParams {
    /// Return parameter.
    pub p: f64,
    /// In-out parameter.
    pub q: f64,
    pub walk_length: usize,
    pub walks_per_node: usize,
    pub seed: u64,
    /// Second-order alias tables kept per worker before least-recently-used
    /// eviction.
    pub alias_cache: usize,
}

impl Default for WalkParams {
    fn default() -> Self {
        WalkParams {
            p: 1.0,
            q: 1.0,
            walk_length: 80,
            walks_per_node: 10,
            seed: 0,
            alias_cache: 1 << 16,
        }
    }
}

impl WalkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p.is_finite() && self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "p and q must be positive, got p={} q={}",
                self.p, self.q
            )));
        }
        if self.walk_length == 0 {
            return Err(Error::InvalidParam("walk_length must be at least 1".into()));
        }
        Ok(())
    }
}

fn bias(g: &TxGraph, prev: NodeId, x: NodeId, params: &WalkParams) -> f64 {
    if x == prev {
        1.0 / params.p
    } else if g.has_edge(prev, x) {
        1.0
    } else {
        1.0 / params.q
    }
}

fn unnormalized(g: &TxGraph, prev: Option<NodeId>, current: NodeId, params: &WalkParams) -> Vec<f64> {
    let attrs = g.out_attrs(current);
    match prev {
        None => attrs.iter().map(|a| a.weight).collect(),
        Some(t) => g
            .out_neighbors(current)
            .iter()
            .zip(attrs)
            .map(|(&x, a)| a.weight * bias(g, t, x, params))
            .collect(),
    }
}

/// Next-step distribution of a walk at `current` that arrived from `prev`.
///
/// Returned in out-neighbour order. Empty when `current` is a dead end.
pub fn transition_probs(
    g: &TxGraph,
    prev: Option<NodeId>,
    current: NodeId,
    params: &WalkParams,
) -> Vec<(NodeId, f64)> {
    let weights = unnormalized(g, prev, current, params);
    let z: f64 = weights.iter().sum();
    g.out_neighbors(current)
        .iter()
        .zip(weights)
        .map(|(&x, w)| (x, w / z))
        .collect()
}

/// Samples walks over a fixed graph and parameter set.
pub struct Walker<'g> {
    g: &'g TxGraph,
    params: WalkParams,
    first: Vec<Option<AliasTable>>,
}

pub type EdgeCache = LruCache<(NodeId, NodeId), Arc<AliasTable>>;

impl<'g> Walker<'g> {
    pub fn new(g: &'g TxGraph, params: WalkParams) -> Result<Self> {
        params.validate()?;
        let first = g
            .nodes()
            .map(|v| AliasTable::new(&unnormalized(g, None, v, &params)))
            .collect();
        Ok(Walker { g, params, first })
    }

    pub fn new_cache(&self) -> EdgeCache {
        LruCache::new(NonZeroUsize::new(self.params.alias_cache.max(1)).unwrap())
    }

    fn second_order(&self, cache: &mut EdgeCache, prev: NodeId, current: NodeId) -> Arc<AliasTable> {
        cache
            .get_or_insert((prev, current), || {
                let w = unnormalized(self.g, Some(prev), current, &self.params);
                Arc::new(AliasTable::new(&w).expect("non-empty positive weights"))
            })
            .clone()
    }

    /// Samples the node after `current`, given the node the walk came from
    /// (`None` on the first step). `None` at a dead end.
    pub fn step<R: Rng>(&self, prev: Option<NodeId>, current: NodeId, rng: &mut R, cache: &mut EdgeCache) -> Option<NodeId> {
        let nbrs = self.g.out_neighbors(current);
        match (prev, nbrs.len()) {
            (_, 0) => None,
            (None, _) => self.first[current].as_ref().map(|t| nbrs[t.sample(rng)]),
            (Some(_), 1) => Some(nbrs[0]),
            (Some(t), _) => Some(nbrs[self.second_order(cache, t, current).sample(rng)]),
        }
    }

    /// One walk from `start`. The sampled node sequence depends only on the
    /// RNG stream; cache contents affect speed, not results.
    pub fn walk<R: Rng>(&self, start: NodeId, rng: &mut R, cache: &mut EdgeCache) -> Vec<NodeId> {
        let mut walk = Vec::with_capacity(self.params.walk_length);
        walk.push(start);
        let mut prev = None;
        let mut cur = start;
        while walk.len() < self.params.walk_length {
            let Some(next) = self.step(prev, cur, rng, cache) else {
                break;
            };
            prev = Some(cur);
            cur = next;
            walk.push(cur);
        }
        walk
    }

    /// `walks_per_node` walks from every node.
    ///
    /// Node `v` draws from its own stream of the master seed, so the corpus is
    /// independent of thread count. Walks are ordered round by round, and
    /// by start node within a round.
    pub fn generate(&self) -> Vec<Vec<NodeId>> {
        let rounds = self.params.walks_per_node;
        let per_node: Vec<Vec<Vec<NodeId>>> = self
            .g
            .nodes()
            .into_par_iter()
            .map_init(
                || self.new_cache(),
                |cache, v| {
                    let mut rng = seed::stream_rng(self.params.seed, v as u64);
                    (0..rounds).map(|_| self.walk(v, &mut rng, cache)).collect()
                },
            )
            .collect();
        let mut iters: Vec<_> = per_node.into_iter().map(|w| w.into_iter()).collect();
        let mut walks = Vec::with_capacity(rounds * iters.len());
        for _ in 0..rounds {
            for it in iters.iter_mut() {
                walks.extend(it.next());
            }
        }
        walks
    }
}

pub fn generate_walks(g: &TxGraph, params: &WalkParams) -> Result<Vec<Vec<NodeId>>> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(Walker::new(g, *params)?.generate())
}
