//! Length-bounded enumeration of simple directed cycles and paths inside
//! communities.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::{CommunityId, CommunityPartition};
use crate::error::{Error, Result};
use crate::graph::{NodeId, TxGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthBounds {
    pub min: usize,
    pub max: usize,
}

impl LengthBounds {
    pub const CYCLES: LengthBounds = LengthBounds { min: 3, max: 6 };
    pub const PATHS: LengthBounds = LengthBounds { min: 4, max: 7 };

    fn check(&self, floor: usize) -> Result<()> {
        if self.min < floor || self.min > self.max {
            return Err(Error::InvalidParam(format!(
                "length bounds [{}, {}] invalid (minimum {floor})",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// A simple directed cycle, rotated so that its smallest node comes first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cycle {
    pub community: CommunityId,
    pub nodes: Vec<NodeId>,
}

impl Cycle {
    /// Rotates `nodes` into canonical form.
    pub fn new(nodes: Vec<NodeId>, community: CommunityId) -> Cycle {
        Cycle {
            nodes: canonical_rotation(nodes),
            community,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Checks edge existence, simplicity, canonical form and community
    /// containment against `g`.
    pub fn validate(&self, g: &TxGraph, p: &CommunityPartition) -> Result<()> {
        let n = self.nodes.len();
        let bad = |msg: String| Err(Error::InvalidParam(format!("cycle {:?}: {msg}", self.nodes)));
        if n < 2 {
            return bad("fewer than two nodes".into());
        }
        if let Some(&v) = self.nodes.iter().find(|&&v| v >= g.node_count()) {
            return Err(Error::UnknownNode(v));
        }
        let distinct: BTreeSet<_> = self.nodes.iter().collect();
        if distinct.len() != n {
            return bad("repeated node".into());
        }
        if Some(&&self.nodes[0]) != distinct.iter().next() {
            return bad("not canonically rotated".into());
        }
        for i in 0..n {
            let (u, v) = (self.nodes[i], self.nodes[(i + 1) % n]);
            if !g.has_edge(u, v) {
                return bad(format!("missing edge {u} -> {v}"));
            }
            if p.community_of(u) != self.community {
                return bad(format!("node {u} outside community {}", self.community));
            }
        }
        Ok(())
    }
}

pub fn canonical_rotation(mut nodes: Vec<NodeId>) -> Vec<NodeId> {
    if let Some(i) = nodes.iter().enumerate().min_by_key(|e| e.1).map(|e| e.0) {
        nodes.rotate_left(i);
    }
    nodes
}

/// Every simple directed cycle with `bounds.min <= length <= bounds.max`
/// lying inside a single community.
///
/// Each cycle is found once, from its smallest node, by a depth-first search
/// that only visits larger nodes of the same community. Output is sorted by
/// `(community, nodes)`.
pub fn detect_cycles(g: &TxGraph, p: &CommunityPartition, bounds: LengthBounds) -> Result<Vec<Cycle>> {
    bounds.check(2)?;
    let mut cycles: Vec<Cycle> = p
        .communities()
        .par_iter()
        .enumerate()
        .flat_map_iter(|(c, members)| {
            let mut found = Vec::new();
            let mut path = Vec::with_capacity(bounds.max);
            for &s in members {
                path.clear();
                path.push(s);
                cycle_dfs(g, p, c, bounds, &mut path, &mut found);
            }
            found
        })
        .collect();
    cycles.sort_unstable();
    Ok(cycles)
}

fn cycle_dfs(
    g: &TxGraph,
    p: &CommunityPartition,
    c: CommunityId,
    bounds: LengthBounds,
    path: &mut Vec<NodeId>,
    out: &mut Vec<Cycle>,
) {
    let start = path[0];
    let here = *path.last().unwrap();
    for &w in g.out_neighbors(here) {
        if w == start {
            if path.len() >= bounds.min {
                out.push(Cycle {
                    community: c,
                    nodes: path.clone(),
                });
            }
        } else if w > start && path.len() < bounds.max && p.community_of(w) == c && !path.contains(&w) {
            path.push(w);
            cycle_dfs(g, p, c, bounds, path, out);
            path.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirectedPath {
    pub community: CommunityId,
    pub nodes: Vec<NodeId>,
}

impl DirectedPath {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PathReport {
    pub paths: Vec<DirectedPath>,
    /// Set when enumeration stopped at the path limit.
    pub truncated: bool,
    /// Communities that contain at least one cycle.
    pub communities: Vec<CommunityId>,
    /// Distinct nodes on at least one returned path.
    pub path_nodes: Vec<NodeId>,
    /// Nodes that lie on both a returned path and one of the given cycles.
    pub shared_nodes: Vec<NodeId>,
}

pub const DEFAULT_PATH_LIMIT: usize = 10_000_000;

/// Every simple directed path with edge count in `bounds`, restricted to
/// communities that contain at least one of `cycles`.
///
/// At most `limit` paths are returned; `truncated` reports whether more
/// exist. Paths are sorted by `(community, nodes)`.
pub fn detect_paths(
    g: &TxGraph,
    p: &CommunityPartition,
    cycles: &[Cycle],
    bounds: LengthBounds,
    limit: usize,
) -> Result<PathReport> {
    bounds.check(1)?;
    let communities: Vec<CommunityId> = cycles
        .iter()
        .map(|c| c.community)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let per_community: Vec<(Vec<DirectedPath>, bool)> = communities
        .par_iter()
        .map(|&c| {
            let mut found = Vec::new();
            let mut path = Vec::with_capacity(bounds.max + 1);
            let mut complete = true;
            for &s in p.members(c) {
                path.clear();
                path.push(s);
                if !path_dfs(g, p, c, bounds, limit, &mut path, &mut found) {
                    complete = false;
                    break;
                }
            }
            (found, !complete)
        })
        .collect();

    let mut truncated = per_community.iter().any(|r| r.1);
    let mut paths: Vec<DirectedPath> = per_community.into_iter().flat_map(|r| r.0).collect();
    paths.sort_unstable();
    if paths.len() > limit {
        paths.truncate(limit);
        truncated = true;
    }

    let path_nodes: BTreeSet<NodeId> = paths.iter().flat_map(|q| q.nodes.iter().copied()).collect();
    let cycle_nodes: BTreeSet<NodeId> = cycles.iter().flat_map(|c| c.nodes.iter().copied()).collect();
    let shared_nodes = path_nodes.intersection(&cycle_nodes).copied().collect();
    Ok(PathReport {
        paths,
        truncated,
        communities,
        path_nodes: path_nodes.into_iter().collect(),
        shared_nodes,
    })
}

// Returns false once `limit` paths have been collected and more remain.
fn path_dfs(
    g: &TxGraph,
    p: &CommunityPartition,
    c: CommunityId,
    bounds: LengthBounds,
    limit: usize,
    path: &mut Vec<NodeId>,
    out: &mut Vec<DirectedPath>,
) -> bool {
    let edges = path.len() - 1;
    if edges >= bounds.min {
        if out.len() == limit {
            return false;
        }
        out.push(DirectedPath {
            community: c,
            nodes: path.clone(),
        });
    }
    if edges == bounds.max {
        return true;
    }
    let here = *path.last().unwrap();
    for &w in g.out_neighbors(here) {
        if p.community_of(w) == c && !path.contains(&w) {
            path.push(w);
            let ok = path_dfs(g, p, c, bounds, limit, path, out);
            path.pop();
            if !ok {
                return false;
            }
        }
    }
    true
}
