#![allow(dead_code)]

use antiflow::graph::{EdgeAttr, TxGraph};
use proptest::prelude::*;

pub type EdgeList = Vec<(usize, usize, f64)>;

pub fn graph(n: usize, edges: &[(usize, usize, f64)]) -> TxGraph {
    let parts = edges
        .iter()
        .map(|&(u, v, weight)| (u, v, EdgeAttr { weight, tx_count: 1 }))
        .collect();
    TxGraph::from_parts((0..n).map(|i| format!("n{i}")).collect(), parts).unwrap()
}

/// Random simple digraph without self-loops: node count and weighted edges.
pub fn arb_digraph(max_n: usize, density: f64) -> impl Strategy<Value = (usize, EdgeList)> {
    (2..=max_n).prop_flat_map(move |n| {
        let cells = prop::collection::vec((prop::bool::weighted(density), 0.1f64..10.0), n * n);
        (Just(n), cells).prop_map(|(n, cells)| {
            let edges = cells
                .into_iter()
                .enumerate()
                .filter(|&(i, (on, _))| on && i / n != i % n)
                .map(|(i, (_, w))| (i / n, i % n, w))
                .collect();
            (n, edges)
        })
    })
}

/// A random digraph together with a relabelling of its nodes.
pub fn arb_permuted(max_n: usize, density: f64) -> impl Strategy<Value = (usize, EdgeList, Vec<usize>)> {
    arb_digraph(max_n, density).prop_flat_map(|(n, edges)| {
        let perm = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
        (Just(n), Just(edges), perm)
    })
}

pub fn relabel(edges: &[(usize, usize, f64)], perm: &[usize]) -> EdgeList {
    edges.iter().map(|&(u, v, w)| (perm[u], perm[v], w)).collect()
}

/// Two dense cliques joined by a single edge in each direction.
pub fn two_cliques(n: usize) -> TxGraph {
    let mut edges = vec![];
    for c in 0..2 {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    edges.push((c * n + i, c * n + j, 1.0));
                }
            }
        }
    }
    edges.push((0, n, 1.0));
    edges.push((n, 0, 1.0));
    graph(2 * n, &edges)
}
