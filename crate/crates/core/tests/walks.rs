mod common;

use std::collections::HashMap;

use antiflow::walk::{generate_walks, transition_probs};
use antiflow::WalkParams;
use common::{arb_digraph, graph};
use proptest::prelude::*;

fn params(p: f64, q: f64, seed: u64) -> WalkParams {
    WalkParams {
        p,
        q,
        seed,
        walk_length: 20,
        walks_per_node: 3,
        ..WalkParams::default()
    }
}

proptest! {
    #[test]
    fn kernel_is_a_distribution((n, edges) in arb_digraph(8, 0.4), p in 0.1f64..4.0, q in 0.1f64..4.0) {
        let g = graph(n, &edges);
        let wp = params(p, q, 0);
        for v in g.nodes() {
            let prevs = std::iter::once(None).chain(g.in_neighbors(v).iter().map(|&t| Some(t)));
            for prev in prevs {
                let probs = transition_probs(&g, prev, v, &wp);
                let support: Vec<usize> = probs.iter().map(|e| e.0).collect();
                prop_assert_eq!(support.as_slice(), g.out_neighbors(v));
                prop_assert!(probs.iter().all(|e| e.1 > 0.0));
                if !probs.is_empty() {
                    prop_assert!((probs.iter().map(|e| e.1).sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn walks_follow_edges((n, edges) in arb_digraph(8, 0.35), seed in 0u64..1000) {
        let g = graph(n, &edges);
        let wp = params(0.5, 2.0, seed);
        let walks = generate_walks(&g, &wp).unwrap();
        prop_assert_eq!(walks.len(), n * wp.walks_per_node);
        for (i, w) in walks.iter().enumerate() {
            prop_assert_eq!(w[0], i % n);
            prop_assert!(w.len() <= wp.walk_length);
            prop_assert!(w.windows(2).all(|s| g.has_edge(s[0], s[1])));
            if w.len() < wp.walk_length {
                prop_assert_eq!(g.out_degree(*w.last().unwrap()), 0);
            }
        }
        prop_assert_eq!(walks, generate_walks(&g, &wp).unwrap());
    }
}

#[test]
fn empirical_transitions_match_kernel() {
    let edges = [
        (0, 1, 1.0),
        (1, 2, 2.0),
        (1, 3, 1.0),
        (1, 0, 0.5),
        (2, 0, 1.0),
        (2, 3, 1.0),
        (2, 1, 3.0),
        (3, 1, 1.0),
        (3, 2, 2.0),
        (3, 0, 1.0),
    ];
    let g = graph(4, &edges);
    for (p, q) in [(1.0, 1.0), (4.0, 0.25), (0.25, 4.0)] {
        let wp = WalkParams {
            p,
            q,
            walk_length: 200,
            walks_per_node: 200,
            seed: 11,
            ..WalkParams::default()
        };
        let mut counts: HashMap<(usize, usize), HashMap<usize, usize>> = HashMap::new();
        for w in generate_walks(&g, &wp).unwrap() {
            for s in w.windows(3) {
                *counts.entry((s[0], s[1])).or_default().entry(s[2]).or_default() += 1;
            }
        }
        for ((t, v), next) in counts {
            let total: usize = next.values().sum();
            for (x, pr) in transition_probs(&g, Some(t), v, &wp) {
                let freq = next.get(&x).copied().unwrap_or(0) as f64 / total as f64;
                assert!((freq - pr).abs() < 0.02, "({t},{v})->{x}: {freq} vs {pr} at p={p} q={q}");
            }
        }
    }
}

#[test]
fn distinct_seeds_give_distinct_walks() {
    let g = common::two_cliques(6);
    let a = generate_walks(&g, &params(1.0, 1.0, 1)).unwrap();
    let b = generate_walks(&g, &params(1.0, 1.0, 2)).unwrap();
    assert_ne!(a, b);
}
