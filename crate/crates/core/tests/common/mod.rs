//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringscan::{CanonicalKey, NodeId, UndirectedMultigraph};

pub type EdgeList = Vec<(usize, usize)>;

/// Loop-free multigraphs with up to `max_n` nodes and `max_m` edges.
pub fn arb_graph(max_n: usize, max_m: usize) -> impl Strategy<Value = (usize, EdgeList)> {
    (1..=max_n).prop_flat_map(move |n| {
        let edges = prop::collection::vec((0..n, 0..n), 0..=max_m)
            .prop_map(|es| es.into_iter().filter(|(u, v)| u != v).collect::<EdgeList>());
        (Just(n), edges)
    })
}

pub fn seeded_graph(seed: u64, max_n: usize, max_m: usize) -> (usize, EdgeList) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(0..=max_m);
    let mut edges = Vec::with_capacity(m);
    if n > 1 {
        while edges.len() < m {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v {
                edges.push((u, v));
            }
        }
    }
    (n, edges)
}

pub fn build(n: usize, edges: &[(usize, usize)]) -> UndirectedMultigraph {
    UndirectedMultigraph::from_edges(n, edges).expect("valid edge list")
}

pub fn ids(xs: &[usize]) -> Vec<NodeId> {
    xs.iter().map(|&x| NodeId::new(x)).collect()
}

/// Hop distances from `src` by plain queue search over the edge list.
pub fn distances(n: usize, edges: &[(usize, usize)], src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; n];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &(a, b) in edges {
            let w = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if dist[w].is_none() {
                dist[w] = Some(dist[u].unwrap() + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Lexicographically smallest rotation or reflection, by trying all of them.
pub fn min_rotation<T: Ord + Clone>(walk: &[T]) -> Vec<T> {
    let n = walk.len();
    let mut best: Option<Vec<T>> = None;
    for reflect in [false, true] {
        let base: Vec<T> = if reflect { walk.iter().rev().cloned().collect() } else { walk.to_vec() };
        for r in 0..n.max(1) {
            let cand: Vec<T> = (0..n).map(|i| base[(i + r) % n].clone()).collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

/// Simple cycles as vertex sets in canonical order, found by testing every
/// edge subset for being one connected 2-regular piece. Parallel edge pairs
/// give 2-vertex cycles. Only for small edge counts.
pub fn subset_cycles(n: usize, edges: &[(usize, usize)]) -> BTreeSet<Vec<usize>> {
    assert!(edges.len() <= 20, "subset oracle is exponential");
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << edges.len()) {
        let chosen: Vec<(usize, usize)> = (0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
        let mut deg = vec![0usize; n];
        for &(u, v) in &chosen {
            deg[u] += 1;
            deg[v] += 1;
        }
        if deg.iter().any(|&d| d != 0 && d != 2) {
            continue;
        }
        // walk the piece from its first vertex
        let start = chosen[0].0;
        let mut walk = vec![start];
        let mut used = vec![false; chosen.len()];
        let mut cur = start;
        while let Some(i) = (0..chosen.len()).find(|&i| !used[i] && (chosen[i].0 == cur || chosen[i].1 == cur)) {
            used[i] = true;
            cur = if chosen[i].0 == cur { chosen[i].1 } else { chosen[i].0 };
            if cur == start {
                break;
            }
            walk.push(cur);
        }
        if used.iter().all(|&u| u) && cur == start {
            out.insert(min_rotation(&walk));
        }
    }
    out
}

pub fn key_vec(k: &CanonicalKey) -> Vec<usize> {
    k.as_slice().iter().map(|v| v.index()).collect()
}
