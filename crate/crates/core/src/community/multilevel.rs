//! Multilevel modularity optimization: repeated local moving of nodes between
//! neighboring communities followed by aggregation of each community into a
//! single node, until a pass moves nothing. Nodes are swept in ascending id
//! order and ties keep the current community (or the smallest candidate id),
//! so results are reproducible.

use crate::error::Result;
use crate::graph::UndirectedMultigraph;

use super::{modularity, Partition};

const MIN_GAIN: f64 = 1e-10;
const MAX_SWEEPS: usize = 10_000;

/// Weighted graph of one aggregation level.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
}

impl Level {
    fn from_graph(g: &UndirectedMultigraph) -> Self {
        let adj = g
            .nodes()
            .map(|u| {
                let mut out: Vec<(usize, f64)> = Vec::new();
                for &(v, _) in g.adjacent(u) {
                    match out.last_mut() {
                        Some((w, c)) if *w == v.index() => *c += 1.0,
                        _ => out.push((v.index(), 1.0)),
                    }
                }
                out
            })
            .collect();
        let degree = g.nodes().map(|u| g.adjacent(u).len() as f64).collect();
        Level { adj, degree }
    }

    fn len(&self) -> usize {
        self.degree.len()
    }

    /// Moves nodes greedily until a sweep changes nothing. Returns the
    /// community of every node and whether anything moved.
    fn local_moves(&self, two_m: f64) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut total = self.degree.clone();
        let mut weight_to = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_move = false;

        for _ in 0..MAX_SWEEPS {
            let mut moved = false;
            for i in 0..n {
                let current = comm[i];
                let ki = self.degree[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if weight_to[c] == 0.0 {
                        touched.push(c);
                    }
                    weight_to[c] += w;
                }
                total[current] -= ki;
                let gain = |c: usize, weight_to: &[f64], total: &[f64]| weight_to[c] - total[c] * ki / two_m;
                let mut best = current;
                let mut best_gain = gain(current, &weight_to, &total);
                touched.sort_unstable();
                for &c in &touched {
                    let g = gain(c, &weight_to, &total);
                    if g > best_gain + MIN_GAIN {
                        best = c;
                        best_gain = g;
                    }
                }
                total[best] += ki;
                if best != current {
                    comm[i] = best;
                    moved = true;
                }
                for &c in &touched {
                    weight_to[c] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
            any_move = true;
        }
        (comm, any_move)
    }

    /// Collapses each community into one node. `labels` must be dense.
    fn aggregate(&self, labels: &[usize], count: usize) -> Level {
        let mut buckets: Vec<Vec<(usize, f64)>> = vec![Vec::new(); count];
        let mut degree = vec![0.0; count];
        for i in 0..self.len() {
            let ci = labels[i];
            degree[ci] += self.degree[i];
            for &(j, w) in &self.adj[i] {
                let cj = labels[j];
                if ci != cj {
                    buckets[ci].push((cj, w));
                }
            }
        }
        let adj = buckets
            .into_iter()
            .map(|mut b| {
                b.sort_unstable_by_key(|&(c, _)| c);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(b.len());
                for (c, w) in b {
                    match merged.last_mut() {
                        Some((last, acc)) if *last == c => *acc += w,
                        _ => merged.push((c, w)),
                    }
                }
                merged
            })
            .collect();
        Level { adj, degree }
    }
}

/// Dense relabeling in order of first appearance.
fn densify(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; labels.len()];
    let mut next = 0;
    let dense = labels
        .iter()
        .map(|&l| {
            if map[l] == usize::MAX {
                map[l] = next;
                next += 1;
            }
            map[l]
        })
        .collect();
    (dense, next)
}

pub(super) fn run(g: &UndirectedMultigraph) -> Result<(Partition, Vec<f64>)> {
    let two_m = 2.0 * g.edge_count() as f64;
    let mut level = Level::from_graph(g);
    // community of each original node, in terms of the current level's nodes
    let mut node_to_level: Vec<usize> = (0..g.node_count()).collect();
    let mut trace = vec![modularity(g, &Partition::singletons(g.node_count()))?];

    loop {
        let (comm, moved) = level.local_moves(two_m);
        if !moved {
            break;
        }
        let (dense, count) = densify(&comm);
        for slot in node_to_level.iter_mut() {
            *slot = dense[*slot];
        }
        trace.push(modularity(g, &Partition::from_labels(node_to_level.iter().copied()))?);
        if count == level.len() {
            break;
        }
        level = level.aggregate(&dense, count);
    }
    Ok((Partition::from_labels(node_to_level), trace))
}
