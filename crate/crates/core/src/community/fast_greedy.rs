//! Greedy agglomerative modularity clustering. Every node starts alone; the
//! adjacent pair with the largest gain `a_ij / m − k_i k_j / (2m²)` merges
//! while that gain is strictly positive. Gains are compared through exact
//! integer numerators; equal gains go to the smallest `(i, j)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use crate::graph::UndirectedMultigraph;

use super::Partition;

struct Community {
    links: FxHashMap<usize, u64>,
    degree: u64,
}

#[derive(PartialEq, Eq)]
struct Candidate {
    /// `2m · a_ij − k_i k_j`, the gain times `2m²`.
    numerator: i128,
    i: usize,
    j: usize,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.numerator
            .cmp(&other.numerator)
            .then_with(|| (other.i, other.j).cmp(&(self.i, self.j)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn numerator(two_m: u64, links: u64, ki: u64, kj: u64) -> i128 {
    i128::from(two_m) * i128::from(links) - i128::from(ki) * i128::from(kj)
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

pub(super) fn run(g: &UndirectedMultigraph) -> (Partition, Vec<f64>) {
    let n = g.node_count();
    let m = g.edge_count() as u64;
    let two_m = 2 * m;
    let scale = 2.0 * (m as f64) * (m as f64);

    let mut comms: Vec<Option<Community>> = g
        .nodes()
        .map(|u| {
            let mut links = FxHashMap::default();
            for &(v, _) in g.adjacent(u) {
                *links.entry(v.index()).or_insert(0) += 1;
            }
            Some(Community {
                links,
                degree: g.adjacent(u).len() as u64,
            })
        })
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut heap = BinaryHeap::new();
    for (i, c) in comms.iter().enumerate() {
        let c = c.as_ref().expect("fresh community");
        for (&j, &a) in &c.links {
            if i < j {
                let kj = g.adjacent(crate::graph::NodeId::new(j)).len() as u64;
                heap.push(Candidate {
                    numerator: numerator(two_m, a, c.degree, kj),
                    i,
                    j,
                });
            }
        }
    }

    let mut gains = Vec::new();
    while let Some(Candidate { numerator: num, i, j }) = heap.pop() {
        let (Some(ci), Some(cj)) = (&comms[i], &comms[j]) else {
            continue;
        };
        let Some(&a) = ci.links.get(&j) else {
            continue;
        };
        if numerator(two_m, a, ci.degree, cj.degree) != num {
            continue;
        }
        if num <= 0 {
            break;
        }
        gains.push(num as f64 / scale);

        // the community with more links survives
        let (keep, gone) = if ci.links.len() >= cj.links.len() { (i, j) } else { (j, i) };
        let absorbed = comms[gone].take().expect("live community");
        parent[gone] = keep;
        for (&k, &w) in &absorbed.links {
            if k == keep {
                continue;
            }
            let other = comms[k].as_mut().expect("neighbor is live");
            other.links.remove(&gone);
            *other.links.entry(keep).or_insert(0) += w;
        }
        let survivor = comms[keep].as_mut().expect("live community");
        survivor.links.remove(&gone);
        for (k, w) in absorbed.links {
            if k != keep {
                *survivor.links.entry(k).or_insert(0) += w;
            }
        }
        survivor.degree += absorbed.degree;

        let kd = survivor.degree;
        let mut fresh: Vec<(usize, u64)> = survivor.links.iter().map(|(&k, &w)| (k, w)).collect();
        fresh.sort_unstable();
        for (k, w) in fresh {
            let kk = comms[k].as_ref().expect("neighbor is live").degree;
            heap.push(Candidate {
                numerator: numerator(two_m, w, kd, kk),
                i: keep.min(k),
                j: keep.max(k),
            });
        }
    }

    let labels: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
    (Partition::from_labels(labels), gains)
}
