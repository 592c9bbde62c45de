//! Community detection baselines and their comparison against cycles.

mod compare;
mod fast_greedy;
mod multilevel;

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, UndirectedMultigraph};

pub use compare::{compare, compare_scored, majority_community, AlgorithmSummary, ComparisonReport, PairRow};

/// Node → community assignment with dense community ids `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<u32>,
    community_count: usize,
}

impl Partition {
    /// Renumbers arbitrary labels densely in order of first appearance.
    pub fn from_labels<L: Eq + std::hash::Hash>(labels: impl IntoIterator<Item = L>) -> Self {
        let mut ids: HashMap<L, u32> = HashMap::new();
        let assignment: Vec<u32> = labels
            .into_iter()
            .map(|l| {
                let next = ids.len() as u32;
                *ids.entry(l).or_insert(next)
            })
            .collect();
        Partition {
            community_count: ids.len(),
            assignment,
        }
    }

    pub fn singletons(node_count: usize) -> Self {
        Self::from_labels(0..node_count)
    }

    pub fn whole(node_count: usize) -> Self {
        Self::from_labels(std::iter::repeat_n(0, node_count))
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn community_of(&self, v: NodeId) -> usize {
        self.assignment[v.index()] as usize
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    /// Members of each community, ascending.
    pub fn members(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.community_count];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c as usize].push(NodeId::new(i));
        }
        out
    }

    /// Checks totality and id density.
    pub fn is_valid(&self) -> bool {
        let mut used = vec![false; self.community_count];
        for &c in &self.assignment {
            match used.get_mut(c as usize) {
                Some(u) => *u = true,
                None => return false,
            }
        }
        used.into_iter().all(|u| u)
    }

    fn check_against(&self, g: &UndirectedMultigraph) -> Result<()> {
        if self.node_count() != g.node_count() {
            return Err(Error::Partition(format!(
                "partition covers {} nodes, graph has {}",
                self.node_count(),
                g.node_count()
            )));
        }
        Ok(())
    }
}

/// Newman modularity `Σ_c (e_c / m − (d_c / 2m)²)`, parallel edges counted
/// with multiplicity.
pub fn modularity(g: &UndirectedMultigraph, p: &Partition) -> Result<f64> {
    p.check_against(g)?;
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::EdgelessGraph);
    }
    let k = p.community_count();
    let mut internal = vec![0usize; k];
    let mut degree = vec![0usize; k];
    for v in g.nodes() {
        degree[p.community_of(v)] += g.adjacent(v).len();
    }
    for (_, u, v) in g.edges() {
        if p.community_of(u) == p.community_of(v) {
            internal[p.community_of(u)] += 1;
        }
    }
    let m = m as f64;
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(&e, &d)| e as f64 / m - (d as f64 / (2.0 * m)).powi(2))
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Multilevel,
    FastGreedy,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Multilevel => "multilevel",
            Algorithm::FastGreedy => "fast_greedy",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "multilevel" | "louvain" => Ok(Algorithm::Multilevel),
            "fast_greedy" | "fastgreedy" | "cnm" => Ok(Algorithm::FastGreedy),
            other => Err(Error::Config(format!("unknown community algorithm `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub partition: Partition,
    pub modularity: f64,
    /// Multilevel: modularity of the singleton start and after every pass.
    /// Fast greedy: modularity gain of every accepted merge.
    pub trace: Vec<f64>,
}

pub fn detect_communities(g: &UndirectedMultigraph, algorithm: Algorithm) -> Result<Detection> {
    if g.edge_count() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let (partition, trace) = match algorithm {
        Algorithm::Multilevel => multilevel::run(g)?,
        Algorithm::FastGreedy => fast_greedy::run(g),
    };
    let modularity = modularity(g, &partition)?;
    Ok(Detection {
        partition,
        modularity,
        trace,
    })
}

/// Reads an external partition, CSV `node_external_key,community_id`. Every
/// node of `g` must be listed exactly once.
pub fn read_partition_csv<R: Read>(source: R, g: &UndirectedMultigraph) -> Result<Partition> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_owned()).collect();
    if header != ["node_external_key", "community_id"] {
        return Err(Error::Format(format!(
            "expected header `node_external_key,community_id`, found `{}`",
            header.join(",")
        )));
    }
    let mut labels: Vec<Option<String>> = vec![None; g.node_count()];
    for row in reader.records() {
        let row = row?;
        let (key, community) = match (row.get(0), row.get(1)) {
            (Some(k), Some(c)) => (k.trim(), c.trim()),
            _ => return Err(Error::Format("partition row needs two fields".into())),
        };
        let v = g.node_by_key(key).ok_or_else(|| Error::UnknownKey(key.to_owned()))?;
        let slot = &mut labels[v.index()];
        if slot.is_some() {
            return Err(Error::Partition(format!("driver `{key}` is assigned twice")));
        }
        *slot = Some(community.to_owned());
    }
    if let Some(i) = labels.iter().position(Option::is_none) {
        return Err(Error::Partition(format!(
            "driver `{}` has no community",
            g.key(NodeId::new(i))
        )));
    }
    Ok(Partition::from_labels(labels.into_iter().flatten()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> UndirectedMultigraph {
        UndirectedMultigraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap()
    }

    fn two_k5_bridged() -> UndirectedMultigraph {
        let mut edges = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    edges.push((base + i, base + j));
                }
            }
        }
        edges.push((4, 5));
        UndirectedMultigraph::from_edges(10, &edges).unwrap()
    }

    /// Every set partition of `0..n` as label vectors (restricted growth strings).
    fn all_partitions(n: usize) -> Vec<Vec<usize>> {
        fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
            if i == n {
                out.push(cur.clone());
                return;
            }
            for c in 0..=max + 1 {
                cur.push(c);
                go(i + 1, n, cur, max.max(c), out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            return vec![vec![]];
        }
        let mut cur = vec![0];
        go(1, n, &mut cur, 0, &mut out);
        out
    }

    #[test]
    fn modularity_reference_values() {
        let g = two_triangles();
        assert!(modularity(&g, &Partition::whole(6)).unwrap().abs() < 1e-12);
        let split = Partition::from_labels([0, 0, 0, 1, 1, 1]);
        assert!((modularity(&g, &split).unwrap() - 0.5).abs() < 1e-12);

        // singleton partition: −Σ (d_v / 2m)²
        let expected = -(6.0 * (2.0f64 / 12.0).powi(2));
        assert!((modularity(&g, &Partition::singletons(6)).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn modularity_errors() {
        let edgeless = UndirectedMultigraph::from_edges(3, &[]).unwrap();
        assert!(matches!(modularity(&edgeless, &Partition::whole(3)), Err(Error::EdgelessGraph)));
        assert!(modularity(&two_triangles(), &Partition::whole(4)).is_err());
        assert!(matches!(
            detect_communities(&edgeless, Algorithm::Multilevel),
            Err(Error::EdgelessGraph)
        ));
    }

    #[test]
    fn both_algorithms_split_disjoint_triangles() {
        let g = two_triangles();
        for alg in [Algorithm::Multilevel, Algorithm::FastGreedy] {
            let d = detect_communities(&g, alg).unwrap();
            assert_eq!(d.partition, Partition::from_labels([0, 0, 0, 1, 1, 1]), "{alg}");
            assert!((d.modularity - 0.5).abs() < 1e-9);
            assert!(d.partition.is_valid());
        }
    }

    #[test]
    fn bridged_cliques_split_at_the_bridge() {
        let g = two_k5_bridged();
        let split = Partition::from_labels([0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        let q_split = modularity(&g, &split).unwrap();
        assert!(q_split > modularity(&g, &Partition::whole(10)).unwrap());
        for alg in [Algorithm::Multilevel, Algorithm::FastGreedy] {
            let d = detect_communities(&g, alg).unwrap();
            assert_eq!(d.partition, split, "{alg}");
        }
    }

    #[test]
    fn four_ring_reaches_the_exhaustive_optimum() {
        let g = UndirectedMultigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let best = all_partitions(4)
            .into_iter()
            .map(|l| modularity(&g, &Partition::from_labels(l)).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        // the whole ring and the split into two adjacent pairs tie at Q = 0
        assert!(best.abs() < 1e-12);
        assert!(modularity(&g, &Partition::whole(4)).unwrap().abs() < 1e-12);
        for alg in [Algorithm::Multilevel, Algorithm::FastGreedy] {
            let d = detect_communities(&g, alg).unwrap();
            assert!((d.modularity - best).abs() < 1e-12, "{alg}");
        }
    }

    #[test]
    fn exhaustive_optimum_on_small_graphs() {
        // two squares sharing a node: 7 nodes, Bell(7) = 877 partitions
        let g = UndirectedMultigraph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 6), (6, 3)]).unwrap();
        let parts = all_partitions(7);
        assert_eq!(parts.len(), 877);
        let best = parts
            .into_iter()
            .map(|l| modularity(&g, &Partition::from_labels(l)).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        for alg in [Algorithm::Multilevel, Algorithm::FastGreedy] {
            let d = detect_communities(&g, alg).unwrap();
            assert!(d.modularity <= best + 1e-12);
            assert!(d.modularity > 0.0);
        }
    }

    #[test]
    fn partition_file() {
        let g = two_triangles();
        let csv = "node_external_key,community_id\n0,a\n1,a\n2,a\n3,b\n4,b\n5,b\n";
        let p = read_partition_csv(csv.as_bytes(), &g).unwrap();
        assert_eq!(p.community_count(), 2);
        assert!(p.is_valid());

        let missing = "node_external_key,community_id\n0,a\n";
        assert!(matches!(read_partition_csv(missing.as_bytes(), &g), Err(Error::Partition(_))));
        let unknown = "node_external_key,community_id\nzz,a\n";
        assert!(matches!(read_partition_csv(unknown.as_bytes(), &g), Err(Error::UnknownKey(_))));
        let twice = "node_external_key,community_id\n0,a\n0,b\n";
        assert!(read_partition_csv(twice.as_bytes(), &g).is_err());
        assert!(read_partition_csv("key,c\n".as_bytes(), &g).is_err());
    }

    #[test]
    fn partition_helpers() {
        let p = Partition::from_labels(["x", "y", "x"]);
        assert_eq!(p.assignment(), &[0, 1, 0]);
        assert_eq!(p.members(), vec![vec![NodeId::new(0), NodeId::new(2)], vec![NodeId::new(1)]]);
        assert_eq!(Partition::singletons(3).community_count(), 3);
        assert_eq!(Partition::whole(0).community_count(), 0);
    }
}
