//! Undirected multigraph of drivers.
//!
//! Nodes are dense `0..n` handles backed by a registry of external driver
//! keys. Edges are identified by dense ids as well, and parallel edges are
//! kept: two drivers meeting in several collisions are linked once per
//! collision. Adjacency lists are sorted by `(neighbor, edge)` when the graph
//! is built, so every traversal over the graph is reproducible.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node handle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32 range"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Dense edge handle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(u32);

impl EdgeId {
    pub fn new(index: usize) -> Self {
        EdgeId(u32::try_from(index).expect("edge index exceeds u32 range"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Incrementally assembles an [`UndirectedMultigraph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    keys: Vec<String>,
    key_index: HashMap<String, NodeId>,
    endpoints: Vec<(NodeId, NodeId)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id registered for `key`, registering it if it is new.
    pub fn add_node(&mut self, key: &str) -> NodeId {
        if let Some(&id) = self.key_index.get(key) {
            return id;
        }
        let id = NodeId::new(self.keys.len());
        self.keys.push(key.to_owned());
        self.key_index.insert(key.to_owned(), id);
        id
    }

    pub fn node_count(&self) -> usize {
        self.keys.len()
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<EdgeId> {
        for w in [u, v] {
            if w.index() >= self.keys.len() {
                return Err(Error::InvalidNode {
                    node: w.index(),
                    node_count: self.keys.len(),
                });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(self.keys[u.index()].clone()));
        }
        let id = EdgeId::new(self.endpoints.len());
        self.endpoints.push((u, v));
        Ok(id)
    }

    pub fn build(self) -> UndirectedMultigraph {
        let mut adjacency = vec![Vec::new(); self.keys.len()];
        for (i, &(u, v)) in self.endpoints.iter().enumerate() {
            let e = EdgeId::new(i);
            adjacency[u.index()].push((v, e));
            adjacency[v.index()].push((u, e));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        UndirectedMultigraph {
            keys: self.keys,
            key_index: self.key_index,
            endpoints: self.endpoints,
            adjacency,
        }
    }
}

/// Immutable undirected multigraph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedMultigraph {
    keys: Vec<String>,
    key_index: HashMap<String, NodeId>,
    endpoints: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
}

impl UndirectedMultigraph {
    pub fn empty() -> Self {
        GraphBuilder::new().build()
    }

    /// Builds a graph on `node_count` nodes keyed by their decimal index.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut builder = GraphBuilder::new();
        for i in 0..node_count {
            builder.add_node(&i.to_string());
        }
        for &(u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidNode {
                    node: u.max(v),
                    node_count,
                });
            }
            builder.add_edge(NodeId::new(u), NodeId::new(v))?;
        }
        Ok(builder.build())
    }

    pub fn node_count(&self) -> usize {
        self.keys.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.keys.len()).map(NodeId::new)
    }

    /// All edges as `(id, u, v)` in id order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (EdgeId, NodeId, NodeId)> + '_ {
        self.endpoints
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (EdgeId::new(i), u, v))
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if v.index() < self.keys.len() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                node: v.index(),
                node_count: self.keys.len(),
            })
        }
    }

    /// Number of edge endpoints at `v`, parallel edges counted with multiplicity.
    pub fn degree(&self, v: NodeId) -> Result<usize> {
        self.check_node(v)?;
        Ok(self.adjacency[v.index()].len())
    }

    /// Sorted `(neighbor, edge)` pairs of `v`. Panics on an out-of-range id.
    #[inline]
    pub fn adjacent(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[v.index()]
    }

    pub fn endpoints(&self, e: EdgeId) -> Option<(NodeId, NodeId)> {
        self.endpoints.get(e.index()).copied()
    }

    pub fn key(&self, v: NodeId) -> &str {
        &self.keys[v.index()]
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn node_by_key(&self, key: &str) -> Option<NodeId> {
        self.key_index.get(key).copied()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.adjacency.iter().map(Vec::len).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.adjacency.iter().map(Vec::len).max()
    }

    /// Maximal connected node sets, each sorted ascending, ordered by their
    /// smallest member.
    pub fn connected_components(&self) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(NodeId::new(start));
            let mut members = Vec::new();
            while let Some(u) = queue.pop_front() {
                members.push(u);
                for &(v, _) in self.adjacent(u) {
                    if !seen[v.index()] {
                        seen[v.index()] = true;
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    /// Subgraph induced by `nodes`: every edge with both endpoints inside.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Result<InducedSubgraph> {
        for &v in nodes {
            self.check_node(v)?;
        }
        let mut members = nodes.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut edges = Vec::new();
        for &u in &members {
            for &(v, e) in self.adjacent(u) {
                if u < v && members.binary_search(&v).is_ok() {
                    edges.push(e);
                }
            }
        }
        edges.sort_unstable();
        Ok(InducedSubgraph {
            nodes: members,
            edges,
        })
    }
}

/// Node set together with every parent-graph edge internal to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
}

impl InducedSubgraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(i: usize) -> NodeId {
        NodeId::new(i)
    }

    #[test]
    fn degree_cases() {
        let g = UndirectedMultigraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 2)]).unwrap();
        let isolated = g.degree(n(4)).unwrap();
        assert_eq!(isolated, 0);
        assert_eq!(g.degree(n(0)).unwrap(), 3);
        // node 2: one edge to 0, two parallel edges to 1
        assert_eq!(g.degree(n(2)).unwrap(), 3);

        let pair = UndirectedMultigraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(pair.degree(n(0)).unwrap(), 2);
    }

    #[test]
    fn degree_rejects_unknown_node() {
        let g = UndirectedMultigraph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(matches!(g.degree(n(7)), Err(Error::InvalidNode { node: 7, .. })));
    }

    #[test]
    fn self_loops_are_rejected() {
        let mut b = GraphBuilder::new();
        let a = b.add_node("a");
        assert!(matches!(b.add_edge(a, a), Err(Error::SelfLoop(k)) if k == "a"));
    }

    #[test]
    fn registry_is_a_bijection() {
        let mut b = GraphBuilder::new();
        let x = b.add_node("x");
        let y = b.add_node("y");
        assert_eq!(b.add_node("x"), x);
        let g = b.build();
        assert_eq!(g.node_by_key("y"), Some(y));
        assert_eq!(g.key(x), "x");
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn adjacency_mirrors_edges() {
        let g = UndirectedMultigraph::from_edges(4, &[(2, 0), (0, 1), (1, 2), (1, 2), (3, 0)]).unwrap();
        for (e, u, v) in g.edges() {
            assert!(g.adjacent(u).contains(&(v, e)));
            assert!(g.adjacent(v).contains(&(u, e)));
        }
        let total: usize = g.nodes().map(|v| g.adjacent(v).len()).sum();
        assert_eq!(total, 2 * g.edge_count());
        assert!(g.adjacent(n(0)).windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn components() {
        assert!(UndirectedMultigraph::empty().connected_components().is_empty());

        let g = UndirectedMultigraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let comps = g.connected_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].len(), 4);
        assert_eq!(comps[1], vec![n(4)]);
    }

    #[test]
    fn induced_subgraph_cases() {
        let g = UndirectedMultigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let empty = g.induced_subgraph(&[]).unwrap();
        assert_eq!(empty.node_count(), 0);
        assert_eq!(empty.edge_count(), 0);

        let all: Vec<_> = g.nodes().collect();
        assert_eq!(g.induced_subgraph(&all).unwrap().edge_count(), 5);

        let tri = g.induced_subgraph(&[n(2), n(0), n(1)]).unwrap();
        assert_eq!(tri.nodes, vec![n(0), n(1), n(2)]);
        assert_eq!(tri.edge_count(), 3);

        assert!(g.induced_subgraph(&[n(9)]).is_err());
    }

    #[test]
    fn induced_nineteen_ring_with_four_chords() {
        // 19-node ring plus four chords: 23 internal edges.
        let mut edges: Vec<(usize, usize)> = (0..19).map(|i| (i, (i + 1) % 19)).collect();
        edges.extend([(0, 5), (3, 11), (7, 15), (9, 17)]);
        let g = UndirectedMultigraph::from_edges(19, &edges).unwrap();
        let all: Vec<_> = g.nodes().collect();
        let sub = g.induced_subgraph(&all).unwrap();
        assert_eq!(sub.edge_count(), 23);
        assert_eq!(sub.edge_count() - sub.node_count(), 4);
    }
}
