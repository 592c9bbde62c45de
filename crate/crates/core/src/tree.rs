//! BFS and DFS spanning trees.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, NodeId, UndirectedMultigraph};

const UNCOVERED: u32 = u32::MAX;

/// How a spanning tree is grown from its root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TreeStrategy {
    #[serde(rename = "bfs")]
    BreadthFirst,
    #[serde(rename = "dfs")]
    DepthFirst,
}

impl TreeStrategy {
    pub fn other(self) -> Self {
        match self {
            TreeStrategy::BreadthFirst => TreeStrategy::DepthFirst,
            TreeStrategy::DepthFirst => TreeStrategy::BreadthFirst,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TreeStrategy::BreadthFirst => "bfs",
            TreeStrategy::DepthFirst => "dfs",
        }
    }
}

impl fmt::Display for TreeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TreeStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bfs" | "breadth_first" | "breadth-first" => Ok(TreeStrategy::BreadthFirst),
            "dfs" | "depth_first" | "depth-first" => Ok(TreeStrategy::DepthFirst),
            other => Err(Error::Config(format!("unknown tree strategy `{other}`"))),
        }
    }
}

/// Spanning tree of the root's connected component.
///
/// Per-node arrays are sized to the whole graph; nodes outside the root's
/// component are simply not covered. A tree can be regrown from another root
/// with [`SpanningTree::regrow`], which only touches the previously covered
/// nodes, so enumerating every root of a component does not pay for the rest
/// of the graph.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    root: NodeId,
    strategy: TreeStrategy,
    parent: Vec<Option<(NodeId, EdgeId)>>,
    depth: Vec<u32>,
    order: Vec<NodeId>,
    stack: Vec<(NodeId, usize)>,
}

impl SpanningTree {
    pub(crate) fn with_capacity(node_count: usize, strategy: TreeStrategy) -> Self {
        SpanningTree {
            root: NodeId::new(0),
            strategy,
            parent: vec![None; node_count],
            depth: vec![UNCOVERED; node_count],
            order: Vec::new(),
            stack: Vec::new(),
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn strategy(&self) -> TreeStrategy {
        self.strategy
    }

    /// Covered nodes in discovery order, root first.
    pub fn nodes(&self) -> &[NodeId] {
        &self.order
    }

    pub(crate) fn node_capacity(&self) -> usize {
        self.parent.len()
    }

    pub fn covers(&self, v: NodeId) -> bool {
        self.depth.get(v.index()).is_some_and(|&d| d != UNCOVERED)
    }

    pub fn parent(&self, v: NodeId) -> Option<(NodeId, EdgeId)> {
        self.parent.get(v.index()).copied().flatten()
    }

    pub fn depth(&self, v: NodeId) -> Option<usize> {
        match self.depth.get(v.index()) {
            Some(&d) if d != UNCOVERED => Some(d as usize),
            _ => None,
        }
    }

    pub fn tree_edge_count(&self) -> usize {
        self.order.len().saturating_sub(1)
    }

    pub fn tree_edges(&self) -> impl Iterator<Item = (NodeId, NodeId, EdgeId)> + '_ {
        self.order
            .iter()
            .filter_map(|&v| self.parent(v).map(|(p, e)| (p, v, e)))
    }

    /// Whether edge `e` joining `u` and `v` is one of the tree's edges.
    #[inline]
    pub fn is_tree_edge(&self, u: NodeId, v: NodeId, e: EdgeId) -> bool {
        self.parent[v.index()] == Some((u, e)) || self.parent[u.index()] == Some((v, e))
    }

    pub(crate) fn regrow(&mut self, g: &UndirectedMultigraph, root: NodeId, strategy: TreeStrategy) {
        for &v in &self.order {
            self.parent[v.index()] = None;
            self.depth[v.index()] = UNCOVERED;
        }
        self.order.clear();
        self.root = root;
        self.strategy = strategy;
        self.depth[root.index()] = 0;
        self.order.push(root);
        match strategy {
            TreeStrategy::BreadthFirst => self.grow_breadth_first(g),
            TreeStrategy::DepthFirst => self.grow_depth_first(g),
        }
    }

    fn grow_breadth_first(&mut self, g: &UndirectedMultigraph) {
        // `order` doubles as the FIFO queue.
        let mut head = 0;
        while head < self.order.len() {
            let u = self.order[head];
            head += 1;
            let next_depth = self.depth[u.index()] + 1;
            for &(v, e) in g.adjacent(u) {
                if self.depth[v.index()] == UNCOVERED {
                    self.depth[v.index()] = next_depth;
                    self.parent[v.index()] = Some((u, e));
                    self.order.push(v);
                }
            }
        }
    }

    fn grow_depth_first(&mut self, g: &UndirectedMultigraph) {
        self.stack.clear();
        self.stack.push((self.root, 0));
        while let Some(top) = self.stack.last_mut() {
            let (u, cursor) = *top;
            let adj = g.adjacent(u);
            if cursor == adj.len() {
                self.stack.pop();
                continue;
            }
            top.1 += 1;
            let (v, e) = adj[cursor];
            if self.depth[v.index()] == UNCOVERED {
                self.depth[v.index()] = self.depth[u.index()] + 1;
                self.parent[v.index()] = Some((u, e));
                self.order.push(v);
                self.stack.push((v, 0));
            }
        }
    }

    /// Unique tree path from `u` to `v` through their lowest common ancestor,
    /// endpoints included.
    pub fn path(&self, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
        for w in [u, v] {
            if !self.covers(w) {
                return Err(Error::TreeMismatch(format!(
                    "node {w} is not covered by the tree rooted at {}",
                    self.root
                )));
            }
        }
        let (mut path, mut scratch) = (Vec::new(), Vec::new());
        self.path_within(u, v, usize::MAX, &mut path, &mut scratch);
        Ok(path)
    }

    /// Writes the tree path from `u` to `v` into `out`, using `right` as
    /// scratch. Gives up and returns false as soon as the path is known to
    /// exceed `max_nodes` nodes.
    pub(crate) fn path_within(
        &self,
        u: NodeId,
        v: NodeId,
        max_nodes: usize,
        out: &mut Vec<NodeId>,
        right: &mut Vec<NodeId>,
    ) -> bool {
        out.clear();
        right.clear();
        let (mut a, mut b) = (u, v);
        let (mut da, mut db) = (self.depth[a.index()], self.depth[b.index()]);
        if da.abs_diff(db) as usize >= max_nodes {
            return false;
        }
        out.push(a);
        right.push(b);
        while da > db {
            a = self.parent_node(a);
            da -= 1;
            out.push(a);
        }
        while db > da {
            b = self.parent_node(b);
            db -= 1;
            right.push(b);
        }
        while a != b {
            if out.len() + right.len() > max_nodes {
                return false;
            }
            a = self.parent_node(a);
            b = self.parent_node(b);
            out.push(a);
            right.push(b);
        }
        // The common ancestor closes `out`; drop its copy on the right side.
        right.pop();
        out.extend(right.iter().rev());
        out.len() <= max_nodes
    }

    #[inline]
    fn parent_node(&self, v: NodeId) -> NodeId {
        self.parent[v.index()].expect("covered non-root node has a parent").0
    }
}

/// Grows a spanning tree of `root`'s component. Neighbors are visited in
/// ascending `(neighbor, edge)` order.
pub fn spanning_tree(g: &UndirectedMultigraph, root: NodeId, strategy: TreeStrategy) -> Result<SpanningTree> {
    g.check_node(root)?;
    let mut tree = SpanningTree::with_capacity(g.node_count(), strategy);
    tree.regrow(g, root, strategy);
    Ok(tree)
}
