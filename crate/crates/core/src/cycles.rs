//! Cycle extraction by spanning-tree differencing.
//!
//! For a spanning tree of a component, every component edge that is not a
//! tree edge closes exactly one cycle: the tree path between its endpoints
//! plus the edge itself. Growing a tree from every node (or one node per
//! component) and deduplicating the closed cycles by a rotation- and
//! reflection-invariant key yields the suspicious cycle set.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, NodeId, UndirectedMultigraph};
use crate::tree::{SpanningTree, TreeStrategy};

/// Largest graph accepted by [`brute_force_simple_cycles`].
pub const BRUTE_FORCE_NODE_LIMIT: usize = 16;

/// Which procedure produced a cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleSource {
    #[serde(rename = "bfs")]
    BreadthFirst,
    #[serde(rename = "dfs")]
    DepthFirst,
    Oracle,
    /// Read back from a cycle file.
    Imported,
}

impl From<TreeStrategy> for CycleSource {
    fn from(s: TreeStrategy) -> Self {
        match s {
            TreeStrategy::BreadthFirst => CycleSource::BreadthFirst,
            TreeStrategy::DepthFirst => CycleSource::DepthFirst,
        }
    }
}

/// Rotation- and reflection-minimal vertex sequence of a closed walk.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey(Box<[NodeId]>);

impl CanonicalKey {
    pub fn new(walk: &[NodeId]) -> Self {
        let mut out = Vec::with_capacity(walk.len());
        canonicalize_into(walk, &mut out);
        CanonicalKey(out.into_boxed_slice())
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[inline]
fn walk_at<T>(walk: &[T], start: usize, forward: bool, i: usize) -> &T {
    let k = walk.len();
    if forward {
        &walk[(start + i) % k]
    } else {
        &walk[(start + k - i) % k]
    }
}

/// Writes the lexicographically smallest rotation/reflection of `walk`.
///
/// The minimum sequence must start at an occurrence of the smallest element,
/// so only those starting points (in both directions) are compared.
pub fn canonicalize_into<T: Ord + Clone>(walk: &[T], out: &mut Vec<T>) {
    out.clear();
    let k = walk.len();
    let Some(min) = walk.iter().min() else {
        return;
    };
    let mut best = None;
    for start in (0..k).filter(|&i| walk[i] == *min) {
        for forward in [true, false] {
            let better = match best {
                None => true,
                Some((bs, bf)) => {
                    let ord = (0..k)
                        .map(|i| walk_at(walk, start, forward, i).cmp(walk_at(walk, bs, bf, i)))
                        .find(|o| *o != Ordering::Equal)
                        .unwrap_or(Ordering::Equal);
                    ord == Ordering::Less
                }
            };
            if better {
                best = Some((start, forward));
            }
        }
    }
    let (start, forward) = best.expect("non-empty walk");
    out.extend((0..k).map(|i| walk_at(walk, start, forward, i).clone()));
}

/// A closed vertex walk; the first vertex follows the last.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    vertices: Vec<NodeId>,
    /// Non-tree edge that closed the cycle; absent for oracle cycles.
    closing_edge: Option<EdgeId>,
    source: CycleSource,
}

impl Cycle {
    pub fn new(vertices: Vec<NodeId>, closing_edge: Option<EdgeId>, source: CycleSource) -> Self {
        Cycle {
            vertices,
            closing_edge,
            source,
        }
    }

    pub fn vertices(&self) -> &[NodeId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn closing_edge(&self) -> Option<EdgeId> {
        self.closing_edge
    }

    pub fn source(&self) -> CycleSource {
        self.source
    }

    pub fn key(&self) -> CanonicalKey {
        CanonicalKey::new(&self.vertices)
    }

    /// Distinct vertices, consecutive ones (wrapping) adjacent in `g`.
    /// A two-vertex cycle additionally needs a parallel edge pair.
    pub fn is_simple_in(&self, g: &UndirectedMultigraph) -> bool {
        let k = self.vertices.len();
        if k < 2 || self.vertices.iter().any(|&v| g.check_node(v).is_err()) {
            return false;
        }
        let mut sorted = self.vertices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != k {
            return false;
        }
        let multiplicity = |a: NodeId, b: NodeId| g.adjacent(a).iter().filter(|(w, _)| *w == b).count();
        if k == 2 {
            return multiplicity(self.vertices[0], self.vertices[1]) >= 2;
        }
        (0..k).all(|i| multiplicity(self.vertices[i], self.vertices[(i + 1) % k]) >= 1)
    }
}

/// Whether every root or one root per component grows a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootMode {
    #[serde(rename = "all")]
    AllRoots,
    #[serde(rename = "single")]
    SingleRootPerComponent,
}

impl FromStr for RootMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" | "all_roots" | "all-roots" => Ok(RootMode::AllRoots),
            "single" | "single_root" | "single-root" | "single_root_per_component" => {
                Ok(RootMode::SingleRootPerComponent)
            }
            other => Err(Error::Config(format!("unknown root mode `{other}`"))),
        }
    }
}

impl fmt::Display for RootMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootMode::AllRoots => "all",
            RootMode::SingleRootPerComponent => "single",
        })
    }
}

/// Tree that produced a cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Witness {
    pub root: NodeId,
    pub strategy: TreeStrategy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleEntry {
    /// Stored in canonical vertex order.
    pub cycle: Cycle,
    pub witnesses: Vec<Witness>,
}

/// Deduplicated cycles in ascending canonical-key order. A cycle's position
/// in this order is its cycle id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleSet {
    entries: Vec<CycleEntry>,
}

impl CycleSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Canonicalizes and merges `cycles`. Duplicates keep the smallest
    /// `(source, closing edge)` as their representative.
    pub fn from_cycles(cycles: impl IntoIterator<Item = Cycle>) -> Self {
        let mut builder = CycleSetBuilder::default();
        let mut scratch = Vec::new();
        for c in cycles {
            builder.insert(&c.vertices, c.closing_edge, c.source, None, &mut scratch);
        }
        builder.finish()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CycleEntry] {
        &self.entries
    }

    pub fn cycles(&self) -> impl ExactSizeIterator<Item = &Cycle> {
        self.entries.iter().map(|e| &e.cycle)
    }

    pub fn get(&self, id: usize) -> Option<&CycleEntry> {
        self.entries.get(id)
    }

    /// Cycle id of `key`, if present.
    pub fn position(&self, key: &CanonicalKey) -> Option<usize> {
        self.entries
            .binary_search_by(|e| e.cycle.vertices.as_slice().cmp(key.as_slice()))
            .ok()
    }

    pub fn contains(&self, key: &CanonicalKey) -> bool {
        self.position(key).is_some()
    }

    pub fn keys(&self) -> impl ExactSizeIterator<Item = CanonicalKey> + '_ {
        self.entries.iter().map(|e| CanonicalKey(e.cycle.vertices.clone().into_boxed_slice()))
    }

    pub fn is_subset_of(&self, other: &CycleSet) -> bool {
        self.entries
            .iter()
            .all(|e| other.contains(&CanonicalKey(e.cycle.vertices.clone().into_boxed_slice())))
    }

    /// Keys present in exactly one of the two sets: `(only in self, only in other)`.
    pub fn symmetric_difference(&self, other: &CycleSet) -> (Vec<CanonicalKey>, Vec<CanonicalKey>) {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        let (mut left, mut right) = (Vec::new(), Vec::new());
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.cycle.vertices.cmp(&y.cycle.vertices),
                (Some(_), None) => Ordering::Less,
                (None, _) => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    left.push(CanonicalKey(a[i].cycle.vertices.clone().into_boxed_slice()));
                    i += 1;
                }
                Ordering::Greater => {
                    right.push(CanonicalKey(b[j].cycle.vertices.clone().into_boxed_slice()));
                    j += 1;
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        (left, right)
    }

    fn retain(mut self, keep: impl Fn(&Cycle) -> bool) -> Self {
        self.entries.retain(|e| keep(&e.cycle));
        self
    }
}

#[derive(Debug)]
struct EntryMeta {
    closing_edge: Option<EdgeId>,
    source: CycleSource,
    witnesses: Vec<Witness>,
}

#[derive(Debug, Default)]
struct CycleSetBuilder {
    map: FxHashMap<Box<[NodeId]>, EntryMeta>,
}

impl CycleSetBuilder {
    fn insert(
        &mut self,
        walk: &[NodeId],
        closing_edge: Option<EdgeId>,
        source: CycleSource,
        witness: Option<Witness>,
        scratch: &mut Vec<NodeId>,
    ) {
        canonicalize_into(walk, scratch);
        if let Some(meta) = self.map.get_mut(scratch.as_slice()) {
            meta.witnesses.extend(witness);
            if (source, closing_edge) < (meta.source, meta.closing_edge) {
                meta.source = source;
                meta.closing_edge = closing_edge;
            }
            return;
        }
        self.map.insert(
            scratch.clone().into_boxed_slice(),
            EntryMeta {
                closing_edge,
                source,
                witnesses: witness.into_iter().collect(),
            },
        );
    }

    fn merge(mut self, mut other: CycleSetBuilder) -> CycleSetBuilder {
        if other.map.len() > self.map.len() {
            std::mem::swap(&mut self, &mut other);
        }
        for (key, meta) in other.map {
            match self.map.get_mut(&key) {
                Some(existing) => {
                    existing.witnesses.extend(meta.witnesses);
                    if (meta.source, meta.closing_edge) < (existing.source, existing.closing_edge) {
                        existing.source = meta.source;
                        existing.closing_edge = meta.closing_edge;
                    }
                }
                None => {
                    self.map.insert(key, meta);
                }
            }
        }
        self
    }

    fn finish(self) -> CycleSet {
        let mut entries: Vec<CycleEntry> = self
            .map
            .into_iter()
            .map(|(key, mut meta)| {
                meta.witnesses.sort_unstable();
                meta.witnesses.dedup();
                CycleEntry {
                    cycle: Cycle::new(key.into_vec(), meta.closing_edge, meta.source),
                    witnesses: meta.witnesses,
                }
            })
            .collect();
        entries.sort_unstable_by(|a, b| a.cycle.vertices.cmp(&b.cycle.vertices));
        CycleSet { entries }
    }
}

fn check_tree(g: &UndirectedMultigraph, t: &SpanningTree) -> Result<()> {
    if t.node_capacity() != g.node_count() {
        return Err(Error::TreeMismatch(format!(
            "tree sized for {} nodes, graph has {}",
            t.node_capacity(),
            g.node_count()
        )));
    }
    for (p, v, e) in t.tree_edges() {
        match g.endpoints(e) {
            Some((a, b)) if (a, b) == (p, v) || (a, b) == (v, p) => {}
            _ => {
                return Err(Error::TreeMismatch(format!(
                    "tree edge {e} ({p}-{v}) is not an edge of the graph"
                )))
            }
        }
    }
    Ok(())
}

/// Visits every non-tree edge of `t`'s component once, passing the closed
/// tree path (or `None` when it exceeds `max_len` nodes) and the edge.
fn for_each_fundamental(
    g: &UndirectedMultigraph,
    t: &SpanningTree,
    max_len: usize,
    path: &mut Vec<NodeId>,
    scratch: &mut Vec<NodeId>,
    mut visit: impl FnMut(Option<&[NodeId]>, EdgeId),
) {
    for &u in t.nodes() {
        for &(v, e) in g.adjacent(u) {
            if u < v && !t.is_tree_edge(u, v, e) {
                if t.path_within(u, v, max_len, path, scratch) {
                    visit(Some(path), e);
                } else {
                    visit(None, e);
                }
            }
        }
    }
}

/// Fundamental cycles of the component spanned by `t`: one per non-tree edge,
/// ordered along the tree path from the edge's lower endpoint.
pub fn fundamental_cycles(g: &UndirectedMultigraph, t: &SpanningTree) -> Result<Vec<Cycle>> {
    check_tree(g, t)?;
    let source = CycleSource::from(t.strategy());
    let mut out = Vec::new();
    let (mut path, mut scratch) = (Vec::new(), Vec::new());
    for_each_fundamental(g, t, usize::MAX, &mut path, &mut scratch, |p, e| {
        let p = p.expect("unbounded path always completes");
        out.push(Cycle::new(p.to_vec(), Some(e), source));
    });
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub strategy: TreeStrategy,
    pub root_mode: RootMode,
    /// Cycles with more vertices are counted but not materialized.
    pub max_len: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Enumeration {
    pub cycles: CycleSet,
    /// Fundamental cycles produced across all trees, before deduplication.
    pub emitted: usize,
    /// Emitted cycles dropped for exceeding `max_len` (not deduplicated).
    pub skipped_long: usize,
}

struct Worker<'g> {
    g: &'g UndirectedMultigraph,
    tree: SpanningTree,
    path: Vec<NodeId>,
    scratch: Vec<NodeId>,
    canon: Vec<NodeId>,
    builder: CycleSetBuilder,
    emitted: usize,
    skipped_long: usize,
}

impl<'g> Worker<'g> {
    fn new(g: &'g UndirectedMultigraph, strategy: TreeStrategy) -> Self {
        Worker {
            g,
            tree: SpanningTree::with_capacity(g.node_count(), strategy),
            path: Vec::new(),
            scratch: Vec::new(),
            canon: Vec::new(),
            builder: CycleSetBuilder::default(),
            emitted: 0,
            skipped_long: 0,
        }
    }

    fn visit(mut self, root: NodeId, strategy: TreeStrategy, max_len: usize) -> Self {
        self.tree.regrow(self.g, root, strategy);
        let witness = Witness { root, strategy };
        let source = CycleSource::from(strategy);
        let Worker {
            g,
            tree,
            path,
            scratch,
            canon,
            builder,
            emitted,
            skipped_long,
        } = &mut self;
        for_each_fundamental(g, tree, max_len, path, scratch, |p, e| {
            *emitted += 1;
            match p {
                Some(p) => builder.insert(p, Some(e), source, Some(witness), canon),
                None => *skipped_long += 1,
            }
        });
        self
    }
}

/// Roots to grow trees from. Acyclic components are skipped: their trees
/// have no non-tree edges.
fn roots(g: &UndirectedMultigraph, mode: RootMode) -> Vec<NodeId> {
    let mut out = Vec::new();
    for comp in g.connected_components() {
        let edges: usize = comp.iter().map(|&v| g.adjacent(v).len()).sum::<usize>() / 2;
        if edges < comp.len() {
            continue;
        }
        match mode {
            RootMode::AllRoots => out.extend(comp),
            RootMode::SingleRootPerComponent => out.push(comp[0]),
        }
    }
    out
}

pub fn enumerate_cycles_with(g: &UndirectedMultigraph, opts: &EnumerateOptions) -> Enumeration {
    let max_len = opts.max_len.unwrap_or(usize::MAX);
    let strategy = opts.strategy;
    let roots = roots(g, opts.root_mode);
    let (builder, emitted, skipped_long) = roots
        .par_iter()
        .fold(
            || Worker::new(g, strategy),
            |w, &root| w.visit(root, strategy, max_len),
        )
        .map(|w| (w.builder, w.emitted, w.skipped_long))
        .reduce(
            || (CycleSetBuilder::default(), 0, 0),
            |a, b| (a.0.merge(b.0), a.1 + b.1, a.2 + b.2),
        );
    Enumeration {
        cycles: builder.finish(),
        emitted,
        skipped_long,
    }
}

/// Union of fundamental cycles over the selected roots, deduplicated.
pub fn enumerate_cycles(g: &UndirectedMultigraph, strategy: TreeStrategy, root_mode: RootMode) -> CycleSet {
    enumerate_cycles_with(
        g,
        &EnumerateOptions {
            strategy,
            root_mode,
            max_len: None,
        },
    )
    .cycles
}

/// Exclusive bounds on cycle length for the suspicious band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBounds {
    pub min_exclusive: usize,
    pub max_exclusive: usize,
}

impl SizeBounds {
    pub fn new(min_exclusive: usize, max_exclusive: usize) -> Result<Self> {
        if min_exclusive == 0 || min_exclusive >= max_exclusive {
            return Err(Error::InvalidBounds {
                min_exclusive,
                max_exclusive,
            });
        }
        Ok(SizeBounds {
            min_exclusive,
            max_exclusive,
        })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.min_exclusive, self.max_exclusive).map(|_| ())
    }

    pub fn contains(&self, len: usize) -> bool {
        self.min_exclusive < len && len < self.max_exclusive
    }
}

impl Default for SizeBounds {
    fn default() -> Self {
        SizeBounds {
            min_exclusive: 3,
            max_exclusive: 50,
        }
    }
}

pub fn filter_by_size(cs: CycleSet, bounds: SizeBounds) -> Result<CycleSet> {
    bounds.validate()?;
    Ok(cs.retain(|c| bounds.contains(c.len())))
}

/// Cycle counts by length band. Bands at or above 50 are `None` when long
/// cycles were not materialized.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeHistogram {
    pub total: usize,
    pub two: usize,
    pub three: usize,
    pub four_to_five: usize,
    pub six_to_nine: usize,
    pub ten_to_forty_nine: usize,
    pub at_least_50: Option<usize>,
    pub at_least_100: Option<usize>,
    pub at_least_150: Option<usize>,
    pub at_least_200: Option<usize>,
    pub at_least_500: Option<usize>,
}

impl SizeHistogram {
    pub fn of(cs: &CycleSet, long_tracked: bool) -> Self {
        let mut h = SizeHistogram {
            total: cs.len(),
            ..Default::default()
        };
        let mut long = [0usize; 5];
        for c in cs.cycles() {
            match c.len() {
                0..=2 => h.two += 1,
                3 => h.three += 1,
                4..=5 => h.four_to_five += 1,
                6..=9 => h.six_to_nine += 1,
                10..=49 => h.ten_to_forty_nine += 1,
                _ => {}
            }
            for (slot, limit) in long.iter_mut().zip([50, 100, 150, 200, 500]) {
                if c.len() >= limit {
                    *slot += 1;
                }
            }
        }
        if long_tracked {
            h.at_least_50 = Some(long[0]);
            h.at_least_100 = Some(long[1]);
            h.at_least_150 = Some(long[2]);
            h.at_least_200 = Some(long[3]);
            h.at_least_500 = Some(long[4]);
        }
        h
    }
}

/// Every simple cycle of `g` by exhaustive path extension. Each cycle is
/// grown from its smallest vertex through larger vertices only. A pair of
/// nodes joined by two or more parallel edges counts as a two-vertex cycle.
pub fn brute_force_simple_cycles(g: &UndirectedMultigraph) -> Result<CycleSet> {
    let n = g.node_count();
    if n > BRUTE_FORCE_NODE_LIMIT {
        return Err(Error::GraphTooLarge {
            nodes: n,
            limit: BRUTE_FORCE_NODE_LIMIT,
        });
    }
    let neighbors: Vec<Vec<NodeId>> = g
        .nodes()
        .map(|v| {
            let mut ns: Vec<NodeId> = g.adjacent(v).iter().map(|&(w, _)| w).collect();
            ns.dedup();
            ns
        })
        .collect();

    let mut found = Vec::new();
    for u in g.nodes() {
        for w in &neighbors[u.index()] {
            let parallel = g.adjacent(u).iter().filter(|(x, _)| x == w).count();
            if u < *w && parallel >= 2 {
                found.push(Cycle::new(vec![u, *w], None, CycleSource::Oracle));
            }
        }
    }

    fn extend(
        start: NodeId,
        neighbors: &[Vec<NodeId>],
        path: &mut Vec<NodeId>,
        on_path: &mut [bool],
        found: &mut Vec<Cycle>,
    ) {
        let last = *path.last().expect("path starts at a vertex");
        for &w in &neighbors[last.index()] {
            if w == start && path.len() >= 3 {
                found.push(Cycle::new(path.clone(), None, CycleSource::Oracle));
            } else if w > start && !on_path[w.index()] {
                on_path[w.index()] = true;
                path.push(w);
                extend(start, neighbors, path, on_path, found);
                path.pop();
                on_path[w.index()] = false;
            }
        }
    }

    let mut on_path = vec![false; n];
    for s in g.nodes() {
        let mut path = vec![s];
        on_path[s.index()] = true;
        extend(s, &neighbors, &mut path, &mut on_path, &mut found);
        on_path[s.index()] = false;
    }
    Ok(CycleSet::from_cycles(found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::spanning_tree;

    fn n(i: usize) -> NodeId {
        NodeId::new(i)
    }

    fn ring(k: usize) -> UndirectedMultigraph {
        let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        UndirectedMultigraph::from_edges(k, &edges).unwrap()
    }

    fn k4() -> UndirectedMultigraph {
        UndirectedMultigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn ids(v: &[usize]) -> Vec<NodeId> {
        v.iter().map(|&i| n(i)).collect()
    }

    const BOTH: [TreeStrategy; 2] = [TreeStrategy::BreadthFirst, TreeStrategy::DepthFirst];
    const MODES: [RootMode; 2] = [RootMode::AllRoots, RootMode::SingleRootPerComponent];

    #[test]
    fn canonical_key_examples() {
        let k = CanonicalKey::new(&ids(&[3, 1, 4, 2]));
        assert_eq!(k.as_slice(), ids(&[1, 3, 2, 4]).as_slice());
        assert_eq!(CanonicalKey::new(&ids(&[2, 4, 1, 3])), k);
        assert_eq!(k.to_string(), "1-3-2-4");
        assert!(CanonicalKey::new(&[]).is_empty());
    }

    #[test]
    fn fundamental_cycles_on_ring() {
        let g = ring(4);
        for s in BOTH {
            for root in 0..4 {
                let t = spanning_tree(&g, n(root), s).unwrap();
                let cycles = fundamental_cycles(&g, &t).unwrap();
                assert_eq!(cycles.len(), 1);
                assert_eq!(cycles[0].len(), 4);
                assert!(cycles[0].is_simple_in(&g));
            }
        }
    }

    #[test]
    fn fundamental_cycles_on_tree_and_k4() {
        let tree = UndirectedMultigraph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        let t = spanning_tree(&tree, n(0), TreeStrategy::BreadthFirst).unwrap();
        assert!(fundamental_cycles(&tree, &t).unwrap().is_empty());

        let g = k4();
        for s in BOTH {
            for root in 0..4 {
                let t = spanning_tree(&g, n(root), s).unwrap();
                assert_eq!(fundamental_cycles(&g, &t).unwrap().len(), 3);
            }
        }
    }

    #[test]
    fn fundamental_cycles_rejects_foreign_tree() {
        let t = spanning_tree(&ring(5), n(0), TreeStrategy::BreadthFirst).unwrap();
        assert!(matches!(fundamental_cycles(&ring(4), &t), Err(Error::TreeMismatch(_))));
    }

    #[test]
    fn parallel_pair_yields_two_cycle() {
        let g = UndirectedMultigraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let t = spanning_tree(&g, n(0), TreeStrategy::BreadthFirst).unwrap();
        let cycles = fundamental_cycles(&g, &t).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 2);
        assert!(cycles[0].is_simple_in(&g));
    }

    #[test]
    fn isolated_ring_found_once() {
        let g = ring(5);
        for s in BOTH {
            for m in MODES {
                let cs = enumerate_cycles(&g, s, m);
                assert_eq!(cs.len(), 1);
                assert_eq!(cs.cycles().next().unwrap().len(), 5);
            }
        }
        assert!(enumerate_cycles(&UndirectedMultigraph::empty(), TreeStrategy::BreadthFirst, RootMode::AllRoots).is_empty());
    }

    #[test]
    fn two_triangles_sharing_an_edge() {
        // a=0 b=1 c=2 d=3; edges ab bc ca bd dc
        let g = UndirectedMultigraph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (1, 3), (3, 2)]).unwrap();
        let oracle = brute_force_simple_cycles(&g).unwrap();
        assert_eq!(oracle.len(), 3);
        for s in BOTH {
            let cs = enumerate_cycles(&g, s, RootMode::AllRoots);
            assert!(!cs.is_empty());
            assert!(cs.is_subset_of(&oracle));
        }
    }

    #[test]
    fn witnesses_record_roots() {
        let cs = enumerate_cycles(&ring(4), TreeStrategy::BreadthFirst, RootMode::AllRoots);
        assert_eq!(cs.entries()[0].witnesses.len(), 4);
        let single = enumerate_cycles(&ring(4), TreeStrategy::DepthFirst, RootMode::SingleRootPerComponent);
        assert_eq!(
            single.entries()[0].witnesses,
            vec![Witness {
                root: n(0),
                strategy: TreeStrategy::DepthFirst
            }]
        );
    }

    #[test]
    fn size_filter_bounds() {
        let cs = CycleSet::from_cycles([
            Cycle::new(ids(&[0, 1, 2]), None, CycleSource::Oracle),
            Cycle::new(ids(&[3, 4, 5, 6]), None, CycleSource::Oracle),
        ]);
        let kept = filter_by_size(cs, SizeBounds::default()).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept.cycles().next().unwrap().len(), 4);

        let long = |k: usize| CycleSet::from_cycles([Cycle::new((0..k).map(n).collect(), None, CycleSource::Oracle)]);
        assert!(filter_by_size(long(50), SizeBounds::default()).unwrap().is_empty());
        assert_eq!(filter_by_size(long(49), SizeBounds::default()).unwrap().len(), 1);

        assert!(matches!(SizeBounds::new(0, 5), Err(Error::InvalidBounds { .. })));
        assert!(SizeBounds::new(5, 5).is_err());
        let bad = SizeBounds {
            min_exclusive: 9,
            max_exclusive: 4,
        };
        assert!(filter_by_size(CycleSet::new(), bad).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let tri = UndirectedMultigraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(brute_force_simple_cycles(&tri).unwrap().len(), 1);

        let cs = brute_force_simple_cycles(&k4()).unwrap();
        assert_eq!(cs.len(), 7);
        assert_eq!(cs.cycles().filter(|c| c.len() == 3).count(), 4);
        assert_eq!(cs.cycles().filter(|c| c.len() == 4).count(), 3);

        let tree = UndirectedMultigraph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        assert!(brute_force_simple_cycles(&tree).unwrap().is_empty());

        assert!(matches!(
            brute_force_simple_cycles(&ring(17)),
            Err(Error::GraphTooLarge { nodes: 17, limit: 16 })
        ));
    }

    #[test]
    fn bounded_enumeration_skips_long_cycles() {
        let g = ring(8);
        let e = enumerate_cycles_with(
            &g,
            &EnumerateOptions {
                strategy: TreeStrategy::DepthFirst,
                root_mode: RootMode::AllRoots,
                max_len: Some(5),
            },
        );
        assert!(e.cycles.is_empty());
        assert_eq!(e.emitted, 8);
        assert_eq!(e.skipped_long, 8);
    }

    #[test]
    fn histogram_bands() {
        let cs = CycleSet::from_cycles([3usize, 4, 7, 12, 60, 120].map(|k| {
            Cycle::new((0..k).map(|i| n(i + 1000 * k)).collect(), None, CycleSource::Oracle)
        }));
        let h = SizeHistogram::of(&cs, true);
        assert_eq!(h.total, 6);
        assert_eq!((h.three, h.four_to_five, h.six_to_nine, h.ten_to_forty_nine), (1, 1, 1, 1));
        assert_eq!(h.at_least_50, Some(2));
        assert_eq!(h.at_least_100, Some(1));
        assert_eq!(h.at_least_500, Some(0));
        assert_eq!(SizeHistogram::of(&cs, false).at_least_50, None);
    }

    #[test]
    fn symmetric_difference_lists_one_sided_keys() {
        let a = CycleSet::from_cycles([
            Cycle::new(ids(&[0, 1, 2, 3]), None, CycleSource::Oracle),
            Cycle::new(ids(&[4, 5, 6, 7]), None, CycleSource::Oracle),
        ]);
        let b = CycleSet::from_cycles([Cycle::new(ids(&[4, 5, 6, 7]), None, CycleSource::Oracle)]);
        let (left, right) = a.symmetric_difference(&b);
        assert_eq!(left.len(), 1);
        assert!(right.is_empty());
    }
}
