//! Detection of organized fraud rings in collision networks.
//!
//! Drivers become nodes of an undirected multigraph, shared collisions become
//! edges. After pruning everything that cannot lie on a cycle, cycles are
//! extracted by differencing spanning trees against the component edges,
//! filtered to a suspicious size band, scored by a weighted set of indicators
//! and ranked for review. Community detection baselines run on the same graph
//! for comparison.

pub mod community;
pub mod config;
pub mod cycles;
pub mod error;
pub mod export;
pub mod graph;
pub mod ingest;
pub mod pipeline;
pub mod scoring;
pub mod synth;
pub mod tree;

pub use cycles::{
    brute_force_simple_cycles, enumerate_cycles, filter_by_size, fundamental_cycles, CanonicalKey, Cycle,
    CycleSet, RootMode, SizeBounds,
};
pub use error::{Error, Result};
pub use graph::{EdgeId, GraphBuilder, InducedSubgraph, NodeId, UndirectedMultigraph};
pub use tree::{spanning_tree, SpanningTree, TreeStrategy};
