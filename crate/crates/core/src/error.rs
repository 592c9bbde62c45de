use std::io;

use thiserror::Error;

/// Errors produced anywhere in the detection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} is out of range for a graph with {node_count} nodes")]
    InvalidNode { node: usize, node_count: usize },

    #[error("self-loop on driver `{0}`: a driver cannot collide with themself")]
    SelfLoop(String),

    #[error("unknown driver key `{0}`")]
    UnknownKey(String),

    #[error("spanning tree does not match graph: {0}")]
    TreeMismatch(String),

    #[error("invalid cycle size bounds: need 0 < {min_exclusive} < {max_exclusive}")]
    InvalidBounds {
        min_exclusive: usize,
        max_exclusive: usize,
    },

    #[error("graph has {nodes} nodes, brute-force enumeration is limited to {limit}")]
    GraphTooLarge { nodes: usize, limit: usize },

    #[error("graph has no edges")]
    EdgelessGraph,

    #[error("invalid indicator registry: {0}")]
    Registry(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("invalid synthetic spec: {0}")]
    Spec(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
