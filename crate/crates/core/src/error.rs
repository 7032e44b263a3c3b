use thiserror::Error;

use crate::net::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("nodes {0} and {1} are collocated (zero distance)")]
    Collocated(NodeId, NodeId),

    #[error("no edge between nodes {0} and {1}")]
    AbsentEdge(NodeId, NodeId),

    #[error("malformed operation: {0}")]
    MalformedOperation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("instance too large for exhaustive enumeration: {nodes} nodes (limit {limit})")]
    TooLarge { nodes: usize, limit: usize },

    #[error("unknown algorithm tag `{0}`")]
    UnknownAlgorithm(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("malformed output file {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
