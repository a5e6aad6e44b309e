//! Causal diagrams, directed paths, recanting witnesses and DOT rendering.

mod dag;
mod diagram;
mod path;

pub use dag::{causal_diagram, Dag};
pub use diagram::{to_dot, Diagram};
pub use path::{
    desc_pi, directed_paths, directed_paths_with_limit, find_recanting_witness, parse_path_spec,
    validate_path, CausalPath, MAX_PATHS,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` is listed more than once")]
    DuplicateNode(String),
    #[error("`{from} -> {to}` is not an edge of the diagram")]
    NotAPath { from: String, to: String },
    #[error("path visits `{0}` more than once")]
    RepeatedNode(String),
    #[error("a causal path needs at least two nodes")]
    PathTooShort,
    #[error("more than {limit} directed paths; refusing to enumerate")]
    TooManyPaths { limit: usize },
    #[error("cycle detected: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("cannot parse path `{0}`; expected names joined by `->`")]
    PathSyntax(String),
}
