//! Decremental reachability between sampled centers of a directed graph.
//!
//! The crate maintains, under a sequence of edge deletions, exact pairwise
//! reachability between a randomly sampled set of *1-centers* (always
//! containing the designated source `s` and sink `t`). It combines
//! bounded-depth Even-Shiloach trees, an output-sensitive approximate
//! path-union structure, a multi-level hierarchy of center sets with
//! certified links, and a decrementally maintained transitive closure over
//! the resulting center graph.
//!
//! Entry point: [`engine::Engine`].

pub mod apu;
pub mod center_graph;
pub mod engine;
pub mod es_tree;
pub mod graph;
pub mod hierarchy;
pub mod links;
pub mod oracle;
pub mod path_union;

pub use engine::{Engine, EngineConfig, EngineError, Metrics};
pub use graph::{Digraph, Direction, GraphError, Node, NodeSet};
pub use hierarchy::{ParamSource, Preset};
