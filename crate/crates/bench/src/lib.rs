//! Instance generation, trace replay and work reports for the decremental
//! reachability engine.

pub mod gen;
pub mod report;
pub mod runner;
pub mod trace;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("trace line {line}: {msg}")]
    Trace { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] decreach::GraphError),
    #[error(transparent)]
    Engine(#[from] decreach::EngineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
