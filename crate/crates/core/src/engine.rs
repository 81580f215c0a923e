//! The decremental reachability engine.
//!
//! Owns the graph, the link state and the center graph. A deletion runs
//! the full pipeline before returning, so queries are plain lookups.

use thiserror::Error;

use crate::center_graph::{CenterGraph, CenterGraphError};
use crate::graph::{Digraph, GraphError, Node, NodeSet};
use crate::hierarchy::{resolve, sample_centers, HierarchyParams, ParamError, ParamSource};
use crate::links::{LinkState, QRecord};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    CenterGraph(#[from] CenterGraphError),
    #[error("node {0} is not a 1-center")]
    NotACenter(Node),
    #[error("{given} extra centers requested, at most {limit} allowed")]
    TooManyExtraCenters { given: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub params: ParamSource,
    /// Sampling constant `a`.
    pub a: f64,
    pub seed: u64,
    /// Nodes added to `C_1` besides `s` and `t`.
    pub extra_centers: Vec<Node>,
    /// Verify every path-union eviction against a fresh search.
    pub audit: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { params: ParamSource::default(), a: 2.0, seed: 0, extra_centers: Vec::new(), audit: false }
    }
}

/// Work counters. The four scan fields add up to `graph_scans`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Metrics {
    /// Global top-level trees: initial searches and updates.
    pub global_es: u64,
    /// Trees inside path-union sets: initial searches and updates.
    pub q_es: u64,
    /// Materializing the induced adjacency of path-union sets.
    pub q_build: u64,
    /// Approximate path-union queries.
    pub apu: u64,
    /// Certifier-count updates and initial count evaluations.
    pub link_ops: u64,
    /// Word operations in the closure searches.
    pub closure_ops: u64,
    /// Adjacency entries scanned, as counted by the graph.
    pub graph_scans: u64,
    pub deletions: u64,
    pub link_flips: u64,
    pub q_computations: u64,
}

impl Metrics {
    pub fn scan_total(&self) -> u64 {
        self.global_es + self.q_es + self.q_build + self.apu
    }
}

#[derive(Clone, Debug)]
pub struct Engine {
    graph: Digraph,
    s: Node,
    t: Node,
    links: LinkState,
    cg: CenterGraph,
    base_scans: u64,
    deletions: u64,
}

impl Engine {
    pub fn new(graph: Digraph, s: Node, t: Node, cfg: &EngineConfig) -> Result<Self, EngineError> {
        let n = graph.node_count();
        for &v in [s, t].iter().chain(&cfg.extra_centers) {
            if v as usize >= n {
                return Err(GraphError::NodeOutOfRange { node: v, n }.into());
            }
        }
        let params = resolve(&cfg.params, n, graph.edge_count(), cfg.a, cfg.seed)?;
        let limit = extra_center_limit(&params);
        if cfg.extra_centers.len() > limit {
            return Err(EngineError::TooManyExtraCenters { given: cfg.extra_centers.len(), limit });
        }
        let forced = NodeSet::from_nodes(n, [s, t].into_iter().chain(cfg.extra_centers.iter().copied()));
        let centers = sample_centers(n, &params, &forced)?;
        let base_scans = graph.scan_count();
        let links = LinkState::build(&graph, params, centers, cfg.audit);
        let cg = CenterGraph::new(links.center_nodes().len(), links.linked_pairs())?;
        Ok(Engine { graph, s, t, links, cg, base_scans, deletions: 0 })
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn source(&self) -> Node {
        self.s
    }

    pub fn sink(&self) -> Node {
        self.t
    }

    pub fn params(&self) -> &HierarchyParams {
        self.links.params()
    }

    pub fn links(&self) -> &LinkState {
        &self.links
    }

    pub fn center_graph(&self) -> &CenterGraph {
        &self.cg
    }

    /// The 1-centers in increasing order.
    pub fn centers(&self) -> &[Node] {
        self.links.center_nodes()
    }

    pub fn is_center(&self, v: Node) -> bool {
        self.links.center_index(v).is_some()
    }

    pub fn q_records(&self) -> &[QRecord] {
        self.links.q_records()
    }

    /// Deletes `(u, v)` and brings every structure up to date.
    pub fn delete_edge(&mut self, u: Node, v: Node) -> Result<(), EngineError> {
        self.graph.delete_edge(u, v)?;
        self.deletions += 1;
        let unlinked = self.links.after_deletion(&self.graph, u, v);
        if !unlinked.is_empty() {
            self.cg.remove_edges(&unlinked)?;
        }
        Ok(())
    }

    /// Whether center `x` reaches center `y`.
    pub fn query(&self, x: Node, y: Node) -> Result<bool, EngineError> {
        let xi = self.links.center_index(x).ok_or(EngineError::NotACenter(x))?;
        let yi = self.links.center_index(y).ok_or(EngineError::NotACenter(y))?;
        Ok(self.cg.reachable(xi, yi)?)
    }

    pub fn query_st(&self) -> bool {
        self.query(self.s, self.t).expect("s and t are centers")
    }

    pub fn metrics(&self) -> Metrics {
        let lc = self.links.counters();
        Metrics {
            global_es: lc.global_es,
            q_es: lc.q_es,
            q_build: lc.q_build,
            apu: lc.apu,
            link_ops: lc.link_ops,
            closure_ops: self.cg.ops(),
            graph_scans: self.graph.scan_count() - self.base_scans,
            deletions: self.deletions,
            link_flips: lc.flips,
            q_computations: lc.q_computations,
        }
    }

    /// Recomputes links and closure from scratch and compares.
    pub fn check_consistency(&self) -> Result<(), String> {
        self.links.check_consistency(&self.graph)?;
        let mut links = self.links.linked_pairs();
        let mut edges: Vec<_> = self.cg.edges().collect();
        links.sort_unstable();
        edges.sort_unstable();
        if links != edges {
            return Err("center graph differs from the link table".into());
        }
        let m = self.metrics();
        if m.scan_total() != m.graph_scans {
            return Err(format!("scan counters sum to {} but the graph counted {}", m.scan_total(), m.graph_scans));
        }
        Ok(())
    }
}

/// `max(2, ceil(n p_1))`: the expected order of `|C_1|`.
pub fn extra_center_limit(p: &HierarchyParams) -> usize {
    ((p.n as f64 * p.probability(1)).ceil() as usize).max(2)
}
