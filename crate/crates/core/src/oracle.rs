//! Ground truth and the classic baseline.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::es_tree::EsTree;
use crate::graph::{bounded_bfs_quiet, Digraph, Direction, Node};

pub const CLOSURE_MAX_N: usize = 300;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("full closure refused for n = {n} (limit {limit})")]
pub struct ClosureGuard {
    pub n: usize,
    pub limit: usize,
}

/// BFS on the current graph. Does not touch the scan counter.
pub fn static_reachable(g: &Digraph, u: Node, v: Node) -> bool {
    u == v || bounded_bfs_quiet(g, u, g.node_count() as u32, Direction::Forward, None).contains(v)
}

/// Reflexive transitive closure, one BFS per source.
pub fn full_closure(g: &Digraph) -> Result<Vec<FixedBitSet>, ClosureGuard> {
    let n = g.node_count();
    if n > CLOSURE_MAX_N {
        return Err(ClosureGuard { n, limit: CLOSURE_MAX_N });
    }
    Ok((0..n as Node)
        .map(|s| {
            let mut row = FixedBitSet::with_capacity(n);
            for (v, _) in bounded_bfs_quiet(g, s, n as u32, Direction::Forward, None).iter() {
                row.insert(v as usize);
            }
            row
        })
        .collect())
}

/// Single-source reachability by one ES-tree of depth `n`: `O(m n)` total.
#[derive(Clone, Debug)]
pub struct EsBaseline {
    tree: EsTree,
}

impl EsBaseline {
    pub fn new(g: &Digraph, s: Node) -> Self {
        EsBaseline { tree: EsTree::build(g, s, g.node_count() as u32, Direction::Forward, None) }
    }

    /// Call after `(u, v)` is gone from `g`; returns the nodes that became
    /// unreachable.
    pub fn notify_deletion(&mut self, g: &Digraph, u: Node, v: Node) -> Vec<Node> {
        self.tree.notify_deletion(g, u, v)
    }

    pub fn reachable(&self, v: Node) -> bool {
        self.tree.contains(v)
    }

    pub fn reachable_count(&self) -> usize {
        self.tree.len()
    }

    pub fn work(&self) -> u64 {
        self.tree.work()
    }
}
