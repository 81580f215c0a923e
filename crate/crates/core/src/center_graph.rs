//! Decremental transitive closure over the center graph.
//!
//! Vertices are dense indices `0..c`. Each source keeps a reachable set and
//! a BFS parent array; removing a batch of edges recomputes only the sources
//! whose BFS tree used one of them. Queries are bit lookups.

use fixedbitset::FixedBitSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CenterGraphError {
    #[error("edge ({0}, {1}) is not in the center graph")]
    MissingEdge(usize, usize),
    #[error("index {0} is out of range")]
    OutOfRange(usize),
}

const NO_PARENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct CenterGraph {
    out: Vec<FixedBitSet>,
    reach: Vec<FixedBitSet>,
    parent: Vec<Vec<u32>>,
    edge_count: usize,
    ops: u64,
    recomputed: u64,
}

impl CenterGraph {
    pub fn new(c: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, CenterGraphError> {
        let mut out = vec![FixedBitSet::with_capacity(c); c];
        let mut edge_count = 0;
        for (x, y) in edges {
            if x >= c || y >= c {
                return Err(CenterGraphError::OutOfRange(x.max(y)));
            }
            if x != y && !out[x].put(y) {
                edge_count += 1;
            }
        }
        let mut g = CenterGraph {
            out,
            reach: vec![FixedBitSet::with_capacity(c); c],
            parent: vec![vec![NO_PARENT; c]; c],
            edge_count,
            ops: 0,
            recomputed: 0,
        };
        for s in 0..c {
            g.search(s);
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        x < self.len() && self.out[x].contains(y)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out.iter().enumerate().flat_map(|(x, row)| row.ones().map(move |y| (x, y)))
    }

    /// Word operations spent on searches so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    /// Number of per-source searches rerun after removals.
    pub fn recomputed_sources(&self) -> u64 {
        self.recomputed
    }

    pub fn reachable(&self, x: usize, y: usize) -> Result<bool, CenterGraphError> {
        let c = self.len();
        if x >= c {
            return Err(CenterGraphError::OutOfRange(x));
        }
        if y >= c {
            return Err(CenterGraphError::OutOfRange(y));
        }
        Ok(self.reach[x].contains(y))
    }

    /// Removes the edges and restores the closure. Fails without modifying
    /// anything if some edge is absent.
    pub fn remove_edges(&mut self, batch: &[(usize, usize)]) -> Result<(), CenterGraphError> {
        for &(x, y) in batch {
            if !self.has_edge(x, y) {
                return Err(CenterGraphError::MissingEdge(x, y));
            }
        }
        for &(x, y) in batch {
            if self.out[x].contains(y) {
                self.out[x].remove(y);
                self.edge_count -= 1;
            }
        }
        for s in 0..self.len() {
            let par = &self.parent[s];
            if batch.iter().any(|&(x, y)| par[y] == x as u32) {
                self.recomputed += 1;
                self.search(s);
            }
        }
        Ok(())
    }

    fn search(&mut self, s: usize) {
        let c = self.len();
        let words = c.div_ceil(64) as u64;
        let reach = &mut self.reach[s];
        let parent = &mut self.parent[s];
        reach.clear();
        parent.fill(NO_PARENT);
        reach.insert(s);
        let mut queue = vec![s];
        let mut head = 0;
        let mut fresh = FixedBitSet::with_capacity(c);
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            fresh.clone_from(&self.out[v]);
            fresh.difference_with(reach);
            self.ops += words;
            for w in fresh.ones() {
                reach.insert(w);
                parent[w] = v as u32;
                queue.push(w);
            }
        }
    }
}
