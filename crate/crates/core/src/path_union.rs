//! Exact path unions: all nodes on some `x -> y` path of at most `h` edges.

use thiserror::Error;

use crate::graph::{bounded_bfs_quiet, Digraph, Direction, Node, NodeSet};

/// `{v : dist(x, v) + dist(v, y) <= h}`, computed with one forward search
/// from `x` and one reverse search to `y`. Unreachable distances count as
/// infinite. Does not touch the graph's scan counter.
pub fn path_union(g: &Digraph, x: Node, y: Node, h: u32) -> NodeSet {
    let from_x = bounded_bfs_quiet(g, x, h, Direction::Forward, None);
    let to_y = bounded_bfs_quiet(g, y, h, Direction::Reverse, None);
    let mut out = NodeSet::empty(g.node_count());
    for (v, dx) in from_x.iter() {
        if let Some(dy) = to_y.get(v) {
            if dx + dy <= h {
                out.insert(v);
            }
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("brute-force path union refused: n = {n}, h = {h} exceeds n <= {max_n}, h <= {max_h}")]
pub struct SizeGuard {
    pub n: usize,
    pub h: u32,
    pub max_n: usize,
    pub max_h: u32,
}

pub const BRUTE_FORCE_MAX_N: usize = 30;
pub const BRUTE_FORCE_MAX_H: u32 = 10;

/// Union of the node sets of every `x -> y` walk with at most `h` edges, by
/// exhaustive enumeration. Exponential; test oracle only.
pub fn brute_force_path_union(g: &Digraph, x: Node, y: Node, h: u32) -> Result<NodeSet, SizeGuard> {
    let n = g.node_count();
    if n > BRUTE_FORCE_MAX_N || h > BRUTE_FORCE_MAX_H {
        return Err(SizeGuard { n, h, max_n: BRUTE_FORCE_MAX_N, max_h: BRUTE_FORCE_MAX_H });
    }
    let mut out = NodeSet::empty(n);
    let mut walk = vec![x];
    extend(g, y, h, &mut walk, &mut out);
    Ok(out)
}

fn extend(g: &Digraph, y: Node, budget: u32, walk: &mut Vec<Node>, out: &mut NodeSet) {
    let v = *walk.last().unwrap();
    if v == y {
        for &p in walk.iter() {
            out.insert(p);
        }
    }
    if budget == 0 {
        return;
    }
    for &(w, _) in g.out_edges(v) {
        walk.push(w);
        extend(g, y, budget - 1, walk, out);
        walk.pop();
    }
}
