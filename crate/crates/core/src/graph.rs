//! Mutable directed graph under edge deletions, node sets, and the bounded
//! breadth-first searches every other module is built on.
//!
//! Nodes are dense integers `0..n`. Each edge gets a stable [`EdgeId`] at
//! construction; ids are never reused, so structures that keep private copies
//! of adjacency can test liveness in O(1) with [`Digraph::is_alive`].

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

pub type Node = u32;
pub type EdgeId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is not present")]
    MissingEdge(Node, Node),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Node, Node),
    #[error("self-loop on node {0}")]
    SelfLoop(Node),
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: Node, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Orientation of a search: `Forward` follows edges `u -> v`, `Reverse`
/// follows them backwards and so measures distances *to* the source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

/// Directed graph that only ever loses edges.
///
/// Adjacency lists hold only live edges: deletion swap-removes the entry from
/// both the tail's out-list and the head's in-list in O(1).
#[derive(Debug)]
pub struct Digraph {
    n: usize,
    initial_m: usize,
    tails: Vec<Node>,
    heads: Vec<Node>,
    alive: Vec<bool>,
    lookup: HashMap<(Node, Node), EdgeId>,
    out_adj: Vec<Vec<(Node, EdgeId)>>,
    in_adj: Vec<Vec<(Node, EdgeId)>>,
    out_pos: Vec<u32>,
    in_pos: Vec<u32>,
    live: usize,
    scans: AtomicU64,
}

impl Clone for Digraph {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            initial_m: self.initial_m,
            tails: self.tails.clone(),
            heads: self.heads.clone(),
            alive: self.alive.clone(),
            lookup: self.lookup.clone(),
            out_adj: self.out_adj.clone(),
            in_adj: self.in_adj.clone(),
            out_pos: self.out_pos.clone(),
            in_pos: self.in_pos.clone(),
            live: self.live,
            scans: AtomicU64::new(self.scan_count()),
        }
    }
}

impl Digraph {
    /// Builds a graph on `n` nodes. Self-loops and parallel edges are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Node, Node)>) -> Result<Self, GraphError> {
        let mut g = Digraph {
            n,
            initial_m: 0,
            tails: Vec::new(),
            heads: Vec::new(),
            alive: Vec::new(),
            lookup: HashMap::new(),
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            out_pos: Vec::new(),
            in_pos: Vec::new(),
            live: 0,
            scans: AtomicU64::new(0),
        };
        for (u, v) in edges {
            g.check_node(u)?;
            g.check_node(v)?;
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if g.lookup.contains_key(&(u, v)) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            let id = g.tails.len() as EdgeId;
            g.tails.push(u);
            g.heads.push(v);
            g.alive.push(true);
            g.lookup.insert((u, v), id);
            g.out_pos.push(g.out_adj[u as usize].len() as u32);
            g.out_adj[u as usize].push((v, id));
            g.in_pos.push(g.in_adj[v as usize].len() as u32);
            g.in_adj[v as usize].push((u, id));
        }
        g.initial_m = g.tails.len();
        g.live = g.initial_m;
        Ok(g)
    }

    fn check_node(&self, v: Node) -> Result<(), GraphError> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange { node: v, n: self.n })
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of edges currently alive.
    pub fn edge_count(&self) -> usize {
        self.live
    }

    /// Number of edges at construction time; frozen for the graph's lifetime.
    pub fn initial_edge_count(&self) -> usize {
        self.initial_m
    }

    pub fn has_edge(&self, u: Node, v: Node) -> bool {
        self.lookup.contains_key(&(u, v))
    }

    pub fn edge_id(&self, u: Node, v: Node) -> Option<EdgeId> {
        self.lookup.get(&(u, v)).copied()
    }

    pub fn is_alive(&self, e: EdgeId) -> bool {
        self.alive[e as usize]
    }

    pub fn endpoints(&self, e: EdgeId) -> (Node, Node) {
        (self.tails[e as usize], self.heads[e as usize])
    }

    /// Removes `(u, v)`. Deleting an absent edge is an error: it means the
    /// caller's deletion trace no longer matches the graph.
    pub fn delete_edge(&mut self, u: Node, v: Node) -> Result<EdgeId, GraphError> {
        let id = self.lookup.remove(&(u, v)).ok_or(GraphError::MissingEdge(u, v))?;
        self.alive[id as usize] = false;
        self.live -= 1;

        let p = self.out_pos[id as usize] as usize;
        let list = &mut self.out_adj[u as usize];
        list.swap_remove(p);
        if let Some(&(_, moved)) = list.get(p) {
            self.out_pos[moved as usize] = p as u32;
        }

        let p = self.in_pos[id as usize] as usize;
        let list = &mut self.in_adj[v as usize];
        list.swap_remove(p);
        if let Some(&(_, moved)) = list.get(p) {
            self.in_pos[moved as usize] = p as u32;
        }
        Ok(id)
    }

    pub fn out_edges(&self, u: Node) -> &[(Node, EdgeId)] {
        &self.out_adj[u as usize]
    }

    pub fn in_edges(&self, v: Node) -> &[(Node, EdgeId)] {
        &self.in_adj[v as usize]
    }

    /// Successors of `v` in the given orientation: out-neighbors when
    /// `Forward`, in-neighbors when `Reverse`.
    pub fn neighbors(&self, v: Node, dir: Direction) -> &[(Node, EdgeId)] {
        match dir {
            Direction::Forward => self.out_edges(v),
            Direction::Reverse => self.in_edges(v),
        }
    }

    /// Live edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        (0..self.tails.len()).filter(move |&i| self.alive[i]).map(move |i| (self.tails[i], self.heads[i]))
    }

    /// Adds `k` to the global edge-examination counter.
    pub fn charge_scans(&self, k: u64) {
        self.scans.fetch_add(k, Ordering::Relaxed);
    }

    pub fn scan_count(&self) -> u64 {
        self.scans.load(Ordering::Relaxed)
    }

    /// Parses the `n m` + `u v` lines text format. Strict: any malformed or
    /// surplus line is an error.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate();
        let (n, m) = match lines.next() {
            Some((i, line)) if line.trim().is_empty() => return Err(parse_err(i, "expected header `n m`")),
            Some((i, line)) => {
                let (a, b) = parse_pair(i, line)?;
                (a as usize, b as usize)
            }
            None => return Err(parse_err(0, "empty input")),
        };
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (i, line) = lines.next().ok_or_else(|| parse_err(edges.len() + 1, "fewer edge lines than declared"))?;
            edges.push(parse_pair(i, line)?);
        }
        for (i, line) in lines {
            if !line.trim().is_empty() {
                return Err(parse_err(i, "unexpected content after edge list"));
            }
        }
        Digraph::new(n, edges)
    }

    /// Serializes the live edges in the text format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.live);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }
}

fn parse_err(line: usize, msg: &str) -> GraphError {
    GraphError::Parse { line: line + 1, msg: msg.to_string() }
}

pub(crate) fn parse_pair(i: usize, line: &str) -> Result<(Node, Node), GraphError> {
    let mut it = line.split_whitespace();
    let a = it.next().ok_or_else(|| parse_err(i, "missing field"))?;
    let b = it.next().ok_or_else(|| parse_err(i, "missing field"))?;
    if it.next().is_some() {
        return Err(parse_err(i, "too many fields"));
    }
    let a = a.parse::<Node>().map_err(|e| parse_err(i, &e.to_string()))?;
    let b = b.parse::<Node>().map_err(|e| parse_err(i, &e.to_string()))?;
    Ok((a, b))
}

/// Subset of `0..n` with O(1) membership, insertion and removal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSet {
    member: Vec<bool>,
    len: usize,
}

impl NodeSet {
    pub fn empty(n: usize) -> Self {
        NodeSet { member: vec![false; n], len: 0 }
    }

    pub fn full(n: usize) -> Self {
        NodeSet { member: vec![true; n], len: n }
    }

    pub fn from_nodes(n: usize, nodes: impl IntoIterator<Item = Node>) -> Self {
        let mut s = Self::empty(n);
        for v in nodes {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.member.len()
    }

    #[inline]
    pub fn contains(&self, v: Node) -> bool {
        self.member.get(v as usize).copied().unwrap_or(false)
    }

    /// Returns `true` if `v` was not already present.
    pub fn insert(&mut self, v: Node) -> bool {
        let slot = &mut self.member[v as usize];
        if *slot {
            false
        } else {
            *slot = true;
            self.len += 1;
            true
        }
    }

    /// Returns `true` if `v` was present.
    pub fn remove(&mut self, v: Node) -> bool {
        let slot = &mut self.member[v as usize];
        if *slot {
            *slot = false;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Members in increasing order. O(n).
    pub fn iter(&self) -> impl Iterator<Item = Node> + '_ {
        self.member.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as Node)
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }
}

/// Result of a depth-bounded BFS: nodes in discovery order with their
/// distances, plus an index for point lookups.
#[derive(Clone, Debug, Default)]
pub struct BoundedDistances {
    order: Vec<(Node, u32)>,
    index: HashMap<Node, u32>,
    scans: u64,
}

impl BoundedDistances {
    pub fn get(&self, v: Node) -> Option<u32> {
        self.index.get(&v).copied()
    }

    pub fn contains(&self, v: Node) -> bool {
        self.index.contains_key(&v)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `(node, distance)` pairs in BFS discovery order.
    pub fn iter(&self) -> impl Iterator<Item = (Node, u32)> + '_ {
        self.order.iter().copied()
    }

    /// Adjacency entries examined by the search.
    pub fn scans(&self) -> u64 {
        self.scans
    }

    pub fn sorted(&self) -> Vec<(Node, u32)> {
        let mut v = self.order.clone();
        v.sort_unstable();
        v
    }
}

/// All nodes within distance `h` of `source` in `G[restrict]` (or `G` when
/// `restrict` is `None`). With `Direction::Reverse` the distances are
/// `dist(v, source)`.
///
/// Nodes at depth exactly `h` are not expanded, so the scan cost is the number
/// of adjacency entries of nodes at depth `< h`.
pub fn bounded_bfs(g: &Digraph, source: Node, h: u32, dir: Direction, restrict: Option<&NodeSet>) -> BoundedDistances {
    let out = bounded_bfs_quiet(g, source, h, dir, restrict);
    g.charge_scans(out.scans);
    out
}

/// [`bounded_bfs`] without touching the graph's scan counter; for oracles
/// and consistency checks that must not perturb instrumentation.
pub fn bounded_bfs_quiet(
    g: &Digraph,
    source: Node,
    h: u32,
    dir: Direction,
    restrict: Option<&NodeSet>,
) -> BoundedDistances {
    let mut out = BoundedDistances::default();
    if restrict.is_some_and(|r| !r.contains(source)) {
        return out;
    }
    out.order.push((source, 0));
    out.index.insert(source, 0);
    let mut head = 0;
    let mut scans = 0u64;
    while head < out.order.len() {
        let (v, d) = out.order[head];
        head += 1;
        if d >= h {
            continue;
        }
        for &(w, _) in g.neighbors(v, dir) {
            scans += 1;
            if restrict.is_some_and(|r| !r.contains(w)) || out.index.contains_key(&w) {
                continue;
            }
            out.index.insert(w, d + 1);
            out.order.push((w, d + 1));
        }
    }
    out.scans = scans;
    out
}

/// `E(A, B)`: live edges with tail in `a` and head in `b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InducedEdges {
    pub edges: Vec<(Node, Node)>,
}

impl InducedEdges {
    pub fn count(&self) -> usize {
        self.edges.len()
    }
}

/// Enumerates `E(a, b)` by scanning out-lists of `a`. `induced_edges(g, u, u)`
/// is `E(U)`.
pub fn induced_edges(g: &Digraph, a: &NodeSet, b: &NodeSet) -> InducedEdges {
    let mut edges = Vec::new();
    let mut scans = 0u64;
    for u in a.iter() {
        for &(v, _) in g.out_edges(u) {
            scans += 1;
            if b.contains(v) {
                edges.push((u, v));
            }
        }
    }
    g.charge_scans(scans);
    InducedEdges { edges }
}
