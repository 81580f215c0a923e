//! Output-sensitive approximate path unions for a fixed source `x` and
//! depth `h`.
//!
//! The state keeps a shrinking node set `R` that always contains every node
//! within distance `h` of `x`. A query for `y` grows a reverse search to `y`
//! inside `G[R]` in stages of `h` levels (`B_1 ⊆ B_2 ⊆ ...`) until the edge
//! count of the induced subgraph stops doubling, answers with a forward
//! search from `x` inside the last stage, and evicts from `R` the previous
//! stage's nodes that the forward search did not reach. The returned set `F`
//! satisfies `P(x,y,h) ⊆ F ⊆ P(x,y,(log2 m + 3) h)`.
//!
//! Stages continue one search rather than restarting it, so each node's
//! in-list is scanned once per query. In-edges of the last layer of a stage
//! are scanned in that stage, which makes `|E(B_i)|` exact at the end of
//! stage `i`; edges from the next layer are carried into stage `i + 1`.

use std::collections::HashMap;

use crate::graph::{bounded_bfs_quiet, Digraph, Direction, Node, NodeSet};

/// Per-query instrumentation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CallStats {
    pub y: Node,
    /// Index `i*` of the stage that passed the doubling test.
    pub exit_index: u32,
    /// `|E(B_i)|` for `i = 1 ..= i*`.
    pub stage_edges: Vec<usize>,
    pub f_nodes: usize,
    pub f_edges: usize,
    pub removed: usize,
    /// `|E(X, R)| + |E(R, X)|` with `R` taken before the removal.
    pub removed_incident: usize,
    pub scans: u64,
}

/// Approximate path-union state for one `(x, h)`.
#[derive(Clone, Debug)]
pub struct ApuState {
    x: Node,
    h: u32,
    reach_superset: NodeSet,
    initial_m: usize,
    ceil_log_m: u32,
    stage_limit: u32,
    removed_total: usize,
    scans: u64,
    calls: u64,
    sum_f_edges: u64,
    max_exit: u32,
    audit: bool,
    unsafe_removals: Vec<Node>,
    history: Vec<CallStats>,
    keep_history: bool,
}

/// `⌈log2 m⌉`, with `m <= 1` mapped to 0.
pub fn ceil_log2(m: usize) -> u32 {
    if m <= 1 {
        0
    } else {
        (m - 1).ilog2() + 1
    }
}

/// `⌊(log2 m + 3) h⌋`: the outer depth of the sandwich guarantee.
pub fn approximation_horizon(m: usize, h: u32) -> u32 {
    let lg = if m <= 1 { 0.0 } else { (m as f64).log2() };
    ((lg + 3.0) * h as f64).floor() as u32
}

impl ApuState {
    pub fn new(g: &Digraph, x: Node, h: u32) -> Self {
        assert!(h >= 1, "depth parameter must be at least 1");
        let m = g.initial_edge_count();
        let ceil_log_m = ceil_log2(m);
        ApuState {
            x,
            h,
            reach_superset: NodeSet::full(g.node_count()),
            initial_m: m,
            ceil_log_m,
            stage_limit: (ceil_log_m + 1).max(2),
            removed_total: 0,
            scans: 0,
            calls: 0,
            sum_f_edges: 0,
            max_exit: 0,
            audit: false,
            unsafe_removals: Vec::new(),
            history: Vec::new(),
            keep_history: false,
        }
    }

    /// Check every eviction against a fresh BFS from `x` (expensive).
    pub fn with_audit(mut self, on: bool) -> Self {
        self.audit = on;
        self
    }

    /// Retain [`CallStats`] for every query, not just totals.
    pub fn with_history(mut self, on: bool) -> Self {
        self.keep_history = on;
        self
    }

    pub fn source(&self) -> Node {
        self.x
    }

    pub fn depth(&self) -> u32 {
        self.h
    }

    /// The set `R`.
    pub fn reach_superset(&self) -> &NodeSet {
        &self.reach_superset
    }

    pub fn ceil_log_m(&self) -> u32 {
        self.ceil_log_m
    }

    /// Largest stage index the query loop may reach.
    pub fn stage_limit(&self) -> u32 {
        self.stage_limit
    }

    pub fn removed_total(&self) -> usize {
        self.removed_total
    }

    pub fn scans(&self) -> u64 {
        self.scans
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn sum_f_edges(&self) -> u64 {
        self.sum_f_edges
    }

    /// Largest exit index seen over all calls (0 before the first).
    pub fn max_exit_index(&self) -> u32 {
        self.max_exit
    }

    pub fn history(&self) -> &[CallStats] {
        &self.history
    }

    /// Nodes evicted while still within distance `h` of `x` (audit mode).
    pub fn unsafe_removals(&self) -> &[Node] {
        &self.unsafe_removals
    }

    /// Deletions never require work here: they only push nodes further
    /// from `x`, which keeps `R` a valid superset.
    pub fn notify_deletion(&mut self, _u: Node, _v: Node) {}

    /// `8 (m + Σ|E(F_i)| + n)`: the lifetime scan budget.
    pub fn lifetime_budget(&self) -> u64 {
        8 * (self.initial_m as u64 + self.sum_f_edges + self.reach_superset.universe() as u64)
    }

    /// Verifies that `R` still covers the ball of radius `h` around `x` and
    /// that no audited eviction was unsafe.
    pub fn assert_safety(&self, g: &Digraph) -> Result<(), String> {
        if let Some(&v) = self.unsafe_removals.first() {
            return Err(format!("node {v} was evicted within distance {} of {}", self.h, self.x));
        }
        let ball = bounded_bfs_quiet(g, self.x, self.h, Direction::Forward, None);
        for (v, d) in ball.iter() {
            if !self.reach_superset.contains(v) {
                return Err(format!("node {v} at distance {d} <= {} missing from R", self.h));
            }
        }
        Ok(())
    }

    /// Returns `F` for target `y` and evicts the nodes the query proved to
    /// be farther than `h` from `x`.
    pub fn approximate_path_union(&mut self, g: &Digraph, y: Node) -> (NodeSet, CallStats) {
        let h = self.h;
        let r = &self.reach_superset;
        let mut scans = 0u64;

        // reverse search state, shared across stages
        let mut dist: HashMap<Node, u32> = HashMap::new();
        let mut order: Vec<Node> = Vec::new();
        let mut inside: HashMap<Node, Vec<Node>> = HashMap::new();
        let mut carried: Vec<(Node, Node)> = Vec::new();
        let mut head = 0usize;
        let mut edges_in_stage = 0usize;
        if r.contains(y) {
            dist.insert(y, 0);
            order.push(y);
        }

        let mut stage_edges: Vec<usize> = Vec::new();
        let mut exit = None;
        for i in 1..=self.stage_limit {
            let bound = i * h;
            for (u, v) in carried.drain(..) {
                edges_in_stage += 1;
                inside.entry(u).or_default().push(v);
            }
            while head < order.len() {
                let v = order[head];
                let dv = dist[&v];
                if dv > bound {
                    break;
                }
                head += 1;
                for &(u, _) in g.in_edges(v) {
                    scans += 1;
                    if !r.contains(u) {
                        continue;
                    }
                    let du = *dist.entry(u).or_insert_with(|| {
                        order.push(u);
                        dv + 1
                    });
                    if du <= bound {
                        edges_in_stage += 1;
                        inside.entry(u).or_default().push(v);
                    } else {
                        carried.push((u, v));
                    }
                }
            }
            stage_edges.push(edges_in_stage);
            if i >= 2 && stage_edges[i as usize - 1] <= 2 * stage_edges[i as usize - 2] {
                exit = Some(i);
                break;
            }
        }
        let exit = exit.unwrap_or_else(|| {
            unreachable!(
                "stage edge counts doubled {} times without exceeding m = {}",
                self.stage_limit, self.initial_m
            )
        });
        let outer = exit * h;

        // forward search from x inside G[B_exit], over the edges collected above
        let mut f_dist: HashMap<Node, u32> = HashMap::new();
        let mut f_order: Vec<Node> = Vec::new();
        if dist.get(&self.x).is_some_and(|&d| d <= outer) {
            f_dist.insert(self.x, 0);
            f_order.push(self.x);
        }
        let mut fh = 0;
        while fh < f_order.len() {
            let v = f_order[fh];
            fh += 1;
            let dv = f_dist[&v];
            if dv >= h {
                continue;
            }
            if let Some(outs) = inside.get(&v) {
                for &w in outs {
                    scans += 1;
                    f_dist.entry(w).or_insert_with(|| {
                        f_order.push(w);
                        dv + 1
                    });
                }
            }
        }

        let n = g.node_count();
        let mut f = NodeSet::empty(n);
        for &v in &f_order {
            f.insert(v);
        }
        let f_edges: usize = f_order
            .iter()
            .filter_map(|v| inside.get(v))
            .map(|outs| outs.iter().filter(|&&w| f.contains(w)).count())
            .sum();

        let prev_bound = (exit - 1) * h;
        let evict: Vec<Node> = order.iter().copied().filter(|v| dist[v] <= prev_bound && !f.contains(*v)).collect();
        let removed_incident: usize = evict
            .iter()
            .map(|&v| {
                g.out_edges(v).iter().filter(|&&(w, _)| r.contains(w)).count()
                    + g.in_edges(v).iter().filter(|&&(w, _)| r.contains(w)).count()
            })
            .sum();

        if self.audit && !evict.is_empty() {
            let ball = bounded_bfs_quiet(g, self.x, h, Direction::Forward, None);
            self.unsafe_removals.extend(evict.iter().copied().filter(|&v| ball.contains(v)));
        }
        for &v in &evict {
            self.reach_superset.remove(v);
        }
        self.removed_total += evict.len();

        self.scans += scans;
        self.calls += 1;
        self.sum_f_edges += f_edges as u64;
        self.max_exit = self.max_exit.max(exit);
        g.charge_scans(scans);

        let stats = CallStats {
            y,
            exit_index: exit,
            stage_edges,
            f_nodes: f.len(),
            f_edges,
            removed: evict.len(),
            removed_incident,
            scans,
        };
        if self.keep_history {
            self.history.push(stats.clone());
        }
        (f, stats)
    }
}
