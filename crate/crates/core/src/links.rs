//! Certified links between 1-centers.
//!
//! Every ordered pair of distinct 1-centers `(x, y)` has a level
//! `l = max(level(x), level(y))`. At the top level `k`, `x` is linked to `y`
//! iff the pair is within distance `h_k`, read off the outgoing tree of `x`
//! (or, if `x` is not a `k`-center, the incoming tree of `y`). Below the top,
//! a pair is linked while some center `z` of level `> l` has `x -> z` and
//! `z -> y` both linked. Once no such `z` remains, a set `Q ⊇ P(x, y, h_l)`
//! is computed from the approximate path-union state of `(x, l)` and from
//! then on the link is decided by an ES-tree from `x` of depth `h_l` inside
//! `G[Q]`.
//!
//! Links only ever go from linked to unlinked. The certifiers of a pair are
//! kept as a count; flipping a link decrements the count of every pair for
//! which it served as one leg while the other leg is still linked, so each
//! certifier is retired exactly once.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::apu::ApuState;
use crate::es_tree::EsTree;
use crate::graph::{bounded_bfs_quiet, Digraph, Direction, Node, NodeSet};
use crate::hierarchy::{CenterSets, HierarchyParams};
use crate::path_union::path_union;

const NONE: u32 = u32::MAX;

/// One computed path-union set.
#[derive(Clone, Debug, PartialEq)]
pub struct QRecord {
    pub x: Node,
    pub y: Node,
    pub level: usize,
    pub size: usize,
    /// `n / c_{l+1}`.
    pub bound: f64,
}

impl QRecord {
    pub fn violates_bound(&self) -> bool {
        self.size as f64 > self.bound
    }
}

#[derive(Clone, Debug)]
struct GlobalTrees {
    center: usize,
    out: EsTree,
    inc: EsTree,
}

#[derive(Clone, Debug)]
struct QTree {
    x: usize,
    y: usize,
    tree: EsTree,
    live: bool,
}

/// Read-only view of a pair's link state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkView {
    pub level: usize,
    pub linked: bool,
    /// Live certifiers; meaningless once `q_nodes` is set.
    pub certifiers: u32,
    pub q_nodes: Option<Vec<Node>>,
}

/// One ES-tree's lifetime work and the size of the graph it runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeWork {
    pub root: Node,
    pub dir: Direction,
    pub work: u64,
    pub depth: u32,
    pub nodes: usize,
    pub edges: usize,
}

impl TreeWork {
    /// `10 (|E| + |V|) h`.
    pub fn budget(&self) -> u64 {
        10 * (self.edges + self.nodes) as u64 * self.depth as u64
    }
}

/// Counters kept by [`LinkState`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LinkCounters {
    pub global_es: u64,
    pub q_es: u64,
    pub q_build: u64,
    pub apu: u64,
    pub link_ops: u64,
    pub flips: u64,
    pub q_computations: u64,
}

#[derive(Clone, Debug)]
pub struct LinkState {
    params: HierarchyParams,
    centers: CenterSets,
    nodes: Vec<Node>,
    index: Vec<u32>,
    lvl: Vec<u8>,
    global: Vec<GlobalTrees>,
    /// `global_of[i]`: position in `global` for top-level center `i`.
    global_of: Vec<u32>,
    row: Vec<FixedBitSet>,
    col: Vec<FixedBitSet>,
    count: Vec<u32>,
    qidx: Vec<u32>,
    qtrees: Vec<QTree>,
    /// Graph node -> q-trees whose node set contains it.
    by_node: Vec<Vec<u32>>,
    /// `above[l]`: centers with level `> l`.
    above: Vec<FixedBitSet>,
    apu: HashMap<(usize, usize), ApuState>,
    audit: bool,
    q_records: Vec<QRecord>,
    link_ops: u64,
    flips: u64,
}

impl LinkState {
    /// Builds global trees and all initial links, top level first.
    pub fn build(g: &Digraph, params: HierarchyParams, centers: CenterSets, audit: bool) -> Self {
        let n = g.node_count();
        let k = params.k;
        let nodes: Vec<Node> = centers.set(1).iter().collect();
        let c = nodes.len();
        let mut index = vec![NONE; n];
        for (i, &v) in nodes.iter().enumerate() {
            index[v as usize] = i as u32;
        }
        let lvl: Vec<u8> = nodes.iter().map(|&v| centers.level(v) as u8).collect();
        let hk = params.depth(k);
        let mut global = Vec::new();
        let mut global_of = vec![NONE; c];
        for (i, &v) in nodes.iter().enumerate() {
            if lvl[i] as usize == k {
                global_of[i] = global.len() as u32;
                global.push(GlobalTrees {
                    center: i,
                    out: EsTree::build(g, v, hk, Direction::Forward, None),
                    inc: EsTree::build(g, v, hk, Direction::Reverse, None),
                });
            }
        }
        let above = (0..=k)
            .map(|l| {
                let mut s = FixedBitSet::with_capacity(c);
                s.extend((0..c).filter(|&i| lvl[i] as usize > l));
                s
            })
            .collect();
        let mut st = LinkState {
            params,
            centers,
            nodes,
            index,
            lvl,
            global,
            global_of,
            row: vec![FixedBitSet::with_capacity(c); c],
            col: vec![FixedBitSet::with_capacity(c); c],
            count: vec![0; c * c],
            qidx: vec![NONE; c * c],
            qtrees: Vec::new(),
            by_node: vec![Vec::new(); n],
            above,
            apu: HashMap::new(),
            audit,
            q_records: Vec::new(),
            link_ops: 0,
            flips: 0,
        };
        st.initialize(g);
        st
    }

    fn initialize(&mut self, g: &Digraph) {
        let c = self.nodes.len();
        let k = self.params.k;
        for x in 0..c {
            for y in 0..c {
                if x != y && self.pair_level(x, y) == k && self.top_level_reach(x, y) {
                    self.set_link(x, y);
                }
            }
        }
        let words = c.div_ceil(64) as u64;
        for l in (1..k).rev() {
            for x in 0..c {
                let mut via = self.row[x].clone();
                via.intersect_with(&self.above[l]);
                for y in 0..c {
                    if x == y || self.pair_level(x, y) != l {
                        continue;
                    }
                    let cnt = via.intersection_count(&self.col[y]) as u32;
                    self.link_ops += 2 * words;
                    self.count[x * c + y] = cnt;
                    if cnt > 0 || self.compute_q(g, x, y) {
                        self.set_link(x, y);
                    }
                }
            }
        }
    }

    pub fn params(&self) -> &HierarchyParams {
        &self.params
    }

    pub fn centers(&self) -> &CenterSets {
        &self.centers
    }

    /// 1-centers in increasing node order; position is the center index.
    pub fn center_nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn center_index(&self, v: Node) -> Option<usize> {
        match self.index.get(v as usize) {
            Some(&i) if i != NONE => Some(i as usize),
            _ => None,
        }
    }

    pub fn pair_level(&self, x: usize, y: usize) -> usize {
        self.lvl[x].max(self.lvl[y]) as usize
    }

    pub fn linked(&self, x: usize, y: usize) -> bool {
        self.row[x].contains(y)
    }

    /// Currently linked pairs, as center indices.
    pub fn linked_pairs(&self) -> Vec<(usize, usize)> {
        self.row.iter().enumerate().flat_map(|(x, r)| r.ones().map(move |y| (x, y))).collect()
    }

    pub fn view(&self, x: usize, y: usize) -> LinkView {
        let c = self.nodes.len();
        let q = self.qidx[x * c + y];
        LinkView {
            level: self.pair_level(x, y),
            linked: self.linked(x, y),
            certifiers: self.count[x * c + y],
            q_nodes: (q != NONE)
                .then(|| self.qtrees[q as usize].tree.restrict().map(|s| s.iter().collect()).unwrap_or_default()),
        }
    }

    pub fn q_records(&self) -> &[QRecord] {
        &self.q_records
    }

    /// Path-union states created so far, keyed by `(center node, level)`,
    /// in a fixed order.
    pub fn apu_states(&self) -> Vec<((Node, usize), &ApuState)> {
        let mut v: Vec<_> = self.apu.iter().map(|(&(x, l), s)| ((self.nodes[x], l), s)).collect();
        v.sort_by_key(|&(key, _)| key);
        v
    }

    /// Work and size figures for every ES-tree, global trees first.
    pub fn tree_work(&self) -> Vec<TreeWork> {
        self.global
            .iter()
            .flat_map(|gt| [&gt.out, &gt.inc])
            .chain(self.qtrees.iter().map(|q| &q.tree))
            .map(|t| {
                let (nodes, edges) = t.scope();
                TreeWork { root: t.root(), dir: t.orientation(), work: t.work(), depth: t.depth_bound(), nodes, edges }
            })
            .collect()
    }

    pub fn counters(&self) -> LinkCounters {
        LinkCounters {
            global_es: self.global.iter().map(|t| t.out.work() + t.inc.work()).sum(),
            q_es: self.qtrees.iter().map(|q| q.tree.work()).sum(),
            q_build: self.qtrees.iter().map(|q| q.tree.build_scans()).sum(),
            apu: self.apu.values().map(|s| s.scans()).sum(),
            link_ops: self.link_ops,
            flips: self.flips,
            q_computations: self.q_records.len() as u64,
        }
    }

    fn top_level_reach(&self, x: usize, y: usize) -> bool {
        let gx = self.global_of[x];
        if gx != NONE {
            self.global[gx as usize].out.contains(self.nodes[y])
        } else {
            self.global[self.global_of[y] as usize].inc.contains(self.nodes[x])
        }
    }

    fn set_link(&mut self, x: usize, y: usize) {
        self.row[x].insert(y);
        self.col[y].insert(x);
    }

    /// Computes `Q` for a pair with no certifiers and builds its tree.
    /// Returns whether `y` is in the tree.
    fn compute_q(&mut self, g: &Digraph, x: usize, y: usize) -> bool {
        let c = self.nodes.len();
        let l = self.pair_level(x, y);
        debug_assert_eq!(self.qidx[x * c + y], NONE, "Q computed twice");
        let h = self.params.depth(l);
        let (xn, yn) = (self.nodes[x], self.nodes[y]);
        let audit = self.audit;
        let state = self.apu.entry((x, l)).or_insert_with(|| ApuState::new(g, xn, h).with_audit(audit));
        let (q, _) = state.approximate_path_union(g, yn);
        self.q_records.push(QRecord { x: xn, y: yn, level: l, size: q.len(), bound: self.params.q_size_bound(l) });
        let id = self.qtrees.len() as u32;
        for v in q.iter() {
            self.by_node[v as usize].push(id);
        }
        let tree = EsTree::build(g, xn, h, Direction::Forward, Some(q));
        let live = tree.contains(yn);
        self.qtrees.push(QTree { x, y, tree, live });
        self.qidx[x * c + y] = id;
        live
    }

    /// Brings every link up to date with the deletion of `(u, v)`, which must
    /// already be gone from `g`. Returns the pairs that became unlinked.
    pub fn after_deletion(&mut self, g: &Digraph, u: Node, v: Node) -> Vec<(usize, usize)> {
        let k = self.params.k;
        let mut buckets: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k + 1];
        let mut flipped = Vec::new();

        for gi in 0..self.global.len() {
            let a = self.global[gi].center;
            let lost_out = self.global[gi].out.notify_deletion(g, u, v);
            for w in lost_out {
                if let Some(b) = self.center_index(w) {
                    if self.linked(a, b) {
                        self.flip(a, b, &mut buckets, &mut flipped);
                    }
                }
            }
            let lost_in = self.global[gi].inc.notify_deletion(g, u, v);
            for w in lost_in {
                if let Some(b) = self.center_index(w) {
                    if self.global_of[b] == NONE && self.linked(b, a) {
                        self.flip(b, a, &mut buckets, &mut flipped);
                    }
                }
            }
        }

        let (probe, other) =
            if self.by_node[u as usize].len() <= self.by_node[v as usize].len() { (u, v) } else { (v, u) };
        let ids = self.by_node[probe as usize].clone();
        for id in ids {
            let qt = &mut self.qtrees[id as usize];
            if !qt.live || !qt.tree.restrict().is_some_and(|s| s.contains(other)) {
                continue;
            }
            let yn = self.nodes[qt.y];
            let lost = qt.tree.notify_deletion(g, u, v);
            if lost.contains(&yn) {
                qt.live = false;
                let (x, y) = (qt.x, qt.y);
                self.flip(x, y, &mut buckets, &mut flipped);
            }
        }

        for l in (1..k).rev() {
            let mut i = 0;
            while i < buckets[l].len() {
                let (x, y) = buckets[l][i];
                i += 1;
                if !self.compute_q(g, x, y) {
                    self.flip(x, y, &mut buckets, &mut flipped);
                }
            }
            for lower in &buckets[..l] {
                debug_assert!(lower.iter().all(|&(x, y)| self.pair_level(x, y) < l));
            }
        }
        flipped
    }

    fn flip(&mut self, x: usize, y: usize, buckets: &mut [Vec<(usize, usize)>], flipped: &mut Vec<(usize, usize)>) {
        debug_assert!(self.linked(x, y));
        self.row[x].remove(y);
        self.col[y].remove(x);
        self.flips += 1;
        flipped.push((x, y));
        let (lx, ly) = (self.lvl[x], self.lvl[y]);
        if ly > lx {
            // (x, y) was the first leg of (x, w) via y
            let ws: Vec<usize> = self.row[y].ones().filter(|&w| w != x && self.lvl[w] < ly).collect();
            for w in ws {
                self.retire_certifier(x, w, buckets);
            }
        } else if lx > ly {
            // (x, y) was the second leg of (w, y) via x
            let ws: Vec<usize> = self.col[x].ones().filter(|&w| w != y && self.lvl[w] < lx).collect();
            for w in ws {
                self.retire_certifier(w, y, buckets);
            }
        }
    }

    fn retire_certifier(&mut self, x: usize, y: usize, buckets: &mut [Vec<(usize, usize)>]) {
        let c = self.nodes.len();
        let i = x * c + y;
        self.link_ops += 1;
        if self.qidx[i] != NONE {
            return;
        }
        debug_assert!(self.count[i] > 0);
        self.count[i] -= 1;
        if self.count[i] == 0 {
            buckets[self.pair_level(x, y)].push((x, y));
        }
    }

    /// Recomputes every maintained quantity from scratch and compares.
    pub fn check_consistency(&self, g: &Digraph) -> Result<(), String> {
        let c = self.nodes.len();
        let k = self.params.k;
        for gt in &self.global {
            if !gt.out.matches_bfs(g) || !gt.inc.matches_bfs(g) {
                return Err(format!("global tree of {} is stale", self.nodes[gt.center]));
            }
        }
        for q in &self.qtrees {
            if q.live && !q.tree.matches_bfs(g) {
                return Err(format!("tree for ({}, {}) is stale", self.nodes[q.x], self.nodes[q.y]));
            }
        }
        for x in 0..c {
            for y in 0..c {
                if x == y {
                    if self.linked(x, y) {
                        return Err(format!("self link at {}", self.nodes[x]));
                    }
                    continue;
                }
                let (xn, yn) = (self.nodes[x], self.nodes[y]);
                let l = self.pair_level(x, y);
                let q = self.qidx[x * c + y];
                let expect = if l == k {
                    let d = bounded_bfs_quiet(g, xn, self.params.depth(k), Direction::Forward, None);
                    d.contains(yn)
                } else if q != NONE {
                    let qt = &self.qtrees[q as usize];
                    let q_nodes = qt.tree.restrict().expect("q-tree is restricted");
                    let h = self.params.depth(l);
                    if !path_union(g, xn, yn, h).is_subset(q_nodes) {
                        return Err(format!("Q({xn}, {yn}, {l}) misses part of the path union"));
                    }
                    let d = bounded_bfs_quiet(g, xn, h, Direction::Forward, Some(q_nodes));
                    d.contains(yn)
                } else {
                    let cnt = (0..c)
                        .filter(|&z| self.lvl[z] as usize > l && self.linked(x, z) && self.linked(z, y))
                        .count() as u32;
                    if cnt != self.count[x * c + y] {
                        return Err(format!(
                            "certifier count of ({xn}, {yn}) is {} but should be {cnt}",
                            self.count[x * c + y]
                        ));
                    }
                    cnt > 0
                };
                if expect != self.linked(x, y) {
                    return Err(format!(
                        "link ({xn}, {yn}) at level {l} is {} but should be {expect}",
                        self.linked(x, y)
                    ));
                }
            }
        }
        for ((_, l), s) in self.apu_states() {
            s.assert_safety(g).map_err(|e| format!("level {l}: {e}"))?;
        }
        Ok(())
    }

    /// Nodes of `G` that are 1-centers, as a set.
    pub fn center_set(&self) -> NodeSet {
        self.centers.set(1).clone()
    }
}
