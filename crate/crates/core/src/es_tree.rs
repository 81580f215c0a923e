//! Even-Shiloach tree: exact bounded-depth distances from (or to) a root
//! under edge deletions, with total update work O(m h).
//!
//! Instead of parent pointers with scan cursors, each node keeps a *support
//! count*: the number of live tree-predecessors sitting exactly one level
//! above it. A node whose support drops to zero rises one level, recounts its
//! support, and adjusts the counts of its tree-successors. Every rise costs
//! one pass over the node's adjacency and a node rises at most `h + 1` times,
//! which gives the O(m h) bound without relying on adjacency order.

use std::collections::{HashMap, VecDeque};

use crate::graph::{bounded_bfs_quiet, Digraph, Direction, EdgeId, Node, NodeSet};

/// Local adjacency of an induced subgraph, in tree-local indices. Entries
/// are never removed; dead edges are skipped by checking [`Digraph::is_alive`].
#[derive(Clone, Debug)]
struct Restriction {
    nodes: NodeSet,
    local: HashMap<Node, u32>,
    global: Vec<Node>,
    succ: Vec<Vec<(u32, EdgeId)>>,
    pred: Vec<Vec<(u32, EdgeId)>>,
}

#[derive(Clone, Debug)]
pub struct EsTree {
    root: Node,
    depth: u32,
    dir: Direction,
    restriction: Option<Restriction>,
    level: Vec<u32>,
    support: Vec<u32>,
    size: usize,
    work: u64,
    build_scans: u64,
    scope: (usize, usize),
    queue: VecDeque<u32>,
    scratch: Vec<u32>,
}

#[derive(Clone, Copy)]
enum Side {
    /// Tree successors (children direction).
    Succ,
    /// Tree predecessors (parent candidates).
    Pred,
}

impl EsTree {
    /// Builds the tree over `G` (or `G[restrict]`) to depth `depth`.
    ///
    /// For a restricted tree the induced adjacency is materialized once; that
    /// cost is reported by [`EsTree::build_scans`] and kept out of
    /// [`EsTree::work`]. A root outside `restrict` yields an empty tree.
    pub fn build(g: &Digraph, root: Node, depth: u32, dir: Direction, restrict: Option<NodeSet>) -> EsTree {
        let mut build_scans = 0u64;
        let restriction = restrict.map(|nodes| {
            let global: Vec<Node> = nodes.iter().collect();
            let local: HashMap<Node, u32> = global.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
            let mut succ = vec![Vec::new(); global.len()];
            let mut pred = vec![Vec::new(); global.len()];
            for (i, &v) in global.iter().enumerate() {
                for &(w, e) in g.out_edges(v) {
                    build_scans += 1;
                    if let Some(&j) = local.get(&w) {
                        // edge v -> w
                        let (from, to) = match dir {
                            Direction::Forward => (i as u32, j),
                            Direction::Reverse => (j, i as u32),
                        };
                        succ[from as usize].push((to, e));
                        pred[to as usize].push((from, e));
                    }
                }
            }
            Restriction { nodes, local, global, succ, pred }
        });
        g.charge_scans(build_scans);

        let slots = restriction.as_ref().map_or(g.node_count(), |r| r.global.len());
        let scope_edges = restriction.as_ref().map_or(g.edge_count(), |r| r.succ.iter().map(Vec::len).sum());
        let mut t = EsTree {
            root,
            depth,
            dir,
            restriction,
            level: vec![depth + 1; slots],
            support: vec![0; slots],
            size: 0,
            work: 0,
            build_scans,
            scope: (slots, scope_edges),
            queue: VecDeque::new(),
            scratch: Vec::new(),
        };
        t.initial_bfs(g);
        t
    }

    fn initial_bfs(&mut self, g: &Digraph) {
        let Some(r) = self.to_local(self.root) else {
            return;
        };
        self.level[r as usize] = 0;
        self.size = 1;
        let mut order = vec![r];
        let mut head = 0;
        let mut buf = std::mem::take(&mut self.scratch);
        while head < order.len() {
            let v = order[head];
            head += 1;
            let d = self.level[v as usize];
            if d >= self.depth {
                continue;
            }
            buf.clear();
            self.work += self.collect(g, v, Side::Succ, &mut buf);
            for &w in &buf {
                let lw = self.level[w as usize];
                if lw > self.depth {
                    self.level[w as usize] = d + 1;
                    self.support[w as usize] = 1;
                    self.size += 1;
                    order.push(w);
                } else if lw == d + 1 {
                    self.support[w as usize] += 1;
                }
            }
        }
        self.scratch = buf;
        g.charge_scans(self.work);
    }

    fn to_local(&self, v: Node) -> Option<u32> {
        match &self.restriction {
            Some(r) => r.local.get(&v).copied(),
            None => ((v as usize) < self.level.len()).then_some(v),
        }
    }

    fn to_global(&self, i: u32) -> Node {
        match &self.restriction {
            Some(r) => r.global[i as usize],
            None => i,
        }
    }

    /// Appends live neighbors of local node `v` on `side` to `buf`; returns
    /// the number of adjacency entries examined.
    fn collect(&self, g: &Digraph, v: u32, side: Side, buf: &mut Vec<u32>) -> u64 {
        match &self.restriction {
            Some(r) => {
                let list = match side {
                    Side::Succ => &r.succ[v as usize],
                    Side::Pred => &r.pred[v as usize],
                };
                buf.extend(list.iter().filter(|&&(_, e)| g.is_alive(e)).map(|&(w, _)| w));
                list.len() as u64
            }
            None => {
                let dir = match side {
                    Side::Succ => self.dir,
                    Side::Pred => self.dir.flip(),
                };
                let list = g.neighbors(v, dir);
                buf.extend(list.iter().map(|&(w, _)| w));
                list.len() as u64
            }
        }
    }

    /// Processes the deletion of `(u, v)`, which must already be gone from
    /// `g`. Returns the nodes whose distance just exceeded the depth bound.
    pub fn notify_deletion(&mut self, g: &Digraph, u: Node, v: Node) -> Vec<Node> {
        let (a, b) = match self.dir {
            Direction::Forward => (u, v),
            Direction::Reverse => (v, u),
        };
        let (Some(a), Some(b)) = (self.to_local(a), self.to_local(b)) else {
            return Vec::new();
        };
        let (la, lb) = (self.level[a as usize], self.level[b as usize]);
        if la > self.depth || lb > self.depth || la + 1 != lb {
            return Vec::new();
        }
        self.support[b as usize] -= 1;
        if self.support[b as usize] > 0 {
            return Vec::new();
        }
        self.queue.push_back(b);
        let before = self.work;
        let evicted = self.settle(g);
        g.charge_scans(self.work - before);
        evicted
    }

    fn settle(&mut self, g: &Digraph) -> Vec<Node> {
        let mut evicted = Vec::new();
        let mut buf = std::mem::take(&mut self.scratch);
        while let Some(b) = self.queue.pop_front() {
            let bi = b as usize;
            if self.support[bi] > 0 || self.level[bi] > self.depth {
                continue;
            }
            loop {
                let old = self.level[bi];
                self.level[bi] = old + 1;

                buf.clear();
                self.work += self.collect(g, b, Side::Succ, &mut buf);
                for &w in &buf {
                    let lw = self.level[w as usize];
                    if lw > self.depth {
                        continue;
                    }
                    if lw == old + 1 {
                        self.support[w as usize] -= 1;
                        if self.support[w as usize] == 0 {
                            self.queue.push_back(w);
                        }
                    } else if lw == old + 2 {
                        self.support[w as usize] += 1;
                    }
                }

                if self.level[bi] > self.depth {
                    self.support[bi] = 0;
                    self.size -= 1;
                    evicted.push(self.to_global(b));
                    break;
                }

                buf.clear();
                self.work += self.collect(g, b, Side::Pred, &mut buf);
                let cnt = buf.iter().filter(|&&p| self.level[p as usize] == old).count();
                self.support[bi] = cnt as u32;
                if cnt > 0 {
                    break;
                }
            }
        }
        self.scratch = buf;
        evicted
    }

    pub fn root(&self) -> Node {
        self.root
    }

    pub fn depth_bound(&self) -> u32 {
        self.depth
    }

    pub fn orientation(&self) -> Direction {
        self.dir
    }

    pub fn restrict(&self) -> Option<&NodeSet> {
        self.restriction.as_ref().map(|r| &r.nodes)
    }

    pub fn contains(&self, v: Node) -> bool {
        self.distance(v).is_some()
    }

    pub fn distance(&self, v: Node) -> Option<u32> {
        let i = self.to_local(v)?;
        let d = self.level[i as usize];
        (d <= self.depth).then_some(d)
    }

    /// Number of nodes currently in the tree.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// `(node, level)` for every node currently in the tree.
    pub fn levels(&self) -> Vec<(Node, u32)> {
        (0..self.level.len() as u32)
            .filter(|&i| self.level[i as usize] <= self.depth)
            .map(|i| (self.to_global(i), self.level[i as usize]))
            .collect()
    }

    /// A tree parent of `v`: some live predecessor one level closer to the
    /// root. Computed on demand; not charged to [`EsTree::work`].
    pub fn parent(&self, g: &Digraph, v: Node) -> Option<Node> {
        let i = self.to_local(v)?;
        let d = self.level[i as usize];
        if d == 0 || d > self.depth {
            return None;
        }
        let mut buf = Vec::new();
        self.collect(g, i, Side::Pred, &mut buf);
        buf.into_iter().find(|&p| self.level[p as usize] + 1 == d).map(|p| self.to_global(p))
    }

    /// Adjacency entries scanned by the initial search and all updates.
    pub fn work(&self) -> u64 {
        self.work
    }

    /// Entries scanned to materialize the induced adjacency (restricted trees).
    pub fn build_scans(&self) -> u64 {
        self.build_scans
    }

    /// `(|V|, |E|)` of the graph the tree was built on.
    pub fn scope(&self) -> (usize, usize) {
        self.scope
    }

    /// Cross-checks the levels against a fresh bounded BFS.
    pub fn matches_bfs(&self, g: &Digraph) -> bool {
        let fresh = bounded_bfs_quiet(g, self.root, self.depth, self.dir, self.restrict());
        let mut mine = self.levels();
        mine.sort_unstable();
        mine == fresh.sorted()
    }
}
