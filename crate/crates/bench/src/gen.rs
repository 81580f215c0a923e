//! Seeded instance generators targeting `m ≈ n^α`.

use clap::ValueEnum;
use decreach::{Digraph, Node};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// Independent arcs with probability `n^α / (n (n - 1))`.
    Er,
    /// Arcs between consecutive layers of about `sqrt(n)` nodes each.
    Layered,
    /// A Hamiltonian path `0 -> 1 -> ... -> n-1` plus dense clusters.
    PathCluster,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::Er => "er",
            Generator::Layered => "layered",
            Generator::PathCluster => "path-cluster",
        }
    }
}

/// `round(n^α)`, capped at `n (n - 1)`.
pub fn target_edges(n: usize, alpha: f64) -> usize {
    let cap = n * n.saturating_sub(1);
    ((n as f64).powf(alpha).round() as usize).min(cap)
}

pub fn generate_graph(kind: Generator, n: usize, alpha: f64, seed: u64) -> Result<Digraph, BenchError> {
    if n < 2 {
        return Err(BenchError::Config(format!("n = {n} must be at least 2")));
    }
    if !(1.0..=2.0).contains(&alpha) {
        return Err(BenchError::Config(format!("alpha = {alpha} must lie in [1, 2]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = target_edges(n, alpha);
    let edges = match kind {
        Generator::Er => erdos_renyi(&mut rng, n, m)?,
        Generator::Layered => layered(&mut rng, n, m),
        Generator::PathCluster => path_cluster(&mut rng, n, m),
    };
    Ok(Digraph::new(n, edges)?)
}

const ER_ATTEMPTS: usize = 1000;

/// Binomial arcs, redrawn until the count is within 10% of `m`.
fn erdos_renyi(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<Vec<(Node, Node)>, BenchError> {
    let p = m as f64 / (n * (n - 1)) as f64;
    let slack = m as f64 * 0.1;
    for _ in 0..ER_ATTEMPTS {
        let e: Vec<(Node, Node)> = (0..n as Node)
            .flat_map(|u| (0..n as Node).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v)
            .filter(|_| rng.gen_bool(p))
            .collect();
        if (e.len() as f64 - m as f64).abs() <= slack {
            return Ok(e);
        }
    }
    Err(BenchError::Config(format!("no binomial draw within 10% of {m} arcs after {ER_ATTEMPTS} attempts")))
}

/// Picks `m` distinct items from `primary`, topping up from `fallback`.
fn pick(rng: &mut ChaCha8Rng, primary: Vec<(Node, Node)>, fallback: Vec<(Node, Node)>, m: usize) -> Vec<(Node, Node)> {
    let take = m.min(primary.len());
    let mut out: Vec<_> = index::sample(rng, primary.len(), take).into_iter().map(|i| primary[i]).collect();
    let rest = (m - take).min(fallback.len());
    out.extend(index::sample(rng, fallback.len(), rest).into_iter().map(|i| fallback[i]));
    out
}

fn layered(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(Node, Node)> {
    let layers = ((n as f64).sqrt().round() as usize).max(2);
    let layer = |v: Node| v as usize * layers / n;
    let mut adjacent = Vec::new();
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    for u in 0..n as Node {
        for v in 0..n as Node {
            let (lu, lv) = (layer(u), layer(v));
            if lv == lu + 1 {
                adjacent.push((u, v));
            } else if lv > lu + 1 || (lv == lu && u != v) {
                forward.push((u, v));
            } else if u != v {
                backward.push((u, v));
            }
        }
    }
    let mut e = pick(rng, adjacent, forward, m);
    if e.len() < m {
        let need = m - e.len();
        e.extend(index::sample(rng, backward.len(), need.min(backward.len())).into_iter().map(|i| backward[i]));
    }
    e
}

fn path_cluster(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(Node, Node)> {
    let size = ((n as f64).sqrt().round() as usize).max(2);
    let cluster = |v: Node| v as usize / size;
    let mut e: Vec<(Node, Node)> = (0..n as Node - 1).map(|v| (v, v + 1)).take(m).collect();
    let mut inside = Vec::new();
    let mut across = Vec::new();
    for u in 0..n as Node {
        for v in 0..n as Node {
            if u == v || v == u + 1 {
                continue;
            }
            if cluster(u) == cluster(v) {
                inside.push((u, v));
            } else {
                across.push((u, v));
            }
        }
    }
    let rest = m - e.len();
    e.extend(pick(rng, inside, across, rest));
    e.shuffle(rng);
    e
}
