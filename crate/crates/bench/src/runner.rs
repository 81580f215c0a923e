//! Trace replay through the engine or a baseline, with metrics.

use std::collections::BTreeMap;
use std::time::Instant;

use clap::ValueEnum;
use decreach::graph::bounded_bfs;
use decreach::oracle::{static_reachable, EsBaseline, CLOSURE_MAX_N};
use decreach::{Digraph, Direction, Engine, EngineConfig, Node, ParamSource, Preset};
use serde::{Deserialize, Serialize};

use crate::trace::Event;
use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    /// The hierarchical center engine.
    Hier,
    /// One depth-`n` ES-tree per query source.
    EsBaseline,
    /// A fresh BFS per query.
    Static,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Hier => "hier",
            Algo::EsBaseline => "es-baseline",
            Algo::Static => "static",
        }
    }
}

/// Parameter overrides for the engine. With none set, the automatic preset
/// is used.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamOverrides {
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub k: Option<usize>,
    pub c_seq: Option<Vec<f64>>,
}

impl ParamOverrides {
    /// Turns the overrides into a parameter source. An explicit `k` spreads
    /// `k` densities geometrically from `c` down to `b`.
    pub fn source(&self, n: usize, m: usize) -> Result<ParamSource, BenchError> {
        if let Some(seq) = &self.c_seq {
            return Ok(ParamSource::Explicit(seq.clone()));
        }
        let (b, c) = match (self.b, self.c) {
            (None, None) if self.k.is_none() => return Ok(ParamSource::Preset(Preset::Auto)),
            (b, c) => {
                let (pb, pc) = Preset::Auto.values(n, m);
                (b.unwrap_or(pb), c.unwrap_or(pc))
            }
        };
        match self.k {
            None => Ok(ParamSource::Tuned { b, c }),
            Some(0) => Err(BenchError::Config("k must be at least 1".into())),
            Some(1) => Ok(ParamSource::Explicit(vec![b])),
            Some(k) => {
                let r = (b / c).powf(1.0 / (k - 1) as f64);
                let mut seq: Vec<f64> = (0..k).map(|i| c * r.powi(i as i32)).collect();
                seq[k - 1] = b;
                Ok(ParamSource::Explicit(seq))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub algo: Algo,
    pub s: Node,
    pub t: Node,
    pub params: ParamOverrides,
    pub a: f64,
    pub seed: u64,
    pub extra_centers: Vec<Node>,
    pub audit: bool,
    /// Compare every answer with a BFS (only when `n <= 300`).
    pub check: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algo: Algo::Hier,
            s: 0,
            t: 0,
            params: ParamOverrides::default(),
            a: 2.0,
            seed: 0,
            extra_centers: Vec::new(),
            audit: false,
            check: true,
        }
    }
}

/// Flat metrics row; the CSV header follows field order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub label: String,
    pub algo: String,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub seed: u64,
    pub levels: usize,
    pub centers: usize,
    pub deletions: u64,
    pub queries: u64,
    pub global_es: u64,
    pub q_es: u64,
    pub q_build: u64,
    pub apu: u64,
    pub link_ops: u64,
    pub closure_ops: u64,
    pub graph_scans: u64,
    /// `graph_scans + link_ops + closure_ops`; the quantity fitted by `report`.
    pub work: u64,
    pub q_computations: u64,
    pub q_over_bound: u64,
    pub link_flips: u64,
    pub checked: u64,
    pub mismatches: u64,
    pub wall_ms: f64,
}

/// Everything a run produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub record: Record,
    pub answers: Vec<bool>,
    /// `|Q| / (n / c_{l+1})`, bucketed.
    pub q_histogram: BTreeMap<String, u64>,
    pub q_sizes: Vec<(usize, usize, f64)>,
}

const HIST_EDGES: [f64; 5] = [0.125, 0.25, 0.5, 1.0, 2.0];

pub fn histogram_bucket(ratio: f64) -> String {
    let mut lo = 0.0;
    for &hi in &HIST_EDGES {
        if ratio <= hi {
            return format!("({lo},{hi}]");
        }
        lo = hi;
    }
    format!("({lo},inf)")
}

/// Replays `events` on `g`. `alpha` and `label` are copied into the record.
pub fn run(g: &Digraph, events: &[Event], cfg: &RunConfig, alpha: f64, label: &str) -> Result<RunOutput, BenchError> {
    let n = g.node_count();
    let check = cfg.check && n <= CLOSURE_MAX_N;
    let mut oracle = g.clone();
    let mut rec = Record {
        label: label.to_string(),
        algo: cfg.algo.name().to_string(),
        n,
        m: g.edge_count(),
        alpha,
        seed: cfg.seed,
        ..Record::default()
    };
    let mut answers = Vec::new();
    let mut q_histogram = BTreeMap::new();
    let mut q_sizes = Vec::new();
    let start = Instant::now();

    let mut answer = |x: Node, y: Node, got: bool, oracle: &Digraph, rec: &mut Record| {
        answers.push(got);
        rec.queries += 1;
        if check {
            rec.checked += 1;
            if static_reachable(oracle, x, y) != got {
                rec.mismatches += 1;
            }
        }
    };

    match cfg.algo {
        Algo::Hier => {
            let ecfg = EngineConfig {
                params: cfg.params.source(n, g.edge_count())?,
                a: cfg.a,
                seed: cfg.seed,
                extra_centers: cfg.extra_centers.clone(),
                audit: cfg.audit,
            };
            let mut e = Engine::new(g.clone(), cfg.s, cfg.t, &ecfg)?;
            rec.levels = e.params().k;
            rec.centers = e.centers().len();
            for ev in events {
                match *ev {
                    Event::Delete(u, v) => {
                        e.delete_edge(u, v)?;
                        oracle.delete_edge(u, v)?;
                        rec.deletions += 1;
                    }
                    Event::Query(x, y) => answer(x, y, e.query(x, y)?, &oracle, &mut rec),
                    Event::QueryST => answer(cfg.s, cfg.t, e.query_st(), &oracle, &mut rec),
                }
            }
            let mt = e.metrics();
            rec.global_es = mt.global_es;
            rec.q_es = mt.q_es;
            rec.q_build = mt.q_build;
            rec.apu = mt.apu;
            rec.link_ops = mt.link_ops;
            rec.closure_ops = mt.closure_ops;
            rec.graph_scans = mt.graph_scans;
            rec.q_computations = mt.q_computations;
            rec.link_flips = mt.link_flips;
            for q in e.q_records() {
                rec.q_over_bound += q.violates_bound() as u64;
                *q_histogram.entry(histogram_bucket(q.size as f64 / q.bound)).or_insert(0) += 1;
                q_sizes.push((q.level, q.size, q.bound));
            }
        }
        Algo::EsBaseline => {
            let mut h = g.clone();
            let base = h.scan_count();
            let mut sources: Vec<Node> = events
                .iter()
                .filter_map(|e| match *e {
                    Event::Query(x, _) => Some(x),
                    Event::QueryST => Some(cfg.s),
                    Event::Delete(..) => None,
                })
                .collect();
            sources.sort_unstable();
            sources.dedup();
            for &x in &sources {
                if x as usize >= n {
                    return Err(BenchError::Config(format!("query source {x} out of range")));
                }
            }
            let mut trees: Vec<(Node, EsBaseline)> = sources.iter().map(|&x| (x, EsBaseline::new(&h, x))).collect();
            let find = |trees: &[(Node, EsBaseline)], x: Node| {
                trees.iter().position(|(r, _)| *r == x).expect("source tracked")
            };
            for ev in events {
                match *ev {
                    Event::Delete(u, v) => {
                        h.delete_edge(u, v)?;
                        oracle.delete_edge(u, v)?;
                        for (_, t) in trees.iter_mut() {
                            t.notify_deletion(&h, u, v);
                        }
                        rec.deletions += 1;
                    }
                    Event::Query(x, y) => {
                        let got = trees[find(&trees, x)].1.reachable(y);
                        answer(x, y, got, &oracle, &mut rec);
                    }
                    Event::QueryST => {
                        let got = trees[find(&trees, cfg.s)].1.reachable(cfg.t);
                        answer(cfg.s, cfg.t, got, &oracle, &mut rec);
                    }
                }
            }
            rec.global_es = trees.iter().map(|(_, t)| t.work()).sum();
            rec.graph_scans = h.scan_count() - base;
            rec.centers = sources.len();
        }
        Algo::Static => {
            let mut h = g.clone();
            let base = h.scan_count();
            let bfs = |h: &Digraph, x: Node, y: Node| {
                x == y || bounded_bfs(h, x, n as u32, Direction::Forward, None).contains(y)
            };
            for ev in events {
                match *ev {
                    Event::Delete(u, v) => {
                        h.delete_edge(u, v)?;
                        oracle.delete_edge(u, v)?;
                        rec.deletions += 1;
                    }
                    Event::Query(x, y) => answer(x, y, bfs(&h, x, y), &oracle, &mut rec),
                    Event::QueryST => answer(cfg.s, cfg.t, bfs(&h, cfg.s, cfg.t), &oracle, &mut rec),
                }
            }
            rec.graph_scans = h.scan_count() - base;
        }
    }
    rec.work = rec.graph_scans + rec.link_ops + rec.closure_ops;
    rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(RunOutput { record: rec, answers, q_histogram, q_sizes })
}

pub fn answers_to_text(answers: &[bool]) -> String {
    answers.iter().map(|&a| if a { "1\n" } else { "0\n" }).collect()
}
