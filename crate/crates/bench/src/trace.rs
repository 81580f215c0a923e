//! Deletion traces: generation and the line format.
//!
//! One event per line: `D u v` deletes an arc, `Q x y` asks whether `x`
//! reaches `y`, `QST` asks whether `s` reaches `t`. A replay stream is a
//! graph block followed by trace lines.

use std::fmt::Write as _;

use clap::ValueEnum;
use decreach::graph::bounded_bfs_quiet;
use decreach::{Digraph, Direction, Node};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Delete(Node, Node),
    Query(Node, Node),
    QueryST,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceStyle {
    /// Every arc once, uniformly shuffled.
    FullRandomOrder,
    /// Arcs whose tail is farthest from `s` first; ties shuffled.
    AdversarialLongestPathFirst,
}

impl TraceStyle {
    pub fn name(self) -> &'static str {
        match self {
            TraceStyle::FullRandomOrder => "full-random-order",
            TraceStyle::AdversarialLongestPathFirst => "adversarial-longest-path-first",
        }
    }
}

/// Deletes every arc once, with a `QST` after every `query_every`
/// deletions (never if 0). Uses RNG stream 1 of `seed`.
pub fn generate_trace(g: &Digraph, s: Node, style: TraceStyle, query_every: usize, seed: u64) -> Vec<Event> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut arcs: Vec<(Node, Node)> = g.edges().collect();
    arcs.shuffle(&mut rng);
    if style == TraceStyle::AdversarialLongestPathFirst {
        let depth = bounded_bfs_quiet(g, s, g.node_count() as u32, Direction::Forward, None);
        // unreachable tails go last
        arcs.sort_by_key(|&(u, _)| std::cmp::Reverse(depth.get(u).map_or(-1, |d| d as i64)));
    }
    let mut out = Vec::with_capacity(arcs.len() + arcs.len() / query_every.max(1));
    for (i, (u, v)) in arcs.into_iter().enumerate() {
        out.push(Event::Delete(u, v));
        if query_every > 0 && (i + 1) % query_every == 0 {
            out.push(Event::QueryST);
        }
    }
    out
}

pub fn trace_to_text(events: &[Event]) -> String {
    let mut s = String::new();
    for e in events {
        let _ = match e {
            Event::Delete(u, v) => writeln!(s, "D {u} {v}"),
            Event::Query(x, y) => writeln!(s, "Q {x} {y}"),
            Event::QueryST => writeln!(s, "QST"),
        };
    }
    s
}

pub fn parse_trace(text: &str) -> Result<Vec<Event>, BenchError> {
    parse_events(text.lines().enumerate())
}

fn parse_events<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Vec<Event>, BenchError> {
    let mut out = Vec::new();
    for (i, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| BenchError::Trace { line: i + 1, msg: msg.to_string() };
        let node = |s: &str| s.parse::<Node>().map_err(|e| bad(&e.to_string()));
        match f.as_slice() {
            [] => {}
            ["D", u, v] => out.push(Event::Delete(node(u)?, node(v)?)),
            ["Q", x, y] => out.push(Event::Query(node(x)?, node(y)?)),
            ["QST"] => out.push(Event::QueryST),
            _ => return Err(bad(&format!("unrecognized event `{line}`"))),
        }
    }
    Ok(out)
}

/// Splits a replay stream into its graph block and its events.
pub fn parse_replay(text: &str) -> Result<(Digraph, Vec<Event>), BenchError> {
    let lines: Vec<&str> = text.lines().collect();
    let header = lines.first().ok_or(BenchError::Trace { line: 1, msg: "empty input".into() })?;
    let m: usize = header
        .split_whitespace()
        .nth(1)
        .and_then(|x| x.parse().ok())
        .ok_or(BenchError::Trace { line: 1, msg: "expected header `n m`".into() })?;
    let split = (m + 1).min(lines.len());
    let g = Digraph::parse(&lines[..split].join("\n"))?;
    let events = parse_events(lines[split..].iter().enumerate().map(|(i, l)| (i + split, *l)))?;
    Ok((g, events))
}

/// Checks that every deletion names a live arc at its point in the trace
/// and that nodes are in range.
pub fn validate_trace(g: &Digraph, events: &[Event]) -> Result<(), BenchError> {
    let n = g.node_count();
    let mut h = g.clone();
    for (i, e) in events.iter().enumerate() {
        let bad = |msg: String| BenchError::Trace { line: i + 1, msg };
        match *e {
            Event::Delete(u, v) => {
                h.delete_edge(u, v).map_err(|err| bad(err.to_string()))?;
            }
            Event::Query(x, y) if x as usize >= n || y as usize >= n => {
                return Err(bad(format!("query ({x}, {y}) out of range")));
            }
            _ => {}
        }
    }
    Ok(())
}
