//! Acceptance suite. Prints one `PASS`/`FAIL`/`INFO` line per criterion and
//! exits non-zero if any gated criterion fails.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::process::ExitCode;
use std::time::Instant;

use decreach::apu::{approximation_horizon, ApuState};
use decreach::hierarchy::hitting_set_check;
use decreach::oracle::{full_closure, static_reachable};
use decreach::path_union::path_union;
use decreach::{Digraph, Engine, EngineConfig, Node, ParamSource, Preset};
use decreach_bench::gen::{generate_graph, Generator};
use decreach_bench::report::summarize;
use decreach_bench::runner::{histogram_bucket, run, Algo, RunConfig};
use decreach_bench::trace::{generate_trace, Event, TraceStyle};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHAS: [f64; 3] = [1.2, 1.5, 1.8];
const GENERATORS: [Generator; 3] = [Generator::Er, Generator::Layered, Generator::PathCluster];
const STYLES: [TraceStyle; 2] = [TraceStyle::FullRandomOrder, TraceStyle::AdversarialLongestPathFirst];

#[derive(Clone, Copy, Debug, PartialEq)]
enum Variant {
    /// Automatic preset.
    Default,
    /// `[n, 3, 1]`: every node a 1-center, three levels.
    Deep,
    /// `C_1` sampled with probability about 2/3.
    SparseFirst,
}

impl Variant {
    fn source(self, n: usize) -> ParamSource {
        match self {
            Variant::Default => ParamSource::Preset(Preset::Auto),
            Variant::Deep => ParamSource::Explicit(vec![n as f64, 3.0, 1.0]),
            Variant::SparseFirst => ParamSource::Explicit(vec![n as f64 / (3.0 * (n as f64).ln()), 2.0, 1.0]),
        }
    }
}

#[derive(Clone, Debug)]
struct Instance {
    gen: Generator,
    n: usize,
    alpha: f64,
    style: TraceStyle,
    variant: Variant,
    seed: u64,
}

/// Everything measured on one engine sweep.
#[derive(Debug, Default)]
struct Sweep {
    centers: usize,
    deletions: usize,
    checked: u64,
    mismatches: u64,
    digest: u64,
    counters: String,
    link_regrowth: Vec<String>,
    safety: Vec<String>,
    es_over: Vec<String>,
    es_trees: usize,
    apu_over: Vec<String>,
    apu_states: usize,
    apu_calls: u64,
    exit_over: Vec<String>,
    max_exit: u32,
    q: Vec<(usize, f64)>,
}

/// Replays a full deletion sweep through the engine. With `all_pairs`, every
/// ordered 1-center pair is compared with a fresh closure after every
/// deletion; otherwise only the `s`-`t` answer is compared with a BFS.
/// APU safety is checked every `safety_every` deletions and at the end.
fn sweep(inst: &Instance, all_pairs: bool, safety_every: usize) -> Sweep {
    let g = generate_graph(inst.gen, inst.n, inst.alpha, inst.seed).unwrap();
    let events = generate_trace(&g, 0, inst.style, 0, inst.seed);
    let t = inst.n as Node - 1;
    let cfg =
        EngineConfig { params: inst.variant.source(inst.n), seed: inst.seed, audit: true, ..EngineConfig::default() };
    let mut e = Engine::new(g, 0, t, &cfg).unwrap();
    let centers = e.centers().to_vec();
    let mut out = Sweep { centers: centers.len(), ..Sweep::default() };
    let mut hasher = DefaultHasher::new();
    let mut linked: Vec<(usize, usize)> = e.links().linked_pairs();
    linked.sort_unstable();

    for (step, ev) in events.iter().enumerate() {
        let Event::Delete(u, v) = *ev else { unreachable!("sweeps hold deletions only") };
        e.delete_edge(u, v).unwrap();
        out.deletions += 1;
        if all_pairs {
            let closure = full_closure(e.graph()).unwrap();
            for &x in &centers {
                for &y in &centers {
                    let got = e.query(x, y).unwrap();
                    got.hash(&mut hasher);
                    out.checked += 1;
                    out.mismatches += (got != closure[x as usize].contains(y as usize)) as u64;
                }
            }
        } else {
            let got = e.query_st();
            got.hash(&mut hasher);
            out.checked += 1;
            out.mismatches += (got != static_reachable(e.graph(), 0, t)) as u64;
        }

        let mut now = e.links().linked_pairs();
        now.sort_unstable();
        if let Some(p) = now.iter().find(|p| linked.binary_search(p).is_err()) {
            out.link_regrowth.push(format!("pair {p:?} relinked at deletion {step}"));
        }
        linked = now;

        if safety_every > 0 && step % safety_every == 0 {
            check_apu_safety(&e, &mut out.safety);
        }
    }
    check_apu_safety(&e, &mut out.safety);

    for tw in e.links().tree_work() {
        out.es_trees += 1;
        if tw.work > tw.budget() {
            out.es_over.push(format!("tree at {} ({:?}): {} > {}", tw.root, tw.dir, tw.work, tw.budget()));
        }
    }
    for ((x, l), s) in e.links().apu_states() {
        out.apu_states += 1;
        out.apu_calls += s.calls();
        out.max_exit = out.max_exit.max(s.max_exit_index());
        if s.scans() > s.lifetime_budget() {
            out.apu_over.push(format!("state ({x}, {l}): {} > {}", s.scans(), s.lifetime_budget()));
        }
        if s.max_exit_index() > s.ceil_log_m() + 1 {
            out.exit_over.push(format!("state ({x}, {l}): i* = {} > {}", s.max_exit_index(), s.ceil_log_m() + 1));
        }
    }
    out.q = e.q_records().iter().map(|q| (q.size, q.bound)).collect();
    out.counters = format!("{:?}", e.metrics());
    out.digest = hasher.finish();
    out
}

fn check_apu_safety(e: &Engine, errs: &mut Vec<String>) {
    for ((x, l), s) in e.links().apu_states() {
        if let Err(msg) = s.assert_safety(e.graph()) {
            errs.push(format!("state ({x}, {l}): {msg}"));
        }
    }
}

fn oracle_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    let mut seed = 1000;
    for (ai, &alpha) in ALPHAS.iter().enumerate() {
        let ns: [usize; 2] = match ai {
            0 => [150, 200],
            1 => [80, 100],
            _ => [50, 60],
        };
        for (gi, &gen) in GENERATORS.iter().enumerate() {
            for (si, &style) in STYLES.iter().enumerate() {
                for variant in [Variant::Default, Variant::Deep, Variant::SparseFirst] {
                    seed += 1;
                    let n = ns[(gi + si) % 2];
                    out.push(Instance { gen, n, alpha, style, variant, seed });
                }
            }
        }
    }
    out
}

fn default_dense_instances() -> Vec<Instance> {
    GENERATORS
        .iter()
        .zip(0u64..)
        .map(|(&gen, i)| Instance {
            gen,
            n: 200,
            alpha: 1.8,
            style: STYLES[i as usize % 2],
            variant: Variant::Default,
            seed: 2000 + i,
        })
        .collect()
}

struct Line {
    tag: &'static str,
    text: String,
}

fn gate(ok: bool, id: u32, name: &str, detail: String) -> Line {
    Line { tag: if ok { "PASS" } else { "FAIL" }, text: format!("{id} {name}: {detail}") }
}

fn first(v: &[String]) -> String {
    v.first().map_or(String::new(), |s| format!("; first: {s}"))
}

/// Fuzzed approximate path-union calls checked against exact path unions.
struct ApuFuzz {
    calls: u64,
    states: usize,
    sandwich_fail: Vec<String>,
    safety_fail: Vec<String>,
    budget_fail: Vec<String>,
    exit_fail: Vec<String>,
    max_exit_seen: u32,
}

fn apu_fuzz(min_calls: u64) -> ApuFuzz {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut f = ApuFuzz {
        calls: 0,
        states: 0,
        sandwich_fail: Vec::new(),
        safety_fail: Vec::new(),
        budget_fail: Vec::new(),
        exit_fail: Vec::new(),
        max_exit_seen: 0,
    };
    let mut round = 0u64;
    while f.calls < min_calls {
        round += 1;
        let n = rng.gen_range(8..48);
        let m = rng.gen_range(n..(4 * n).min(n * (n - 1)));
        let mut pairs: Vec<(Node, Node)> =
            (0..n as Node).flat_map(|u| (0..n as Node).map(move |v| (u, v))).filter(|(u, v)| u != v).collect();
        pairs.shuffle(&mut rng);
        pairs.truncate(m);
        let mut g = Digraph::new(n, pairs).unwrap();
        let mut states: Vec<ApuState> = (0..3)
            .map(|_| ApuState::new(&g, rng.gen_range(0..n) as Node, rng.gen_range(1..5)).with_audit(true))
            .collect();
        let mut order: Vec<(Node, Node)> = g.edges().collect();
        order.shuffle(&mut rng);
        for (step, (u, v)) in order.into_iter().enumerate() {
            g.delete_edge(u, v).unwrap();
            for s in states.iter_mut() {
                s.notify_deletion(u, v);
                if let Err(msg) = s.assert_safety(&g) {
                    f.safety_fail.push(format!("round {round} step {step}: {msg}"));
                }
            }
            if step % 2 == 1 {
                continue;
            }
            for s in states.iter_mut() {
                let y = rng.gen_range(0..n) as Node;
                let x = s.source();
                let h = s.depth();
                let (set, st) = s.approximate_path_union(&g, y);
                f.calls += 1;
                f.max_exit_seen = f.max_exit_seen.max(st.exit_index);
                let inner = path_union(&g, x, y, h);
                let outer = path_union(&g, x, y, approximation_horizon(g.edge_count(), h));
                if !inner.is_subset(&set) || !set.is_subset(&outer) {
                    f.sandwich_fail.push(format!("round {round} step {step}: x={x} y={y} h={h}"));
                }
                if st.exit_index > s.ceil_log_m() + 1 {
                    f.exit_fail.push(format!("round {round}: i* = {} > {}", st.exit_index, s.ceil_log_m() + 1));
                }
                if let Err(msg) = s.assert_safety(&g) {
                    f.safety_fail.push(format!("round {round} step {step}: {msg}"));
                }
            }
        }
        f.states += states.len();
        for s in &states {
            if s.scans() > s.lifetime_budget() {
                f.budget_fail.push(format!("round {round}: {} > {}", s.scans(), s.lifetime_budget()));
            }
        }
    }
    f
}

/// Misses over `trials` draws of `k` random `q`-subsets of `0..t`.
fn hitting_trials(t: usize, q: usize, k: usize, a: f64, trials: usize, seed: u64) -> (usize, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = (a * ((k * t) as f64).ln() / q as f64).min(1.0);
    let misses = (0..trials)
        .filter(|_| {
            let sets: Vec<Vec<usize>> = (0..k).map(|_| index::sample(&mut rng, t, q).into_vec()).collect();
            !hitting_set_check(t, &sets, p, &mut rng)
        })
        .count();
    (misses, p)
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut lines: Vec<Line> = Vec::new();

    // engine sweeps shared by several criteria
    let t1 = Instant::now();
    let oracle_runs: Vec<(Instance, Sweep)> = oracle_instances()
        .into_iter()
        .map(|i| {
            let s = sweep(&i, true, 1);
            (i, s)
        })
        .collect();
    let oracle_secs = t1.elapsed().as_secs_f64();
    let dense_runs: Vec<(Instance, Sweep)> = default_dense_instances()
        .into_iter()
        .map(|i| {
            let s = sweep(&i, false, 500);
            (i, s)
        })
        .collect();
    let all_runs = || oracle_runs.iter().chain(&dense_runs);

    // 1
    let runs = oracle_runs.len();
    let deletions: usize = oracle_runs.iter().map(|(_, s)| s.deletions).sum();
    let checked: u64 = oracle_runs.iter().map(|(_, s)| s.checked).sum();
    let bad: Vec<String> = oracle_runs
        .iter()
        .filter(|(_, s)| s.mismatches > 0)
        .map(|(i, s)| {
            format!(
                "{:?} n={} alpha={} {:?} seed={}: {} mismatches",
                i.gen, i.n, i.alpha, i.variant, i.seed, s.mismatches
            )
        })
        .collect();
    let st_checked: u64 = dense_runs.iter().map(|(_, s)| s.checked).sum();
    let st_bad: u64 = dense_runs.iter().map(|(_, s)| s.mismatches).sum();
    let c_min = oracle_runs.iter().map(|(_, s)| s.centers).min().unwrap_or(0);
    let c_max = oracle_runs.iter().map(|(_, s)| s.centers).max().unwrap_or(0);
    let in_range = oracle_runs.iter().all(|(i, _)| (50..=200).contains(&i.n));
    lines.push(gate(
        runs >= 50 && in_range && bad.is_empty() && st_bad == 0 && oracle_secs < 300.0,
        1,
        "oracle equivalence",
        format!(
            "{runs} sweeps, |C_1| in [{c_min}, {c_max}], {deletions} deletions, {checked} center-pair answers, {} disagreements; {st_checked} extra s-t answers, {st_bad} disagreements; {oracle_secs:.1}s{}",
            bad.len(),
            first(&bad)
        ),
    ));

    // 2, 3, 5 (fuzz part)
    let fz = apu_fuzz(1000);
    let engine_apu_calls: u64 = all_runs().map(|(_, s)| s.apu_calls).sum();
    lines.push(gate(
        fz.calls >= 1000 && fz.sandwich_fail.is_empty(),
        2,
        "sandwich",
        format!(
            "{} fuzzed calls, {} outside the sandwich{}",
            fz.calls,
            fz.sandwich_fail.len(),
            first(&fz.sandwich_fail)
        ),
    ));

    let engine_safety: Vec<String> = all_runs().flat_map(|(_, s)| s.safety.clone()).collect();
    lines.push(gate(
        fz.safety_fail.is_empty() && engine_safety.is_empty(),
        3,
        "removal safety",
        format!(
            "{} fuzz violations, {} engine violations over {} engine calls{}{}",
            fz.safety_fail.len(),
            engine_safety.len(),
            engine_apu_calls,
            first(&fz.safety_fail),
            first(&engine_safety)
        ),
    ));

    // 4
    let es_trees: usize = all_runs().map(|(_, s)| s.es_trees).sum();
    let es_over: Vec<String> = all_runs().flat_map(|(_, s)| s.es_over.clone()).collect();
    let apu_states: usize = all_runs().map(|(_, s)| s.apu_states).sum();
    let apu_over: Vec<String> =
        all_runs().flat_map(|(_, s)| s.apu_over.clone()).chain(fz.budget_fail.clone()).collect();
    lines.push(gate(
        es_over.is_empty() && apu_over.is_empty(),
        4,
        "charging bounds",
        format!(
            "(a) {es_trees} ES-trees, {} over 10(|E|+|V|)h; (b) {} states, {} over 8(m+sum|E(F)|+n){}{}",
            es_over.len(),
            apu_states + fz.states,
            apu_over.len(),
            first(&es_over),
            first(&apu_over)
        ),
    ));

    // 5
    let exit_over: Vec<String> =
        all_runs().flat_map(|(_, s)| s.exit_over.clone()).chain(fz.exit_fail.clone()).collect();
    lines.push(gate(
        exit_over.is_empty(),
        5,
        "loop bound",
        format!(
            "{} calls, largest i* {}, {} over ceil(log2 m)+1{}",
            fz.calls + engine_apu_calls,
            fz.max_exit_seen.max(all_runs().map(|(_, s)| s.max_exit).max().unwrap_or(0)),
            exit_over.len(),
            first(&exit_over)
        ),
    ));

    // 6
    let q_default: Vec<(usize, f64)> =
        all_runs().filter(|(i, _)| i.variant == Variant::Default).flat_map(|(_, s)| s.q.clone()).collect();
    let over = q_default.iter().filter(|&&(size, bound)| size as f64 > bound).count();
    let rate = over as f64 / q_default.len().max(1) as f64;
    let mut hist: BTreeMap<String, usize> = BTreeMap::new();
    for &(size, bound) in &q_default {
        *hist.entry(histogram_bucket(size as f64 / bound)).or_default() += 1;
    }
    lines.push(gate(
        !q_default.is_empty() && rate <= 0.05,
        6,
        "Q size bound",
        format!(
            "{} Q sets, {over} over n/c_(l+1) ({:.2}%); |Q|/bound histogram {hist:?}",
            q_default.len(),
            100.0 * rate
        ),
    ));

    // 7
    let (t, q, k, a, trials) = (64usize, 8usize, 10usize, 2.0, 200usize);
    let (misses, p) = hitting_trials(t, q, k, a, trials, 7);
    let p0 = 1.0 / (t * t) as f64;
    let limit = p0 + 3.0 * (p0 * (1.0 - p0) / trials as f64).sqrt();
    let miss_rate = misses as f64 / trials as f64;
    lines.push(gate(
        miss_rate <= limit,
        7,
        "hitting set",
        format!("{misses}/{trials} misses (rate {miss_rate:.4}, limit {limit:.4}), p = {p:.3}"),
    ));
    let (misses_lo, p_lo) = hitting_trials(t, q, k, 0.5, trials, 8);
    let bound_lo = (k as f64).powf(0.5) * (t as f64).powf(-0.5);
    lines.push(Line {
        tag: "INFO",
        text: format!(
            "7 hitting set at a = 0.5 (p = {p_lo:.3}): {misses_lo}/{trials} misses, union bound k^(1-a) t^(-a) = {bound_lo:.3}"
        ),
    });

    // 8
    let regrowth: Vec<String> = all_runs().flat_map(|(_, s)| s.link_regrowth.clone()).collect();
    let mut nondet = Vec::new();
    for (i, s) in oracle_runs.iter().step_by(6) {
        let again = sweep(i, true, 1);
        if again.digest != s.digest || again.counters != s.counters || again.q != s.q {
            nondet.push(format!("{:?} n={} seed={}", i.gen, i.n, i.seed));
        }
    }
    let replays = oracle_runs.len().div_ceil(6);
    let mut cli_nondet = 0;
    for algo in [Algo::Hier, Algo::EsBaseline, Algo::Static] {
        let g = generate_graph(Generator::Layered, 90, 1.5, 9).unwrap();
        let ev = generate_trace(&g, 0, TraceStyle::FullRandomOrder, 3, 9);
        let cfg = RunConfig { algo, t: 89, seed: 9, ..RunConfig::default() };
        let mut x = run(&g, &ev, &cfg, 1.5, "det").unwrap();
        let mut y = run(&g, &ev, &cfg, 1.5, "det").unwrap();
        x.record.wall_ms = 0.0;
        y.record.wall_ms = 0.0;
        if serde_json::to_string(&x).unwrap() != serde_json::to_string(&y).unwrap() {
            cli_nondet += 1;
        }
    }
    lines.push(gate(
        regrowth.is_empty() && nondet.is_empty() && cli_nondet == 0,
        8,
        "link monotonicity and determinism",
        format!(
            "{} relinked pairs; {replays} engine replays, {} differ; 3 harness replays, {cli_nondet} differ{}{}",
            regrowth.len(),
            nondet.len(),
            first(&regrowth),
            first(&nondet)
        ),
    ));

    // 9
    let mut records = Vec::new();
    for n in [128usize, 256, 512] {
        for seed in 0..2 {
            let g = generate_graph(Generator::Er, n, 1.5, seed).unwrap();
            let ev = generate_trace(&g, 0, TraceStyle::FullRandomOrder, 1, seed);
            for algo in [Algo::EsBaseline, Algo::Hier] {
                let cfg = RunConfig { algo, t: n as Node - 1, seed, ..RunConfig::default() };
                records.push(run(&g, &ev, &cfg, 1.5, "scaling").unwrap().record);
            }
        }
    }
    let rep = summarize(&records);
    let exp = |algo: &str| rep.fits.iter().find(|f| f.algo == algo).and_then(|f| f.exponent);
    let base = exp("es-baseline");
    let hier = exp("hier");
    let fmt = |e: Option<f64>| e.map_or("-".to_string(), |e| format!("{e:.2}"));
    let near = base.is_some_and(|e| (e - 2.5).abs() <= 0.3);
    lines.push(Line {
        tag: "INFO",
        text: format!(
            "9 scaling at alpha 1.5, n in {{128, 256, 512}}: es-baseline exponent {} ({} 2.5 +/- 0.3), hier exponent {}; scaling mismatches {}",
            fmt(base),
            if near { "within" } else { "outside" },
            fmt(hier),
            records.iter().map(|r| r.mismatches).sum::<u64>()
        ),
    });

    let failed = lines.iter().filter(|l| l.tag == "FAIL").count();
    for l in &lines {
        println!("[{}] {}", l.tag, l.text);
    }
    println!("acceptance: {failed} failed, total {:.1}s", start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
