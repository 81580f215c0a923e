use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use decreach::{Digraph, Node};
use decreach_bench::gen::{generate_graph, Generator};
use decreach_bench::report::{read_records, summarize, write_records};
use decreach_bench::runner::{answers_to_text, run, Algo, ParamOverrides, RunConfig, RunOutput};
use decreach_bench::trace::{generate_trace, parse_replay, parse_trace, trace_to_text, validate_trace, TraceStyle};
use decreach_bench::BenchError;
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "decreach-bench", version, about = "Generate, replay and report decremental reachability workloads")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a graph file and a deletion trace.
    Generate {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        out_graph: PathBuf,
        #[arg(long)]
        out_trace: PathBuf,
    },
    /// Replay one instance and write its metrics.
    Run {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        algo: AlgoArgs,
        /// Existing graph file instead of generating one.
        #[arg(long, requires = "trace")]
        graph: Option<PathBuf>,
        /// Existing trace file (events only).
        #[arg(long, requires = "graph")]
        trace: Option<PathBuf>,
        /// Metrics CSV; a JSON twin with the answers and the Q histogram is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read a graph block followed by events and print one `1`/`0` per query.
    Replay {
        input: PathBuf,
        #[command(flatten)]
        algo: AlgoArgs,
        #[arg(long, default_value_t = 0)]
        s: Node,
        /// Sink; defaults to `n - 1`.
        #[arg(long)]
        t: Option<Node>,
    },
    /// Run a grid of instances in parallel.
    Sweep {
        #[arg(long, value_enum, default_value_t = Generator::Er)]
        gen: Generator,
        #[arg(long, value_delimiter = ',', default_values_t = [128usize, 256, 512])]
        ns: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.5f64])]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algo::Hier, Algo::EsBaseline])]
        algos: Vec<Algo>,
        #[arg(long, value_enum, default_value_t = TraceStyle::FullRandomOrder)]
        trace_style: TraceStyle,
        #[arg(long, default_value_t = 1)]
        query_every: usize,
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize metrics CSVs into a table with fitted exponents.
    Report {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct InstanceArgs {
    #[arg(long, value_enum, default_value_t = Generator::Er)]
    gen: Generator,
    #[arg(long, default_value_t = 128)]
    n: usize,
    /// Density exponent: about `n^alpha` arcs.
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = TraceStyle::FullRandomOrder)]
    trace_style: TraceStyle,
    /// Insert an s-t query after every this many deletions (0 for none).
    #[arg(long, default_value_t = 1)]
    query_every: usize,
    #[arg(long, default_value_t = 0)]
    s: Node,
    /// Sink; defaults to `n - 1`.
    #[arg(long)]
    t: Option<Node>,
}

#[derive(Args, Clone)]
struct AlgoArgs {
    #[arg(long, value_enum, default_value_t = Algo::Hier)]
    algo: Algo,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Number of levels; densities are spread geometrically from c to b.
    #[arg(long)]
    k: Option<usize>,
    /// Explicit densities c_1,...,c_k (non-increasing).
    #[arg(long, value_delimiter = ',')]
    c_seq: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    extra_centers: Vec<Node>,
    /// Seed for center sampling; defaults to the instance seed.
    #[arg(long)]
    engine_seed: Option<u64>,
    /// Check every path-union eviction against a fresh search.
    #[arg(long)]
    audit: bool,
    /// Skip the oracle cross-check.
    #[arg(long)]
    no_check: bool,
}

impl AlgoArgs {
    fn config(&self, s: Node, t: Node, seed: u64) -> RunConfig {
        RunConfig {
            algo: self.algo,
            s,
            t,
            params: ParamOverrides { b: self.b, c: self.c, k: self.k, c_seq: self.c_seq.clone() },
            a: self.a,
            seed: self.engine_seed.unwrap_or(seed),
            extra_centers: self.extra_centers.clone(),
            audit: self.audit,
            check: !self.no_check,
        }
    }
}

fn instance(a: &InstanceArgs) -> Result<(Digraph, Vec<decreach_bench::trace::Event>), BenchError> {
    let g = generate_graph(a.gen, a.n, a.alpha, a.seed)?;
    let ev = generate_trace(&g, a.s, a.trace_style, a.query_every, a.seed);
    Ok((g, ev))
}

fn label(a: &InstanceArgs) -> String {
    format!("{}-{}", a.gen.name(), a.trace_style.name())
}

fn write_outputs(out: &RunOutput, path: Option<&PathBuf>) -> Result<(), BenchError> {
    match path {
        Some(p) => {
            write_records(fs::File::create(p)?, std::slice::from_ref(&out.record))?;
            fs::write(p.with_extension("json"), serde_json::to_string_pretty(out)?)?;
        }
        None => write_records(std::io::stdout(), std::slice::from_ref(&out.record))?,
    }
    Ok(())
}

fn mismatch_exit(mismatches: u64) -> ExitCode {
    if mismatches > 0 {
        eprintln!("{mismatches} answers disagree with the oracle");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode, BenchError> {
    match Cli::parse().cmd {
        Cmd::Generate { inst, out_graph, out_trace } => {
            let (g, ev) = instance(&inst)?;
            fs::write(out_graph, g.to_text())?;
            fs::write(out_trace, trace_to_text(&ev))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Run { inst, algo, graph, trace, out } => {
            let (g, ev, alpha) = match (graph, trace) {
                (Some(gp), Some(tp)) => {
                    let g = Digraph::parse(&fs::read_to_string(gp)?)?;
                    let ev = parse_trace(&fs::read_to_string(tp)?)?;
                    validate_trace(&g, &ev)?;
                    let alpha = (g.edge_count().max(1) as f64).ln() / (g.node_count().max(2) as f64).ln();
                    (g, ev, alpha)
                }
                _ => {
                    let (g, ev) = instance(&inst)?;
                    (g, ev, inst.alpha)
                }
            };
            let t = inst.t.unwrap_or(g.node_count() as Node - 1);
            let o = run(&g, &ev, &algo.config(inst.s, t, inst.seed), alpha, &label(&inst))?;
            write_outputs(&o, out.as_ref())?;
            Ok(mismatch_exit(o.record.mismatches))
        }
        Cmd::Replay { input, algo, s, t } => {
            let (g, ev) = parse_replay(&fs::read_to_string(input)?)?;
            validate_trace(&g, &ev)?;
            let t = t.unwrap_or(g.node_count() as Node - 1);
            let o = run(&g, &ev, &algo.config(s, t, 0), 0.0, "replay")?;
            print!("{}", answers_to_text(&o.answers));
            Ok(mismatch_exit(o.record.mismatches))
        }
        Cmd::Sweep { gen, ns, alphas, seeds, algos, trace_style, query_every, a, out } => {
            let mut jobs = Vec::new();
            for &n in &ns {
                for &alpha in &alphas {
                    for seed in 0..seeds {
                        for &algo in &algos {
                            jobs.push((n, alpha, seed, algo));
                        }
                    }
                }
            }
            let results: Vec<Result<RunOutput, BenchError>> = jobs
                .par_iter()
                .map(|&(n, alpha, seed, algo)| {
                    let inst = InstanceArgs { gen, n, alpha, seed, trace_style, query_every, s: 0, t: None };
                    let (g, ev) = instance(&inst)?;
                    let cfg = RunConfig { algo, s: 0, t: n as Node - 1, a, seed, ..RunConfig::default() };
                    run(&g, &ev, &cfg, alpha, &label(&inst))
                })
                .collect();
            let records = results.into_iter().map(|r| r.map(|o| o.record)).collect::<Result<Vec<_>, _>>()?;
            write_records(fs::File::create(&out)?, &records)?;
            print!("{}", summarize(&records).to_text());
            Ok(mismatch_exit(records.iter().map(|r| r.mismatches).sum()))
        }
        Cmd::Report { inputs, out } => {
            let mut records = Vec::new();
            for p in inputs {
                records.extend(read_records(fs::File::open(p)?)?);
            }
            let rep = summarize(&records);
            print!("{}", rep.to_text());
            if let Some(p) = out {
                fs::write(p, rep.to_csv())?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
