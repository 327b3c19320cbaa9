//! `mdnet` command-line tool.
//!
//! Exit codes: 0 success, 2 input or configuration error, 3 the input was
//! evaluated but violates the requested weak constraint (or no partition
//! satisfies it).

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use mdnet::decimal::{parse_rational, ratio_string, render, Precision};
use mdnet::generators::{self, NamedInstance};
use mdnet::metrics::full_report;
use mdnet::model::{build_model, emit_lp, sidecar_json, AlphaRule, BuildOptions};
use mdnet::solver::{solve, CommunityRange, Method, SolveError, SolverConfig};
use mdnet::{Graph, Partition, Weak};

const SCHEMA: &str = "mdnet/1";

#[derive(Parser)]
#[command(name = "mdnet", version, about = "Modularity density evaluation, search and MILP emission")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a partition: per-community counts, densities, D and Q.
    Eval(EvalArgs),
    /// Search for a partition with maximum modularity density.
    Solve(SolveArgs),
    /// Write the mixed-integer linear model in LP format plus a variable map.
    Emit(EmitArgs),
    /// Write a benchmark network with its reference partitions.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct GraphArg {
    /// Edge-list file, or a built-in network: zachary, fig1, fig2.
    #[arg(long)]
    graph: String,
}

#[derive(Args)]
struct Output {
    /// Significant digits for decimal output.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=30))]
    digits: u32,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Partition file, or a reference partition name of a built-in network.
    #[arg(long)]
    partition: String,
    /// Check the weak condition 4e - K >= L for every community.
    #[arg(long = "weak-L", value_parser = clap::value_parser!(u8).range(0..=1))]
    weak: Option<u8>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exhaustive,
    Bnb,
    #[value(alias = "local-search")]
    Ls,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Exact number of communities.
    #[arg(long, conflicts_with_all = ["m_min", "m_max"])]
    m: Option<usize>,
    /// Smallest community count of a sweep (requires --m-max).
    #[arg(long, requires = "m_max")]
    m_min: Option<usize>,
    /// Largest community count of a sweep (requires --m-min).
    #[arg(long, requires = "m_min")]
    m_max: Option<usize>,
    #[arg(long = "weak-L", value_parser = clap::value_parser!(u8).range(0..=1))]
    weak: Option<u8>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Perturbation rounds without improvement before a restart ends.
    #[arg(long, default_value_t = 30)]
    max_stale: usize,
    /// Penalty per unit of weak shortfall, e.g. 34 or 7/2 (default: n).
    #[arg(long)]
    penalty_rho: Option<String>,
    /// Admit the single-community partition.
    #[arg(long)]
    allow_single: bool,
    /// Include wall-clock time in the output.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[arg(long)]
    m: usize,
    #[arg(long = "weak-L", value_parser = clap::value_parser!(u8).range(0..=1))]
    weak: Option<u8>,
    /// Forbid vertex i from communities with a larger index.
    #[arg(long)]
    symmetry_break: bool,
    /// Use the literal alpha lower bounds -(k1+k2)/2 and L, which can cut off
    /// feasible partitions.
    #[arg(long)]
    degree_pair_bound: bool,
    /// Output LP path; the variable map goes next to it as .vars.json.
    #[arg(short = 'o', long = "output")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    CliqueStar,
    Fig2,
    Zachary,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Hub clique size (clique-star).
    #[arg(long, required_if_eq("family", "clique-star"))]
    hub: Option<usize>,
    /// Number of satellite cliques (clique-star).
    #[arg(long, required_if_eq("family", "clique-star"))]
    satellites: Option<usize>,
    /// Satellite clique size (clique-star).
    #[arg(long, required_if_eq("family", "clique-star"))]
    satellite_size: Option<usize>,
    #[arg(long)]
    out_dir: PathBuf,
}

/// Failure that maps to an exit code.
enum Failure {
    Input(String),
    /// Output to print, then exit 3.
    Violated(Value),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<Value, Failure>;

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A graph loaded from the command line with its provenance.
struct Input {
    graph: Graph,
    builtin: Option<NamedInstance>,
    label: String,
    digest: String,
}

fn load_graph(source: &str) -> Result<Input, Failure> {
    let builtin = match source {
        "zachary" => Some(generators::zachary()),
        "fig1" => Some(generators::clique_star(3, 7, 4)?),
        "fig2" => Some(generators::fig2()),
        _ => None,
    };
    if let Some(inst) = builtin {
        let digest = sha256_hex(inst.graph.to_edge_list().as_bytes());
        return Ok(Input {
            graph: inst.graph.clone(),
            label: format!("builtin:{source}"),
            builtin: Some(inst),
            digest,
        });
    }
    let text = fs::read_to_string(source).map_err(|e| Failure::Input(format!("cannot read graph {source}: {e}")))?;
    let graph = Graph::parse_edge_list(&text).map_err(|e| Failure::Input(format!("{source}: {e}")))?;
    Ok(Input {
        graph,
        builtin: None,
        label: source.to_string(),
        digest: sha256_hex(text.as_bytes()),
    })
}

fn weak_of(l: Option<u8>) -> Result<Option<Weak>, Failure> {
    l.map(Weak::try_from).transpose().map_err(Failure::from)
}

fn manifest(command: &str, config: Value, inputs: &[(&str, &str)], seed: Option<u64>) -> Value {
    let inputs: serde_json::Map<String, Value> = inputs
        .iter()
        .map(|(name, digest)| (name.to_string(), json!(format!("sha256:{digest}"))))
        .collect();
    json!({
        "command": command,
        "config": config,
        "inputs": inputs,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
    })
}

fn eval(args: EvalArgs) -> Outcome {
    let input = load_graph(&args.graph.graph)?;
    let weak = weak_of(args.weak)?;
    let named = input
        .builtin
        .as_ref()
        .and_then(|inst| inst.partition(&args.partition).cloned());
    let (partition, part_label, part_digest) = match named {
        Some(p) => {
            let digest = sha256_hex(p.to_text().as_bytes());
            (p, format!("builtin:{}", args.partition), digest)
        }
        None => {
            let text = fs::read_to_string(&args.partition)
                .map_err(|e| Failure::Input(format!("cannot read partition {}: {e}", args.partition)))?;
            let p = Partition::parse(&text, &input.graph)
                .map_err(|e| Failure::Input(format!("{}: {e}", args.partition)))?;
            (p, args.partition.clone(), sha256_hex(text.as_bytes()))
        }
    };
    let precision = Precision::Significant(args.output.digits);
    let report = full_report(&input.graph, &partition);
    let violations: Vec<usize> = weak.map_or_else(Vec::new, |w| report.violations(w).iter().map(|c| c + 1).collect());
    let out = json!({
        "schema": SCHEMA,
        "manifest": manifest(
            "eval",
            json!({"weak_L": args.weak, "digits": args.output.digits}),
            &[(&input.label, &input.digest), (&part_label, &part_digest)],
            None,
        ),
        "n": input.graph.n(),
        "m": partition.m(),
        "report": report.to_json(precision),
        "weak_L": args.weak,
        "violations": violations,
    });
    if violations.is_empty() {
        Ok(out)
    } else {
        Err(Failure::Violated(out))
    }
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var("MDNET_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(Failure::Input(format!("MDNET_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn solve_cmd(args: SolveArgs) -> Outcome {
    let input = load_graph(&args.graph.graph)?;
    let weak = weak_of(args.weak)?;
    let method = match args.method {
        MethodArg::Exhaustive => Method::Exhaustive,
        MethodArg::Bnb => Method::BranchAndBound,
        MethodArg::Ls => Method::LocalSearch,
    };
    let penalty_rho = match &args.penalty_rho {
        None => None,
        Some(text) => {
            let r = parse_rational(text).ok_or_else(|| Failure::Input(format!("invalid penalty {text:?}")))?;
            let to_i64 = |b: &num_bigint::BigInt| i64::try_from(b).ok();
            match (to_i64(r.numer()), to_i64(r.denom())) {
                (Some(n), Some(d)) => Some(Ratio::new(n, d)),
                _ => return Err(Failure::Input(format!("penalty {text} is out of range"))),
            }
        }
    };
    let base = SolverConfig {
        method,
        range: CommunityRange::Free,
        weak,
        allow_single: args.allow_single,
        seed: args.seed,
        restarts: args.restarts,
        max_stale_iterations: args.max_stale,
        penalty_rho,
        threads: threads_from_env()?,
    };
    let runs: Vec<CommunityRange> = match (args.m, args.m_min, args.m_max) {
        (Some(m), _, _) => vec![CommunityRange::fixed(m)],
        (None, Some(lo), Some(hi)) => {
            if lo > hi {
                return Err(Failure::Input(format!("--m-min {lo} exceeds --m-max {hi}")));
            }
            (lo..=hi).map(CommunityRange::fixed).collect()
        }
        _ => vec![CommunityRange::Free],
    };
    let precision = Precision::Significant(args.output.digits);
    let config = json!({
        "method": method.name(),
        "m": args.m,
        "m_min": args.m_min,
        "m_max": args.m_max,
        "weak_L": args.weak,
        "restarts": args.restarts,
        "max_stale_iterations": args.max_stale,
        "penalty_rho": penalty_rho.map(|r| r.to_string()),
        "allow_single": args.allow_single,
        "digits": args.output.digits,
    });
    let mut results = Vec::new();
    let mut best: Option<(usize, num_rational::BigRational)> = None;
    for range in &runs {
        let cfg = base.clone().with_range(*range);
        match solve(&input.graph, &cfg) {
            Ok(r) => {
                if best.as_ref().is_none_or(|(_, d)| r.modularity_density > *d) {
                    best = Some((results.len(), r.modularity_density.clone()));
                }
                results.push(r.to_json(precision, args.timing));
            }
            Err(SolveError::Infeasible) => {
                let m = match range {
                    CommunityRange::Between(m, _) => json!(m),
                    CommunityRange::Free => Value::Null,
                };
                results.push(json!({"m": m, "infeasible": true}));
            }
            Err(e) => return Err(Failure::Input(e.to_string())),
        }
    }
    let man = manifest("solve", config, &[(&input.label, &input.digest)], Some(args.seed));
    let mut out = json!({"schema": SCHEMA, "manifest": man});
    let feasible = best.is_some();
    if runs.len() == 1 {
        out["result"] = results.pop().expect("one run");
    } else {
        out["results"] = json!(results);
        out["best"] = match &best {
            Some((i, d)) => json!({
                "index": i,
                "m": results[*i]["m"],
                "D": render(d, precision),
                "D_exact": ratio_string(d),
            }),
            None => Value::Null,
        };
    }
    if feasible {
        Ok(out)
    } else {
        Err(Failure::Violated(out))
    }
}

fn sidecar_path(lp: &Path) -> PathBuf {
    lp.with_extension("vars.json")
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn emit(args: EmitArgs) -> Outcome {
    let input = load_graph(&args.graph.graph)?;
    let options = BuildOptions {
        weak: weak_of(args.weak)?,
        symmetry_break: args.symmetry_break,
        alpha_rule: if args.degree_pair_bound {
            AlphaRule::DegreePair
        } else {
            AlphaRule::Valid
        },
    };
    let model = build_model(&input.graph, args.m, options)?;
    let lp = emit_lp(&model);
    let vars = sidecar_json(&model);
    let sidecar = serde_json::to_string_pretty(&vars)? + "\n";
    let vars_path = sidecar_path(&args.out);
    write_file(&args.out, &lp)?;
    write_file(&vars_path, &sidecar)?;
    let config = json!({
        "m": args.m,
        "weak_L": args.weak,
        "symmetry_break": args.symmetry_break,
        "degree_pair_bound": args.degree_pair_bound,
        "output": args.out.display().to_string(),
    });
    Ok(json!({
        "schema": SCHEMA,
        "manifest": manifest("emit", config, &[(&input.label, &input.digest)], None),
        "variables": model.variables.len(),
        "constraints": model.constraints.len(),
        "alpha_bounds": vars["alpha_bounds"].clone(),
        "lp": args.out.display().to_string(),
        "lp_sha256": sha256_hex(lp.as_bytes()),
        "vars": vars_path.display().to_string(),
    }))
}

fn generate(args: GenerateArgs) -> Outcome {
    let (inst, params) = match args.family {
        Family::CliqueStar => {
            let (hub, sats, size) = (
                args.hub.expect("required by clap"),
                args.satellites.expect("required by clap"),
                args.satellite_size.expect("required by clap"),
            );
            let mut inst = generators::clique_star(hub, sats, size)?;
            inst.name = format!("clique-star-{hub}-{sats}-{size}");
            (inst, json!({"hub": hub, "satellites": sats, "satellite_size": size}))
        }
        Family::Fig2 => (generators::fig2(), json!({})),
        Family::Zachary => (generators::zachary(), json!({})),
    };
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Failure::Input(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let precision = Precision::default();
    let graph_file = format!("{}.edges", inst.name);
    write_file(&args.out_dir.join(&graph_file), &inst.graph.to_edge_list())?;
    let mut partitions = serde_json::Map::new();
    let mut files = vec![graph_file.clone()];
    for named in &inst.partitions {
        let file = format!("{}.{}.part", inst.name, named.name);
        write_file(&args.out_dir.join(&file), &named.partition.to_text())?;
        let report = full_report(&inst.graph, &named.partition);
        partitions.insert(
            named.name.to_string(),
            json!({
                "file": file,
                "m": named.partition.m(),
                "D": render(&report.modularity_density, precision),
                "D_exact": ratio_string(&report.modularity_density),
                "Q": report.modularity.as_ref().map(|q| render(q, precision)),
                "Q_exact": report.modularity.as_ref().map(ratio_string),
                "reference_D": named.expected.printed_d,
                "reference_Q": named.expected.printed_q,
            }),
        );
        files.push(file);
    }
    let expected = json!({
        "schema": SCHEMA,
        "family": inst.name,
        "params": params.clone(),
        "n": inst.graph.n(),
        "edges": inst.graph.edge_count(),
        "graph": graph_file,
        "partitions": partitions,
    });
    let expected_file = format!("{}.expected.json", inst.name);
    write_file(
        &args.out_dir.join(&expected_file),
        &(serde_json::to_string_pretty(&expected)? + "\n"),
    )?;
    files.push(expected_file);
    Ok(json!({
        "schema": SCHEMA,
        "manifest": manifest(
            "generate",
            json!({"family": inst.name, "params": params, "out_dir": args.out_dir.display().to_string()}),
            &[],
            None,
        ),
        "out_dir": args.out_dir.display().to_string(),
        "files": files,
    }))
}

fn print_json(value: &Value) {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    // A closed pipe on stdout is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Eval(a) => eval(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Emit(a) => emit(a),
        Command::Generate(a) => generate(a),
    };
    match outcome {
        Ok(value) => {
            print_json(&value);
            ExitCode::SUCCESS
        }
        Err(Failure::Violated(value)) => {
            print_json(&value);
            ExitCode::from(3)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
