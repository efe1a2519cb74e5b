//! `ricci-foster`: curvature, resistance, flow, verification, subdivision and
//! Einstein analysis of weighted multigraphs from the command line.
//!
//! Exit codes: 0 success, 1 invalid input, 2 a check ran and failed,
//! 3 numerical failure.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ricci_foster::corpus::{random_corpus, CorpusParams, DEFAULT_SEED};
use ricci_foster::io::{
    events_value, format_g17, graph_to_json, parse_edge_list, parse_graph, parse_graph_json, terminal_summary,
    trace_csv,
};
use ricci_foster::{
    curvature_report, einstein_check, einstein_solve, flow, resistance_profile, verify_all, EdgeId, Error,
    FlowConfig, TimeLimit, WeightedGraph,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ricci-foster", version, about = "Ricci-Foster curvature and flow on weighted multigraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    /// JSON if the input starts with `{`, edge list otherwise.
    Auto,
    Json,
    Edgelist,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Input {
    /// Graph file, or `-` for standard input.
    #[arg(default_value = "-")]
    graph: String,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    input_format: InputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Per-edge curvature and Foster coefficient, per-vertex scalar curvature, totals.
    Curvature {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
    },
    /// Effective resistance between every pair of vertices.
    Resistance {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
    },
    /// Integrate the flow; prints the terminal summary as JSON.
    Flow {
        #[command(flatten)]
        input: Input,
        /// End time, or `until-collapse`.
        #[arg(long, default_value = "until-collapse")]
        t_end: String,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 10)]
        sample_stride: usize,
        #[arg(long, default_value_t = 1e-9)]
        collapse_epsilon: f64,
        #[arg(long, default_value_t = 1e-12)]
        event_tolerance: f64,
        /// Contract collapsing edges and continue instead of stopping.
        #[arg(long)]
        surgery: bool,
        /// Write the sampled trajectory as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the surgery events as JSON.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Run every invariant check; exits 2 if any fails.
    Verify {
        /// Graph to check; omit with --corpus.
        graph: Option<String>,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        input_format: InputFormat,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Check this many seeded random multigraphs instead (seed from RFC_SEED).
        #[arg(long, conflicts_with = "graph")]
        corpus: Option<usize>,
    },
    /// Split one edge through a new vertex; prints the new graph as JSON.
    Subdivide {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        edge: String,
        /// Fraction of the length given to the first half.
        #[arg(long, default_value_t = 0.5)]
        split: f64,
    },
    /// Einstein certificate of the given lengths, or of solved lengths with --solve.
    Einstein {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        solve: bool,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
    },
}

/// Terminal outcome of a command, mapped onto the exit-code contract.
enum Failure {
    Input(String),
    Check(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalFailure(_) => Failure::Numerical(e.to_string()),
            Error::NoConvergence(_) => Failure::Check(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read_source(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    }
    Ok(text)
}

fn load(path: &str, format: InputFormat) -> Result<WeightedGraph, Failure> {
    let text = read_source(path)?;
    let g = match format {
        InputFormat::Auto => parse_graph(&text),
        InputFormat::Json => parse_graph_json(&text),
        InputFormat::Edgelist => parse_edge_list(&text),
    };
    g.map_err(|e| Failure::Input(format!("{path}: {e}")))
}

/// Write via a temporary file in the same directory and rename into place.
fn write_atomic(path: &Path, contents: &str) -> Outcome {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(())
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("report values serialize"));
}

fn curvature(g: &WeightedGraph, format: ReportFormat) -> Outcome {
    let r = curvature_report(g)?;
    match format {
        ReportFormat::Json => print_json(&r),
        ReportFormat::Csv => {
            let mut out = String::from("edge_id,u,v,length,curvature,foster\n");
            for e in &r.edges {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    e.id,
                    e.u,
                    e.v,
                    format_g17(e.length),
                    format_g17(e.curvature),
                    format_g17(e.foster)
                );
            }
            out.push_str("\nvertex_id,degree,scalar\n");
            for v in &r.vertices {
                let _ = writeln!(out, "{},{},{}", v.id, v.degree, format_g17(v.scalar));
            }
            out.push_str("\ntotal_curvature,total_foster,total_scalar\n");
            let _ = writeln!(
                out,
                "{},{},{}",
                format_g17(r.total_curvature),
                format_g17(r.total_foster),
                format_g17(r.total_scalar)
            );
            print!("{out}");
        }
    }
    Ok(())
}

fn resistance(g: &WeightedGraph, format: ReportFormat) -> Outcome {
    let p = resistance_profile(g)?;
    let vs = g.vertices();
    let pairs = (0..vs.len()).flat_map(|x| (x + 1..vs.len()).map(move |y| (x, y)));
    match format {
        ReportFormat::Csv => {
            let mut out = String::from("x,y,omega\n");
            for (x, y) in pairs {
                let _ = writeln!(out, "{},{},{}", vs[x], vs[y], format_g17(p.omega_by_index(x, y)));
            }
            print!("{out}");
        }
        ReportFormat::Json => {
            let rows: Vec<_> = pairs
                .map(|(x, y)| json!({"x": vs[x], "y": vs[y], "omega": p.omega_by_index(x, y)}))
                .collect();
            print_json(&rows);
        }
    }
    Ok(())
}

fn parse_t_end(s: &str) -> Result<TimeLimit, Failure> {
    if s == "until-collapse" {
        return Ok(TimeLimit::UntilCollapse);
    }
    s.parse::<f64>()
        .ok()
        .filter(|t| t.is_finite() && *t >= 0.0)
        .map(TimeLimit::At)
        .ok_or_else(|| Failure::Input(format!("--t-end must be a nonnegative number or `until-collapse`, got {s:?}")))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Curvature { input, format } => curvature(&load(&input.graph, input.input_format)?, format),
        Command::Resistance { input, format } => resistance(&load(&input.graph, input.input_format)?, format),
        Command::Flow {
            input,
            t_end,
            dt,
            sample_stride,
            collapse_epsilon,
            event_tolerance,
            surgery,
            out,
            events,
        } => {
            let cfg = FlowConfig {
                t_end: parse_t_end(&t_end)?,
                dt,
                sample_stride,
                collapse_epsilon,
                surgery_enabled: surgery,
                event_time_tolerance: event_tolerance,
            };
            cfg.validate()?;
            let g = load(&input.graph, input.input_format)?;
            let trace = flow(&g, &cfg)?;
            if let Some(path) = out {
                write_atomic(&path, &trace_csv(&trace))?;
            }
            if let Some(path) = events {
                let text = serde_json::to_string_pretty(&events_value(&trace)).expect("events serialize");
                write_atomic(&path, &(text + "\n"))?;
            }
            print_json(&terminal_summary(&trace));
            Ok(())
        }
        Command::Verify {
            graph,
            input_format,
            tol,
            corpus,
        } => {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Failure::Input(format!("--tol must be positive, got {tol}")));
            }
            let passed = match corpus {
                Some(count) => {
                    let seed = match std::env::var("RFC_SEED") {
                        Ok(s) => s
                            .parse::<u64>()
                            .map_err(|_| Failure::Input(format!("RFC_SEED must be an unsigned integer, got {s:?}")))?,
                        Err(_) => DEFAULT_SEED,
                    };
                    let graphs = random_corpus(seed, count, &CorpusParams::default());
                    let failures: Vec<_> = graphs
                        .iter()
                        .enumerate()
                        .map(|(i, g)| (i, g, verify_all(g, tol)))
                        .filter(|(_, _, r)| !r.passed)
                        .map(|(i, g, r)| {
                            json!({"index": i, "graph": ricci_foster::io::graph_to_value(g), "report": r})
                        })
                        .collect();
                    print_json(&json!({
                        "seed": seed,
                        "count": count,
                        "passed": failures.is_empty(),
                        "failures": failures,
                    }));
                    failures.is_empty()
                }
                None => {
                    let path = graph.unwrap_or_else(|| "-".into());
                    let report = verify_all(&load(&path, input_format)?, tol);
                    print_json(&report);
                    report.passed
                }
            };
            if passed {
                Ok(())
            } else {
                Err(Failure::Check("some checks failed".into()))
            }
        }
        Command::Subdivide { input, edge, split } => {
            let g = load(&input.graph, input.input_format)?;
            println!("{}", graph_to_json(&g.subdivide(&EdgeId::from(edge), split)?));
            Ok(())
        }
        Command::Einstein {
            input,
            tol,
            solve,
            max_iter,
        } => {
            let g = load(&input.graph, input.input_format)?;
            let cert = if solve {
                match einstein_solve(&g, max_iter, tol) {
                    Ok(s) => s.certificate,
                    Err(Error::NoConvergence(best)) => {
                        print_json(&best);
                        return Err(Failure::Check(
                            "no Einstein lengths found; this is not a proof that none exist".into(),
                        ));
                    }
                    Err(e) => return Err(e.into()),
                }
            } else {
                einstein_check(&g, tol)?
            };
            print_json(&cert);
            if cert.is_einstein {
                Ok(())
            } else {
                Err(Failure::Check(format!("max residual {:e} exceeds {tol:e}", cert.max_residual)))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
