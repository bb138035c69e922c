use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use jellywalk::generate::random_jellyfish;
use jellywalk::graph::JellyfishGraph;
use jellywalk::io::{
    self, parse_alphas, parse_graph, serialize_report, serialize_stationary, OutputFormat,
    ReportDocument, StationaryDocument,
};
use jellywalk::observables::{analyze, grover_deviation, scattering_matrix};
use jellywalk::solver::{solve_electric, solve_fixed_point, StationaryState};
use jellywalk::walk::{detect_convergence, evolve, BoundaryInput};

const DEFAULT_SOLVER_TOL: f64 = 1e-10;

// Exit codes: 1 validation failure, 2 solver failure, 3 residual exceedance.
const EXIT_VALIDATION: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "jellywalk", about = "Grover walks on jellyfish graphs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    #[value(name = "fixed-point")]
    FixedPoint,
    Electric,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Args)]
struct GraphArg {
    /// Path to a graph JSON file.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file against the structural invariants.
    Validate(GraphArg),
    /// Run the walk for a fixed number of steps and report convergence.
    Evolve {
        #[command(flatten)]
        graph: GraphArg,
        /// Boundary amplitudes: comma-separated reals or a JSON list
        /// (entries may be [re, im] pairs).
        #[arg(long)]
        alphas: String,
        #[arg(long)]
        steps: usize,
        /// Convergence tolerance (default 1e-10, or JELLYWALK_TOL).
        #[arg(long)]
        tol: Option<f64>,
        /// Write a per-step CSV (t, arrow, re, im) to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Compute the stationary state without time evolution.
    Solve {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        alphas: String,
        #[arg(long, value_enum, default_value = "fixed-point")]
        method: Method,
        #[arg(long, value_enum, default_value = "json")]
        output: Format,
    },
    /// Full observable report: currents, outflow, accumulation, argmax sets.
    Analyze {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        alphas: String,
        #[arg(long, value_enum, default_value = "electric")]
        method: Method,
        #[arg(long, value_enum, default_value = "json")]
        output: Format,
    },
    /// The m x m scattering matrix and its deviation from the Grover coin.
    Scatter {
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Run the whole identity suite on one graph; exit 0 iff all residuals
    /// stay below tolerance.
    Verify {
        #[command(flatten)]
        graph: GraphArg,
        /// Boundary amplitudes; random reals in [-1, 1] when omitted.
        #[arg(long)]
        alphas: Option<String>,
        /// Seed for the random boundary amplitudes.
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Emit a seeded random connected jellyfish graph file.
    Generate {
        #[arg(long)]
        n: usize,
        /// Target undirected edge count (clamped to the connected range).
        #[arg(long, default_value = "0")]
        edges: usize,
        #[arg(long)]
        tails: usize,
        #[arg(long, default_value = "0")]
        seed: u64,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fail(code: u8, kind: &str, message: &str) -> ExitCode {
    eprintln!(
        "{}",
        serde_json::json!({ "error": kind, "message": message })
    );
    ExitCode::from(code)
}

fn tolerance(cli_tol: Option<f64>, default: f64) -> f64 {
    cli_tol
        .or_else(|| {
            std::env::var("JELLYWALK_TOL")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(default)
}

fn load_graph(path: &PathBuf) -> Result<JellyfishGraph, ExitCode> {
    parse_graph(path).map_err(|e| match e {
        io::IoError::Validation(_) => fail(EXIT_VALIDATION, "validation", &e.to_string()),
        _ => fail(EXIT_VALIDATION, "parse", &e.to_string()),
    })
}

fn load_alphas(g: &JellyfishGraph, text: &str) -> Result<BoundaryInput, ExitCode> {
    let b = parse_alphas(text)
        .map_err(|e| fail(EXIT_VALIDATION, "alphas", &e.to_string()))?;
    if b.len() != g.tail_count() {
        return Err(fail(
            EXIT_VALIDATION,
            "alphas",
            &format!("expected {} amplitudes, got {}", g.tail_count(), b.len()),
        ));
    }
    Ok(b)
}

fn run_solver(
    g: &JellyfishGraph,
    b: &BoundaryInput,
    method: Method,
) -> Result<StationaryState, ExitCode> {
    let result = match method {
        Method::FixedPoint => solve_fixed_point(g, b),
        Method::Electric => solve_electric(g, b),
    };
    result.map_err(|e| fail(EXIT_SOLVER, "solver", &e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(code) => code,
    }
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::Validate(GraphArg { graph }) => {
            let text = std::fs::read_to_string(&graph)
                .map_err(|e| fail(EXIT_VALIDATION, "io", &e.to_string()))?;
            let file: io::GraphFile = serde_json::from_str(&text)
                .map_err(|e| fail(EXIT_VALIDATION, "parse", &e.to_string()))?;
            match file.to_graph() {
                Ok(g) => {
                    let violations = g.validate();
                    if violations.is_empty() {
                        println!("valid");
                        Ok(ExitCode::SUCCESS)
                    } else {
                        for v in &violations {
                            println!("{v}");
                        }
                        Ok(ExitCode::from(EXIT_VALIDATION))
                    }
                }
                Err(e) => {
                    println!("{e}");
                    Ok(ExitCode::from(EXIT_VALIDATION))
                }
            }
        }

        Command::Evolve {
            graph,
            alphas,
            steps,
            tol,
            trace,
        } => {
            let g = load_graph(&graph.graph)?;
            let b = load_alphas(&g, &alphas)?;
            let tol = tolerance(tol, DEFAULT_SOLVER_TOL);
            let traj = evolve(&g, &b, steps, None)
                .map_err(|e| fail(EXIT_SOLVER, "walk", &e.to_string()))?;
            let conv = detect_convergence(&traj, tol)
                .map_err(|e| fail(EXIT_SOLVER, "walk", &e.to_string()))?;
            if let Some(path) = trace {
                let mut out = String::from("t,arrow,re,im\n");
                for (t, state) in traj.states.iter().enumerate() {
                    for (id, amp) in state
                        .core
                        .iter()
                        .chain(state.tail_out.iter())
                        .enumerate()
                    {
                        out.push_str(&format!("{t},{id},{},{}\n", amp.re, amp.im));
                    }
                }
                std::fs::write(&path, out)
                    .map_err(|e| fail(EXIT_SOLVER, "io", &e.to_string()))?;
            }
            let last = traj.states.last().expect("nonempty trajectory");
            println!(
                "{}",
                serde_json::json!({
                    "steps": steps,
                    "converged_at": conv.converged_at,
                    "oscillating": conv.oscillating,
                    "final_delta": traj.deltas.last(),
                    "final_state": StationaryDocument::build(&g, &StationaryState {
                        core: last.core.clone(),
                        betas: last.tail_out.clone(),
                        ave: b.average(),
                    }),
                })
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Solve {
            graph,
            alphas,
            method,
            output,
        } => {
            let g = load_graph(&graph.graph)?;
            let b = load_alphas(&g, &alphas)?;
            let s = run_solver(&g, &b, method)?;
            let doc = StationaryDocument::build(&g, &s);
            print!("{}", with_newline(serialize_stationary(&doc, output.into())));
            Ok(ExitCode::SUCCESS)
        }

        Command::Analyze {
            graph,
            alphas,
            method,
            output,
        } => {
            let g = load_graph(&graph.graph)?;
            let b = load_alphas(&g, &alphas)?;
            let s = run_solver(&g, &b, method)?;
            let report =
                analyze(&g, &s, &b).map_err(|e| fail(EXIT_SOLVER, "observables", &e.to_string()))?;
            let doc = ReportDocument::build(&g, &s, &b, &report);
            print!("{}", with_newline(serialize_report(&doc, output.into())));
            Ok(ExitCode::SUCCESS)
        }

        Command::Scatter { graph } => {
            let g = load_graph(&graph.graph)?;
            let s = scattering_matrix(&g)
                .map_err(|e| fail(EXIT_SOLVER, "solver", &e.to_string()))?;
            let m = g.tail_count();
            let rows: Vec<Vec<[f64; 2]>> = (0..m)
                .map(|i| (0..m).map(|j| [s[(i, j)].re, s[(i, j)].im]).collect())
                .collect();
            println!(
                "{}",
                serde_json::json!({
                    "matrix": rows,
                    "grover_deviation": grover_deviation(&s),
                })
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify {
            graph,
            alphas,
            seed,
            tol,
        } => {
            let g = load_graph(&graph.graph)?;
            let b = match alphas {
                Some(text) => load_alphas(&g, &text)?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    BoundaryInput(
                        (0..g.tail_count())
                            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
                            .collect(),
                    )
                }
            };
            let tol = tolerance(tol, DEFAULT_SOLVER_TOL);
            verify_graph(&g, &b, tol)
        }

        Command::Generate {
            n,
            edges,
            tails,
            seed,
            out,
        } => {
            if n == 0 || tails == 0 {
                return Err(fail(
                    EXIT_VALIDATION,
                    "generate",
                    "need n >= 1 and tails >= 1",
                ));
            }
            let g = random_jellyfish(n, edges, tails, seed);
            let text = io::graph_to_string(&g);
            match out {
                Some(path) => std::fs::write(&path, text + "\n")
                    .map_err(|e| fail(EXIT_SOLVER, "io", &e.to_string()))?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn verify_graph(g: &JellyfishGraph, b: &BoundaryInput, tol: f64) -> Result<ExitCode, ExitCode> {
    let fp = solve_fixed_point(g, b).map_err(|e| fail(EXIT_SOLVER, "solver", &e.to_string()))?;
    let el = solve_electric(g, b).map_err(|e| fail(EXIT_SOLVER, "solver", &e.to_string()))?;

    let cross = fp
        .core
        .iter()
        .chain(fp.betas.iter())
        .zip(el.core.iter().chain(el.betas.iter()))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let fp_residual = fp
        .fixed_point_residual(g, b)
        .map_err(|e| fail(EXIT_SOLVER, "walk", &e.to_string()))?;
    let report =
        analyze(g, &el, b).map_err(|e| fail(EXIT_SOLVER, "observables", &e.to_string()))?;

    let checks = serde_json::json!({
        "cross_solver": cross,
        "fixed_point_residual": fp_residual,
        "scattering_deviation": report.scattering_deviation,
        "kirchhoff_residual": report.kirchhoff_residual,
        "thm4_residual": report.thm4_residual,
        "tolerance": tol,
    });
    println!("{checks}");

    // The two routes accumulate error independently, so their agreement is
    // held to a slightly looser threshold than the per-route residuals.
    let worst = (cross / 10.0)
        .max(fp_residual)
        .max(report.scattering_deviation)
        .max(report.kirchhoff_residual)
        .max(report.thm4_residual);
    if worst < tol {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(fail(
            EXIT_VERIFY,
            "verify",
            &format!("worst residual {worst:e} exceeds tolerance {tol:e}"),
        ))
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}
