use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use entangled_graphs::analyzer::{classify_pair, extract_graph, StateInput, Tolerances};
use entangled_graphs::error::Error;
use entangled_graphs::feasibility::{assess, assess_with_search, census, Verdict};
use entangled_graphs::graph::EntangledGraph;
use entangled_graphs::io;
use entangled_graphs::search::SearchConfig;
use entangled_graphs::synthesis::build_mixed;

/// Entangled graphs with classical correlations: build the universal mixed
/// state for a graph, classify states back to graphs, decide pure-state
/// representability, and tabulate whole-size censuses.
#[derive(Parser)]
#[command(name = "egraph", version)]
struct Cli {
    /// Worker threads for pair, restart, and census parallelism
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for the stochastic witness search
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Entanglement gate: negativity above this counts as entangled
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_ent: f64,
    /// Correlation gate: factorization distance above this counts as correlated
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_fac: f64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the universal mixed state realizing a graph (n >= 2)
    BuildMixed {
        /// Graph JSON file
        graph: PathBuf,
        /// Output path for the excitation-block state JSON
        #[arg(long)]
        out: PathBuf,
        /// Also write the expanded dense density matrix here
        #[arg(long)]
        dense: Option<PathBuf>,
    },
    /// Classify a state file (pure, dense, or excitation-block) to its graph
    Classify {
        /// State JSON file
        state: PathBuf,
        /// Write the extracted graph JSON here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the per-pair verdict report JSON here
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write a DOT rendering here (solid = entangled, dashed = classical)
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide whether a graph has a pure-state representative
    Feasibility {
        /// Graph JSON file
        graph: PathBuf,
        /// Run the stochastic search on components the rules leave undecided
        #[arg(long)]
        search: bool,
        /// Write the verdict JSON (witnesses inlined) here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assess every graph on n vertices, grouped by isomorphism class
    Census {
        /// Vertex count (at most 5)
        n: usize,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Directory for per-class witness state files
        #[arg(long)]
        witnesses: Option<PathBuf>,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::Json(_)
        | Error::Malformed(_)
        | Error::InvalidGraph(_)
        | Error::InvalidConfig(_)
        | Error::CapExceeded { .. }
        | Error::UnknownCatalogLabel(_)
        | Error::NoPureRepresentative(_)
        | Error::UnsupportedGraph(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let tol = Tolerances::with_gates(cli.tol_ent, cli.tol_fac);
    if let Err(e) = tol.check() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let outcome = match cli.cmd {
        Cmd::BuildMixed { graph, out, dense } => cmd_build_mixed(&graph, &out, dense.as_deref(), &tol),
        Cmd::Classify { state, out, report, dot } => {
            cmd_classify(&state, out.as_deref(), report.as_deref(), dot.as_deref(), &tol)
        }
        Cmd::Feasibility { graph, search, out } => {
            cmd_feasibility(&graph, search, out.as_deref(), &tol, cli.seed)
        }
        Cmd::Census { n, out, witnesses } => cmd_census(n, &out, witnesses.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn describe_graph(g: &EntangledGraph) -> String {
    format!(
        "n={}, entangled={:?}, classical={:?}",
        g.n(),
        g.entangled_edges().collect::<Vec<_>>(),
        g.classical_edges().collect::<Vec<_>>()
    )
}

fn cmd_build_mixed(
    graph_path: &Path,
    out: &Path,
    dense: Option<&Path>,
    tol: &Tolerances,
) -> Result<u8, Error> {
    let g = io::read_graph(graph_path)?;
    if g.n() < 2 {
        eprintln!(
            "error: the mixed-state construction needs at least 2 vertices; \
             use `egraph feasibility` for single-vertex graphs"
        );
        return Ok(2);
    }
    let state = build_mixed(&g)?;
    if let Err(e) = state.validate(tol.validity()) {
        eprintln!("error: constructed state failed validation: {e}");
        return Ok(3);
    }
    println!("graph: {}", describe_graph(&g));
    println!(
        "state: vacuum={:.6}, trace={:.12}, validation=ok",
        state.vacuum(),
        state.trace()
    );
    for (i, j) in entangled_graphs::graph::vertex_pairs(g.n()) {
        let rho = state.reduce_pair(i, j)?;
        let v = classify_pair(&rho, tol)?;
        println!(
            "pair ({i},{j}): {:<14} concurrence={:.6} negativity={:.6} fac={:.6}{}",
            v.class.to_string(),
            v.concurrence,
            v.negativity,
            v.fac_distance,
            if v.marginal { " [marginal]" } else { "" }
        );
    }
    io::write_block(out, &state)?;
    println!("wrote state to {}", out.display());
    if let Some(dense_path) = dense {
        let rho = state.expand_dense()?;
        io::write_density(dense_path, &rho)?;
        println!("wrote dense matrix to {}", dense_path.display());
    }
    Ok(0)
}

fn cmd_classify(
    state_path: &Path,
    out: Option<&Path>,
    report: Option<&Path>,
    dot: Option<&Path>,
    tol: &Tolerances,
) -> Result<u8, Error> {
    let input = io::read_state(state_path)?;
    let kind = match &input {
        StateInput::Pure(_) => "pure",
        StateInput::Dense(_) => "dense",
        StateInput::Block(_) => "excitation-block",
    };
    let (g, verdicts) = extract_graph(&input, tol)?;
    println!("state: {kind}, n={}", input.num_qubits());
    println!("graph: {}", describe_graph(&g));
    for v in &verdicts {
        println!(
            "pair ({},{}): {:<14} concurrence={:.6} negativity={:.6} fac={:.6}{}",
            v.i,
            v.j,
            v.class.to_string(),
            v.concurrence,
            v.negativity,
            v.fac_distance,
            if v.marginal { " [marginal]" } else { "" }
        );
    }
    if let Some(path) = out {
        io::write_graph(path, &g)?;
        println!("wrote graph to {}", path.display());
    }
    if let Some(path) = report {
        std::fs::write(path, io::report_to_string(g.n(), tol, &verdicts)?)?;
        println!("wrote report to {}", path.display());
    }
    if let Some(path) = dot {
        io::write_dot(path, &g)?;
        println!("wrote DOT to {}", path.display());
    }
    Ok(0)
}

fn print_verdict(v: &Verdict) {
    println!("status: {}", v.status);
    println!("reason: {}", v.reason);
    for c in &v.components {
        println!(
            "component {:?}: rule {} -> {}{}",
            c.vertices,
            c.rule,
            c.status,
            c.note
                .as_deref()
                .map(|n| format!(" ({n})"))
                .unwrap_or_default()
        );
    }
}

fn cmd_feasibility(
    graph_path: &Path,
    search: bool,
    out: Option<&Path>,
    tol: &Tolerances,
    seed: u64,
) -> Result<u8, Error> {
    let g = io::read_graph(graph_path)?;
    let verdict = if search {
        let cfg = SearchConfig { seed, accept_tol: *tol, ..SearchConfig::default() };
        assess_with_search(&g, &cfg)?
    } else {
        assess(&g)?
    };
    print_verdict(&verdict);
    if let Some(path) = out {
        std::fs::write(path, io::verdict_to_string(&verdict)?)?;
        println!("wrote verdict to {}", path.display());
    }
    if verdict.status.is_feasible() || verdict.witness.is_some() {
        Ok(0)
    } else {
        Ok(1)
    }
}

fn cmd_census(n: usize, out: &Path, witnesses: Option<&Path>) -> Result<u8, Error> {
    let report = census(n)?;
    println!(
        "census n={}: {} raw graphs, {} isomorphism classes",
        report.n, report.raw_total, report.class_total
    );
    let counts: Vec<String> = report
        .status_counts
        .iter()
        .map(|(status, count)| format!("{status}={count}"))
        .collect();
    println!("status counts: {}", counts.join(", "));
    println!(
        "conventions: connected={}, connected-no-open-edge={}, \
         connected-no-open-edge-non-web={}, status-ambiguous={}",
        report.connected_classes,
        report.connected_no_open_edge_classes,
        report.connected_no_open_edge_non_web_classes,
        report.ambiguous_classes
    );
    if n == 4 {
        println!(
            "published ambiguous count 20: connected-no-open-edge-non-web gives {}{}; \
             status-ambiguous gives {} (includes webs whose closed-form sweep fails)",
            report.connected_no_open_edge_non_web_classes,
            if report.connected_no_open_edge_non_web_classes == 20 {
                " (match)"
            } else {
                " (mismatch)"
            },
            report.ambiguous_classes
        );
    }
    let mut witness_paths: Vec<Option<String>> = Vec::with_capacity(report.rows.len());
    if let Some(dir) = witnesses {
        std::fs::create_dir_all(dir)?;
        for row in &report.rows {
            match &row.witness {
                Some(state) => {
                    let name = format!("{}.json", row.label.as_str().replace(':', "-"));
                    let path = dir.join(name);
                    io::write_pure(&path, state)?;
                    witness_paths.push(Some(path.display().to_string()));
                }
                None => witness_paths.push(None),
            }
        }
        println!("wrote witnesses to {}", dir.display());
    }
    std::fs::write(out, io::census_to_csv(&report, &witness_paths)?)?;
    println!("wrote census CSV to {}", out.display());
    Ok(0)
}
