use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use colorlab::config::{Caps, ColorSource, Command, EpsilonForm, ExperimentConfig, GraphSource};
use colorlab::{run_with_jobs, write_report};

/// Glauber and Kempe dynamics on graph colourings: exact spectra, couplings,
/// canonical paths and counting bounds on small instances.
///
/// Exit status: 0 on success, 2 when a checked inequality or invariant
/// fails, 1 on usage and input errors.
#[derive(Parser, Debug)]
#[command(name = "colorlab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Graph file: JSON {"n", "edges"} or edge-list text starting with "n m".
    #[arg(long, conflicts_with = "gen")]
    graph: Option<PathBuf>,

    /// Generator: chordal:n=8,maxclique=3 (n=4..10 for a series),
    /// corpus:n=5, complete:n=3, path:n=4, cycle:n=5, star:leaves=3.
    #[arg(long)]
    gen: Option<GraphSource>,

    /// Uniform lists 0..k.
    #[arg(long, conflicts_with_all = ["epsilon", "lists"])]
    colors: Option<usize>,

    /// Sets k from ε, as an exact decimal or fraction.
    #[arg(long, conflicts_with = "lists")]
    epsilon: Option<String>,

    /// multiplicative: k = ceil((1+ε)(Δ+1)); additive: k = ceil(Δ+1+εω).
    #[arg(long, value_enum, default_value = "multiplicative", requires = "epsilon")]
    epsilon_form: EpsilonForm,

    /// List assignment file {"lists": [[...], ...]}, or k=<int>.
    #[arg(long)]
    lists: Option<String>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Coupling replicas per start pair (default 200), or random list
    /// assignments per graph for verify-bounds (default 10).
    #[arg(long)]
    replicas: Option<usize>,

    /// Coupling step budget (default 100·ω·n²).
    #[arg(long)]
    max_steps: Option<usize>,

    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,

    /// Output directory; tables go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Largest colouring space to enumerate.
    #[arg(long)]
    enumeration_cap: Option<usize>,

    /// Largest colouring space for exact mixing times.
    #[arg(long)]
    matrix_cap: Option<usize>,

    /// Paths emitted per Kempe exchange.
    #[arg(long)]
    branch_cap: Option<usize>,

    /// Random start pairs when the colouring space is too large for all pairs.
    #[arg(long, default_value_t = 8)]
    start_pairs: usize,

    /// Random technical-bound tuples for verify-bounds.
    #[arg(long, default_value_t = 1000)]
    tech_samples: usize,

    /// Restrict project to one vertex.
    #[arg(long)]
    vertex: Option<usize>,

    /// Last time step of the TV profile (default: the mixing time).
    #[arg(long)]
    t_max: Option<usize>,

    /// Write this many sampler steps as a tab-separated trace (gap, mix).
    #[arg(long, default_value_t = 0)]
    trace_steps: usize,
}

impl Cli {
    fn into_config(self) -> (ExperimentConfig, Option<usize>) {
        let graph = match (self.graph, self.gen) {
            (Some(path), _) => GraphSource::File { path },
            (None, Some(g)) => g,
            (None, None) => GraphSource::Unspecified,
        };
        let colors = match (self.colors, self.epsilon, self.lists) {
            (Some(k), _, _) => ColorSource::Colors { k },
            (_, Some(epsilon), _) => ColorSource::Epsilon {
                epsilon,
                form: self.epsilon_form,
            },
            (_, _, Some(arg)) => ColorSource::Lists { arg },
            _ => ColorSource::Default,
        };
        let defaults = Caps::default();
        let caps = Caps {
            enumeration: self.enumeration_cap.unwrap_or(defaults.enumeration),
            matrix: self.matrix_cap.unwrap_or(defaults.matrix),
            branch: self.branch_cap.unwrap_or(defaults.branch),
            max_steps: self.max_steps,
        };
        let cfg = ExperimentConfig {
            command: self.command,
            graph,
            colors,
            seed: self.seed,
            replicas: self.replicas,
            caps,
            start_pairs: self.start_pairs,
            tech_samples: self.tech_samples,
            vertex: self.vertex,
            t_max: self.t_max,
            trace_steps: self.trace_steps,
            out: self.out,
        };
        (cfg, self.jobs)
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
    let (cfg, jobs) = cli.into_config();
    let report = match run_with_jobs(&cfg, jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match &cfg.out {
        Some(dir) => match write_report(&report, dir) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => {
            for (i, (stem, doc)) in report.documents.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                println!("# file: {stem}.csv");
                print!("{}", doc.render());
            }
            if !report.files.is_empty() || !report.series.is_empty() {
                eprintln!("warning: traces, graph files and plot data are only written with --out");
            }
        }
    }
    for f in &report.failures {
        eprintln!("FAILED: {f}");
    }
    ExitCode::from(report.exit_code())
}
