//! Runs one configured experiment and collects its tables, plot series and
//! side files in a deterministic order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use colorlab_core::bounds::{check_tech_bound, sweep_instance, Relation, Status};
use colorlab_core::chordal::{clique_tree, maximum_cardinality_search};
use colorlab_core::cliques::clique_number;
use colorlab_core::coloring::count_colorings;
use colorlab_core::comparison::{congestion, kempe_path_system, slowed, PathSystem};
use colorlab_core::coupling::{
    coupling_mixing_bound, coupling_setup, default_max_steps, run_coupling_with, start_grid, CouplingRun,
};
use colorlab_core::decomposition::balanced_path_decomposition;
use colorlab_core::dynamics::{glauber_matrix, glauber_step_traced, kempe_matrix, kempe_step_traced, ChainKind, EnumeratedChain};
use colorlab_core::generate::{nonisomorphic_graphs, random_chordal, random_deg_plus_two_lists};
use colorlab_core::projection::{good_pair_ratio, projection_restriction, projection_restriction_all};
use colorlab_core::spectral::{mixing_time_exact, spectral_gap, worst_case_tv_profile};
use colorlab_core::{ColoringSpace, Graph, ListAssignment, RngStream};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;

use crate::config::{check_epsilon, colors_for_epsilon, ColorSource, Command, ExperimentConfig, GraphSource};
use crate::digest::{corpus_digest, graph_digest, lists_digest, short};
use crate::io::{read_graph, read_lists, InputError};
use crate::plot::{emit_plot_data, Series};
use crate::table::{cell, opt_cell, Document, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// Stream selectors for the non-replica randomness of a run.
const GRAPH_STREAM: u64 = 0x6772_6170_6800;
const LIST_STREAM: u64 = 0x6c69_7374_7300;
const START_STREAM: u64 = 0x7374_6172_7400;
const TECH_STREAM: u64 = 0x7465_6368_0000;
const TRACE_STREAM: u64 = 0x7472_6163_6500;

const DEFAULT_COUPLING_REPLICAS: usize = 200;
const DEFAULT_ASSIGNMENTS: usize = 10;
const DEFAULT_CORPUS_MAX_N: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("unreadable input: {0}")]
    Input(#[from] InputError),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("analysis failed: {0}")]
    Analysis(colorlab_core::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

impl From<colorlab_core::Error> for RunError {
    fn from(e: colorlab_core::Error) -> Self {
        match e {
            colorlab_core::Error::CapExceeded { .. } => RunError::Cap(e.to_string()),
            other => RunError::Analysis(other),
        }
    }
}

type Result<T> = std::result::Result<T, RunError>;

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

#[derive(Debug, Default)]
pub struct RunReport {
    /// `(file stem, document)`, main output first.
    pub documents: Vec<(String, Document)>,
    pub series: Vec<Series>,
    /// Extra files, `(file name, contents)`.
    pub files: Vec<(String, String)>,
    /// Failed invariants and verdicts; any entry makes the exit status 2.
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed() {
            0
        } else {
            2
        }
    }

    pub fn document(&self, stem: &str) -> Option<&Document> {
        self.documents.iter().find(|(s, _)| s == stem).map(|(_, d)| d)
    }

    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }
}

/// One graph with its lists; `k` is set when the lists are `0..k` everywhere.
#[derive(Clone, Debug)]
pub struct Instance {
    pub label: String,
    pub graph: Graph,
    pub lists: ListAssignment,
    pub k: Option<usize>,
    pub colors_note: String,
}

pub fn resolve_graphs(cfg: &ExperimentConfig) -> Result<Vec<(String, Graph)>> {
    Ok(match &cfg.graph {
        GraphSource::Unspecified => return Err(usage(format!("{} needs --graph or --gen", cfg.command.name()))),
        GraphSource::File { path } => vec![(path.display().to_string(), read_graph(path)?)],
        GraphSource::Chordal { n_min, n_max, max_clique } => (*n_min..=*n_max)
            .map(|n| {
                let mut rng = RngStream::new(cfg.seed, GRAPH_STREAM ^ n as u64);
                Ok((format!("chordal-n{n}"), random_chordal(n, *max_clique, &mut rng)?))
            })
            .collect::<Result<_>>()?,
        GraphSource::Corpus { max_n } => (1..=*max_n)
            .flat_map(|n| {
                nonisomorphic_graphs(n)
                    .into_iter()
                    .enumerate()
                    .map(move |(i, g)| (format!("corpus-n{n}-{i}"), g))
            })
            .collect(),
        GraphSource::Complete { n } => vec![(format!("complete-{n}"), Graph::complete(*n))],
        GraphSource::Path { n } => vec![(format!("path-{n}"), Graph::path(*n))],
        GraphSource::Cycle { n } => vec![(format!("cycle-{n}"), Graph::cycle(*n))],
        GraphSource::Star { leaves } => vec![(format!("star-{leaves}"), Graph::star(*leaves))],
    })
}

/// Lists for `g` from the colour source; `default_k` applies when none was given.
pub fn resolve_lists(cfg: &ExperimentConfig, g: &Graph, default_k: usize) -> Result<(ListAssignment, String)> {
    Ok(match &cfg.colors {
        ColorSource::Default => (ListAssignment::uniform(g.n(), default_k), format!("k={default_k} (default)")),
        ColorSource::Colors { k } => (ListAssignment::uniform(g.n(), *k), format!("k={k}")),
        ColorSource::Epsilon { epsilon, form } => {
            let eps = check_epsilon(epsilon).map_err(usage)?;
            let k = colors_for_epsilon(&eps, *form, g.max_degree(), clique_number(g));
            (
                ListAssignment::uniform(g.n(), k),
                format!("k={k} (epsilon={epsilon}, {})", serde_json::to_value(form).unwrap().as_str().unwrap()),
            )
        }
        ColorSource::Lists { arg } => (read_lists(arg, g.n())?, format!("lists={arg}")),
    })
}

fn single_instance(cfg: &ExperimentConfig, default_k: impl Fn(&Graph) -> usize) -> Result<Instance> {
    let mut graphs = resolve_graphs(cfg)?;
    if graphs.len() != 1 {
        return Err(usage(format!("{} takes a single graph", cfg.command.name())));
    }
    let (label, graph) = graphs.remove(0);
    let (lists, colors_note) = resolve_lists(cfg, &graph, default_k(&graph))?;
    if graph.n() == 0 {
        return Err(usage("the graph has no vertices"));
    }
    Ok(Instance {
        label,
        k: lists.uniform_k(),
        graph,
        lists,
        colors_note,
    })
}

fn header(cfg: &ExperimentConfig, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let mut h = vec![
        ("colorlab".to_string(), VERSION.to_string()),
        ("command".to_string(), cfg.command.name().to_string()),
        ("config".to_string(), cfg.to_json()),
    ];
    h.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
    h
}

fn instance_header(cfg: &ExperimentConfig, inst: &Instance, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let mut fields = vec![
        ("graph", inst.label.clone()),
        ("graph_digest", graph_digest(&inst.graph)),
        ("lists_digest", lists_digest(&inst.lists)),
        ("colors", inst.colors_note.clone()),
    ];
    fields.extend(extra.iter().cloned());
    header(cfg, &fields)
}

fn enumerate_space(inst: &Instance, cfg: &ExperimentConfig) -> Result<ColoringSpace> {
    Ok(ColoringSpace::enumerate(&inst.graph, &inst.lists, cfg.caps.enumeration)?)
}

/// Glauber, plus Kempe when the lists are uniform.
fn chains(inst: &Instance, cfg: &ExperimentConfig) -> Result<Vec<EnumeratedChain>> {
    let space = enumerate_space(inst, cfg)?;
    if space.is_empty() {
        return Err(usage("the instance has no proper colourings"));
    }
    let mut out = vec![glauber_matrix(&inst.graph, &inst.lists, &space)?];
    if let Some(k) = inst.k {
        out.push(kempe_matrix(&inst.graph, k, &space)?);
    }
    Ok(out)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    if cfg.replicas == Some(0) {
        return Err(usage("--replicas must be at least 1"));
    }
    if matches!(cfg.graph, GraphSource::Corpus { .. }) && cfg.command != Command::VerifyBounds {
        return Err(usage("corpus sources are only used by verify-bounds"));
    }
    let mut report = RunReport::default();
    match cfg.command {
        Command::Gap => gap(cfg, &mut report)?,
        Command::Mix => mix(cfg, &mut report)?,
        Command::Couple => couple(cfg, &mut report)?,
        Command::Project => project(cfg, &mut report)?,
        Command::Paths => paths(cfg, &mut report)?,
        Command::VerifyBounds => verify_bounds(cfg, &mut report)?,
        Command::Gen => gen(cfg, &mut report)?,
    }
    Ok(report)
}

/// [`run_experiment`] on a pool of `jobs` threads (all cores when `None`).
pub fn run_with_jobs(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<RunReport> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| usage(e.to_string()))?;
    pool.install(|| run_experiment(cfg))
}

fn delta_plus_two(g: &Graph) -> usize {
    g.max_degree() + 2
}

fn trace(inst: &Instance, chain: &EnumeratedChain, steps: usize, seed: u64) -> Result<String> {
    let mut rng = RngStream::new(seed, TRACE_STREAM);
    let space = &chain.space;
    let mut state = space.coloring(0);
    let mut out = String::new();
    for step in 1..=steps {
        let (next, rec) = match chain.kind {
            ChainKind::Glauber => glauber_step_traced(&inst.graph, &inst.lists, &state, &mut rng)?,
            ChainKind::Kempe => kempe_step_traced(&inst.graph, inst.k.expect("uniform lists"), &state, &mut rng)?,
        };
        state = next;
        let idx = space.index_of(state.as_slice()).expect("samplers stay proper");
        writeln!(out, "{step}\t{}\t{}\t{}\t{idx}", rec.vertex, rec.color, rec.accepted as u8).unwrap();
    }
    Ok(out)
}

fn gap(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let inst = single_instance(cfg, delta_plus_two)?;
    let mut t = Table::new(&[
        "dynamics",
        "states",
        "mode",
        "method",
        "lambda2",
        "lambda_min",
        "gap",
        "tau_rel",
        "tau_mix",
        "tau_mix_bound",
        "ergodic",
        "negative_dominated",
    ]);
    for chain in chains(&inst, cfg)? {
        let r = spectral_gap(&chain.matrix)?;
        let exact = r.ergodic && chain.len() <= cfg.caps.matrix;
        let tau_mix = if exact { Some(mixing_time_exact(&chain.matrix, 0.25)?) } else { None };
        let bound = r.mixing_upper_bound();
        if let (Some(tm), Some(b)) = (tau_mix, bound) {
            if tm as f64 > b + 1e-9 {
                report.fail(format!("{}: tau_mix {tm} exceeds log(4|Ω|)·tau_rel = {b}", chain.kind.name()));
            }
        }
        if !r.ergodic {
            report
                .warnings
                .push(format!("{} chain is not ergodic (eigenvalue 1 multiplicity {})", chain.kind.name(), r.unit_multiplicity));
        }
        t.push(vec![
            cell(chain.kind.name()),
            cell(chain.len()),
            cell(chain.mode()),
            cell(r.method.name()),
            opt_cell(r.lambda2),
            cell(r.lambda_min),
            opt_cell(r.gap),
            opt_cell(r.relaxation),
            opt_cell(tau_mix),
            opt_cell(bound),
            cell(r.ergodic),
            cell(r.negative_dominated),
        ]);
        if cfg.trace_steps > 0 {
            report
                .files
                .push((format!("trace_{}.tsv", chain.kind.name()), trace(&inst, &chain, cfg.trace_steps, cfg.seed)?));
        }
    }
    report
        .documents
        .push((cfg.command.stem().into(), Document::new(instance_header(cfg, &inst, &[]), t)));
    Ok(())
}

fn mix(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let inst = single_instance(cfg, delta_plus_two)?;
    let mut t = Table::new(&["dynamics", "t", "tv"]);
    let mut extra = Vec::new();
    for chain in chains(&inst, cfg)? {
        let name = chain.kind.name();
        if chain.len() > cfg.caps.matrix {
            return Err(RunError::Cap(format!(
                "{} states exceed the matrix cap of {} for TV profiles",
                chain.len(),
                cfg.caps.matrix
            )));
        }
        if !chain.matrix.is_support_connected() {
            report.warnings.push(format!("{name} chain is reducible; no TV profile"));
            continue;
        }
        let tau = mixing_time_exact(&chain.matrix, 0.25)?;
        extra.push((format!("tau_mix_{name}"), tau.to_string()));
        let profile = worst_case_tv_profile(&chain.matrix, cfg.t_max.unwrap_or(tau))?;
        let mut series = Series::new(
            &format!("tv_{name}"),
            "t",
            "tv",
            &format!("worst-case total variation distance of the {name} dynamics"),
        );
        for (step, tv) in profile.iter().enumerate() {
            t.push(vec![cell(name), cell(step), cell(tv)]);
            series.points.push((step as f64, *tv));
        }
        report.series.push(series);
        if cfg.trace_steps > 0 {
            report
                .files
                .push((format!("trace_{name}.tsv"), trace(&inst, &chain, cfg.trace_steps, cfg.seed)?));
        }
    }
    let extra: Vec<(&str, String)> = extra.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    report
        .documents
        .push((cfg.command.stem().into(), Document::new(instance_header(cfg, &inst, &extra), t)));
    Ok(())
}

fn dwell_summary(run: &CouplingRun) -> String {
    run.dwell.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";")
}

fn couple(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let replicas = cfg.replicas.unwrap_or(DEFAULT_COUPLING_REPLICAS);
    let graphs = resolve_graphs(cfg)?;
    let mut runs_table = Table::new(&["instance", "start", "replica", "seed", "stream", "T", "final_index", "dwell"]);
    let mut summary = Table::new(&[
        "instance",
        "n",
        "omega",
        "k",
        "states",
        "starts",
        "replicas",
        "censored",
        "max_mean_T",
        "max_upper95_T",
        "omega_n2",
        "mixing_bound",
        "tau_mix_exact",
        "monotone",
    ]);
    let mut time_series = Series::new("coupling_time", "n", "max_mean_T", "largest mean coalescence time over start pairs");
    let mut curve = Series::new("omega_n2", "n", "omega_n2", "the ω·n² reference curve");
    let mut digests = Vec::new();
    for (gi, (label, g)) in graphs.iter().enumerate() {
        let omega = clique_number(g);
        let (lists, _) = resolve_lists(cfg, g, omega + 2)?;
        let k = lists
            .uniform_k()
            .ok_or_else(|| usage("the coupling needs uniform lists 0..k"))?;
        digests.push(graph_digest(g));
        let (order, omega) = coupling_setup(g, k)?;
        let n = g.n();
        let mut rng = RngStream::new(cfg.seed, START_STREAM ^ gi as u64);
        let starts = start_grid(g, k, &order, cfg.start_pairs, &mut rng)?;
        let max_steps = cfg.caps.max_steps.unwrap_or_else(|| default_max_steps(n, omega));
        let total = starts.len() * replicas;
        let base = (gi as u64) << 40;
        let runs: Vec<CouplingRun> = (0..total)
            .into_par_iter()
            .map(|j| {
                let (x, y) = &starts[j / replicas];
                let mut rng = RngStream::replica(cfg.seed, base + j as u64);
                run_coupling_with(g, &order, k, x, y, &mut rng, max_steps)
            })
            .collect::<std::result::Result<_, _>>()?;
        let per_start: Vec<Vec<CouplingRun>> = runs.chunks(replicas).map(<[CouplingRun]>::to_vec).collect();
        for (j, run) in runs.iter().enumerate() {
            let stream = RngStream::replica(cfg.seed, base + j as u64).stream_id();
            runs_table.push(vec![
                cell(label),
                cell(j / replicas),
                cell(j % replicas),
                cell(cfg.seed),
                cell(stream),
                run.time.map(|t| t.to_string()).unwrap_or_else(|| "CENSORED".into()),
                cell(run.final_index),
                dwell_summary(run),
            ]);
        }
        let bound = coupling_mixing_bound(&per_start);
        let monotone = runs.iter().all(|r| r.monotone);
        let omega_n2 = (omega * n * n) as f64;
        let states = count_colorings(g, &lists).to_usize().filter(|&s| s <= cfg.caps.matrix);
        let tau_mix = match states {
            Some(_) => {
                let space = ColoringSpace::enumerate(g, &lists, cfg.caps.enumeration)?;
                Some(mixing_time_exact(&kempe_matrix(g, k, &space)?.matrix, 0.25)?)
            }
            None => None,
        };
        if !monotone {
            report.fail(format!("{label}: the disagreement index decreased in some run"));
        }
        if bound.max_upper95 >= omega_n2 {
            report.fail(format!(
                "{label}: 95% upper confidence {} of the mean coalescence time is not below ωn² = {omega_n2}",
                bound.max_upper95
            ));
        }
        if let Some(tm) = tau_mix {
            if bound.bound < tm as f64 {
                report.fail(format!("{label}: 4·max E[T] = {} is below the exact mixing time {tm}", bound.bound));
            }
        }
        if bound.low_confidence {
            report
                .warnings
                .push(format!("{label}: {} runs censored at {max_steps} steps", bound.censored));
        }
        summary.push(vec![
            cell(label),
            cell(n),
            cell(omega),
            cell(k),
            opt_cell(states),
            cell(starts.len()),
            cell(replicas),
            cell(bound.censored),
            cell(bound.max_mean),
            cell(bound.max_upper95),
            cell(omega_n2),
            cell(bound.bound),
            opt_cell(tau_mix),
            cell(monotone),
        ]);
        time_series.points.push((n as f64, bound.max_mean));
        curve.points.push((n as f64, omega_n2));
    }
    let h = header(cfg, &[("corpus_digest", corpus_digest(graphs.iter().map(|(_, g)| g)))]);
    report
        .documents
        .push((cfg.command.stem().into(), Document::new(h.clone(), summary)));
    report.documents.push(("couple_runs".into(), Document::new(h, runs_table)));
    report.series.push(time_series);
    report.series.push(curve);
    Ok(())
}

fn ratio_cell(r: &BigRational) -> String {
    r.to_string()
}

fn project(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let inst = single_instance(cfg, delta_plus_two)?;
    let (g, lists) = (&inst.graph, &inst.lists);
    if !lists.is_deg_plus_two(g) {
        return Err(usage("projection/restriction needs a deg+2 list assignment"));
    }
    let reports = match cfg.vertex {
        Some(v) if v >= g.n() => return Err(usage(format!("vertex {v} is outside the graph"))),
        Some(v) => vec![projection_restriction(g, lists, v)?],
        None => projection_restriction_all(g, lists)?,
    };
    let mut summary = Table::new(&[
        "vertex",
        "full_gap",
        "projection_gap",
        "lambda_min",
        "gamma",
        "bound",
        "bound_holds",
        "gamma_within_1_over_n",
        "projection_formula_deviation",
    ]);
    let mut classes = Table::new(&["vertex", "color", "class_size", "restriction_gap", "stationary", "stay_probability"]);
    let mut pairs = Table::new(&["vertex", "from", "to", "ratio_to_target", "ratio_to_source", "threshold", "good"]);
    for r in &reports {
        if !r.bound_holds() {
            report.fail(format!("vertex {}: gap {} below the bound {}", r.vertex, r.full_gap, r.bound));
        }
        if !r.gamma_within_one_over_n() {
            report.fail(format!("vertex {}: γ = {} exceeds 1/n", r.vertex, r.gamma));
        }
        summary.push(vec![
            cell(r.vertex),
            cell(r.full_gap),
            cell(r.projection_gap),
            opt_cell(r.lambda_min),
            cell(r.gamma),
            cell(r.bound),
            cell(r.bound_holds()),
            cell(r.gamma_within_one_over_n()),
            cell(r.projection_formula_deviation),
        ]);
        for (a, c) in r.classes.iter().enumerate() {
            classes.push(vec![
                cell(r.vertex),
                cell(c.color),
                cell(c.size),
                opt_cell(c.gap),
                cell(r.projection_stationary[a]),
                cell(r.projection.get(a, a)),
            ]);
        }
        for &c1 in lists.list(r.vertex) {
            for &c2 in lists.list(r.vertex) {
                if c1 == c2 {
                    continue;
                }
                let p = good_pair_ratio(g, lists, r.vertex, c1, c2)?;
                pairs.push(vec![
                    cell(r.vertex),
                    cell(c1),
                    cell(c2),
                    ratio_cell(&p.ratio_to_target),
                    ratio_cell(&p.ratio_to_source),
                    ratio_cell(&p.threshold),
                    cell(p.is_good),
                ]);
            }
        }
    }
    let h = instance_header(cfg, &inst, &[]);
    report.documents.push((cfg.command.stem().into(), Document::new(h.clone(), summary)));
    report.documents.push(("project_classes".into(), Document::new(h.clone(), classes)));
    report.documents.push(("project_good_pairs".into(), Document::new(h, pairs)));
    Ok(())
}

fn paths(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let inst = single_instance(cfg, delta_plus_two)?;
    let g = &inst.graph;
    let k = inst.k.ok_or_else(|| usage("canonical paths need uniform lists 0..k"))?;
    let ct = clique_tree(g)?;
    let pd = balanced_path_decomposition(g, &ct)?;
    let all = chains(&inst, cfg)?;
    let (glauber, kempe) = (&all[0], &all[1]);
    let system = kempe_path_system(g, k, &pd, kempe, cfg.caps.branch)?;
    let r = congestion(glauber, kempe, &system)?;
    let halved = congestion(&slowed(glauber, 1, 2), glauber, &PathSystem::identity(glauber))?;
    if r.bound_holds() == Some(false) {
        report.fail(format!(
            "tau_rel(glauber) = {:?} exceeds tau_rel(kempe)·max rho = {:?}·{}",
            r.base_relaxation, r.reference_relaxation, r.max_rho
        ));
    }
    if r.truncated {
        report
            .warnings
            .push(format!("some exchanges produced more than {} paths; families were truncated", cfg.caps.branch));
    }
    let mut t = Table::new(&["from", "to", "rho"]);
    for &(a, b, rho) in &r.table {
        t.push(vec![cell(a), cell(b), cell(rho)]);
    }
    let paths_total: usize = system.families.values().map(Vec::len).sum();
    let mut s = Table::new(&["key", "value"]);
    for (key, value) in [
        ("max_rho", cell(r.max_rho)),
        ("glauber_tau_rel", opt_cell(r.base_relaxation)),
        ("kempe_tau_rel", opt_cell(r.reference_relaxation)),
        ("bound_holds", opt_cell(r.bound_holds())),
        ("halved_max_rho", cell(halved.max_rho)),
        ("families", cell(system.families.len())),
        ("paths", cell(paths_total)),
        ("truncated", cell(r.truncated)),
        ("path_bags", cell(pd.len())),
        ("max_cliques_per_bag", cell(pd.max_parts())),
    ] {
        s.push(vec![cell(key), value]);
    }
    let h = instance_header(cfg, &inst, &[]);
    report.documents.push((cfg.command.stem().into(), Document::new(h.clone(), s)));
    report.documents.push(("paths_congestion".into(), Document::new(h, t)));
    Ok(())
}

/// A random input for the technical bound, biased towards the boundary
/// `x = 1 − ε` where the hypothesis can hold.
pub fn random_tech_tuple<R: Rng + ?Sized>(rng: &mut R) -> (u64, usize, BigRational, Vec<BigRational>) {
    let a = rng.gen_range(1..=4u64);
    let k = rng.gen_range(a as usize..=a as usize + 5);
    let q = rng.gen_range(2..=12i64);
    let eps = BigRational::new(BigInt::from(rng.gen_range(1..q)), BigInt::from(q));
    let top = BigRational::from_integer(1.into()) - &eps;
    let xs = (0..k)
        .map(|_| {
            if rng.gen_bool(0.5) {
                top.clone()
            } else {
                let d = rng.gen_range(1..=12i64);
                let r = rng.gen_range(0..=d);
                (BigRational::new(r.into(), d.into())).min(top.clone())
            }
        })
        .collect();
    (a, k, eps, xs)
}

#[derive(Default, Clone, Copy)]
struct Tally {
    verdicts: usize,
    holds: usize,
    vacuous: usize,
    violated: usize,
}

impl Tally {
    fn add(&mut self, s: Status) {
        self.verdicts += 1;
        match s {
            Status::Holds => self.holds += 1,
            Status::Vacuous => self.vacuous += 1,
            Status::Violated => self.violated += 1,
        }
    }
}

fn verify_bounds(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let graphs = match cfg.graph {
        GraphSource::Unspecified => {
            let mut c = cfg.clone();
            c.graph = GraphSource::Corpus {
                max_n: DEFAULT_CORPUS_MAX_N,
            };
            resolve_graphs(&c)?
        }
        _ => resolve_graphs(cfg)?,
    };
    let per_graph = cfg.replicas.unwrap_or(DEFAULT_ASSIGNMENTS);
    let mut rng = RngStream::new(cfg.seed, LIST_STREAM);
    let mut instances = Vec::new();
    for (label, g) in &graphs {
        match cfg.colors {
            ColorSource::Default => {
                for _ in 0..per_graph {
                    instances.push((label.clone(), g.clone(), random_deg_plus_two_lists(g, &mut rng)));
                }
            }
            _ => instances.push((label.clone(), g.clone(), resolve_lists(cfg, g, 0)?.0)),
        }
    }
    if let Some((label, _, _)) = instances.iter().find(|(_, g, l)| !l.is_deg_plus_two(g)) {
        return Err(usage(format!("{label}: the counting checks need deg+2 lists")));
    }
    let swept: Vec<_> = instances
        .par_iter()
        .map(|(_, g, l)| sweep_instance(g, l))
        .collect::<std::result::Result<_, _>>()?;
    let mut log = Table::new(&[
        "check",
        "graph_digest",
        "assignment_digest",
        "vertex",
        "color",
        "lhs",
        "relation",
        "rhs",
        "pass",
    ]);
    let names = ["lemma_gv", "cor_distrib", "count_lb", "count_lb_strict", "tech"];
    let mut tallies = [Tally::default(); 5];
    for ((label, g, l), rows) in instances.iter().zip(&swept) {
        let (gd, ld) = (graph_digest(g), lists_digest(l));
        for (check, v, c, verdict) in rows {
            let slot = names.iter().position(|n| n == check).expect("known check");
            tallies[slot].add(verdict.status);
            if verdict.status == Status::Violated {
                report.fail(format!(
                    "{check} violated on {label} lists {} at vertex {v} colour {}: {} vs {}",
                    crate::io::lists_to_json(l),
                    opt_cell(*c),
                    verdict.lhs,
                    verdict.rhs
                ));
            }
            log.push(vec![
                cell(check),
                cell(short(&gd)),
                cell(short(&ld)),
                cell(v),
                opt_cell(*c),
                ratio_cell(&verdict.lhs),
                cell(match verdict.relation {
                    Relation::AtLeast => ">=",
                    Relation::AtMost => "<=",
                }),
                ratio_cell(&verdict.rhs),
                cell(verdict.status.name()),
            ]);
        }
    }
    let mut trng = RngStream::new(cfg.seed, TECH_STREAM);
    let tuples: Vec<_> = (0..cfg.tech_samples).map(|_| random_tech_tuple(&mut trng)).collect();
    let tech: Vec<_> = tuples
        .par_iter()
        .map(|(a, k, e, xs)| check_tech_bound(*a, *k, e, xs))
        .collect::<std::result::Result<_, _>>()?;
    for ((a, _, e, xs), t) in tuples.iter().zip(&tech) {
        tallies[4].add(t.verdict.status);
        if t.verdict.status == Status::Violated {
            let xs: Vec<String> = xs.iter().map(ToString::to_string).collect();
            report.fail(format!("tech violated: A={a} eps={e} x=({})", xs.join(", ")));
        }
    }
    let mut summary = Table::new(&["check", "verdicts", "holds", "vacuous", "violated"]);
    for (name, t) in names.iter().zip(tallies) {
        summary.push(vec![cell(name), cell(t.verdicts), cell(t.holds), cell(t.vacuous), cell(t.violated)]);
    }
    let h = header(
        cfg,
        &[
            ("corpus_digest", corpus_digest(graphs.iter().map(|(_, g)| g))),
            ("instances", instances.len().to_string()),
        ],
    );
    report.documents.push((cfg.command.stem().into(), Document::new(h.clone(), log)));
    report.documents.push(("verify_bounds_summary".into(), Document::new(h, summary)));
    Ok(())
}

fn gen(cfg: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let graphs = resolve_graphs(cfg)?;
    let mut t = Table::new(&["instance", "n", "edges", "max_degree", "clique_number", "chordal", "peo", "digest"]);
    for (label, g) in &graphs {
        let (order, chordal) = maximum_cardinality_search(g);
        let peo: Vec<String> = order.order().iter().map(ToString::to_string).collect();
        t.push(vec![
            cell(label),
            cell(g.n()),
            cell(g.edge_count()),
            cell(g.max_degree()),
            cell(clique_number(g)),
            cell(chordal),
            if chordal { peo.join(" ") } else { String::new() },
            graph_digest(g),
        ]);
        report
            .files
            .push((format!("{label}.json"), crate::io::graph_to_json(g) + "\n"));
    }
    let h = header(cfg, &[("corpus_digest", corpus_digest(graphs.iter().map(|(_, g)| g)))]);
    report.documents.push((cfg.command.stem().into(), Document::new(h, t)));
    Ok(())
}

/// Writes every document as `<stem>.csv`, the side files and the plot data
/// into `dir`. Returns the paths written.
pub fn write_report(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Output { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for (stem, doc) in &report.documents {
        let path = dir.join(format!("{stem}.csv"));
        std::fs::write(&path, doc.render()).map_err(io_err(&path))?;
        written.push(path);
    }
    for (name, contents) in &report.files {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(io_err(&path))?;
        written.push(path);
    }
    if !report.series.is_empty() {
        let plots = dir.join("plots");
        let out = emit_plot_data(&report.series, &plots).map_err(io_err(&plots))?;
        written.extend(out.written);
        for w in out.warnings {
            eprintln!("warning: {w}");
        }
    }
    Ok(written)
}
