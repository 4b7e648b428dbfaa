//! Experiment configuration. A config fully determines a run; it is echoed
//! as JSON into every output header.

use std::path::PathBuf;
use std::str::FromStr;

use colorlab_core::coloring::ENUMERATION_CAP;
use colorlab_core::comparison::BRANCH_CAP;
use colorlab_core::spectral::DENSE_LIMIT;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Spectral gap, relaxation and exact mixing times of both dynamics.
    Gap,
    /// Worst-case total variation distance against time.
    Mix,
    /// Kempe coupling: coalescence times and the mixing bound they imply.
    Couple,
    /// Projection/restriction decomposition at each vertex.
    Project,
    /// Kempe-to-Glauber canonical paths and their congestion.
    Paths,
    /// Exact counting inequalities over a corpus of instances.
    VerifyBounds,
    /// Generate graphs only.
    Gen,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gap => "gap",
            Command::Mix => "mix",
            Command::Couple => "couple",
            Command::Project => "project",
            Command::Paths => "paths",
            Command::VerifyBounds => "verify-bounds",
            Command::Gen => "gen",
        }
    }

    /// File stem of the main output.
    pub fn stem(self) -> &'static str {
        match self {
            Command::VerifyBounds => "verify_bounds",
            other => other.name(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GraphSource {
    /// Nothing given; only `verify-bounds` has a default (the corpus up to 5 vertices).
    Unspecified,
    File { path: PathBuf },
    /// Random chordal graphs, one per `n` in `n_min..=n_max`.
    Chordal { n_min: usize, n_max: usize, max_clique: usize },
    /// Every non-isomorphic graph on `1..=max_n` vertices.
    Corpus { max_n: usize },
    Complete { n: usize },
    Path { n: usize },
    Cycle { n: usize },
    Star { leaves: usize },
}

fn parse_range(v: &str) -> Result<(usize, usize), String> {
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad count {s:?}"));
    match v.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {v:?}"));
            }
            Ok((a, b))
        }
        None => num(v).map(|x| (x, x)),
    }
}

impl FromStr for GraphSource {
    type Err = String;

    /// `chordal:n=8,maxclique=3` (with `n=4..10` for a series),
    /// `corpus:n=5`, `complete:n=3`, `path:n=4`, `cycle:n=5`, `star:leaves=3`.
    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, params) = s.split_once(':').unwrap_or((s, ""));
        let mut fields = std::collections::BTreeMap::new();
        for part in params.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, found {part:?}"))?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str| fields.remove(key).ok_or_else(|| format!("{kind} needs {key}=..."));
        let single = |v: String| parse_range(&v).and_then(|(a, b)| if a == b { Ok(a) } else { Err(format!("{kind} takes a single size")) });
        let source = match kind {
            "chordal" => {
                let (n_min, n_max) = parse_range(&take("n")?)?;
                let max_clique = single(take("maxclique")?)?;
                if n_min == 0 || max_clique == 0 || max_clique > n_min {
                    return Err("need 1 ≤ maxclique ≤ n".into());
                }
                GraphSource::Chordal { n_min, n_max, max_clique }
            }
            "corpus" => GraphSource::Corpus { max_n: single(take("n")?)? },
            "complete" => GraphSource::Complete { n: single(take("n")?)? },
            "path" => GraphSource::Path { n: single(take("n")?)? },
            "cycle" => GraphSource::Cycle { n: single(take("n")?)? },
            "star" => GraphSource::Star { leaves: single(take("leaves")?)? },
            other => return Err(format!("unknown generator {other:?}")),
        };
        if let Some(extra) = fields.keys().next() {
            return Err(format!("unknown generator parameter {extra:?}"));
        }
        if let GraphSource::Corpus { max_n } = source {
            if !(1..=7).contains(&max_n) {
                return Err("the corpus covers 1 to 7 vertices".into());
            }
        }
        if matches!(source, GraphSource::Cycle { n } if n < 3) {
            return Err("a cycle needs at least 3 vertices".into());
        }
        Ok(source)
    }
}

/// How `k` follows from `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonForm {
    /// `k = ⌈(1 + ε)(Δ + 1)⌉`.
    Multiplicative,
    /// `k = ⌈Δ + 1 + εω⌉`.
    Additive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ColorSource {
    /// Command default: `ω + 2` for `couple`, `Δ + 2` otherwise; random
    /// deg+2 assignments for `verify-bounds`.
    Default,
    Colors { k: usize },
    Epsilon { epsilon: String, form: EpsilonForm },
    /// A list file or the `k=<int>` shorthand.
    Lists { arg: String },
}

/// Parses `2`, `0.25` or `1/3` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let bad = || format!("not a number: {s:?}");
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (BigInt, BigInt) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let r = BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32));
    Ok(if negative { -r } else { r })
}

/// `k` for a given `ε`, maximum degree and clique number.
pub fn colors_for_epsilon(eps: &BigRational, form: EpsilonForm, max_degree: usize, omega: usize) -> usize {
    let d1 = BigRational::from_integer(BigInt::from(max_degree + 1));
    let k = match form {
        EpsilonForm::Multiplicative => (BigRational::one() + eps) * d1,
        EpsilonForm::Additive => d1 + eps * BigRational::from_integer(BigInt::from(omega)),
    };
    k.ceil().to_integer().try_into().expect("colour count fits in usize")
}

pub fn check_epsilon(s: &str) -> Result<BigRational, String> {
    let e = parse_rational(s)?;
    if !e.is_positive() {
        return Err("ε must be positive".into());
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Largest colouring space enumerated.
    pub enumeration: usize,
    /// Largest space for exact mixing times and TV profiles.
    pub matrix: usize,
    /// Paths emitted per Kempe exchange.
    pub branch: usize,
    /// Coupling step budget; `100·ω·n²` when unset.
    pub max_steps: Option<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            enumeration: ENUMERATION_CAP,
            matrix: DENSE_LIMIT,
            branch: BRANCH_CAP,
            max_steps: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub graph: GraphSource,
    pub colors: ColorSource,
    pub seed: u64,
    /// Coupling replicas per start pair (default 200), or random list
    /// assignments per graph for `verify-bounds` (default 10).
    pub replicas: Option<usize>,
    pub caps: Caps,
    /// Random start pairs for colouring spaces too large for the full grid.
    pub start_pairs: usize,
    /// Random technical-bound tuples checked by `verify-bounds`.
    pub tech_samples: usize,
    /// Restrict `project` to one vertex.
    pub vertex: Option<usize>,
    /// Last time of the TV profile; the exact mixing time when unset.
    pub t_max: Option<usize>,
    /// Sampler steps written as a trace by `gap` and `mix`.
    pub trace_steps: usize,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: Command, graph: GraphSource) -> Self {
        Self {
            command,
            graph,
            colors: ColorSource::Default,
            seed: 0,
            replicas: None,
            caps: Caps::default(),
            start_pairs: 8,
            tech_samples: 1000,
            vertex: None,
            t_max: None,
            trace_steps: 0,
            out: None,
        }
    }

    pub fn with_colors(mut self, colors: ColorSource) -> Self {
        self.colors = colors;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_replicas(mut self, replicas: usize) -> Self {
        self.replicas = Some(replicas);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
