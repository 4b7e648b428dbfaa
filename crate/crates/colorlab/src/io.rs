//! Graph and list-assignment files.
//!
//! Graphs are either a JSON object `{"n": 3, "edges": [[0, 1], [1, 2]]}` or
//! whitespace-separated edge-list text whose first line is `n m`. Lists are a
//! JSON object `{"lists": [[0, 1], [0, 2, 5]]}`, or `k=<int>` for the uniform
//! assignment `0..k`.

use std::fs;
use std::path::{Path, PathBuf};

use colorlab_core::{Color, Graph, ListAssignment};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Unreadable { path: PathBuf, source: std::io::Error },
    #[error("malformed graph: {0}")]
    Graph(String),
    #[error("malformed list assignment: {0}")]
    Lists(String),
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct ListsFile {
    lists: Vec<Vec<Color>>,
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Unreadable {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_graph(text: &str) -> Result<Graph, InputError> {
    let bad = |m: String| InputError::Graph(m);
    if text.trim_start().starts_with('{') {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        return Graph::new(file.n, file.edges.into_iter().map(|[u, v]| (u, v))).map_err(|e| bad(e.to_string()));
    }
    let mut tokens = text.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|_| bad(format!("expected a non-negative integer, found {t:?}")))
    });
    let mut next = |what: &str| tokens.next().unwrap_or_else(|| Err(bad(format!("missing {what}"))));
    let n = next("vertex count")?;
    let m = next("edge count")?;
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let u = next(&format!("endpoint of edge {i}"))?;
        let v = next(&format!("endpoint of edge {i}"))?;
        edges.push((u, v));
    }
    if tokens.next().is_some() {
        return Err(bad(format!("more than the {m} declared edges")));
    }
    Graph::new(n, edges).map_err(|e| bad(e.to_string()))
}

pub fn read_graph(path: &Path) -> Result<Graph, InputError> {
    parse_graph(&read(path)?)
}

pub fn graph_to_json(g: &Graph) -> String {
    let file = GraphFile {
        n: g.n(),
        edges: g.edges().map(|(u, v)| [u, v]).collect(),
    };
    serde_json::to_string(&file).expect("plain data serializes")
}

pub fn lists_to_json(lists: &ListAssignment) -> String {
    let file = ListsFile {
        lists: lists.lists().to_vec(),
    };
    serde_json::to_string(&file).expect("plain data serializes")
}

/// `k=<int>` shorthand, if `arg` is one.
pub fn parse_uniform_shorthand(arg: &str) -> Option<Result<usize, InputError>> {
    let rest = arg.trim().strip_prefix("k=")?;
    Some(
        rest.parse::<usize>()
            .map_err(|_| InputError::Lists(format!("bad colour count in {arg:?}"))),
    )
}

pub fn parse_lists(text: &str, n: usize) -> Result<ListAssignment, InputError> {
    if let Some(k) = parse_uniform_shorthand(text) {
        return Ok(ListAssignment::uniform(n, k?));
    }
    let file: ListsFile = serde_json::from_str(text).map_err(|e| InputError::Lists(e.to_string()))?;
    if file.lists.len() != n {
        return Err(InputError::Lists(format!(
            "{} lists for a graph on {n} vertices",
            file.lists.len()
        )));
    }
    ListAssignment::new(file.lists).map_err(|e| InputError::Lists(e.to_string()))
}

/// A `--lists` argument: the shorthand or a file path.
pub fn read_lists(arg: &str, n: usize) -> Result<ListAssignment, InputError> {
    if parse_uniform_shorthand(arg).is_some() {
        return parse_lists(arg, n);
    }
    parse_lists(&read(Path::new(arg))?, n)
}
