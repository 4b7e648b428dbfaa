//! Plot data: headerless two-column text files with a JSON schema sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    /// File stem.
    pub name: String,
    pub x: String,
    pub y: String,
    pub description: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: &str, x: &str, y: &str, description: &str) -> Self {
        Self {
            name: name.into(),
            x: x.into(),
            y: y.into(),
            description: description.into(),
            points: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        self.points.iter().map(|(x, y)| format!("{x} {y}\n")).collect()
    }
}

#[derive(Serialize)]
struct Schema<'a> {
    data: String,
    columns: [&'a str; 2],
    separator: &'static str,
    rows: usize,
    description: &'a str,
}

#[derive(Debug, Default)]
pub struct PlotOutput {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Writes `<name>.dat` and `<name>.schema.json` for every nonempty series.
pub fn emit_plot_data(series: &[Series], dir: &Path) -> std::io::Result<PlotOutput> {
    let mut out = PlotOutput::default();
    for s in series.iter().filter(|s| s.points.is_empty()) {
        out.warnings.push(format!("series {} is empty; nothing written", s.name));
    }
    let nonempty: Vec<&Series> = series.iter().filter(|s| !s.points.is_empty()).collect();
    if nonempty.is_empty() {
        out.warnings.push("no plot data".into());
        return Ok(out);
    }
    fs::create_dir_all(dir)?;
    for s in nonempty {
        let data = dir.join(format!("{}.dat", s.name));
        fs::write(&data, s.render())?;
        let schema = Schema {
            data: format!("{}.dat", s.name),
            columns: [&s.x, &s.y],
            separator: " ",
            rows: s.points.len(),
            description: &s.description,
        };
        let sidecar = dir.join(format!("{}.schema.json", s.name));
        fs::write(&sidecar, serde_json::to_string_pretty(&schema).expect("schema serializes") + "\n")?;
        out.written.push(data);
        out.written.push(sidecar);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_data_and_schema() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = Series::new("tv_k1", "t", "tv", "worst-case TV distance");
        s.points = vec![(0.0, 0.5), (1.0, 0.0)];
        let out = emit_plot_data(&[s], dir.path()).unwrap();
        assert_eq!(out.written.len(), 2);
        assert_eq!(fs::read_to_string(dir.path().join("tv_k1.dat")).unwrap(), "0 0.5\n1 0\n");
        let schema: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("tv_k1.schema.json")).unwrap()).unwrap();
        assert_eq!(schema["rows"], 2);
        assert_eq!(schema["columns"][1], "tv");
    }

    #[test]
    fn empty_input_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("plots");
        let out = emit_plot_data(&[Series::new("e", "x", "y", "")], &sub).unwrap();
        assert!(out.written.is_empty());
        assert!(!out.warnings.is_empty());
        assert!(!sub.exists());
    }
}
