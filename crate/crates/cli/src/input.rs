//! Matrix files and model configuration.

use std::fs;
use std::path::Path;

use kcompound::dynamics::{Activation, HopfieldModel};
use kcompound::Matrix64;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// File contents with their SHA-256 digest.
pub struct Loaded {
    pub text: String,
    pub digest: String,
}

pub fn load(path: &Path) -> CliResult<Loaded> {
    let bytes = fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| CliError::parse(path, "not valid UTF-8"))?;
    Ok(Loaded { text, digest })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    data: Vec<Vec<f64>>,
}

fn parse_number(tok: &str) -> Result<f64, String> {
    let v: f64 = tok.parse().map_err(|_| format!("'{tok}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{tok}' is not finite"))
    }
}

/// Parses either the text layout (`"rows cols"` then one line per row) or a
/// JSON object `{"rows", "cols", "data"}`.
pub fn parse_matrix(text: &str, path: &Path) -> CliResult<Matrix64> {
    let err = |m: String| CliError::parse(path, m);
    let trimmed = text.trim_start();
    let (rows, cols, data) = if trimmed.starts_with('{') {
        let doc: MatrixDoc = serde_json::from_str(trimmed).map_err(|e| err(e.to_string()))?;
        if doc.data.len() != doc.rows {
            return Err(err(format!("declared {} rows, found {}", doc.rows, doc.data.len())));
        }
        if let Some((i, r)) = doc.data.iter().enumerate().find(|(_, r)| r.len() != doc.cols) {
            return Err(err(format!("row {} has {} entries, expected {}", i + 1, r.len(), doc.cols)));
        }
        (doc.rows, doc.cols, doc.data.concat())
    } else {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| err("empty matrix file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(format!("bad dimension '{t}'"))))
            .collect::<CliResult<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(err(format!("header must be 'rows cols', got '{header}'")));
        };
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let line = lines.next().ok_or_else(|| err(format!("expected {rows} rows, found {i}")))?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| parse_number(t).map_err(|m| err(format!("row {}: {m}", i + 1))))
                .collect::<CliResult<_>>()?;
            if row.len() != cols {
                return Err(err(format!("row {} has {} entries, expected {cols}", i + 1, row.len())));
            }
            data.extend(row);
        }
        if let Some(extra) = lines.next() {
            return Err(err(format!("unexpected trailing line '{extra}'")));
        }
        (rows, cols, data)
    };
    if rows == 0 || cols == 0 {
        return Err(err("matrix has no entries".into()));
    }
    Matrix64::from_vec(rows, cols, data).map_err(|e| err(e.to_string()))
}

/// Whitespace-separated numbers (weights, vectors).
pub fn parse_vector(text: &str, path: &Path) -> CliResult<Vec<f64>> {
    let v: Vec<f64> = text
        .split_whitespace()
        .map(|t| parse_number(t).map_err(|m| CliError::parse(path, m)))
        .collect::<CliResult<_>>()?;
    if v.is_empty() {
        return Err(CliError::parse(path, "no numbers found"));
    }
    Ok(v)
}

/// Renders a matrix in the text layout.
pub fn format_matrix(a: &Matrix64) -> String {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrList {
    Scalar(f64),
    List(Vec<f64>),
}

impl ScalarOrList {
    fn expand(&self, n: usize, what: &str) -> Result<Vec<f64>, String> {
        match self {
            ScalarOrList::Scalar(v) => Ok(vec![*v; n]),
            ScalarOrList::List(v) if v.len() == n => Ok(v.clone()),
            ScalarOrList::List(v) => Err(format!("{what} has {} entries, expected {n}", v.len())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    Tanh,
    Logistic,
}

/// Simulation defaults carried by a model file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub ic_lower: Option<ScalarOrList>,
    pub ic_upper: Option<ScalarOrList>,
    #[serde(default)]
    pub initial: Vec<Vec<f64>>,
    #[serde(default)]
    pub equilibrium_guesses: Vec<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub step: Option<f64>,
}

/// Flat key-value description of a Hopfield network.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfieldConfig {
    pub n: usize,
    pub r: ScalarOrList,
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
    pub u: Option<ScalarOrList>,
    #[serde(default = "default_activation")]
    pub activation: ActivationKind,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default = "one")]
    pub b: f64,
    pub m: Option<ScalarOrList>,
    #[serde(rename = "M")]
    pub big_m: Option<ScalarOrList>,
    pub simulation: Option<SimulationSection>,
}

fn default_activation() -> ActivationKind {
    ActivationKind::Tanh
}

fn one() -> f64 {
    1.0
}

impl HopfieldConfig {
    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::parse(path, e.to_string()))
    }

    pub fn build(&self, path: &Path) -> CliResult<HopfieldModel<f64>> {
        let n = self.n;
        let err = |m: String| CliError::parse(path, m);
        if n == 0 {
            return Err(err("n must be positive".into()));
        }
        if self.w.len() != n || self.w.iter().any(|r| r.len() != n) {
            return Err(err(format!("W must be {n}x{n}")));
        }
        let w = Matrix64::from_rows(&self.w).map_err(|e| err(e.to_string()))?;
        let r = self.r.expand(n, "r").map_err(err)?;
        let u = match &self.u {
            Some(u) => u.expand(n, "u").map_err(err)?,
            None => vec![0.0; n],
        };
        let act = match self.activation {
            ActivationKind::Tanh => Activation::Tanh { a: self.a, b: self.b },
            ActivationKind::Logistic => Activation::Logistic { a: self.a, b: self.b },
        };
        let mut model = HopfieldModel::new(r, w, u, vec![act; n])?;
        if self.m.is_some() || self.big_m.is_some() {
            let defaults = model.derivative_bounds().to_vec();
            let m = match &self.m {
                Some(m) => m.expand(n, "m").map_err(err)?,
                None => defaults.iter().map(|b| b.0).collect(),
            };
            let big_m = match &self.big_m {
                Some(v) => v.expand(n, "M").map_err(err)?,
                None => defaults.iter().map(|b| b.1).collect(),
            };
            model = model.with_bounds(m.into_iter().zip(big_m).collect())?;
        }
        Ok(model)
    }

    pub fn box_bounds(&self, path: &Path) -> CliResult<Option<(Vec<f64>, Vec<f64>)>> {
        let Some(sim) = &self.simulation else {
            return Ok(None);
        };
        match (&sim.ic_lower, &sim.ic_upper) {
            (Some(lo), Some(hi)) => {
                let err = |m: String| CliError::parse(path, m);
                Ok(Some((
                    lo.expand(self.n, "ic_lower").map_err(err)?,
                    hi.expand(self.n, "ic_upper").map_err(err)?,
                )))
            }
            (None, None) => Ok(None),
            _ => Err(CliError::parse(path, "ic_lower and ic_upper must be given together")),
        }
    }
}
