//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sharp_hardy::frames::FrameSpec;
use sharp_hardy::mc::ExecPolicy;
use sharp_hardy::verify::Inequality;

pub const DEFAULT_EPS_GRID: [f64; 6] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Frames may be given as `"euclidean:5"` or as `{"kind": "euclidean", "n": 5}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum FrameField {
    Spec(FrameSpec),
    Text(String),
}

/// Everything a config file may carry. Every field is optional; flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    frame: Option<FrameField>,
    p: Option<f64>,
    theta: Option<f64>,
    p_list: Option<Vec<f64>>,
    eps_grid: Option<Vec<f64>>,
    samples: Option<usize>,
    seed: Option<u64>,
    bumps: Option<usize>,
    inequality: Option<Inequality>,
    policy: Option<ExecPolicy>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Frame as kind:args, e.g. euclidean:5, heisenberg:1, greiner:1:2, grushin:2:1:1
    #[arg(long)]
    pub frame: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Comma-separated exponents for the identity and harmonicity commands
    #[arg(long, value_delimiter = ',')]
    pub p_list: Option<Vec<f64>>,
    /// Comma-separated, strictly decreasing cut-off parameters
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random test functions
    #[arg(long)]
    pub bumps: Option<usize>,
    /// hardy, rellich or auxiliary
    #[arg(long)]
    pub inequality: Option<String>,
    /// sequential or parallel
    #[arg(long)]
    pub policy: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file mirroring the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// The resolved configuration, echoed into every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub frame: Option<FrameSpec>,
    pub p: Option<f64>,
    pub theta: Option<f64>,
    pub p_list: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub bumps: usize,
    pub inequality: Inequality,
    pub policy: ExecPolicy,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
}

fn read_file(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

fn parse_policy(s: &str) -> Result<ExecPolicy, String> {
    match s {
        "sequential" => Ok(ExecPolicy::Sequential),
        "parallel" => Ok(ExecPolicy::Parallel),
        _ => Err(format!("unknown policy '{s}'")),
    }
}

impl CommonArgs {
    pub fn resolve(&self, default_samples: usize) -> Result<RunConfig, String> {
        let file = match &self.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let frame = match (self.frame.clone(), file.frame) {
            (Some(s), _) | (None, Some(FrameField::Text(s))) => Some(s.parse().map_err(|e| format!("{e}"))?),
            (None, Some(FrameField::Spec(spec))) => {
                spec.validate().map_err(|e| e.to_string())?;
                Some(spec)
            }
            (None, None) => None,
        };
        let inequality = match &self.inequality {
            Some(s) => s.parse().map_err(|e| format!("{e}"))?,
            None => file.inequality.unwrap_or(Inequality::Hardy),
        };
        let policy = match &self.policy {
            Some(s) => parse_policy(s)?,
            None => file.policy.unwrap_or_default(),
        };
        Ok(RunConfig {
            frame,
            p: self.p.or(file.p),
            theta: self.theta.or(file.theta),
            p_list: self.p_list.clone().or(file.p_list).unwrap_or_default(),
            eps_grid: self.eps_grid.clone().or(file.eps_grid).unwrap_or_else(|| DEFAULT_EPS_GRID.to_vec()),
            samples: self.samples.or(file.samples).unwrap_or(default_samples),
            seed: self.seed.or(file.seed).unwrap_or(0),
            bumps: self.bumps.or(file.bumps).unwrap_or(10),
            inequality,
            policy,
            out: self.out.clone().or(file.out),
            format: self.format.or(file.format).unwrap_or(Format::Json),
        })
    }
}

impl RunConfig {
    pub fn frame(&self) -> Result<FrameSpec, String> {
        self.frame.ok_or_else(|| "--frame is required".to_string())
    }

    pub fn p(&self) -> Result<f64, String> {
        self.p.ok_or_else(|| "--p is required".to_string())
    }

    pub fn theta(&self) -> Result<f64, String> {
        self.theta.ok_or_else(|| "--theta is required".to_string())
    }

    pub fn p_list_or(&self, default: &[f64]) -> Vec<f64> {
        match (self.p_list.is_empty(), self.p) {
            (false, _) => self.p_list.clone(),
            (true, Some(p)) => vec![p],
            (true, None) => default.to_vec(),
        }
    }
}
