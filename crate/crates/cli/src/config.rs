use std::path::{Path, PathBuf};

use graphif::decomposers::{PlanarWindowRule, Storage, WindowMode, DEFAULT_NU};
use graphif::distances::{EdgeLength, ShortestPathMethod};
use graphif::harness::Method;
use graphif::{io, Result, StoppingRule};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum GraphKind {
    /// Ring for one-dimensional points, Delaunay for planar points.
    #[default]
    Auto,
    Ring,
    Delaunay,
    EdgeList,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphConfig {
    pub kind: GraphKind,
    pub neighbors_per_side: usize,
    /// `i,j,weight` file for `edge_list`.
    pub edges: Option<PathBuf>,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            kind: GraphKind::Auto,
            neighbors_per_side: 2,
            edges: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DistanceSource {
    /// Circular or Euclidean distances of the point coordinates.
    #[default]
    Embedding,
    ShortestPath {
        #[serde(default)]
        method: ShortestPathMethod,
        #[serde(default)]
        edge_length: EdgeLength,
    },
    /// Row-major CSV without header.
    File { path: PathBuf },
}

/// Everything a run depends on besides its input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub method: Method,
    pub graph: GraphConfig,
    pub distance: DistanceSource,
    pub nu: f64,
    /// Manual spectral cutoffs, one per IMF; automatic when absent.
    pub cutoffs: Option<Vec<f64>>,
    pub mode: WindowMode,
    pub storage: Storage,
    pub planar_rule: PlanarWindowRule,
    pub extent: Option<f64>,
    pub rule: StoppingRule,
    pub max_imfs: usize,
    pub seed: u64,
    pub points: Option<PathBuf>,
    pub signal: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: Method::DbIf,
            graph: GraphConfig::default(),
            distance: DistanceSource::default(),
            nu: DEFAULT_NU,
            cutoffs: None,
            mode: WindowMode::default(),
            storage: Storage::default(),
            planar_rule: PlanarWindowRule::default(),
            extent: None,
            rule: StoppingRule::default(),
            max_imfs: 10,
            seed: 0,
            points: None,
            signal: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => io::read_json(p),
            None => Ok(RunConfig::default()),
        }
    }
}
