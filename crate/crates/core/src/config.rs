//! Run configuration, read from TOML. Every key is optional:
//!
//! ```toml
//! input = "collisions.csv"
//! output_dir = "out"
//! strategy = "bfs"            # or "dfs"
//! root_mode = "all"           # or "single"
//! min_exclusive = 3
//! max_exclusive = 50
//! compare_strategies = true
//! baselines = ["multilevel", "fast_greedy"]
//! formats = ["csv", "json", "graphml", "dot"]
//! top_k = 20
//! seed = 42
//! threads = 4
//!
//! [[partition]]
//! name = "walktrap"
//! path = "walktrap.csv"
//!
//! [[indicator]]
//! id = "density"
//! kind = "induced_density"
//! direction = "higher"
//! threshold = 0.15
//! weight = 1.0
//! ```
//!
//! Listing any `[[indicator]]` replaces the default registry.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::community::Algorithm;
use crate::cycles::{RootMode, SizeBounds};
use crate::error::{Error, Result};
use crate::scoring::IndicatorRegistry;
use crate::tree::TreeStrategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
    Graphml,
    Dot,
}

impl ExportFormat {
    pub const ALL: [ExportFormat; 4] = [ExportFormat::Csv, ExportFormat::Json, ExportFormat::Graphml, ExportFormat::Dot];
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
            ExportFormat::Graphml => "graphml",
            ExportFormat::Dot => "dot",
        })
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            "graphml" => Ok(ExportFormat::Graphml),
            "dot" => Ok(ExportFormat::Dot),
            other => Err(Error::Config(format!("unknown export format `{other}`"))),
        }
    }
}

/// Community assignment computed elsewhere, compared like a built-in baseline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalPartition {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output_dir: PathBuf,
    pub strategy: TreeStrategy,
    pub root_mode: RootMode,
    pub min_exclusive: usize,
    pub max_exclusive: usize,
    /// Also enumerate with the other tree strategy and report the difference.
    pub compare_strategies: bool,
    pub baselines: Vec<Algorithm>,
    #[serde(rename = "partition")]
    pub partitions: Vec<ExternalPartition>,
    pub formats: Vec<ExportFormat>,
    /// Ranked rows kept in the JSON report and exported as graphs.
    pub top_k: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    #[serde(rename = "indicator", skip_serializing_if = "Option::is_none")]
    pub indicators: Option<IndicatorRegistry>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let bounds = SizeBounds::default();
        RunConfig {
            input: PathBuf::new(),
            output_dir: PathBuf::from("ringscan-out"),
            strategy: TreeStrategy::BreadthFirst,
            root_mode: RootMode::AllRoots,
            min_exclusive: bounds.min_exclusive,
            max_exclusive: bounds.max_exclusive,
            compare_strategies: true,
            baselines: vec![Algorithm::Multilevel, Algorithm::FastGreedy],
            partitions: Vec::new(),
            formats: ExportFormat::ALL.to_vec(),
            top_k: 20,
            seed: 42,
            threads: None,
            indicators: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn bounds(&self) -> SizeBounds {
        SizeBounds {
            min_exclusive: self.min_exclusive,
            max_exclusive: self.max_exclusive,
        }
    }

    pub fn registry(&self) -> IndicatorRegistry {
        self.indicators.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds().validate()?;
        if self.input.as_os_str().is_empty() {
            return Err(Error::Config("input path is empty".into()));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::Config("output directory is empty".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        let mut names: Vec<String> = self.baselines.iter().map(|a| a.label().to_owned()).collect();
        for p in &self.partitions {
            if p.name.trim().is_empty() || p.path.as_os_str().is_empty() {
                return Err(Error::Config("external partitions need a name and a path".into()));
            }
            names.push(p.name.clone());
        }
        let total = names.len();
        names.sort();
        names.dedup();
        if names.len() != total {
            return Err(Error::Config("baseline and partition names must be unique".into()));
        }
        Ok(())
    }
}
