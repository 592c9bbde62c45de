//! End-to-end run: ingest, build, prune, enumerate, filter, score, rank, then
//! community baselines and their comparison, then export.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufReader;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::community::{compare_scored, detect_communities, modularity, read_partition_csv, ComparisonReport, Partition};
use crate::config::RunConfig;
use crate::cycles::{enumerate_cycles_with, filter_by_size, CycleSet, EnumerateOptions, RootMode, SizeBounds, SizeHistogram};
use crate::error::Error;
use crate::ingest::{build_collision_network, open_input, parse_collisions, CollisionNetwork, SkipReport};
use crate::scoring::{cycle_label, rank, score_all, CycleAssessment, IndicatorRegistry, ScoringContext};
use crate::tree::TreeStrategy;

/// Symmetric-difference examples kept per side in the report.
const DIFFERENCE_EXAMPLES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Ingest,
    Detect,
    Score,
    Baseline,
    Export,
}

impl Stage {
    /// Process exit status for a failure in this stage.
    pub fn exit_code(self) -> u8 {
        match self {
            Stage::Config => 10,
            Stage::Ingest => 11,
            Stage::Detect => 12,
            Stage::Score => 13,
            Stage::Baseline => 14,
            Stage::Export => 15,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Detect => "detect",
            Stage::Score => "score",
            Stage::Baseline => "baseline",
            Stage::Export => "export",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl PipelineError {
    pub fn exit_code(&self) -> u8 {
        self.stage.exit_code()
    }
}

/// Tags errors with the stage they came from.
pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: Into<Error>> StageExt<T> for Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError {
            stage,
            source: e.into(),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestStats {
    pub skips: SkipReport,
    pub collisions: usize,
    pub nodes: usize,
    pub edges: usize,
    pub pruned_nodes: usize,
    pub pruned_edges: usize,
    pub pruned_components: usize,
    pub pruned_min_degree: Option<usize>,
    pub pruned_max_degree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyRun {
    pub strategy: TreeStrategy,
    pub root_mode: RootMode,
    /// Fundamental cycles produced across all trees, before deduplication.
    pub emitted: usize,
    /// Emitted cycles longer than the size band, dropped before deduplication.
    pub skipped_long: usize,
    /// Distinct cycles before the size filter.
    pub histogram: SizeHistogram,
    /// Distinct cycles inside the size band.
    pub in_band: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyDifference {
    pub only_primary: usize,
    pub only_other: usize,
    pub only_primary_examples: Vec<String>,
    pub only_other_examples: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleStats {
    pub bounds: SizeBounds,
    pub primary: StrategyRun,
    pub other: Option<StrategyRun>,
    pub difference: Option<StrategyDifference>,
}

/// One row of the review list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedRow {
    pub rank: usize,
    pub cycle_id: usize,
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub density_exceeds_simple_bound: bool,
    pub score: f64,
    pub flags: Vec<u8>,
    pub raw_values: Vec<Option<f64>>,
    /// Driver keys in canonical ring order, joined by `|`.
    pub node_external_keys: String,
}

impl RankedRow {
    pub fn new(rank: usize, a: &CycleAssessment, ctx: &ScoringContext<'_>) -> Self {
        RankedRow {
            rank,
            cycle_id: a.cycle_id.unwrap_or(usize::MAX),
            n: a.assessment.node_count,
            m: a.assessment.internal_edge_count,
            density: a.assessment.density,
            density_exceeds_simple_bound: a.assessment.density_exceeds_simple_bound,
            score: a.assessment.score,
            flags: a.assessment.flags.clone(),
            raw_values: a.assessment.raw_values.clone(),
            node_external_keys: cycle_label(ctx.graph, a.cycle_key.as_slice()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoringSummary {
    pub indicator_ids: Vec<String>,
    pub scored: usize,
    /// Cycles with at least one flag raised.
    pub flagged: usize,
    pub max_score: Option<f64>,
    /// The first `top_k` rows of the review list.
    pub top: Vec<RankedRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub name: String,
    pub community_count: usize,
    pub modularity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub ingestion: IngestStats,
    pub cycles: CycleStats,
    pub scoring: ScoringSummary,
    pub baselines: Vec<BaselineSummary>,
    pub comparison: Option<ComparisonReport>,
}

/// Non-deterministic facts about a run, kept out of the report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub version: String,
    pub started_unix_seconds: u64,
    pub threads: usize,
    pub stage_seconds: BTreeMap<String, f64>,
    /// Wall-clock seconds of cycle enumeration per tree strategy.
    pub strategy_seconds: BTreeMap<String, f64>,
}

/// Everything a run produces; exports are written from this.
#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub report: RunReport,
    pub metadata: RunMetadata,
    /// The pruned network all cycles and communities refer to.
    pub network: CollisionNetwork,
    pub cycles: CycleSet,
    /// Assessments of every in-band cycle in review order.
    pub ranked: Vec<CycleAssessment>,
    pub partitions: Vec<(String, Partition)>,
}

impl PipelineOutput {
    pub fn context(&self) -> ScoringContext<'_> {
        ScoringContext::new(&self.network.graph).with_dates(&self.network.edge_date)
    }
}

/// Enumeration settings a run uses for one strategy.
pub fn enumeration_options(strategy: TreeStrategy, root_mode: RootMode, bounds: SizeBounds) -> EnumerateOptions {
    // All-roots enumeration emits a tree per node; long cycles are only counted.
    let max_len = match root_mode {
        RootMode::AllRoots => Some(bounds.max_exclusive - 1),
        RootMode::SingleRootPerComponent => None,
    };
    EnumerateOptions {
        strategy,
        root_mode,
        max_len,
    }
}

fn run_strategy(
    network: &CollisionNetwork,
    strategy: TreeStrategy,
    root_mode: RootMode,
    bounds: SizeBounds,
) -> Result<(StrategyRun, CycleSet, f64), PipelineError> {
    let started = Instant::now();
    let opts = enumeration_options(strategy, root_mode, bounds);
    let enumeration = enumerate_cycles_with(&network.graph, &opts);
    let histogram = SizeHistogram::of(&enumeration.cycles, opts.max_len.is_none());
    let in_band = filter_by_size(enumeration.cycles, bounds).stage(Stage::Detect)?;
    let seconds = started.elapsed().as_secs_f64();
    let run = StrategyRun {
        strategy,
        root_mode,
        emitted: enumeration.emitted,
        skipped_long: enumeration.skipped_long,
        histogram,
        in_band: in_band.len(),
    };
    Ok((run, in_band, seconds))
}

/// Ingests, detects, scores and compares without writing anything.
pub fn analyze(cfg: &RunConfig) -> Result<PipelineOutput, PipelineError> {
    cfg.validate().stage(Stage::Config)?;
    let registry: IndicatorRegistry = cfg.registry();
    let bounds = cfg.bounds();
    let mut metadata = RunMetadata {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        started_unix_seconds: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        threads: rayon::current_num_threads(),
        ..RunMetadata::default()
    };
    let mut clock = Instant::now();
    let mut lap = |metadata: &mut RunMetadata, stage: Stage| {
        metadata.stage_seconds.insert(stage.to_string(), clock.elapsed().as_secs_f64());
        clock = Instant::now();
    };

    // ingest, build, prune
    let file = open_input(&cfg.input).stage(Stage::Ingest)?;
    let (dataset, skips) = parse_collisions(BufReader::new(file)).stage(Stage::Ingest)?;
    let full = build_collision_network(&dataset).stage(Stage::Ingest)?;
    let (network, _) = full.prune();
    let g = &network.graph;
    let ingestion = IngestStats {
        skips,
        collisions: dataset.len(),
        nodes: full.graph.node_count(),
        edges: full.graph.edge_count(),
        pruned_nodes: g.node_count(),
        pruned_edges: g.edge_count(),
        pruned_components: g.connected_components().len(),
        pruned_min_degree: g.min_degree(),
        pruned_max_degree: g.max_degree(),
    };
    drop(full);
    drop(dataset);
    lap(&mut metadata, Stage::Ingest);

    // enumerate and filter
    let (primary, cycles, seconds) = run_strategy(&network, cfg.strategy, cfg.root_mode, bounds)?;
    metadata.strategy_seconds.insert(cfg.strategy.to_string(), seconds);
    let (other, difference) = if cfg.compare_strategies {
        let (run, other_cycles, seconds) = run_strategy(&network, cfg.strategy.other(), cfg.root_mode, bounds)?;
        metadata.strategy_seconds.insert(cfg.strategy.other().to_string(), seconds);
        let (only_primary, only_other) = cycles.symmetric_difference(&other_cycles);
        let examples = |keys: &[crate::cycles::CanonicalKey]| -> Vec<String> {
            keys.iter().take(DIFFERENCE_EXAMPLES).map(|k| cycle_label(g, k.as_slice())).collect()
        };
        let difference = StrategyDifference {
            only_primary: only_primary.len(),
            only_other: only_other.len(),
            only_primary_examples: examples(&only_primary),
            only_other_examples: examples(&only_other),
        };
        (Some(run), Some(difference))
    } else {
        (None, None)
    };
    let cycle_stats = CycleStats {
        bounds,
        primary,
        other,
        difference,
    };
    lap(&mut metadata, Stage::Detect);

    // score and rank
    let ctx = ScoringContext::new(g).with_dates(&network.edge_date);
    let assessments = score_all(&registry, &cycles, &ctx).stage(Stage::Score)?;
    let scores: Vec<f64> = assessments.iter().map(CycleAssessment::score).collect();
    let ranked = rank(assessments);
    let scoring = ScoringSummary {
        indicator_ids: registry.indicators().iter().map(|i| i.id.clone()).collect(),
        scored: ranked.len(),
        flagged: ranked.iter().filter(|a| a.assessment.flags.iter().any(|&f| f > 0)).count(),
        max_score: ranked.first().map(CycleAssessment::score),
        top: ranked.iter().take(cfg.top_k).enumerate().map(|(i, a)| RankedRow::new(i + 1, a, &ctx)).collect(),
    };
    lap(&mut metadata, Stage::Score);

    // baselines and comparison; an edgeless core has no modularity to optimize
    let mut partitions: Vec<(String, Partition)> = Vec::new();
    let mut baselines = Vec::new();
    let mut comparison = None;
    if g.edge_count() > 0 {
        for &alg in &cfg.baselines {
            let d = detect_communities(g, alg).stage(Stage::Baseline)?;
            baselines.push(BaselineSummary {
                name: alg.label().to_owned(),
                community_count: d.partition.community_count(),
                modularity: d.modularity,
            });
            partitions.push((alg.label().to_owned(), d.partition));
        }
        for ext in &cfg.partitions {
            let file = open_input(&ext.path).stage(Stage::Baseline)?;
            let p = read_partition_csv(BufReader::new(file), g).stage(Stage::Baseline)?;
            baselines.push(BaselineSummary {
                name: ext.name.clone(),
                community_count: p.community_count(),
                modularity: modularity(g, &p).stage(Stage::Baseline)?,
            });
            partitions.push((ext.name.clone(), p));
        }
        if !partitions.is_empty() {
            comparison = Some(compare_scored(&cycles, &scores, &partitions, &registry, &ctx).stage(Stage::Baseline)?);
        }
    }
    lap(&mut metadata, Stage::Baseline);

    let report = RunReport {
        ingestion,
        cycles: cycle_stats,
        scoring,
        baselines,
        comparison,
    };
    Ok(PipelineOutput {
        report,
        metadata,
        network,
        cycles,
        ranked,
        partitions,
    })
}

/// Runs the whole pipeline and writes every selected export into the output
/// directory. Work runs on a pool sized by `cfg.threads` when set.
pub fn run_pipeline(cfg: &RunConfig) -> Result<(PipelineOutput, Vec<PathBuf>), PipelineError> {
    let body = || -> Result<(PipelineOutput, Vec<PathBuf>), PipelineError> {
        let mut out = analyze(cfg)?;
        let started = Instant::now();
        let files = crate::export::export_all(&out, &cfg.output_dir, &cfg.formats).stage(Stage::Export)?;
        out.metadata
            .stage_seconds
            .insert(Stage::Export.to_string(), started.elapsed().as_secs_f64());
        crate::export::write_metadata(&out.metadata, &cfg.output_dir).stage(Stage::Export)?;
        Ok((out, files))
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))
            .stage(Stage::Config)?
            .install(body),
        None => body(),
    }
}
