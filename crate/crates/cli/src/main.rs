use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ringscan::community::{compare, detect_communities, modularity, read_partition_csv, Algorithm, Partition};
use ringscan::config::{ExportFormat, ExternalPartition, RunConfig};
use ringscan::cycles::{enumerate_cycles_with, filter_by_size, CycleSet, SizeHistogram};
use ringscan::export::{read_cycles_csv, suspicious_components, write_cycles_csv, write_dot, write_graphml, write_ranked_csv};
use ringscan::ingest::{build_collision_network, open_input, parse_collisions, CollisionNetwork};
use ringscan::pipeline::{enumeration_options, run_pipeline, PipelineError, Stage, StageExt};
use ringscan::scoring::{rank, score_all, ScoringContext};
use ringscan::synth::{generate, RingSpec, SyntheticSpec};
use ringscan::{Error, RootMode, TreeStrategy};

#[derive(Parser)]
#[command(name = "ringscan", version, about = "Find cycle-shaped fraud rings in collision data")]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "RINGSCAN_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: detect, score, rank, compare and export.
    Run(RunArgs),
    /// Generate a synthetic collision file with planted rings.
    Gen(GenArgs),
    /// Enumerate in-band cycles and write them as a cycle file.
    Detect(DetectArgs),
    /// Score and rank the cycles of a cycle file.
    Score(ScoreArgs),
    /// Run community baselines and pair them with cycles.
    Compare(CompareArgs),
    /// Write ranked CSV, graph files or assessments for a cycle file.
    Export(ExportArgs),
}

/// Options shared with the config file; flags override file values.
#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Collision CSV (`collision_id,driver_id,vehicle_id,date`).
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Tree strategy: bfs or dfs.
    #[arg(long)]
    strategy: Option<TreeStrategy>,
    /// Roots: all or single.
    #[arg(long)]
    root_mode: Option<RootMode>,
    #[arg(long)]
    min_exclusive: Option<usize>,
    #[arg(long)]
    max_exclusive: Option<usize>,
}

impl Common {
    fn config(&self, threads: Option<usize>) -> Result<RunConfig, PipelineError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path).stage(Stage::Config)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.input {
            cfg.input = v.clone();
        }
        if let Some(v) = self.strategy {
            cfg.strategy = v;
        }
        if let Some(v) = self.root_mode {
            cfg.root_mode = v;
        }
        if let Some(v) = self.min_exclusive {
            cfg.min_exclusive = v;
        }
        if let Some(v) = self.max_exclusive {
            cfg.max_exclusive = v;
        }
        if threads.is_some() {
            cfg.threads = threads;
        }
        cfg.validate().stage(Stage::Config)?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, short)]
    output_dir: Option<PathBuf>,
    /// Comma-separated community algorithms: multilevel, fast_greedy.
    #[arg(long, value_delimiter = ',')]
    baselines: Option<Vec<Algorithm>>,
    /// External partition as NAME=PATH; repeatable.
    #[arg(long = "partition", value_parser = parse_partition)]
    partitions: Vec<ExternalPartition>,
    /// Comma-separated formats: csv, json, graphml, dot.
    #[arg(long, value_delimiter = ',')]
    formats: Option<Vec<ExportFormat>>,
    #[arg(long)]
    top_k: Option<usize>,
    /// Skip the second enumeration with the other tree strategy.
    #[arg(long)]
    no_compare_strategies: bool,
}

#[derive(Args)]
struct GenArgs {
    /// JSON synthetic spec; flags override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Destination CSV, `-` for stdout.
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
    /// Ground-truth JSON destination.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    drivers: Option<usize>,
    #[arg(long)]
    collisions: Option<usize>,
    #[arg(long)]
    three_party_share: Option<f64>,
    /// Comma-separated planted ring sizes.
    #[arg(long, value_delimiter = ',')]
    rings: Option<Vec<usize>>,
    /// Chord collisions per planted ring.
    #[arg(long, default_value_t = 0)]
    chords: usize,
    /// Attachment collisions per planted ring.
    #[arg(long, default_value_t = 0)]
    attachments: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dates: bool,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    common: Common,
    /// Destination cycle file, `-` for stdout.
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    common: Common,
    /// Cycle file written by `detect`.
    #[arg(long)]
    cycles: PathBuf,
    /// Destination ranked CSV, `-` for stdout.
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Cycle file; cycles are enumerated when absent.
    #[arg(long)]
    cycles: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    baselines: Option<Vec<Algorithm>>,
    #[arg(long = "partition", value_parser = parse_partition)]
    partitions: Vec<ExternalPartition>,
    /// Destination comparison CSV, `-` for stdout.
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    cycles: PathBuf,
    #[arg(long, short)]
    output_dir: PathBuf,
    #[arg(long, value_delimiter = ',')]
    formats: Option<Vec<ExportFormat>>,
    #[arg(long)]
    top_k: Option<usize>,
}

fn parse_partition(s: &str) -> Result<ExternalPartition, String> {
    let (name, path) = s.split_once('=').ok_or("expected NAME=PATH")?;
    Ok(ExternalPartition {
        name: name.to_owned(),
        path: PathBuf::from(path),
    })
}

fn sink(path: &Path) -> io::Result<Box<dyn Write>> {
    if path == Path::new("-") {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

/// Parses, builds and prunes the collision network.
fn load_network(path: &Path) -> Result<CollisionNetwork, PipelineError> {
    let file = open_input(path).stage(Stage::Ingest)?;
    let (ds, skips) = parse_collisions(BufReader::new(file)).stage(Stage::Ingest)?;
    if skips.skipped() > 0 || skips.conflicting_dates > 0 {
        eprintln!(
            "ringscan: skipped {} of {} rows (missing driver {}, malformed {}, duplicate {}); {} conflicting dates",
            skips.skipped(),
            skips.rows_read,
            skips.missing_driver,
            skips.malformed,
            skips.duplicate_pairs,
            skips.conflicting_dates
        );
    }
    let network = build_collision_network(&ds).stage(Stage::Ingest)?;
    Ok(network.prune().0)
}

fn load_cycles(path: &Path, network: &CollisionNetwork) -> Result<CycleSet, PipelineError> {
    let file = open_input(path).stage(Stage::Detect)?;
    let cycles = read_cycles_csv(BufReader::new(file), &network.graph).stage(Stage::Detect)?;
    Ok(CycleSet::from_cycles(cycles))
}

fn detect(cfg: &RunConfig, network: &CollisionNetwork) -> Result<CycleSet, PipelineError> {
    let opts = enumeration_options(cfg.strategy, cfg.root_mode, cfg.bounds());
    let found = enumerate_cycles_with(&network.graph, &opts);
    let hist = SizeHistogram::of(&found.cycles, opts.max_len.is_none());
    eprintln!(
        "ringscan: {} distinct cycles ({} emitted, {} longer than the band skipped); bands 3:{} 4-5:{} 6-9:{} 10-49:{}",
        hist.total,
        found.emitted,
        found.skipped_long,
        hist.three,
        hist.four_to_five,
        hist.six_to_nine,
        hist.ten_to_forty_nine
    );
    filter_by_size(found.cycles, cfg.bounds()).stage(Stage::Detect)
}

fn cmd_run(args: RunArgs, threads: Option<usize>) -> Result<(), PipelineError> {
    let mut cfg = args.common.config(threads)?;
    if let Some(v) = args.output_dir {
        cfg.output_dir = v;
    }
    if let Some(v) = args.baselines {
        cfg.baselines = v;
    }
    cfg.partitions.extend(args.partitions);
    if let Some(v) = args.formats {
        cfg.formats = v;
    }
    if let Some(v) = args.top_k {
        cfg.top_k = v;
    }
    if args.no_compare_strategies {
        cfg.compare_strategies = false;
    }
    cfg.validate().stage(Stage::Config)?;
    let (out, files) = run_pipeline(&cfg)?;
    let r = &out.report;
    let skips = &r.ingestion.skips;
    if skips.skipped() > 0 {
        eprintln!("ringscan: skipped {} of {} input rows", skips.skipped(), skips.rows_read);
    }
    eprintln!(
        "ringscan: {} drivers, {} edges; core {} drivers, {} edges; {} cycles in band, {} flagged",
        r.ingestion.nodes, r.ingestion.edges, r.ingestion.pruned_nodes, r.ingestion.pruned_edges, r.scoring.scored, r.scoring.flagged
    );
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), PipelineError> {
    let mut spec = match &args.spec {
        Some(path) => {
            let file = open_input(path).stage(Stage::Config)?;
            serde_json::from_reader(BufReader::new(file)).map_err(Error::from).stage(Stage::Config)?
        }
        None => SyntheticSpec::benchmark(),
    };
    if let Some(v) = args.drivers {
        spec.driver_count = v;
    }
    if let Some(v) = args.collisions {
        spec.background_collision_count = v;
    }
    if let Some(v) = args.three_party_share {
        spec.three_party_share = v;
    }
    if let Some(sizes) = args.rings {
        spec.planted_rings = sizes
            .into_iter()
            .map(|size| RingSpec {
                size,
                chords: args.chords,
                attachments: args.attachments,
            })
            .collect();
    } else if args.chords > 0 || args.attachments > 0 {
        for r in &mut spec.planted_rings {
            r.chords = args.chords;
            r.attachments = args.attachments;
        }
    }
    if let Some(v) = args.seed {
        spec.seed = v;
    }
    if args.dates {
        spec.with_dates = true;
    }
    let (ds, truth) = generate(&spec).stage(Stage::Config)?;
    let mut w = sink(&args.output).stage(Stage::Export)?;
    ds.write_csv(&mut w).stage(Stage::Export)?;
    w.flush().stage(Stage::Export)?;
    if let Some(path) = args.truth {
        let file = File::create(path).stage(Stage::Export)?;
        serde_json::to_writer_pretty(BufWriter::new(file), &truth)
            .map_err(Error::from)
            .stage(Stage::Export)?;
    }
    Ok(())
}

fn cmd_detect(args: DetectArgs, threads: Option<usize>) -> Result<(), PipelineError> {
    let cfg = args.common.config(threads)?;
    let network = load_network(&cfg.input)?;
    let cycles = detect(&cfg, &network)?;
    let mut w = sink(&args.output).stage(Stage::Export)?;
    write_cycles_csv(&mut w, &cycles, &network.graph).stage(Stage::Export)?;
    w.flush().stage(Stage::Export)
}

fn cmd_score(args: ScoreArgs, threads: Option<usize>) -> Result<(), PipelineError> {
    let cfg = args.common.config(threads)?;
    let network = load_network(&cfg.input)?;
    let cycles = load_cycles(&args.cycles, &network)?;
    let ctx = ScoringContext::new(&network.graph).with_dates(&network.edge_date);
    let ranked = rank(score_all(&cfg.registry(), &cycles, &ctx).stage(Stage::Score)?);
    let mut w = sink(&args.output).stage(Stage::Export)?;
    write_ranked_csv(&mut w, &ranked, &ctx).stage(Stage::Export)?;
    w.flush().stage(Stage::Export)
}

fn cmd_compare(args: CompareArgs, threads: Option<usize>) -> Result<(), PipelineError> {
    let cfg = args.common.config(threads)?;
    let network = load_network(&cfg.input)?;
    let g = &network.graph;
    let cycles = match &args.cycles {
        Some(path) => load_cycles(path, &network)?,
        None => detect(&cfg, &network)?,
    };
    let mut partitions: Vec<(String, Partition)> = Vec::new();
    for alg in args.baselines.unwrap_or(cfg.baselines.clone()) {
        let d = detect_communities(g, alg).stage(Stage::Baseline)?;
        eprintln!(
            "ringscan: {alg}: {} communities, modularity {:.4}",
            d.partition.community_count(),
            d.modularity
        );
        partitions.push((alg.label().to_owned(), d.partition));
    }
    for ext in cfg.partitions.iter().chain(&args.partitions) {
        let file = open_input(&ext.path).stage(Stage::Baseline)?;
        let p = read_partition_csv(BufReader::new(file), g).stage(Stage::Baseline)?;
        let q = modularity(g, &p).stage(Stage::Baseline)?;
        eprintln!("ringscan: {}: {} communities, modularity {q:.4}", ext.name, p.community_count());
        partitions.push((ext.name.clone(), p));
    }
    let ctx = ScoringContext::new(g).with_dates(&network.edge_date);
    let report = compare(&cycles, &partitions, &cfg.registry(), &ctx).stage(Stage::Baseline)?;
    eprintln!("ringscan: {} cycles", report.cycle_count);
    let mut w = sink(&args.output).stage(Stage::Export)?;
    report.write_pairs_csv(&mut w).stage(Stage::Export)?;
    w.flush().stage(Stage::Export)
}

fn cmd_export(args: ExportArgs, threads: Option<usize>) -> Result<(), PipelineError> {
    let cfg = args.common.config(threads)?;
    let formats = args.formats.unwrap_or(cfg.formats.clone());
    let top_k = args.top_k.unwrap_or(cfg.top_k);
    let network = load_network(&cfg.input)?;
    let cycles = load_cycles(&args.cycles, &network)?;
    let ctx = ScoringContext::new(&network.graph).with_dates(&network.edge_date);
    let ranked = rank(score_all(&cfg.registry(), &cycles, &ctx).stage(Stage::Score)?);
    let dir = &args.output_dir;
    std::fs::create_dir_all(dir).stage(Stage::Export)?;
    let mut written = Vec::new();
    if formats.contains(&ExportFormat::Csv) {
        let path = dir.join("ranked.csv");
        let mut w = sink(&path).stage(Stage::Export)?;
        write_ranked_csv(&mut w, &ranked, &ctx).stage(Stage::Export)?;
        w.flush().stage(Stage::Export)?;
        written.push(path);
    }
    if formats.contains(&ExportFormat::Json) {
        let path = dir.join("assessments.json");
        let file = File::create(&path).stage(Stage::Export)?;
        serde_json::to_writer_pretty(BufWriter::new(file), &ranked)
            .map_err(Error::from)
            .stage(Stage::Export)?;
        written.push(path);
    }
    let walks = ranked.iter().take(top_k).map(|a| a.cycle_key.as_slice());
    let components = suspicious_components(&network.graph, walks);
    if !components.is_empty() && (formats.contains(&ExportFormat::Graphml) || formats.contains(&ExportFormat::Dot)) {
        std::fs::create_dir_all(dir.join("graphs")).stage(Stage::Export)?;
    }
    for (i, (nodes, member)) in components.iter().enumerate() {
        let name = format!("component-{:03}", i + 1);
        if formats.contains(&ExportFormat::Graphml) {
            let path = dir.join("graphs").join(format!("{name}.graphml"));
            let mut w = sink(&path).stage(Stage::Export)?;
            write_graphml(&mut w, &network, &name, nodes, member).stage(Stage::Export)?;
            w.flush().stage(Stage::Export)?;
            written.push(path);
        }
        if formats.contains(&ExportFormat::Dot) {
            let path = dir.join("graphs").join(format!("{name}.dot"));
            let mut w = sink(&path).stage(Stage::Export)?;
            write_dot(&mut w, &network, &name, nodes, member).stage(Stage::Export)?;
            w.flush().stage(Stage::Export)?;
            written.push(path);
        }
    }
    for f in written {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("ringscan: config: invalid thread count {n}");
            return ExitCode::from(Stage::Config.exit_code());
        }
    }
    let threads = cli.threads;
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, threads),
        Command::Gen(a) => cmd_gen(a),
        Command::Detect(a) => cmd_detect(a, threads),
        Command::Score(a) => cmd_score(a, threads),
        Command::Compare(a) => cmd_compare(a, threads),
        Command::Export(a) => cmd_export(a, threads),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ringscan: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
