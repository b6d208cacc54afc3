//! `boundex` command line: detection, summarization, ranking, oracle scans
//! and small experiments.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boundex::detection::{detect, Budget, DetectionConfig, Strategy};
use boundex::distance::{Boundariness, OutputDistanceKind};
use boundex::experiment::{run_experiment, ExperimentConfig};
use boundex::io::{self as bio, ArchiveDocument, RunManifest};
use boundex::oracle::{oracle_scan, OracleWindow};
use boundex::rank::{assign_clusters, rank, top, top_per_cluster, write_ranked_csv};
use boundex::report::{cluster_markdown, experiment_markdown};
use boundex::sampling::SamplingMethod;
use boundex::summarize::{summarize_seeded, ClusterReport, SummaryConfig};
use boundex::sut::SutDescriptor;
use boundex::{BoundaryCandidate, Error, InputTuple};
use clap::{Args, Parser, Subcommand, ValueEnum};

const SEED_ENV: &str = "AUTOBVA_SEED";

#[derive(Parser)]
#[command(name = "boundex", version, about = "Black-box boundary value exploration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search a SUT for boundary candidates and write the archive.
    Detect(DetectArgs),
    /// Merge archives and cluster the candidates.
    Summarize(SummarizeArgs),
    /// Rank archived candidates by difference quotient.
    Rank(RankArgs),
    /// Scan every adjacent pair in a window.
    Oracle(OracleArgs),
    /// Repeated runs of each strategy with summary tables.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
struct SearchArgs {
    /// bytecount, bmi, bmi-class, date or external:<command>
    #[arg(long)]
    sut: String,
    /// Argument count of an external SUT.
    #[arg(long, default_value_t = 1)]
    arity: usize,
    /// Wall-clock budget per run.
    #[arg(long, conflicts_with = "iterations")]
    seconds: Option<f64>,
    /// Number of sampled starting points per run.
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "bituniform")]
    sampling: String,
    #[arg(long, value_enum, default_value = "on")]
    cts: OnOff,
    /// strlen, jaccard<N> or levenshtein
    #[arg(long, default_value = "strlen")]
    distance: String,
    /// Candidates must score strictly above this (a rational such as 1/2).
    #[arg(long, default_value = "0")]
    threshold: String,
    #[arg(long, default_value_t = boundex::detection::DEFAULT_MAX_DOUBLINGS)]
    max_doublings: u32,
    #[arg(long, default_value_t = boundex::sampling::DEFAULT_BIG_INT_BIT_CAP)]
    big_int_bits: u32,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_parser = ["lns", "bcs"], default_value = "bcs")]
    strategy: String,
    /// Output directory for archive.csv, archive.json and manifest.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Archive files (.csv or .json) or detect output directories.
    #[arg(required = true)]
    archives: Vec<PathBuf>,
    #[arg(long, default_value_t = 100)]
    restarts: usize,
    #[arg(long, default_value_t = 10)]
    max_k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for report.md and report.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[arg(required = true)]
    archives: Vec<PathBuf>,
    #[arg(long, default_value = "jaccard2")]
    distance: String,
    /// Keep only the first N rows, overall or per cluster.
    #[arg(long)]
    top: Option<usize>,
    /// A report.json whose clusters tag the ranked rows.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Apply --top within each cluster of --report.
    #[arg(long, requires = "report")]
    per_cluster: bool,
    /// Destination CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    sut: String,
    #[arg(long, default_value_t = 1)]
    arity: usize,
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    #[arg(long, allow_hyphen_values = true)]
    to: String,
    /// Values for all arguments, `;`-separated; the scanned one is ignored.
    #[arg(long, allow_hyphen_values = true)]
    fixed: Option<String>,
    /// Index of the scanned argument.
    #[arg(long, default_value_t = 0)]
    arg: usize,
    #[arg(long, default_value = "strlen")]
    distance: String,
    /// Allow windows above the evaluation limit.
    #[arg(long)]
    force: bool,
    /// Destination CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long, value_delimiter = ',', default_value = "lns,bcs")]
    strategies: Vec<String>,
    #[arg(long, default_value_t = 100)]
    restarts: usize,
    /// Output directory for experiment.md and experiment.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Detect(a) => cmd_detect(a),
        Command::Summarize(a) => cmd_summarize(a),
        Command::Rank(a) => cmd_rank(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Parse(_) | Error::Precondition(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// `--seed`, unless the environment overrides it.
fn effective_seed(flag: u64) -> boundex::Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not a seed"))),
        Err(_) => Ok(flag),
    }
}

fn parse_distance(s: &str) -> boundex::Result<OutputDistanceKind> {
    s.parse()
}

fn parse_strategy(s: &str) -> boundex::Result<Strategy> {
    s.parse()
}

fn detection_config(a: &SearchArgs, strategy: Strategy, default_budget: Budget) -> boundex::Result<DetectionConfig> {
    let budget = match (a.seconds, a.iterations) {
        (Some(s), _) => Budget::Seconds(s),
        (None, Some(n)) => Budget::Iterations(n),
        (None, None) => default_budget,
    };
    let mut cfg = DetectionConfig::new(strategy, budget).with_seed(effective_seed(a.seed)?);
    cfg.sampler.method = a.sampling.parse::<SamplingMethod>()?;
    cfg.sampler.cts = matches!(a.cts, OnOff::On);
    cfg.sampler.big_int_bit_cap = a.big_int_bits;
    cfg.output_distance = parse_distance(&a.distance)?;
    cfg.threshold = a.threshold.parse::<Boundariness>()?;
    cfg.bcs_max_doublings = a.max_doublings;
    cfg.validate()?;
    Ok(cfg)
}

fn ensure_dir(dir: &Path) -> boundex::Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn cmd_detect(a: DetectArgs) -> boundex::Result<()> {
    let sut = SutDescriptor::from_name(&a.search.sut, a.search.arity)?;
    let cfg = detection_config(&a.search, parse_strategy(&a.strategy)?, Budget::Seconds(30.0))?;
    let run = detect(&sut, &cfg)?;
    let manifest = RunManifest::new(sut.name(), &cfg, &run);
    ensure_dir(&a.out)?;
    bio::save_csv(&a.out.join("archive.csv"), run.archive.entries())?;
    bio::save_json(
        &a.out.join("archive.json"),
        &ArchiveDocument {
            manifest: Some(manifest.clone()),
            candidates: run.archive.entries().to_vec(),
        },
    )?;
    bio::save_json(&a.out.join("manifest.json"), &manifest)?;
    println!(
        "{} {}: {} candidates from {} samples, {} executions in {:.2}s",
        sut.name(),
        cfg.strategy,
        run.stats.candidates,
        run.stats.samples,
        run.stats.executions,
        run.stats.elapsed_seconds
    );
    Ok(())
}

/// Candidates of one archive argument and the strategy that produced
/// them, when a manifest says so. A directory means its archive.csv.
fn load_tagged(path: &Path) -> boundex::Result<(Vec<BoundaryCandidate>, Option<Strategy>)> {
    let (file, manifest) = if path.is_dir() {
        (path.join("archive.csv"), Some(path.join("manifest.json")))
    } else {
        let sibling = path.parent().map(|p| p.join("manifest.json"));
        (path.to_path_buf(), sibling)
    };
    let is_json = file.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let label = file.display().to_string();
        let doc = bio::read_json(fs::File::open(&file)?).map_err(|e| Error::Data {
            path: label,
            line: 0,
            message: e.to_string(),
        })?;
        let strategy = doc.manifest.as_ref().map(|m| m.strategy);
        return Ok((doc.candidates, strategy));
    }
    let candidates = bio::load_archive(&file)?;
    let strategy = manifest
        .filter(|m| m.is_file())
        .and_then(|m| fs::read_to_string(m).ok())
        .and_then(|s| bio::read_manifest(s.as_bytes()).ok())
        .map(|m| m.strategy);
    Ok((candidates, strategy))
}

/// Merged unique candidates with the strategies that found each one; the
/// tag list is empty when no archive names its strategy.
fn load_merged(paths: &[PathBuf]) -> boundex::Result<(Vec<BoundaryCandidate>, Vec<BTreeSet<Strategy>>)> {
    let mut merged: Vec<BoundaryCandidate> = Vec::new();
    let mut tags: Vec<BTreeSet<Strategy>> = Vec::new();
    let mut index = std::collections::HashMap::new();
    let mut any_tag = false;
    for p in paths {
        let (cands, strategy) = load_tagged(p)?;
        any_tag |= strategy.is_some();
        for c in cands {
            let j = *index.entry(c.key()).or_insert_with(|| {
                merged.push(c.clone());
                tags.push(BTreeSet::new());
                merged.len() - 1
            });
            tags[j].extend(strategy);
        }
    }
    if !any_tag {
        tags.clear();
    }
    Ok((merged, tags))
}

fn cmd_summarize(a: SummarizeArgs) -> boundex::Result<()> {
    let (cands, tags) = load_merged(&a.archives)?;
    let cfg = SummaryConfig {
        restarts: a.restarts,
        max_k: a.max_k,
        ..SummaryConfig::default()
    };
    let report = summarize_seeded(&cands, &tags, &cfg, effective_seed(a.seed)?)?;
    ensure_dir(&a.out)?;
    let md = cluster_markdown(&report);
    fs::write(a.out.join("report.md"), &md)?;
    bio::save_json(&a.out.join("report.json"), &report)?;
    print!("{md}");
    Ok(())
}

fn cmd_rank(a: RankArgs) -> boundex::Result<()> {
    let (cands, _) = load_merged(&a.archives)?;
    let mut ranked = rank(&cands, parse_distance(&a.distance)?)?;
    if let Some(path) = &a.report {
        let label = path.display().to_string();
        let report: ClusterReport = bio::read_report(fs::File::open(path)?).map_err(|e| Error::Data {
            path: label,
            line: 0,
            message: e.to_string(),
        })?;
        assign_clusters(&mut ranked, &report);
    }
    let rows = match a.top {
        Some(n) if a.per_cluster => top_per_cluster(&ranked, n),
        Some(n) => top(&ranked, n),
        None => ranked,
    };
    match &a.out {
        Some(p) => write_ranked_csv(fs::File::create(p)?, &rows),
        None => write_ranked_csv(io::stdout().lock(), &rows),
    }
}

fn cmd_oracle(a: OracleArgs) -> boundex::Result<()> {
    let sut = SutDescriptor::from_name(&a.sut, a.arity)?;
    let template = match &a.fixed {
        Some(f) => InputTuple::parse(f)?,
        None if sut.arity() == 1 => InputTuple::parse("0")?,
        None => {
            return Err(Error::Config(format!(
                "{} takes {} arguments; give the others with --fixed",
                sut.name(),
                sut.arity()
            )))
        }
    };
    let parse_int = |s: &str| {
        s.trim()
            .parse()
            .map_err(|_| Error::Config(format!("not an integer: {s:?}")))
    };
    let window = OracleWindow {
        template,
        argument: a.arg,
        from: parse_int(&a.from)?,
        to: parse_int(&a.to)?,
    };
    let found = oracle_scan(&sut, &window, parse_distance(&a.distance)?, a.force)?;
    match &a.out {
        Some(p) => bio::save_csv(p, &found),
        None => bio::write_csv(io::stdout().lock(), &found),
    }
}

fn cmd_experiment(a: ExperimentArgs) -> boundex::Result<()> {
    let sut = SutDescriptor::from_name(&a.search.sut, a.search.arity)?;
    let strategies = a
        .strategies
        .iter()
        .map(|s| parse_strategy(s))
        .collect::<boundex::Result<Vec<_>>>()?;
    let det = detection_config(&a.search, strategies[0], Budget::Iterations(10_000))?;
    let mut cfg = ExperimentConfig::new(det, a.repetitions);
    cfg.strategies = strategies;
    cfg.summary.restarts = a.restarts;
    let report = run_experiment(&sut, &cfg)?;
    ensure_dir(&a.out)?;
    let md = experiment_markdown(&report);
    fs::write(a.out.join("experiment.md"), &md)?;
    bio::save_json(&a.out.join("experiment.json"), &report)?;
    let mut out = io::stdout().lock();
    out.write_all(md.as_bytes())?;
    Ok(())
}
