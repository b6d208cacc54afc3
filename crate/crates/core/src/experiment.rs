//! Repeated detection runs per strategy with found/unique/coverage statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::candidate::BoundaryCandidate;
use crate::detection::{detect, DetectionConfig, RunStats, Strategy};
use crate::error::{Error, Result};
use crate::summarize::{summarize_tagged, ClusterReport, SummaryConfig};
use crate::sut::SutDescriptor;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub strategies: Vec<Strategy>,
    pub repetitions: usize,
    /// Template for every run; strategy and seed are overridden.
    pub detection: DetectionConfig,
    pub summary: SummaryConfig,
}

impl ExperimentConfig {
    pub fn new(detection: DetectionConfig, repetitions: usize) -> Self {
        ExperimentConfig {
            strategies: vec![Strategy::Lns, Strategy::Bcs],
            repetitions,
            detection,
            summary: SummaryConfig::default(),
        }
    }

    /// Seed of repetition `r` of the `s`-th strategy; distinct per run.
    pub fn seed(&self, s: usize, r: usize) -> u64 {
        self.detection
            .sampler
            .seed
            .wrapping_add((r * self.strategies.len() + s) as u64)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub strategy: Strategy,
    pub repetition: usize,
    pub seed: u64,
    pub stats: RunStats,
    pub clusters_covered: usize,
}

/// Mean and sample standard deviation; zero spread for a single value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    pub fn of(xs: &[f64]) -> Self {
        if xs.is_empty() {
            return MeanSd { mean: 0.0, sd: 0.0 };
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = if xs.len() < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        MeanSd { mean, sd }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub found: MeanSd,
    /// Candidates found in some run of this strategy and no run of another.
    pub unique: usize,
    pub union: usize,
    pub clusters: MeanSd,
    pub unique_clusters: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub sut: String,
    pub repetitions: usize,
    pub total: usize,
    pub total_clusters: usize,
    pub strategies: Vec<StrategySummary>,
    pub runs: Vec<RunRecord>,
    pub clusters: ClusterReport,
}

pub fn run_experiment(sut: &SutDescriptor, config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.strategies.is_empty() || config.repetitions == 0 {
        return Err(Error::Config(
            "experiment needs at least one strategy and one repetition".into(),
        ));
    }
    config.detection.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.strategies.len())
        .flat_map(|s| (0..config.repetitions).map(move |r| (s, r)))
        .collect();
    let results: Vec<(usize, usize, RunStats, Vec<BoundaryCandidate>)> = jobs
        .par_iter()
        .map(|&(s, r)| {
            let mut cfg = config.detection.clone();
            cfg.strategy = config.strategies[s];
            cfg.sampler.seed = config.seed(s, r);
            let run = detect(sut, &cfg)?;
            Ok((s, r, run.stats, run.archive.into_entries()))
        })
        .collect::<Result<_>>()?;

    // Union in job order, remembering which strategies found each key.
    let mut union: Vec<BoundaryCandidate> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut found_by: Vec<BTreeSet<Strategy>> = Vec::new();
    for (s, _, _, cands) in &results {
        for c in cands {
            let j = *index.entry(c.key()).or_insert_with(|| {
                union.push(c.clone());
                found_by.push(BTreeSet::new());
                union.len() - 1
            });
            found_by[j].insert(config.strategies[*s]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.detection.sampler.seed);
    let clusters = summarize_tagged(&union, &found_by, &config.summary, &mut rng)?;
    let owner: HashMap<&str, usize> = clusters
        .clusters()
        .flat_map(|c| c.members.iter().map(move |m| (m.as_str(), c.id)))
        .collect();

    let mut runs = Vec::new();
    let mut covered_by: BTreeMap<Strategy, BTreeSet<usize>> = BTreeMap::new();
    for (s, r, stats, cands) in &results {
        let strategy = config.strategies[*s];
        let covered: BTreeSet<usize> = cands.iter().map(|c| owner[c.key().as_str()]).collect();
        covered_by.entry(strategy).or_default().extend(&covered);
        runs.push(RunRecord {
            strategy,
            repetition: *r,
            seed: config.seed(*s, *r),
            stats: stats.clone(),
            clusters_covered: covered.len(),
        });
    }

    let strategies = config
        .strategies
        .iter()
        .map(|&st| {
            let mine: Vec<&RunRecord> = runs.iter().filter(|r| r.strategy == st).collect();
            let found: Vec<f64> = mine.iter().map(|r| r.stats.candidates as f64).collect();
            let cov: Vec<f64> = mine.iter().map(|r| r.clusters_covered as f64).collect();
            let own = |j: usize| found_by[j].contains(&st);
            let unique = (0..union.len())
                .filter(|&j| own(j) && found_by[j].len() == 1)
                .count();
            let empty = BTreeSet::new();
            let my_clusters = covered_by.get(&st).unwrap_or(&empty);
            let others: HashSet<usize> = covered_by
                .iter()
                .filter(|(k, _)| **k != st)
                .flat_map(|(_, v)| v.iter().copied())
                .collect();
            StrategySummary {
                strategy: st,
                found: MeanSd::of(&found),
                unique,
                union: (0..union.len()).filter(|&j| own(j)).count(),
                clusters: MeanSd::of(&cov),
                unique_clusters: my_clusters.iter().filter(|c| !others.contains(c)).count(),
            }
        })
        .collect();

    Ok(ExperimentReport {
        sut: sut.name().to_string(),
        repetitions: config.repetitions,
        total: union.len(),
        total_clusters: clusters.clusters().count(),
        strategies,
        runs,
        clusters,
    })
}
