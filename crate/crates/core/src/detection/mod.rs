//! The detection loop: sample a starting point, search locally, keep every
//! new candidate whose score clears the threshold.

mod bcs;
mod lns;
mod mutation;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::candidate::BoundaryCandidate;
use crate::distance::{Boundariness, OutputDistanceKind};
use crate::error::{Error, Result};
use crate::sampling::{SamplerConfig, Sampler};
use crate::sut::{ExecutionOutcome, SutDescriptor};
use crate::value::InputTuple;

pub use bcs::{bcs_search, BcsResult, DEFAULT_MAX_DOUBLINGS};
pub use lns::lns_search;
pub use mutation::{applicable_operators, mutate, mutate_by, Direction, MutationOperator};

/// Runs a SUT and counts the executions.
pub struct Executor<'a> {
    sut: &'a SutDescriptor,
    executions: u64,
}

impl<'a> Executor<'a> {
    pub fn new(sut: &'a SutDescriptor) -> Self {
        Executor { sut, executions: 0 }
    }

    pub fn run(&mut self, i: &InputTuple) -> ExecutionOutcome {
        self.executions += 1;
        self.sut.execute(i)
    }

    pub fn executions(&self) -> u64 {
        self.executions
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Lns,
    Bcs,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Lns => "lns",
            Strategy::Bcs => "bcs",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lns" => Ok(Strategy::Lns),
            "bcs" => Ok(Strategy::Bcs),
            _ => Err(Error::Config(format!("unknown strategy {s:?} (lns, bcs)"))),
        }
    }
}

/// Stop criterion: wall-clock time or a fixed number of sampled points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Seconds(f64),
    Iterations(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub strategy: Strategy,
    pub budget: Budget,
    pub threshold: Boundariness,
    pub output_distance: OutputDistanceKind,
    pub sampler: SamplerConfig,
    pub bcs_max_doublings: u32,
}

impl DetectionConfig {
    pub fn new(strategy: Strategy, budget: Budget) -> Self {
        DetectionConfig {
            strategy,
            budget,
            threshold: Boundariness::zero(),
            output_distance: OutputDistanceKind::StrLen,
            sampler: SamplerConfig::default(),
            bcs_max_doublings: DEFAULT_MAX_DOUBLINGS,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.sampler.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Budget::Seconds(s) = self.budget {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::Config(format!("invalid time budget {s}")));
            }
        }
        self.sampler.validate()
    }
}

/// Insertion-ordered candidate set keyed by the ordered input pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Archive {
    threshold: Boundariness,
    entries: Vec<BoundaryCandidate>,
    keys: HashSet<String>,
}

impl Default for Archive {
    fn default() -> Self {
        Archive::new(Boundariness::zero())
    }
}

impl Archive {
    pub fn new(threshold: Boundariness) -> Self {
        Archive {
            threshold,
            entries: Vec::new(),
            keys: HashSet::new(),
        }
    }

    /// Adds `c` if its score exceeds the threshold and its key is new.
    pub fn insert(&mut self, c: BoundaryCandidate) -> bool {
        if c.score <= self.threshold {
            return false;
        }
        if !self.keys.insert(c.key()) {
            return false;
        }
        self.entries.push(c);
        true
    }

    pub fn extend<I: IntoIterator<Item = BoundaryCandidate>>(&mut self, cs: I) -> usize {
        cs.into_iter().filter(|c| self.insert(c.clone())).count()
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.keys.contains(key)
    }

    pub fn threshold(&self) -> &Boundariness {
        &self.threshold
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BoundaryCandidate] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BoundaryCandidate> {
        self.entries.iter()
    }

    pub fn into_entries(self) -> Vec<BoundaryCandidate> {
        self.entries
    }

    /// Checks uniqueness of keys and that every score clears the threshold.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut seen = HashSet::new();
        for c in &self.entries {
            if !seen.insert(c.key()) {
                return Err(format!("duplicate key {}", c.key()));
            }
            if c.score <= self.threshold {
                return Err(format!("{} scores {} <= threshold", c.key(), c.score));
            }
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Archive {
    type Item = &'a BoundaryCandidate;
    type IntoIter = std::slice::Iter<'a, BoundaryCandidate>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub elapsed_seconds: f64,
    pub executions: u64,
    pub samples: u64,
    pub candidates: u64,
}

#[derive(Debug, Clone)]
pub struct DetectionRun {
    pub archive: Archive,
    pub stats: RunStats,
}

/// Runs detection with a generator seeded from `config.sampler.seed`.
pub fn detect(sut: &SutDescriptor, config: &DetectionConfig) -> Result<DetectionRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.sampler.seed);
    detect_with_rng(sut, config, &mut rng)
}

pub fn detect_with_rng<R: Rng + ?Sized>(
    sut: &SutDescriptor,
    config: &DetectionConfig,
    rng: &mut R,
) -> Result<DetectionRun> {
    config.validate()?;
    let sampler = Sampler::new(sut, &config.sampler)?;
    let mut exec = Executor::new(sut);
    let mut archive = Archive::new(config.threshold.clone());
    let start = Instant::now();
    let deadline = match config.budget {
        Budget::Seconds(s) => Some(Duration::from_secs_f64(s)),
        Budget::Iterations(_) => None,
    };
    let mut samples = 0u64;
    loop {
        match (config.budget, deadline) {
            (Budget::Iterations(n), _) if samples >= n => break,
            (_, Some(d)) if start.elapsed() >= d => break,
            _ => {}
        }
        let s = sampler.sample(rng);
        samples += 1;
        match config.strategy {
            Strategy::Lns => {
                // A zero output distance scores zero, which never clears the
                // (non-negative) threshold.
                let d_o = config.output_distance;
                let moved = |a: &ExecutionOutcome, b: &ExecutionOutcome| {
                    a.text() != b.text() && d_o.measure_f64(a.text(), b.text()) > 0.0
                };
                for c in lns::lns_with(&mut exec, &s.input, d_o, moved) {
                    archive.insert(c);
                }
            }
            Strategy::Bcs => {
                if let Some(r) = bcs::bcs_with(
                    &mut exec,
                    config.output_distance,
                    &s.input,
                    rng,
                    config.bcs_max_doublings,
                    Some(&s.domains),
                ) {
                    archive.insert(r.candidate);
                }
            }
        }
    }
    let stats = RunStats {
        elapsed_seconds: start.elapsed().as_secs_f64(),
        executions: exec.executions(),
        samples,
        candidates: archive.len() as u64,
    };
    Ok(DetectionRun { archive, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(strategy: Strategy, n: u64, seed: u64) -> DetectionRun {
        let cfg = DetectionConfig::new(strategy, Budget::Iterations(n)).with_seed(seed);
        detect(&SutDescriptor::bytecount(), &cfg).unwrap()
    }

    #[test]
    fn zero_budget_gives_empty_archive() {
        let r = run(Strategy::Bcs, 0, 1);
        assert!(r.archive.is_empty());
        assert_eq!(r.stats.executions, 0);
        let cfg = DetectionConfig::new(Strategy::Lns, Budget::Seconds(0.1));
        assert!(detect(&SutDescriptor::date(), &cfg).is_ok());
    }


    #[test]
    fn archive_invariants_hold() {
        for s in [Strategy::Lns, Strategy::Bcs] {
            let r = run(s, 2000, 3);
            assert!(!r.archive.is_empty(), "{s} found nothing");
            r.archive.check_invariants().unwrap();
            assert_eq!(r.stats.candidates as usize, r.archive.len());
            assert_eq!(r.stats.samples, 2000);
        }
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let a = run(Strategy::Bcs, 500, 9);
        let b = run(Strategy::Bcs, 500, 9);
        assert_eq!(a.archive, b.archive);
        assert_eq!(a.stats.executions, b.stats.executions);
    }

    #[test]
    fn archive_rejects_duplicates_and_zero_scores() {
        let sut = SutDescriptor::bytecount();
        let mut archive = Archive::default();
        let lns = lns_search(&sut, &InputTuple::parse("10").unwrap(), OutputDistanceKind::StrLen);
        assert_eq!(archive.extend(lns.clone()), 1);
        assert_eq!(archive.extend(lns), 0);
        assert!(archive.contains_key("10;9"));
        assert!(!archive.contains_key("9;10"));
    }

    #[test]
    fn strategy_names() {
        assert_eq!("BCS".parse::<Strategy>().unwrap(), Strategy::Bcs);
        assert!("x".parse::<Strategy>().is_err());
    }
}
