//! Validity-grouped clustering of boundary candidates.
//!
//! Each validity group is described by a four-feature matrix, reduced to a
//! diverse working subset, clustered by restarted k-means and summarized
//! by one short representative per cluster.

mod features;
mod kmeans;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::candidate::{BoundaryCandidate, Validity};
use crate::detection::Strategy;
use crate::error::{Error, Result};

pub use features::{diversity_subset, features, DiversitySubset, FeatureMatrix, FEATURE_NAMES};
pub use kmeans::{
    kmeans, select_model, silhouette, silhouette_percentile, ClusteringModel, DEFAULT_MAX_ITER,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryConfig {
    pub restarts: usize,
    pub max_k: usize,
    pub window: usize,
    pub block: usize,
    pub max_iter: usize,
    /// Groups smaller than this become a single cluster.
    pub min_group: usize,
}

impl Default for SummaryConfig {
    fn default() -> Self {
        SummaryConfig {
            restarts: 100,
            max_k: 10,
            window: 1000,
            block: 100,
            max_iter: DEFAULT_MAX_ITER,
            min_group: 3,
        }
    }
}

impl SummaryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be positive".into()));
        }
        if self.max_k < 2 {
            return Err(Error::Config("max k must be at least 2".into()));
        }
        if self.window == 0 || self.max_iter == 0 {
            return Err(Error::Config("window and max iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub id: usize,
    pub validity: Validity,
    pub size: usize,
    pub representative: BoundaryCandidate,
    /// Number of members found by each strategy, when known.
    pub found_by: BTreeMap<Strategy, usize>,
    /// Identity keys of all members, in input order.
    pub members: Vec<String>,
}

/// The model chosen for a clustered group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub k: usize,
    pub silhouette: f64,
    pub percentile: f64,
    pub runs: usize,
    pub clustered: usize,
    pub attached: usize,
    pub centroids: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub validity: Validity,
    pub size: usize,
    /// `None` when the group was too small or too uniform to cluster.
    pub model: Option<ModelSummary>,
    pub clusters: Vec<ClusterSummary>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClusterReport {
    pub total: usize,
    pub groups: Vec<GroupSummary>,
}

impl ClusterReport {
    pub fn clusters(&self) -> impl Iterator<Item = &ClusterSummary> {
        self.groups.iter().flat_map(|g| g.clusters.iter())
    }

    pub fn group(&self, v: Validity) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.validity == v)
    }

    pub fn cluster_count(&self, v: Validity) -> usize {
        self.group(v).map_or(0, |g| g.clusters.len())
    }

    /// The cluster containing the candidate with identity `key`.
    pub fn cluster_of(&self, key: &str) -> Option<&ClusterSummary> {
        self.clusters().find(|c| c.members.iter().any(|m| m == key))
    }
}

/// Summarizes candidates without strategy attribution.
pub fn summarize<R: Rng + ?Sized>(
    candidates: &[BoundaryCandidate],
    config: &SummaryConfig,
    rng: &mut R,
) -> Result<ClusterReport> {
    summarize_tagged(candidates, &[], config, rng)
}

/// As [`summarize_tagged`] with a generator seeded from `seed`.
pub fn summarize_seeded(
    candidates: &[BoundaryCandidate],
    found_by: &[BTreeSet<Strategy>],
    config: &SummaryConfig,
    seed: u64,
) -> Result<ClusterReport> {
    summarize_tagged(candidates, found_by, config, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Summarizes candidates; `found_by[j]`, if given, lists the strategies
/// that found candidate `j`.
pub fn summarize_tagged<R: Rng + ?Sized>(
    candidates: &[BoundaryCandidate],
    found_by: &[BTreeSet<Strategy>],
    config: &SummaryConfig,
    rng: &mut R,
) -> Result<ClusterReport> {
    config.validate()?;
    if !found_by.is_empty() && found_by.len() != candidates.len() {
        return Err(Error::Config(format!(
            "{} strategy tags for {} candidates",
            found_by.len(),
            candidates.len()
        )));
    }
    let mut report = ClusterReport {
        total: candidates.len(),
        groups: Vec::new(),
    };
    let mut next_id = 1;
    for v in Validity::ALL {
        let idx: Vec<usize> = (0..candidates.len())
            .filter(|&j| candidates[j].validity() == v)
            .collect();
        if idx.is_empty() {
            continue;
        }
        let group: Vec<&BoundaryCandidate> = idx.iter().map(|&j| &candidates[j]).collect();
        let (labels, model) = cluster_group(&group, config, rng)?;
        let k = labels.iter().max().map_or(0, |&c| c + 1);
        let mut clusters: Vec<ClusterSummary> = (0..k)
            .map(|c| {
                let members: Vec<usize> = (0..group.len()).filter(|&j| labels[j] == c).collect();
                let rep = members
                    .iter()
                    .map(|&j| group[j])
                    .min_by_key(|c| representative_key(c))
                    .expect("clusters are non-empty");
                let mut counts = BTreeMap::new();
                for &j in &members {
                    for s in found_by.get(idx[j]).into_iter().flatten() {
                        *counts.entry(*s).or_insert(0) += 1;
                    }
                }
                ClusterSummary {
                    id: 0,
                    validity: v,
                    size: members.len(),
                    representative: rep.clone(),
                    found_by: counts,
                    members: members.iter().map(|&j| group[j].key()).collect(),
                }
            })
            .collect();
        clusters.sort_by(|a, b| {
            b.size
                .cmp(&a.size)
                .then_with(|| representative_key(&a.representative).cmp(&representative_key(&b.representative)))
        });
        for c in &mut clusters {
            c.id = next_id;
            next_id += 1;
        }
        report.groups.push(GroupSummary {
            validity: v,
            size: group.len(),
            model,
            clusters,
        });
    }
    Ok(report)
}

/// Shortest total rendering first, then lexicographic.
fn representative_key(c: &BoundaryCandidate) -> (usize, [String; 4]) {
    (
        c.rendered_len(),
        [
            c.i1.render(),
            c.i2.render(),
            c.o1.text().to_string(),
            c.o2.text().to_string(),
        ],
    )
}

/// Cluster labels for every group member, plus the chosen model if
/// clustering ran.
fn cluster_group<R: Rng + ?Sized>(
    group: &[&BoundaryCandidate],
    config: &SummaryConfig,
    rng: &mut R,
) -> Result<(Vec<usize>, Option<ModelSummary>)> {
    let single = vec![0; group.len()];
    if group.len() < config.min_group.max(2) {
        return Ok((single, None));
    }
    let mut space = features::TextSpace::default();
    let rows = features::intern_rows(&mut space, group);
    let subset = features::diversity_rows(&mut space, &rows, rng, config.block, config.window);
    let kept_rows: Vec<_> = subset.kept.iter().map(|&j| rows[j]).collect();
    let points = features::features_against(&mut space, &kept_rows, &kept_rows);

    let mut distinct: Vec<[u64; 4]> = points.iter().map(|p| p.map(f64::to_bits)).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let kmax = config.max_k.min(distinct.len());
    if kmax < 2 {
        return Ok((single, None));
    }

    let dist = kmeans::distance_matrix(&points);
    let seeds: Vec<u64> = (0..config.restarts).map(|_| rng.gen()).collect();
    let runs: Vec<ClusteringModel> = seeds
        .par_iter()
        .enumerate()
        .map(|(r, &seed)| {
            let k = 2 + r % (kmax - 1);
            let mut run_rng = ChaCha8Rng::seed_from_u64(seed);
            kmeans::kmeans_with(&points, &dist, k, &mut run_rng, config.max_iter)
        })
        .collect::<Result<_>>()?;
    let best = &runs[select_model(&runs).expect("at least one run")];

    let mut labels = vec![0; group.len()];
    for (&j, &c) in subset.kept.iter().zip(&best.assignment) {
        labels[j] = c;
    }
    let dropped_rows: Vec<_> = subset.dropped.iter().map(|&j| rows[j]).collect();
    let dropped_points = features::features_against(&mut space, &kept_rows, &dropped_rows);
    for (&j, p) in subset.dropped.iter().zip(&dropped_points) {
        labels[j] = best.nearest(p);
    }
    // Attachment never empties a cluster, but relabel densely regardless.
    let used: BTreeSet<usize> = labels.iter().copied().collect();
    let remap: BTreeMap<usize, usize> = used.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let labels = labels.iter().map(|c| remap[c]).collect();

    Ok((
        labels,
        Some(ModelSummary {
            k: best.k,
            silhouette: best.silhouette,
            percentile: silhouette_percentile(&runs).expect("at least one run"),
            runs: runs.len(),
            clustered: subset.kept.len(),
            attached: subset.dropped.len(),
            centroids: best.centroids.clone(),
        }),
    ))
}
