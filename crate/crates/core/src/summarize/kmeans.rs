//! Lloyd's k-means, silhouette scoring and model selection.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::features::FeatureMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringModel {
    pub k: usize,
    pub centroids: Vec<[f64; 4]>,
    pub assignment: Vec<usize>,
    pub silhouette: f64,
    pub iterations: usize,
    /// Within-cluster sum of squares after each iteration.
    pub wcss: Vec<f64>,
}

impl ClusteringModel {
    pub fn nearest(&self, p: &[f64; 4]) -> usize {
        nearest(&self.centroids, p)
    }
}

pub(crate) fn sq_dist(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(centroids: &[[f64; 4]], p: &[f64; 4]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(p, centroid);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

fn wcss(points: &[[f64; 4]], centroids: &[[f64; 4]], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| sq_dist(p, &centroids[c]))
        .sum()
}

fn means(points: &[[f64; 4]], assignment: &[usize], k: usize) -> Vec<[f64; 4]> {
    let mut sums = vec![[0.0; 4]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignment) {
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(p) {
            *s += v;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&counts) {
        for v in s.iter_mut() {
            *v /= n as f64;
        }
    }
    sums
}

/// Moves the point farthest from its centroid into each empty cluster.
fn reseed_empty(points: &[[f64; 4]], centroids: &[[f64; 4]], assignment: &mut [usize], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        for &c in assignment.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&n| n == 0) else {
            return;
        };
        let far = (0..points.len())
            .filter(|&j| counts[assignment[j]] > 1)
            .max_by(|&a, &b| {
                let da = sq_dist(&points[a], &centroids[assignment[a]]);
                let db = sq_dist(&points[b], &centroids[assignment[b]]);
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .expect("k does not exceed the point count");
        assignment[far] = empty;
    }
}

/// Runs Lloyd iterations from `k` distinct random points until the
/// assignment stops changing or `max_iter` is reached.
pub fn kmeans<R: Rng + ?Sized>(
    m: &FeatureMatrix,
    k: usize,
    rng: &mut R,
    max_iter: usize,
) -> Result<ClusteringModel> {
    let dist = distance_matrix(m.points());
    kmeans_with(m.points(), &dist, k, rng, max_iter)
}

pub(crate) fn kmeans_with<R: Rng + ?Sized>(
    points: &[[f64; 4]],
    dist: &[f64],
    k: usize,
    rng: &mut R,
    max_iter: usize,
) -> Result<ClusteringModel> {
    let n = points.len();
    if k < 2 || k > n {
        return Err(Error::Config(format!(
            "k = {k} outside 2..={n} for {n} points"
        )));
    }
    let mut centroids: Vec<[f64; 4]> = sample(rng, n, k).into_iter().map(|j| points[j]).collect();
    let mut assignment: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut next: Vec<usize> = points.iter().map(|p| nearest(&centroids, p)).collect();
        reseed_empty(points, &centroids, &mut next, k);
        centroids = means(points, &next, k);
        history.push(wcss(points, &centroids, &next));
        let stable = next == assignment;
        assignment = next;
        if stable {
            break;
        }
    }
    let silhouette = silhouette_with(dist, &assignment)?;
    Ok(ClusteringModel {
        k,
        centroids,
        assignment,
        silhouette,
        iterations,
        wcss: history,
    })
}

/// Row-major Euclidean distances between all pairs of points.
pub(crate) fn distance_matrix(points: &[[f64; 4]]) -> Vec<f64> {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = sq_dist(&points[i], &points[j]).sqrt();
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

/// Mean silhouette; singleton clusters and `a = b = 0` contribute 0.
pub fn silhouette(m: &FeatureMatrix, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != m.columns() {
        return Err(Error::Config(format!(
            "{} assignments for {} points",
            assignment.len(),
            m.columns()
        )));
    }
    silhouette_with(&distance_matrix(m.points()), assignment)
}

pub(crate) fn silhouette_with(dist: &[f64], assignment: &[usize]) -> Result<f64> {
    let n = assignment.len();
    let k = assignment.iter().max().map_or(0, |&c| c + 1);
    let mut sizes = vec![0usize; k];
    for &c in assignment {
        sizes[c] += 1;
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(Error::Config(
            "silhouette needs at least two non-empty clusters".into(),
        ));
    }
    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for i in 0..n {
        let own = assignment[i];
        if sizes[own] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for (j, &c) in assignment.iter().enumerate() {
            sums[c] += dist[i * n + j];
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

/// Lower 95th percentile of the silhouettes: the value at index
/// `floor(0.95 * (n - 1))` of the ascending order.
pub fn silhouette_percentile(runs: &[ClusteringModel]) -> Option<f64> {
    let mut s: Vec<f64> = runs.iter().map(|r| r.silhouette).collect();
    if s.is_empty() {
        return None;
    }
    s.sort_by(f64::total_cmp);
    Some(s[(0.95 * (s.len() - 1) as f64).floor() as usize])
}

/// Index of the run with the most clusters among those at or above the
/// 95th silhouette percentile; ties go to the higher silhouette, then the
/// earlier run.
pub fn select_model(runs: &[ClusteringModel]) -> Option<usize> {
    let cut = silhouette_percentile(runs)?;
    runs.iter()
        .enumerate()
        .filter(|(_, r)| r.silhouette >= cut)
        .max_by(|(ia, a), (ib, b)| {
            a.k.cmp(&b.k)
                .then(a.silhouette.total_cmp(&b.silhouette))
                .then(ib.cmp(ia))
        })
        .map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn four() -> FeatureMatrix {
        FeatureMatrix::from_points(vec![
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.01],
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, 1.0, 0.99],
        ])
    }

    fn model(k: usize, silhouette: f64) -> ClusteringModel {
        ClusteringModel {
            k,
            centroids: vec![],
            assignment: vec![],
            silhouette,
            iterations: 0,
            wcss: vec![],
        }
    }

    #[test]
    fn separated_pairs_recovered() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = kmeans(&four(), 2, &mut rng, DEFAULT_MAX_ITER).unwrap();
            let a = &m.assignment;
            assert_eq!(a[0], a[1]);
            assert_eq!(a[2], a[3]);
            assert_ne!(a[0], a[2]);
            // Each point: a = 0.01, b ≈ 2.
            assert!(m.silhouette > 0.99);
        }
    }

    #[test]
    fn k_equal_to_points_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = kmeans(&four(), 4, &mut rng, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(m.silhouette, 0.0);
        let mut a = m.assignment.clone();
        a.sort_unstable();
        assert_eq!(a, vec![0, 1, 2, 3]);
    }

    #[test]
    fn identical_points_have_no_structure() {
        let m = FeatureMatrix::from_points(vec![[0.5; 4]; 6]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = kmeans(&m, 2, &mut rng, DEFAULT_MAX_ITER).unwrap();
        assert!(r.silhouette <= 0.0);
        assert_eq!(silhouette(&m, &[0, 0, 0, 1, 1, 1]).unwrap(), 0.0);
    }

    #[test]
    fn bad_k_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(kmeans(&four(), 5, &mut rng, 10).is_err());
        assert!(kmeans(&four(), 1, &mut rng, 10).is_err());
        assert!(silhouette(&four(), &[0, 0, 0, 0]).is_err());
    }

    #[test]
    fn selection_prefers_more_clusters_in_top_percentile() {
        assert_eq!(select_model(&[model(3, 0.5)]), Some(0));
        assert_eq!(select_model(&[model(5, 0.982), model(6, 0.942)]), Some(1));
        assert_eq!(
            select_model(&[model(2, 0.7), model(4, 0.7), model(4, 0.7)]),
            Some(1)
        );
        assert_eq!(select_model(&[]), None);
    }

    #[test]
    fn percentile_excludes_weak_runs() {
        let mut runs: Vec<_> = (0..20).map(|i| model(2, i as f64 / 20.0)).collect();
        runs.push(model(9, 0.0));
        // Index floor(0.95 * 20) = 19 of the sorted scores is 0.9.
        assert_eq!(silhouette_percentile(&runs), Some(0.9));
        assert_eq!(select_model(&runs), Some(19));
    }
}
