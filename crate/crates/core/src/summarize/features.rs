//! Feature matrix over output texts and diversity-based subset selection.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::candidate::BoundaryCandidate;
use crate::distance::{jaccard_ngram, strlendist};

pub const FEATURE_NAMES: [&str; 4] = [
    "strlendist_wd",
    "jaccard2_wd",
    "jaccard2_u1",
    "jaccard2_u2",
];

/// One column of four features per candidate, every entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    points: Vec<[f64; 4]>,
}

impl FeatureMatrix {
    pub fn from_points(points: Vec<[f64; 4]>) -> Self {
        FeatureMatrix { points }
    }

    pub fn columns(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn column(&self, j: usize) -> [f64; 4] {
        self.points[j]
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[r]).collect()
    }

    pub fn points(&self) -> &[[f64; 4]] {
        &self.points
    }
}

/// Interned output texts with memoized 2-gram Jaccard distances.
#[derive(Default)]
pub(crate) struct TextSpace {
    ids: HashMap<String, usize>,
    texts: Vec<String>,
    cache: HashMap<(usize, usize), f64>,
}

impl TextSpace {
    pub(crate) fn intern(&mut self, text: &str) -> usize {
        if let Some(&id) = self.ids.get(text) {
            return id;
        }
        let id = self.texts.len();
        self.ids.insert(text.to_string(), id);
        self.texts.push(text.to_string());
        id
    }

    pub(crate) fn dist(&mut self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&d) = self.cache.get(&key) {
            return d;
        }
        let d = jaccard_ngram(2, &self.texts[a], &self.texts[b]);
        self.cache.insert(key, d);
        d
    }
}

/// Interned per-candidate data needed to compute features.
#[derive(Clone, Copy)]
pub(crate) struct Row {
    out1: usize,
    out2: usize,
    wd_len: f64,
    wd_jac: f64,
}

pub(crate) fn intern_rows(space: &mut TextSpace, cs: &[&BoundaryCandidate]) -> Vec<Row> {
    cs.iter()
        .map(|c| {
            let out1 = space.intern(c.o1.text());
            let out2 = space.intern(c.o2.text());
            Row {
                out1,
                out2,
                wd_len: strlendist(c.o1.text(), c.o2.text()) as f64,
                wd_jac: space.dist(out1, out2),
            }
        })
        .collect()
}

/// Sums of output distances from `target` to every row of `reference`,
/// one sum per side.
fn u_sums(space: &mut TextSpace, counts: &[BTreeMap<usize, usize>; 2], target: Row) -> [f64; 2] {
    let mut sums = [0.0; 2];
    for (side, own) in [(0, target.out1), (1, target.out2)] {
        for (&t, &n) in &counts[side] {
            sums[side] += n as f64 * space.dist(own, t);
        }
    }
    sums
}

fn side_counts(rows: &[Row]) -> [BTreeMap<usize, usize>; 2] {
    let mut counts = [BTreeMap::new(), BTreeMap::new()];
    for r in rows {
        *counts[0].entry(r.out1).or_insert(0) += 1;
        *counts[1].entry(r.out2).or_insert(0) += 1;
    }
    counts
}

fn len_range(rows: &[Row]) -> (f64, f64) {
    rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.wd_len), hi.max(r.wd_len))
    })
}

fn normalize(v: f64, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Features of `targets` measured against the `reference` group: the
/// string-length WD is min-max scaled by the reference range and the U
/// entries are mean distances to the reference outputs.
pub(crate) fn features_against(
    space: &mut TextSpace,
    reference: &[Row],
    targets: &[Row],
) -> Vec<[f64; 4]> {
    if reference.is_empty() {
        return vec![[0.0; 4]; targets.len()];
    }
    let counts = side_counts(reference);
    let range = len_range(reference);
    let n = reference.len() as f64;
    targets
        .iter()
        .map(|&t| {
            let [u1, u2] = u_sums(space, &counts, t);
            [normalize(t.wd_len, range), t.wd_jac, u1 / n, u2 / n]
        })
        .collect()
}

/// The feature matrix of a group, every candidate measured against the
/// whole group.
pub fn features(group: &[BoundaryCandidate]) -> FeatureMatrix {
    let refs: Vec<&BoundaryCandidate> = group.iter().collect();
    let mut space = TextSpace::default();
    let rows = intern_rows(&mut space, &refs);
    FeatureMatrix::from_points(features_against(&mut space, &rows, &rows))
}

/// Indices of the candidates kept for clustering and of those dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiversitySubset {
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
}

/// Keeps a working set of `window` candidates, repeatedly dropping the
/// `block` least diverse and refilling from unseen ones until none remain.
/// Diversity is the sum of a candidate's features within the working set;
/// ties keep the earlier candidate.
pub fn diversity_subset<R: Rng + ?Sized>(
    candidates: &[BoundaryCandidate],
    rng: &mut R,
    block: usize,
    window: usize,
) -> DiversitySubset {
    let refs: Vec<&BoundaryCandidate> = candidates.iter().collect();
    let mut space = TextSpace::default();
    let rows = intern_rows(&mut space, &refs);
    diversity_rows(&mut space, &rows, rng, block, window)
}

pub(crate) fn diversity_rows<R: Rng + ?Sized>(
    space: &mut TextSpace,
    rows: &[Row],
    rng: &mut R,
    block: usize,
    window: usize,
) -> DiversitySubset {
    let n = rows.len();
    if n <= window || block == 0 {
        return DiversitySubset {
            kept: (0..n).collect(),
            dropped: Vec::new(),
        };
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut unseen: Vec<usize> = order.split_off(window);
    unseen.reverse();
    let mut working = order;
    let mut dropped = Vec::new();

    // Running U sums for each working member over the working set.
    let mut sums: HashMap<usize, [f64; 2]> = {
        let members: Vec<Row> = working.iter().map(|&j| rows[j]).collect();
        let counts = side_counts(&members);
        working
            .iter()
            .map(|&j| (j, u_sums(space, &counts, rows[j])))
            .collect()
    };

    while !unseen.is_empty() {
        let w = working.len() as f64;
        let members: Vec<Row> = working.iter().map(|&j| rows[j]).collect();
        let range = len_range(&members);
        let score = |j: usize| {
            let [u1, u2] = sums[&j];
            normalize(rows[j].wd_len, range) + rows[j].wd_jac + u1 / w + u2 / w
        };
        let mut ranked: Vec<(f64, usize)> = working.iter().map(|&j| (score(j), j)).collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

        let m = block.min(unseen.len()).min(ranked.len());
        let out: Vec<usize> = ranked[ranked.len() - m..].iter().map(|&(_, j)| j).collect();
        let incoming: Vec<usize> = (0..m).filter_map(|_| unseen.pop()).collect();
        working = ranked[..ranked.len() - m].iter().map(|&(_, j)| j).collect();
        for &j in &working {
            let s = sums.get_mut(&j).expect("working member");
            for &r in &out {
                s[0] -= space.dist(rows[j].out1, rows[r].out1);
                s[1] -= space.dist(rows[j].out2, rows[r].out2);
            }
            for &a in &incoming {
                s[0] += space.dist(rows[j].out1, rows[a].out1);
                s[1] += space.dist(rows[j].out2, rows[a].out2);
            }
        }
        for &r in &out {
            sums.remove(&r);
        }
        working.extend(&incoming);
        let members: Vec<Row> = working.iter().map(|&j| rows[j]).collect();
        let counts = side_counts(&members);
        for &a in &incoming {
            sums.insert(a, u_sums(space, &counts, rows[a]));
        }
        dropped.extend(out);
    }
    working.sort_unstable();
    dropped.sort_unstable();
    DiversitySubset {
        kept: working,
        dropped,
    }
}
