//! Ranking candidates by their difference quotient under a chosen distance.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use crate::candidate::BoundaryCandidate;
use crate::distance::{Boundariness, OutputDistanceKind};
use crate::error::Result;
use crate::summarize::ClusterReport;

#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate {
    pub candidate: BoundaryCandidate,
    pub pdq: Boundariness,
    pub cluster: Option<usize>,
}

/// Rescores every candidate and sorts by descending quotient; equal
/// quotients are ordered by first input ascending, then input order.
pub fn rank(candidates: &[BoundaryCandidate], d_o: OutputDistanceKind) -> Result<Vec<RankedCandidate>> {
    let mut ranked = candidates
        .iter()
        .map(|c| {
            Ok(RankedCandidate {
                pdq: c.rescore(d_o)?,
                candidate: c.clone(),
                cluster: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| {
        b.pdq
            .cmp(&a.pdq)
            .then_with(|| a.candidate.i1.numeric_cmp(&b.candidate.i1))
    });
    Ok(ranked)
}

/// Tags each ranked candidate with the cluster holding it in `report`.
pub fn assign_clusters(ranked: &mut [RankedCandidate], report: &ClusterReport) {
    let owner: HashMap<&str, usize> = report
        .clusters()
        .flat_map(|c| c.members.iter().map(move |m| (m.as_str(), c.id)))
        .collect();
    for r in ranked {
        r.cluster = owner.get(r.candidate.key().as_str()).copied();
    }
}

/// The first `n` overall.
pub fn top(ranked: &[RankedCandidate], n: usize) -> Vec<RankedCandidate> {
    ranked.iter().take(n).cloned().collect()
}

/// The first `n` of each cluster, clusters in id order; untagged
/// candidates form their own trailing group.
pub fn top_per_cluster(ranked: &[RankedCandidate], n: usize) -> Vec<RankedCandidate> {
    let mut groups: BTreeMap<Option<usize>, Vec<RankedCandidate>> = BTreeMap::new();
    for r in ranked {
        let g = groups.entry(r.cluster).or_default();
        if g.len() < n {
            g.push(r.clone());
        }
    }
    let untagged = groups.remove(&None).unwrap_or_default();
    groups.into_values().flatten().chain(untagged).collect()
}

pub fn write_ranked_csv<W: Write>(w: W, ranked: &[RankedCandidate]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "rank", "cluster", "input1", "input2", "output1", "output2", "validity", "pdq_num",
        "pdq_den", "pdq",
    ])?;
    for (i, r) in ranked.iter().enumerate() {
        let c = &r.candidate;
        out.write_record([
            (i + 1).to_string(),
            r.cluster.map(|c| c.to_string()).unwrap_or_default(),
            c.i1.render(),
            c.i2.render(),
            c.o1.text().to_string(),
            c.o2.text().to_string(),
            c.validity().to_string(),
            r.pdq.numer().to_string(),
            r.pdq.denom().to_string(),
            format!("{:.6}", r.pdq.to_f64()),
        ])?;
    }
    out.flush()?;
    Ok(())
}
