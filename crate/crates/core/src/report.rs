//! Markdown renderings of cluster and experiment reports.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::detection::Strategy;
use crate::experiment::{ExperimentReport, MeanSd};
use crate::summarize::ClusterReport;

fn cell(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('|', "\\|")
        .replace('\n', "\\n")
}

fn pm(m: MeanSd) -> String {
    format!("{:.1} ± {:.1}", m.mean, m.sd)
}

/// One row per cluster, grouped by validity, with per-strategy counts for
/// every strategy that appears anywhere in the report.
pub fn cluster_markdown(report: &ClusterReport) -> String {
    let strategies: BTreeSet<Strategy> = report
        .clusters()
        .flat_map(|c| c.found_by.keys().copied())
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "# Boundary candidate clusters\n");
    let _ = writeln!(out, "{} candidates in {} clusters.\n", report.total, report.clusters().count());
    for g in &report.groups {
        match &g.model {
            Some(m) => {
                let _ = writeln!(
                    out,
                    "- {}: {} candidates, k = {}, silhouette {:.3} (95th percentile {:.3} over {} runs; {} clustered, {} attached)",
                    g.validity, g.size, m.k, m.silhouette, m.percentile, m.runs, m.clustered, m.attached
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "- {}: {} candidates, {} cluster(s) without k-means",
                    g.validity,
                    g.size,
                    g.clusters.len()
                );
            }
        }
    }
    let mut header = String::from("| ID | Validity | Input 1 | Output 1 | Input 2 | Output 2 | Size |");
    let mut rule = String::from("|---:|---|---|---|---|---|---:|");
    for s in &strategies {
        let _ = write!(header, " {} found |", s.as_str().to_uppercase());
        rule.push_str("---:|");
    }
    let _ = writeln!(out, "\n{header}\n{rule}");
    for c in report.clusters() {
        let r = &c.representative;
        let _ = write!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} |",
            c.id,
            c.validity,
            cell(&r.i1.to_string()),
            cell(r.o1.text()),
            cell(&r.i2.to_string()),
            cell(r.o2.text()),
            c.size
        );
        for s in &strategies {
            let _ = write!(out, " {} |", c.found_by.get(s).copied().unwrap_or(0));
        }
        out.push('\n');
    }
    out
}

/// Found-count and cluster-coverage tables for an experiment.
pub fn experiment_markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# Experiment: {} ({} repetitions per strategy)\n",
        report.sut, report.repetitions
    );
    let _ = writeln!(out, "## Candidates\n");
    let _ = writeln!(out, "| SUT | Strategy | Total | # found | # unique |");
    let _ = writeln!(out, "|---|---|---:|---:|---:|");
    for s in &report.strategies {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            report.sut,
            s.strategy.as_str().to_uppercase(),
            report.total,
            pm(s.found),
            s.unique
        );
    }
    let _ = writeln!(out, "\n## Clusters\n");
    let _ = writeln!(out, "| SUT | Strategy | Total clusters | # found | # unique |");
    let _ = writeln!(out, "|---|---|---:|---:|---:|");
    for s in &report.strategies {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            report.sut,
            s.strategy.as_str().to_uppercase(),
            report.total_clusters,
            pm(s.clusters),
            s.unique_clusters
        );
    }
    let _ = writeln!(out, "\n## Runs\n");
    let _ = writeln!(out, "| Strategy | Rep | Seed | Samples | Executions | Found | Clusters | Seconds |");
    let _ = writeln!(out, "|---|---:|---:|---:|---:|---:|---:|---:|");
    for r in &report.runs {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {:.2} |",
            r.strategy.as_str().to_uppercase(),
            r.repetition,
            r.seed,
            r.stats.samples,
            r.stats.executions,
            r.stats.candidates,
            r.clusters_covered,
            r.stats.elapsed_seconds
        );
    }
    out.push('\n');
    out.push_str(&cluster_markdown(&report.clusters));
    out
}
