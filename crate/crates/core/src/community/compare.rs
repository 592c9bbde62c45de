//! Side-by-side scoring of detected cycles and the communities holding them.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycles::CycleSet;
use crate::error::Result;
use crate::graph::NodeId;
use crate::scoring::{assess_node_set, cycle_label, score_all, IndicatorRegistry, ScoringContext};

use super::Partition;

/// One community paired with the best-scoring cycle it fully contains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub algorithm: String,
    pub community_id: usize,
    pub community_size: usize,
    pub community_score: f64,
    /// Cycles whose every node lies in this community.
    pub contained_cycles: usize,
    pub best_cycle_id: usize,
    /// Driver keys of the best cycle in ring order, joined by `|`.
    pub best_cycle_key: String,
    pub cycle_score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub community_count: usize,
    pub contained_cycles: usize,
    /// Cycles whose nodes span several communities; each is attributed to
    /// its majority community but produces no pair row.
    pub split_cycles: usize,
    /// Score of every community, indexed by community id.
    pub community_scores: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub cycle_count: usize,
    pub algorithms: Vec<AlgorithmSummary>,
    pub pairs: Vec<PairRow>,
}

impl ComparisonReport {
    pub fn write_pairs_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        for row in &self.pairs {
            w.serialize(row)?;
        }
        if self.pairs.is_empty() {
            w.write_record([
                "algorithm",
                "community_id",
                "community_size",
                "community_score",
                "contained_cycles",
                "best_cycle_id",
                "best_cycle_key",
                "cycle_score",
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Community holding the most of `nodes` and the size of that overlap; ties
/// go to the smallest community id. `None` for an empty node list.
pub fn majority_community(p: &Partition, nodes: &[NodeId]) -> Option<(usize, usize)> {
    let mut ids: Vec<usize> = nodes.iter().map(|&v| p.community_of(v)).collect();
    ids.sort_unstable();
    let mut best: Option<(usize, usize)> = None;
    for run in ids.chunk_by(|a, b| a == b) {
        if best.is_none_or(|(_, n)| run.len() > n) {
            best = Some((run[0], run.len()));
        }
    }
    best
}

/// Scores every cycle, then pairs each partition's communities with the
/// cycles they contain. All partitions must cover the scoring graph.
pub fn compare(
    cycles: &CycleSet,
    partitions: &[(String, Partition)],
    registry: &IndicatorRegistry,
    ctx: &ScoringContext<'_>,
) -> Result<ComparisonReport> {
    let scores: Vec<f64> = score_all(registry, cycles, ctx)?.iter().map(|a| a.score()).collect();
    compare_scored(cycles, &scores, partitions, registry, ctx)
}

/// As [`compare`], reusing cycle scores indexed by cycle id.
pub fn compare_scored(
    cycles: &CycleSet,
    cycle_scores: &[f64],
    partitions: &[(String, Partition)],
    registry: &IndicatorRegistry,
    ctx: &ScoringContext<'_>,
) -> Result<ComparisonReport> {
    let g = ctx.graph;
    if cycle_scores.len() != cycles.len() {
        return Err(crate::Error::Spec(format!(
            "{} cycle scores for {} cycles",
            cycle_scores.len(),
            cycles.len()
        )));
    }
    for entry in cycles.entries() {
        for &v in entry.cycle.vertices() {
            g.check_node(v)?;
        }
    }
    let mut report = ComparisonReport {
        cycle_count: cycles.len(),
        ..ComparisonReport::default()
    };
    for (name, partition) in partitions {
        partition.check_against(g)?;
        let members = partition.members();
        let community_scores: Vec<f64> = members
            .par_iter()
            .map(|nodes| assess_node_set(registry, nodes, ctx).map(|a| a.score))
            .collect::<Result<_>>()?;

        // per community: contained count and best (score, id)
        let empty = || vec![(0usize, None::<(f64, usize)>); members.len()];
        let (best, split) = cycles
            .entries()
            .par_iter()
            .enumerate()
            .fold(
                || (empty(), 0usize),
                |(mut acc, mut split), (id, entry)| {
                    let nodes = entry.cycle.vertices();
                    if let Some((c, overlap)) = majority_community(partition, nodes) {
                        if overlap == nodes.len() {
                            let slot = &mut acc[c];
                            slot.0 += 1;
                            slot.1 = better(slot.1, (cycle_scores[id], id));
                        } else {
                            split += 1;
                        }
                    }
                    (acc, split)
                },
            )
            .reduce(
                || (empty(), 0),
                |(mut a, sa), (b, sb)| {
                    for (x, y) in a.iter_mut().zip(b) {
                        x.0 += y.0;
                        x.1 = match y.1 {
                            Some(cand) => better(x.1, cand),
                            None => x.1,
                        };
                    }
                    (a, sa + sb)
                },
            );

        let mut contained = 0;
        for (c, (count, top)) in best.into_iter().enumerate() {
            contained += count;
            if let Some((score, id)) = top {
                report.pairs.push(PairRow {
                    algorithm: name.clone(),
                    community_id: c,
                    community_size: members[c].len(),
                    community_score: community_scores[c],
                    contained_cycles: count,
                    best_cycle_id: id,
                    best_cycle_key: cycle_label(g, cycles.entries()[id].cycle.vertices()),
                    cycle_score: score,
                });
            }
        }
        report.algorithms.push(AlgorithmSummary {
            algorithm: name.clone(),
            community_count: partition.community_count(),
            contained_cycles: contained,
            split_cycles: split,
            community_scores,
        });
    }
    Ok(report)
}

/// Higher score wins, then the smaller cycle id.
fn better(cur: Option<(f64, usize)>, cand: (f64, usize)) -> Option<(f64, usize)> {
    match cur {
        Some(c) if c.0 > cand.0 || (c.0 == cand.0 && c.1 < cand.1) => Some(c),
        _ => Some(cand),
    }
}
