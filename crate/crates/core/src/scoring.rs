//! Indicator-based assessment of suspicious groups.
//!
//! Every indicator measures a raw value on a group of drivers, turns it into
//! a binary suspicion flag against its threshold, and contributes its weight
//! to the group's score when flagged. With unit weights the score is the
//! number of raised flags.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycles::{canonicalize_into, CanonicalKey, Cycle, CycleSet};
use crate::error::{Error, Result};
use crate::graph::{NodeId, UndirectedMultigraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKind {
    /// `2m / (n (n - 1))` over the group's induced subgraph.
    InducedDensity,
    /// Internal edges beyond the group size, `m - n`.
    ChordCount,
    /// Pairs of parallel edges between group members.
    RepeatPairCount,
    /// Mean number of edges leaving the group per member.
    MeanExternalDegree,
    /// 1 for groups of 4 to 20 members, else 0.
    SizeBandScore,
    /// Days between the earliest and latest dated internal collision.
    TemporalSpanDays,
    /// Value supplied from outside, looked up by indicator id and group label.
    External,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "higher")]
    HigherSuspicious,
    #[serde(rename = "lower")]
    LowerSuspicious,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Indicator {
    pub id: String,
    pub kind: IndicatorKind,
    pub direction: Direction,
    pub threshold: f64,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

impl Indicator {
    pub fn new(id: &str, kind: IndicatorKind, direction: Direction, threshold: f64) -> Self {
        Indicator {
            id: id.to_owned(),
            kind,
            direction,
            threshold,
            weight: 1.0,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

/// Indicators with unique ids and non-negative finite weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Indicator>", into = "Vec<Indicator>")]
pub struct IndicatorRegistry {
    indicators: Vec<Indicator>,
}

impl IndicatorRegistry {
    pub fn new(indicators: Vec<Indicator>) -> Result<Self> {
        if indicators.is_empty() {
            return Err(Error::Registry("registry has no indicators".into()));
        }
        let mut ids = HashSet::new();
        for ind in &indicators {
            if !ids.insert(ind.id.as_str()) {
                return Err(Error::Registry(format!("duplicate indicator id `{}`", ind.id)));
            }
            if !ind.weight.is_finite() || ind.weight < 0.0 {
                return Err(Error::Registry(format!(
                    "indicator `{}` has invalid weight {}",
                    ind.id, ind.weight
                )));
            }
            if ind.threshold.is_nan() {
                return Err(Error::Registry(format!("indicator `{}` has a NaN threshold", ind.id)));
            }
        }
        Ok(IndicatorRegistry { indicators })
    }

    pub fn indicators(&self) -> &[Indicator] {
        &self.indicators
    }

    pub fn len(&self) -> usize {
        self.indicators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indicators.is_empty()
    }

    /// Same indicators with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.indicators
                .iter()
                .cloned()
                .map(|i| {
                    let w = i.weight * factor;
                    i.with_weight(w)
                })
                .collect(),
        )
    }
}

impl Default for IndicatorRegistry {
    /// The six built-in indicators with unit weights.
    fn default() -> Self {
        use Direction::*;
        use IndicatorKind::*;
        IndicatorRegistry::new(vec![
            Indicator::new("density", InducedDensity, HigherSuspicious, 0.15),
            Indicator::new("chords", ChordCount, HigherSuspicious, 1.0),
            Indicator::new("repeat_pairs", RepeatPairCount, HigherSuspicious, 1.0),
            // rings that barely interact with outsiders
            Indicator::new("external_degree", MeanExternalDegree, LowerSuspicious, 2.0),
            Indicator::new("size_band", SizeBandScore, HigherSuspicious, 1.0),
            Indicator::new("temporal_span", TemporalSpanDays, LowerSuspicious, 365.0),
        ])
        .expect("built-in registry is valid")
    }
}

impl TryFrom<Vec<Indicator>> for IndicatorRegistry {
    type Error = Error;

    fn try_from(v: Vec<Indicator>) -> Result<Self> {
        IndicatorRegistry::new(v)
    }
}

impl From<IndicatorRegistry> for Vec<Indicator> {
    fn from(r: IndicatorRegistry) -> Self {
        r.indicators
    }
}

/// Externally computed indicator values: indicator id → group label → value.
pub type ExternalValues = HashMap<String, HashMap<String, f64>>;

/// Graph plus optional per-edge dates and external values.
#[derive(Clone, Copy, Debug)]
pub struct ScoringContext<'a> {
    pub graph: &'a UndirectedMultigraph,
    pub edge_dates: Option<&'a [Option<NaiveDate>]>,
    pub external: Option<&'a ExternalValues>,
}

impl<'a> ScoringContext<'a> {
    pub fn new(graph: &'a UndirectedMultigraph) -> Self {
        ScoringContext {
            graph,
            edge_dates: None,
            external: None,
        }
    }

    pub fn with_dates(mut self, dates: &'a [Option<NaiveDate>]) -> Self {
        self.edge_dates = Some(dates);
        self
    }

    pub fn with_external(mut self, external: &'a ExternalValues) -> Self {
        self.external = Some(external);
        self
    }
}

/// External-value label of a cycle: its driver keys in canonical cyclic
/// order, joined by `|`.
pub fn cycle_label(g: &UndirectedMultigraph, walk: &[NodeId]) -> String {
    let keys: Vec<&str> = walk.iter().map(|&v| g.key(v)).collect();
    let mut canonical = Vec::new();
    canonicalize_into(&keys, &mut canonical);
    canonical.join("|")
}

/// External-value label of an unordered group: sorted driver keys joined by `|`.
pub fn set_label(g: &UndirectedMultigraph, nodes: &[NodeId]) -> String {
    let mut keys: Vec<&str> = nodes.iter().map(|&v| g.key(v)).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.join("|")
}

/// Structural summary of a node group, shared by all built-in indicators.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupStats {
    pub node_count: usize,
    pub internal_edges: usize,
    pub degree_sum: usize,
    pub repeat_pairs: usize,
    pub date_span_days: Option<i64>,
}

impl GroupStats {
    pub fn compute(nodes: &[NodeId], ctx: &ScoringContext<'_>) -> Result<Self> {
        let g = ctx.graph;
        for &v in nodes {
            g.check_node(v)?;
        }
        let mut members = nodes.to_vec();
        members.sort_unstable();
        members.dedup();

        let mut internal_edges = 0;
        let mut degree_sum = 0;
        let mut repeat_pairs = 0;
        let (mut first, mut last): (Option<NaiveDate>, Option<NaiveDate>) = (None, None);
        for &u in &members {
            let adj = g.adjacent(u);
            degree_sum += adj.len();
            let mut i = 0;
            while i < adj.len() {
                let v = adj[i].0;
                let run = adj[i..].iter().take_while(|(w, _)| *w == v).count();
                if u < v && members.binary_search(&v).is_ok() {
                    internal_edges += run;
                    repeat_pairs += run * (run - 1) / 2;
                    if let Some(dates) = ctx.edge_dates {
                        for &(_, e) in &adj[i..i + run] {
                            if let Some(d) = dates.get(e.index()).copied().flatten() {
                                first = Some(first.map_or(d, |f| f.min(d)));
                                last = Some(last.map_or(d, |l| l.max(d)));
                            }
                        }
                    }
                }
                i += run;
            }
        }
        let date_span_days = match (first, last) {
            (Some(f), Some(l)) => Some((l - f).num_days()),
            _ => None,
        };
        Ok(GroupStats {
            node_count: members.len(),
            internal_edges,
            degree_sum,
            repeat_pairs,
            date_span_days,
        })
    }

    pub fn density(&self) -> f64 {
        density(self.node_count, self.internal_edges)
    }
}

/// `2m / (n (n - 1))`; zero for groups of fewer than two nodes.
pub fn density(nodes: usize, edges: usize) -> f64 {
    if nodes < 2 {
        return 0.0;
    }
    2.0 * edges as f64 / (nodes as f64 * (nodes as f64 - 1.0))
}

fn raw_value(ind: &Indicator, stats: &GroupStats, label: impl FnOnce() -> String, ctx: &ScoringContext<'_>) -> Option<f64> {
    let n = stats.node_count as f64;
    let m = stats.internal_edges as f64;
    match ind.kind {
        IndicatorKind::InducedDensity => Some(stats.density()),
        IndicatorKind::ChordCount => Some(m - n),
        IndicatorKind::RepeatPairCount => Some(stats.repeat_pairs as f64),
        IndicatorKind::MeanExternalDegree => {
            if stats.node_count == 0 {
                None
            } else {
                Some((stats.degree_sum - 2 * stats.internal_edges) as f64 / n)
            }
        }
        IndicatorKind::SizeBandScore => Some(if (4..=20).contains(&stats.node_count) { 1.0 } else { 0.0 }),
        IndicatorKind::TemporalSpanDays => stats.date_span_days.map(|d| d as f64),
        IndicatorKind::External => ctx
            .external
            .and_then(|ext| ext.get(&ind.id))
            .and_then(|values| values.get(&label()))
            .copied(),
    }
}

/// Raw value of `ind` on the cycle's node set; `None` when unavailable.
pub fn measure(ind: &Indicator, cycle: &Cycle, ctx: &ScoringContext<'_>) -> Result<Option<f64>> {
    let stats = GroupStats::compute(cycle.vertices(), ctx)?;
    Ok(raw_value(ind, &stats, || cycle_label(ctx.graph, cycle.vertices()), ctx))
}

/// Binary suspicion flag. Unavailable or NaN values never flag.
pub fn flag(ind: &Indicator, raw: Option<f64>) -> u8 {
    match raw {
        Some(x) if !x.is_nan() => {
            let hit = match ind.direction {
                Direction::HigherSuspicious => x >= ind.threshold,
                Direction::LowerSuspicious => x <= ind.threshold,
            };
            u8::from(hit)
        }
        _ => 0,
    }
}

/// Weighted sum of flags.
pub fn weighted_score(registry: &IndicatorRegistry, flags: &[u8]) -> f64 {
    registry
        .indicators()
        .iter()
        .zip(flags)
        .map(|(ind, &f)| ind.weight * f64::from(f))
        .sum()
}

/// Indicator values, flags and score of one group of drivers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub node_count: usize,
    pub internal_edge_count: usize,
    pub density: f64,
    /// Set when parallel edges push the density above 1.
    pub density_exceeds_simple_bound: bool,
    pub raw_values: Vec<Option<f64>>,
    pub flags: Vec<u8>,
    pub score: f64,
}

fn assess(
    registry: &IndicatorRegistry,
    nodes: &[NodeId],
    label: impl Fn() -> String,
    ctx: &ScoringContext<'_>,
) -> Result<Assessment> {
    if registry.is_empty() {
        return Err(Error::Registry("registry has no indicators".into()));
    }
    let stats = GroupStats::compute(nodes, ctx)?;
    let raw_values: Vec<Option<f64>> = registry
        .indicators()
        .iter()
        .map(|ind| raw_value(ind, &stats, &label, ctx))
        .collect();
    let flags: Vec<u8> = registry
        .indicators()
        .iter()
        .zip(&raw_values)
        .map(|(ind, &raw)| flag(ind, raw))
        .collect();
    let density = stats.density();
    Ok(Assessment {
        node_count: stats.node_count,
        internal_edge_count: stats.internal_edges,
        density,
        density_exceeds_simple_bound: density > 1.0,
        score: weighted_score(registry, &flags),
        raw_values,
        flags,
    })
}

/// Scores an unordered group of drivers, such as a community.
pub fn assess_node_set(registry: &IndicatorRegistry, nodes: &[NodeId], ctx: &ScoringContext<'_>) -> Result<Assessment> {
    assess(registry, nodes, || set_label(ctx.graph, nodes), ctx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleAssessment {
    /// Position of the cycle in its [`CycleSet`], when scored from one.
    pub cycle_id: Option<usize>,
    pub cycle_key: CanonicalKey,
    #[serde(flatten)]
    pub assessment: Assessment,
}

impl CycleAssessment {
    pub fn score(&self) -> f64 {
        self.assessment.score
    }

    pub fn density(&self) -> f64 {
        self.assessment.density
    }
}

pub fn score(registry: &IndicatorRegistry, cycle: &Cycle, ctx: &ScoringContext<'_>) -> Result<CycleAssessment> {
    Ok(CycleAssessment {
        cycle_id: None,
        cycle_key: cycle.key(),
        assessment: assess(registry, cycle.vertices(), || cycle_label(ctx.graph, cycle.vertices()), ctx)?,
    })
}

/// Scores every cycle of `cycles`, tagging each with its cycle id.
pub fn score_all(registry: &IndicatorRegistry, cycles: &CycleSet, ctx: &ScoringContext<'_>) -> Result<Vec<CycleAssessment>> {
    cycles
        .entries()
        .par_iter()
        .enumerate()
        .map(|(id, entry)| {
            let mut a = score(registry, &entry.cycle, ctx)?;
            a.cycle_id = Some(id);
            Ok(a)
        })
        .collect()
}

/// Total review order: score descending, then density descending, then
/// canonical key ascending.
pub fn compare_for_review(a: &CycleAssessment, b: &CycleAssessment) -> Ordering {
    b.score()
        .total_cmp(&a.score())
        .then_with(|| b.density().total_cmp(&a.density()))
        .then_with(|| a.cycle_key.cmp(&b.cycle_key))
}

pub fn rank(mut assessments: Vec<CycleAssessment>) -> Vec<CycleAssessment> {
    assessments.par_sort_unstable_by(compare_for_review);
    assessments
}
