//! Fairness metrics over run results: Gini coefficients, Lorenz curves,
//! forwarded-chunk histograms, averages, and merging of sharded results.
//!
//! F2 measures reward opportunity: the Gini over every node's income,
//! zero earners included. F1 measures reward proportionality: the Gini over
//! per-node contribution ratios, computed only for nodes that earned anything.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulation::{NodeCounters, RunResult};

/// Non-negative values with node attribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSeries {
    entries: Vec<(u64, f64)>,
}

impl ValueSeries {
    /// Builds a series, rejecting negative or non-finite values.
    pub fn new(entries: Vec<(u64, f64)>) -> Result<Self> {
        for (node, v) in &entries {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "series value {v} for node {node} must be finite and non-negative"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|(_, v)| *v)
    }

    fn sorted_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.values().collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("values are finite"));
        v
    }

    fn total(&self) -> f64 {
        self.values().sum()
    }
}

/// Sum over ordered pairs of (v_j - v_i), j > i, on ascending values.
fn pairwise_gap_sum(sorted: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut prefix = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        acc += (i as f64) * v - prefix;
        prefix += v;
    }
    acc
}

fn require_positive_total(series: &ValueSeries) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::UndefinedMetric("empty value series".into()));
    }
    let total = series.total();
    if total <= 0.0 {
        return Err(Error::UndefinedMetric("all values are zero".into()));
    }
    Ok(total)
}

/// Gini coefficient in [0, 1]: the mean absolute difference over twice the
/// mean, i.e. sum_ij |v_i - v_j| / (2 n sum_i v_i). Exactly 0 iff all values
/// are equal.
pub fn gini(series: &ValueSeries) -> Result<f64> {
    let total = require_positive_total(series)?;
    let sorted = series.sorted_values();
    if sorted.first() == sorted.last() {
        return Ok(0.0);
    }
    Ok(pairwise_gap_sum(&sorted) / (sorted.len() as f64 * total))
}

/// The same ratio without the 1/n factor, sum_ij |v_i - v_j| / (2 sum_i v_i);
/// emitted in reports alongside the normalized value.
pub fn gini_unnormalized(series: &ValueSeries) -> Result<f64> {
    let total = require_positive_total(series)?;
    let sorted = series.sorted_values();
    if sorted.first() == sorted.last() {
        return Ok(0.0);
    }
    Ok(pairwise_gap_sum(&sorted) / total)
}

/// One point of a Lorenz curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorenzPoint {
    pub population_share: f64,
    pub value_share: f64,
}

/// Lorenz curve of the series: n+1 points from (0,0) to (1,1), cumulative
/// value share of the poorest i/n of the population.
pub fn lorenz(series: &ValueSeries) -> Result<Vec<LorenzPoint>> {
    let total = require_positive_total(series)?;
    let sorted = series.sorted_values();
    let n = sorted.len() as f64;
    let mut points = Vec::with_capacity(sorted.len() + 1);
    points.push(LorenzPoint {
        population_share: 0.0,
        value_share: 0.0,
    });
    let mut prefix = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        prefix += v;
        points.push(LorenzPoint {
            population_share: (i + 1) as f64 / n,
            value_share: prefix / total,
        });
    }
    Ok(points)
}

/// Which per-node ratio the F1 series uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum F1Variant {
    /// forwarded / first_hop_forwarded (default): total contribution relative
    /// to the contribution that was rewarded.
    FirstHopRatio,
    /// forwarded / income: resource spent per unit of reward.
    PerReward,
}

impl Default for F1Variant {
    fn default() -> Self {
        F1Variant::FirstHopRatio
    }
}

impl fmt::Display for F1Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            F1Variant::FirstHopRatio => write!(f, "first-hop-ratio"),
            F1Variant::PerReward => write!(f, "per-reward"),
        }
    }
}

impl FromStr for F1Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-hop-ratio" => Ok(F1Variant::FirstHopRatio),
            "per-reward" => Ok(F1Variant::PerReward),
            _ => Err(Error::InvalidArgument(format!(
                "unknown F1 variant {s:?} (expected first-hop-ratio or per-reward)"
            ))),
        }
    }
}

/// Income per node, zero earners included: one value per overlay node.
pub fn f2_series(result: &RunResult) -> ValueSeries {
    ValueSeries {
        entries: result
            .nodes
            .iter()
            .zip(&result.counters)
            .map(|(node, c)| (*node, c.income as f64))
            .collect(),
    }
}

/// Contribution ratio per rewarded node; nodes with zero income are omitted.
pub fn f1_series(result: &RunResult, variant: F1Variant) -> Result<ValueSeries> {
    let mut entries = Vec::new();
    for (node, c) in result.nodes.iter().zip(&result.counters) {
        if c.income == 0 {
            continue;
        }
        let value = match variant {
            F1Variant::FirstHopRatio => {
                if c.first_hop_forwarded == 0 {
                    return Err(Error::InvalidArgument(format!(
                        "node {node} has income {} but never forwarded as first hop",
                        c.income
                    )));
                }
                c.forwarded as f64 / c.first_hop_forwarded as f64
            }
            F1Variant::PerReward => c.forwarded as f64 / c.income as f64,
        };
        entries.push((*node, value));
    }
    if entries.is_empty() {
        return Err(Error::UndefinedMetric("no node received any reward".into()));
    }
    Ok(ValueSeries { entries })
}

/// Histogram of per-node forwarded counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: u64,
    pub bins: Vec<HistogramBin>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// Inclusive lower edge; the bin covers [low, low + bin_width).
    pub low: u64,
    pub count: u64,
}

/// Bins the per-node forwarded counts; bins are contiguous from zero and the
/// counts sum to the node count.
pub fn forwarded_histogram(result: &RunResult, bin_width: u64) -> Result<Histogram> {
    if bin_width == 0 {
        return Err(Error::InvalidArgument("bin width must be >= 1".into()));
    }
    let max_bin = result
        .counters
        .iter()
        .map(|c| c.forwarded / bin_width)
        .max()
        .unwrap_or(0);
    let mut counts = vec![0u64; (max_bin + 1) as usize];
    for c in &result.counters {
        counts[(c.forwarded / bin_width) as usize] += 1;
    }
    Ok(Histogram {
        bin_width,
        bins: counts
            .into_iter()
            .enumerate()
            .map(|(i, count)| HistogramBin {
                low: i as u64 * bin_width,
                count,
            })
            .collect(),
    })
}

/// Bin width used when none is requested: about 50 bins across the range.
pub fn default_bin_width(result: &RunResult) -> u64 {
    let max = result.counters.iter().map(|c| c.forwarded).max().unwrap_or(0);
    ((max as f64 / 50.0).round() as u64).max(1)
}

/// Mean forwarded chunks per node.
pub fn average_forwarded(result: &RunResult) -> f64 {
    if result.counters.is_empty() {
        return 0.0;
    }
    result.total_forwarded() as f64 / result.counters.len() as f64
}

/// Sums per-node counters, balances and totals of shards that executed
/// disjoint step ranges of one configuration; order-independent.
pub fn merge_results(results: &[RunResult]) -> Result<RunResult> {
    let first = results
        .first()
        .ok_or_else(|| Error::InvalidArgument("nothing to merge".into()))?;
    for r in &results[1..] {
        if r.meta.overlay != first.meta.overlay {
            return Err(Error::IncompatibleRuns { field: "overlay" });
        }
        if r.meta.pricing != first.meta.pricing {
            return Err(Error::IncompatibleRuns { field: "pricing" });
        }
        if r.meta.workload != first.meta.workload {
            return Err(Error::IncompatibleRuns { field: "workload" });
        }
        if r.nodes != first.nodes {
            return Err(Error::IncompatibleRuns { field: "nodes" });
        }
    }

    let mut ranges: Vec<(u64, u64)> = results
        .iter()
        .flat_map(|r| r.meta.step_ranges.iter().copied())
        .collect();
    ranges.sort_unstable();
    if ranges.windows(2).any(|w| w[1].0 < w[0].1) {
        return Err(Error::IncompatibleRuns {
            field: "step_ranges",
        });
    }
    let mut step_ranges: Vec<(u64, u64)> = Vec::new();
    for (start, end) in ranges {
        match step_ranges.last_mut() {
            Some(last) if last.1 == start => last.1 = end,
            _ => step_ranges.push((start, end)),
        }
    }

    let mut counters = vec![NodeCounters::default(); first.nodes.len()];
    let mut balance_map: BTreeMap<(u64, u64), i64> = BTreeMap::new();
    let mut cheques = Vec::new();
    let mut meta = first.meta.clone();
    meta.step_ranges = step_ranges;
    meta.total_steps = 0;
    meta.total_chunks = 0;
    meta.total_hops = 0;
    for r in results {
        meta.total_steps += r.meta.total_steps;
        meta.total_chunks += r.meta.total_chunks;
        meta.total_hops += r.meta.total_hops;
        for (acc, c) in counters.iter_mut().zip(&r.counters) {
            acc.add(c);
        }
        for (a, b, amount) in &r.balances {
            *balance_map.entry((*a, *b)).or_insert(0) += amount;
        }
        cheques.extend_from_slice(&r.cheques);
    }
    cheques.sort_unstable_by_key(|c| (c.issuer, c.beneficiary, c.step, c.cumulative_amount));

    Ok(RunResult {
        meta,
        nodes: first.nodes.clone(),
        counters,
        balances: balance_map
            .into_iter()
            .filter(|(_, v)| *v != 0)
            .map(|((a, b), v)| (a, b, v))
            .collect(),
        cheques,
    })
}

/// Everything the report files carry: both Gini forms, Lorenz curves, the
/// forwarded histogram and the run average. Metrics that are undefined for
/// the input (all-zero income, no rewarded nodes) are reported as absent
/// rather than failing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub f1_variant: F1Variant,
    pub gini_f1: Option<f64>,
    pub gini_f1_raw: Option<f64>,
    pub gini_f2: Option<f64>,
    pub gini_f2_raw: Option<f64>,
    pub lorenz_f1: Vec<LorenzPoint>,
    pub lorenz_f2: Vec<LorenzPoint>,
    pub histogram: Histogram,
    pub average_forwarded: f64,
    /// Number of nodes with nonzero income (the F1 population).
    pub rewarded_nodes: usize,
    pub meta: crate::simulation::RunMeta,
}

/// Assembles the fairness report for a run.
pub fn fairness_report(
    result: &RunResult,
    variant: F1Variant,
    bin_width: Option<u64>,
) -> Result<FairnessReport> {
    let f2 = f2_series(result);
    let (gini_f2, gini_f2_raw, lorenz_f2) = match gini(&f2) {
        Ok(g) => (
            Some(g),
            Some(gini_unnormalized(&f2)?),
            lorenz(&f2)?,
        ),
        Err(Error::UndefinedMetric(_)) => (None, None, Vec::new()),
        Err(e) => return Err(e),
    };
    let (gini_f1, gini_f1_raw, lorenz_f1, rewarded) = match f1_series(result, variant) {
        Ok(series) => (
            Some(gini(&series)?),
            Some(gini_unnormalized(&series)?),
            lorenz(&series)?,
            series.len(),
        ),
        Err(Error::UndefinedMetric(_)) => (None, None, Vec::new(), 0),
        Err(e) => return Err(e),
    };
    let width = bin_width.unwrap_or_else(|| default_bin_width(result));
    Ok(FairnessReport {
        f1_variant: variant,
        gini_f1,
        gini_f1_raw,
        gini_f2,
        gini_f2_raw,
        lorenz_f1,
        lorenz_f2,
        histogram: forwarded_histogram(result, width)?,
        average_forwarded: average_forwarded(result),
        rewarded_nodes: rewarded,
        meta: result.meta.clone(),
    })
}
