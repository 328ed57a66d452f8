//! The versioned result file written by `run` and `merge` and consumed by
//! `merge` and `report`.
//!
//! Key order is fixed and all collections are sorted, so identical runs
//! produce byte-identical files and shard merges can be diffed against
//! unsharded runs.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use swapsim_core::simulation::{NodeCounters, RunMeta, RunResult};
use swapsim_core::{ChequeRecord, OverlayParams, PricingMode, WorkloadParams};

pub const RESULT_FILE_VERSION: u32 = 1;

pub fn tool_version() -> String {
    format!("swapsim {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultFile {
    pub version: u32,
    pub tool: String,
    pub config: ConfigEcho,
    pub per_node: Vec<PerNodeRecord>,
    pub totals: Totals,
    pub ledger: LedgerDump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub overlay: OverlayParams,
    /// "params" when the overlay was built from parameters, "topology-file"
    /// when it was loaded; merged files keep the tag when inputs agree.
    pub overlay_source: String,
    pub workload: WorkloadParams,
    pub pricing: PricingMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerNodeRecord {
    pub node: u64,
    pub forwarded: u64,
    pub first_hop_forwarded: u64,
    pub income: u64,
    pub paid: u64,
    pub originated_chunks: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub step_ranges: Vec<(u64, u64)>,
    pub steps: u64,
    pub chunks: u64,
    pub hops: u64,
    pub forwarded: u64,
    pub income: u64,
    pub paid: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerDump {
    pub balances: Vec<BalanceRecord>,
    pub cheques: Vec<ChequeRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceRecord {
    pub a: u64,
    pub b: u64,
    /// Positive means `b` owes `a`; pairs are stored with a < b.
    pub amount: i64,
}

impl ResultFile {
    pub fn from_run(result: &RunResult, overlay_source: &str) -> Self {
        Self {
            version: RESULT_FILE_VERSION,
            tool: tool_version(),
            config: ConfigEcho {
                overlay: result.meta.overlay,
                overlay_source: overlay_source.to_string(),
                workload: result.meta.workload,
                pricing: result.meta.pricing,
            },
            per_node: result
                .nodes
                .iter()
                .zip(&result.counters)
                .map(|(node, c)| PerNodeRecord {
                    node: *node,
                    forwarded: c.forwarded,
                    first_hop_forwarded: c.first_hop_forwarded,
                    income: c.income,
                    paid: c.paid,
                    originated_chunks: c.originated_chunks,
                })
                .collect(),
            totals: Totals {
                step_ranges: result.meta.step_ranges.clone(),
                steps: result.meta.total_steps,
                chunks: result.meta.total_chunks,
                hops: result.meta.total_hops,
                forwarded: result.total_forwarded(),
                income: result.total_income(),
                paid: result.total_paid(),
            },
            ledger: LedgerDump {
                balances: result
                    .balances
                    .iter()
                    .map(|(a, b, amount)| BalanceRecord {
                        a: *a,
                        b: *b,
                        amount: *amount,
                    })
                    .collect(),
                cheques: result.cheques.clone(),
            },
        }
    }

    pub fn into_run(self) -> anyhow::Result<RunResult> {
        if self.version != RESULT_FILE_VERSION {
            bail!(
                "unsupported result file version {} (expected {RESULT_FILE_VERSION})",
                self.version
            );
        }
        if !self.per_node.windows(2).all(|w| w[0].node < w[1].node) {
            bail!("result file per_node entries must be strictly ascending by node");
        }
        let nodes: Vec<u64> = self.per_node.iter().map(|r| r.node).collect();
        let counters: Vec<NodeCounters> = self
            .per_node
            .iter()
            .map(|r| NodeCounters {
                forwarded: r.forwarded,
                first_hop_forwarded: r.first_hop_forwarded,
                income: r.income,
                paid: r.paid,
                originated_chunks: r.originated_chunks,
            })
            .collect();
        let result = RunResult {
            meta: RunMeta {
                overlay: self.config.overlay,
                workload: self.config.workload,
                pricing: self.config.pricing,
                step_ranges: self.totals.step_ranges,
                total_steps: self.totals.steps,
                total_chunks: self.totals.chunks,
                total_hops: self.totals.hops,
            },
            nodes,
            counters,
            balances: self
                .ledger
                .balances
                .iter()
                .map(|r| (r.a, r.b, r.amount))
                .collect(),
            cheques: self.ledger.cheques,
        };
        if result.total_forwarded() != self.totals.forwarded
            || result.total_income() != self.totals.income
            || result.total_paid() != self.totals.paid
        {
            bail!("result file totals disagree with per_node counters");
        }
        Ok(result)
    }
}

pub fn write_result(path: &Path, result: &RunResult, overlay_source: &str) -> anyhow::Result<()> {
    let file = ResultFile::from_run(result, overlay_source);
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    serde_json::to_writer_pretty(&mut out, &file)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Reads a result file back into a run plus its overlay-source tag.
pub fn read_result(path: &Path) -> anyhow::Result<(RunResult, String)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading result file {}", path.display()))?;
    let file: ResultFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing result file {}", path.display()))?;
    let source = file.config.overlay_source.clone();
    let run = file
        .into_run()
        .with_context(|| format!("validating result file {}", path.display()))?;
    Ok((run, source))
}

/// One-line provenance summary embedded in CSV and SVG outputs.
pub fn provenance_line(meta: &RunMeta) -> String {
    let ranges: Vec<String> = meta
        .step_ranges
        .iter()
        .map(|(s, e)| format!("{s}..{e}"))
        .collect();
    format!(
        "{} | n={} bits={} k={} seed={} | files={} chunks={}..{} fraction={} workload-seed={} | pricing={} steps=[{}]",
        tool_version(),
        meta.overlay.n,
        meta.overlay.bits,
        meta.overlay.k,
        meta.overlay.seed,
        meta.workload.files,
        meta.workload.chunks_min,
        meta.workload.chunks_max,
        meta.workload.originator_fraction,
        meta.workload.workload_seed,
        meta.pricing,
        ranges.join(","),
    )
}
