//! Workload generation and the step loop.
//!
//! One step is the download of one file: a sampled originator requests a
//! random number of chunks at uniformly random addresses, each request is
//! routed to its storer, and every hop is counted and posted to the ledger.
//! Each step draws from its own RNG stream derived from the workload seed and
//! the step index, so a run can be split into step ranges, executed anywhere,
//! and merged back into exactly the result of the unsplit run.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::accounting::{ChequeRecord, PricingMode, SwapLedger};
use crate::error::{Error, Result};
use crate::overlay::{random_value, Address, Overlay, OverlayParams};
use crate::rng;
use crate::routing::route;

/// Download workload description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadParams {
    /// Number of file downloads (steps).
    pub files: u64,
    /// Minimum chunks per file.
    pub chunks_min: u32,
    /// Maximum chunks per file.
    pub chunks_max: u32,
    /// Fraction of nodes eligible to originate downloads.
    pub originator_fraction: f64,
    /// Root seed of the workload streams.
    pub workload_seed: u64,
}

impl Default for WorkloadParams {
    fn default() -> Self {
        Self {
            files: 10_000,
            chunks_min: 100,
            chunks_max: 1000,
            originator_fraction: 0.2,
            workload_seed: 1,
        }
    }
}

impl WorkloadParams {
    pub fn validate(&self) -> Result<()> {
        if self.chunks_min < 1 || self.chunks_min > self.chunks_max {
            return Err(Error::InvalidArgument(format!(
                "chunk range [{}, {}] must satisfy 1 <= min <= max",
                self.chunks_min, self.chunks_max
            )));
        }
        if !(self.originator_fraction > 0.0 && self.originator_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "originator fraction {} must be in (0, 1]",
                self.originator_fraction
            )));
        }
        Ok(())
    }
}

/// One file download: an originator and the chunk addresses it requests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileRequest {
    pub originator: Address,
    pub chunks: Vec<Address>,
}

/// Per-node counters accumulated over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCounters {
    /// Chunks this node passed on or served: appearances at path index >= 1.
    pub forwarded: u64,
    /// Appearances at path index 1 (the originator's zero-proximity contact).
    pub first_hop_forwarded: u64,
    /// Accounting units received as payment.
    pub income: u64,
    /// Accounting units paid out.
    pub paid: u64,
    /// Chunks requested by this node as originator.
    pub originated_chunks: u64,
}

impl NodeCounters {
    pub(crate) fn add(&mut self, other: &NodeCounters) {
        self.forwarded += other.forwarded;
        self.first_hop_forwarded += other.first_hop_forwarded;
        self.income += other.income;
        self.paid += other.paid;
        self.originated_chunks += other.originated_chunks;
    }
}

/// Run provenance and aggregate totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub overlay: OverlayParams,
    pub workload: WorkloadParams,
    pub pricing: PricingMode,
    /// Executed step ranges `[start, end)`, disjoint, sorted, coalesced.
    pub step_ranges: Vec<(u64, u64)>,
    pub total_steps: u64,
    pub total_chunks: u64,
    pub total_hops: u64,
}

/// Everything a run produces: per-node counters plus the ledger state.
/// Mergeable across disjoint step ranges of the same configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub meta: RunMeta,
    /// Node address values in canonical (ascending) overlay order.
    pub nodes: Vec<u64>,
    /// Counters parallel to `nodes`.
    pub counters: Vec<NodeCounters>,
    /// Nonzero unsettled balances `(low, high, amount)`; positive means
    /// `high` owes `low`.
    pub balances: Vec<(u64, u64, i64)>,
    pub cheques: Vec<ChequeRecord>,
}

impl RunResult {
    pub fn total_forwarded(&self) -> u64 {
        self.counters.iter().map(|c| c.forwarded).sum()
    }

    pub fn total_income(&self) -> u64 {
        self.counters.iter().map(|c| c.income).sum()
    }

    pub fn total_paid(&self) -> u64 {
        self.counters.iter().map(|c| c.paid).sum()
    }
}

/// The fixed subset of nodes eligible to originate downloads for a run:
/// `floor(fraction * n)` nodes sampled without replacement, sorted ascending.
pub fn originator_pool(
    overlay: &Overlay,
    fraction: f64,
    workload_seed: u64,
) -> Result<Vec<Address>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "originator fraction {fraction} must be in (0, 1]"
        )));
    }
    let size = (fraction * overlay.len() as f64).floor() as usize;
    if size == 0 {
        return Err(Error::InvalidArgument(format!(
            "originator fraction {fraction} selects no nodes out of {}",
            overlay.len()
        )));
    }
    if size == overlay.len() {
        return Ok(overlay.nodes().to_vec());
    }
    let mut rng = rng::stream(rng::derive(workload_seed, "workload/pool"));
    let mut picks: Vec<Address> = overlay.nodes().to_vec();
    for i in 0..size {
        let j = rng.random_range(i..picks.len());
        picks.swap(i, j);
    }
    picks.truncate(size);
    picks.sort_unstable();
    Ok(picks)
}

/// Draws one file request: originator uniform over the pool, chunk count
/// uniform in `[chunks_min, chunks_max]`, chunk addresses uniform over the
/// whole space, independently and with replacement.
pub fn sample_file_request(
    pool: &[Address],
    workload: &WorkloadParams,
    rng: &mut ChaCha12Rng,
) -> FileRequest {
    assert!(!pool.is_empty(), "originator pool is empty");
    let originator = pool[rng.random_range(0..pool.len())];
    let bits = originator.bits();
    let count = rng.random_range(workload.chunks_min..=workload.chunks_max);
    let chunks = (0..count)
        .map(|_| {
            Address::new(random_value(bits, rng), bits).expect("sampled value fits the width")
        })
        .collect();
    FileRequest { originator, chunks }
}

/// Mutable state threaded through the steps of one run.
#[derive(Debug)]
pub struct RunState {
    counters: Vec<NodeCounters>,
    total_chunks: u64,
    total_hops: u64,
    total_steps: u64,
}

impl RunState {
    pub fn new(overlay: &Overlay) -> Self {
        Self {
            counters: vec![NodeCounters::default(); overlay.len()],
            total_chunks: 0,
            total_hops: 0,
            total_steps: 0,
        }
    }

    /// Counters in canonical node order; income/paid are filled in from the
    /// ledger only when the run is finished.
    pub fn counters(&self) -> &[NodeCounters] {
        &self.counters
    }

    pub fn total_chunks(&self) -> u64 {
        self.total_chunks
    }

    pub fn total_hops(&self) -> u64 {
        self.total_hops
    }

    pub fn total_steps(&self) -> u64 {
        self.total_steps
    }
}

/// Simulates one file download: routes every chunk, updates forwarding
/// counters and posts each delivery to the ledger. A chunk stored by the
/// originator itself produces no traffic and no payment.
pub fn run_step(
    overlay: &Overlay,
    ledger: &mut SwapLedger,
    state: &mut RunState,
    request: &FileRequest,
    pricing: PricingMode,
) -> Result<()> {
    let origin_idx = overlay.node_index(request.originator)?;
    state.total_steps += 1;
    for &chunk in &request.chunks {
        state.counters[origin_idx].originated_chunks += 1;
        state.total_chunks += 1;
        let path = route(overlay, request.originator, chunk)?;
        let hops = path.hops();
        for (pos, hop) in hops.iter().enumerate().skip(1) {
            let idx = overlay
                .node_index(*hop)
                .expect("route only visits overlay nodes");
            state.counters[idx].forwarded += 1;
            if pos == 1 {
                state.counters[idx].first_hop_forwarded += 1;
            }
        }
        state.total_hops += path.hop_count() as u64;
        ledger.apply_download(&path, chunk, pricing)?;
    }
    Ok(())
}

/// Runs steps `[0, files)` with a fresh ledger.
pub fn run_experiment(
    overlay: &Overlay,
    workload: &WorkloadParams,
    pricing: PricingMode,
) -> Result<RunResult> {
    run_shard(overlay, workload, pricing, 0, workload.files)
}

/// Runs only steps `[start, end)` of the workload; shards of the same
/// configuration merge into exactly the unsharded result.
pub fn run_shard(
    overlay: &Overlay,
    workload: &WorkloadParams,
    pricing: PricingMode,
    start: u64,
    end: u64,
) -> Result<RunResult> {
    workload.validate()?;
    if start > end || end > workload.files {
        return Err(Error::InvalidArgument(format!(
            "shard [{start}, {end}) out of range for {} files",
            workload.files
        )));
    }
    let pool = originator_pool(overlay, workload.originator_fraction, workload.workload_seed)?;
    let mut ledger = SwapLedger::default();
    let mut state = RunState::new(overlay);
    for step in start..end {
        let mut step_rng = rng::stream(rng::derive_indexed(
            workload.workload_seed,
            "workload/step",
            step,
        ));
        let request = sample_file_request(&pool, workload, &mut step_rng);
        run_step(overlay, &mut ledger, &mut state, &request, pricing)?;
    }
    Ok(finish_run(
        overlay, workload, pricing, start, end, state, ledger,
    ))
}

fn finish_run(
    overlay: &Overlay,
    workload: &WorkloadParams,
    pricing: PricingMode,
    start: u64,
    end: u64,
    mut state: RunState,
    ledger: SwapLedger,
) -> RunResult {
    for (idx, node) in overlay.nodes().iter().enumerate() {
        state.counters[idx].income = ledger.income_of(*node);
        state.counters[idx].paid = ledger.paid_of(*node);
    }
    let step_ranges = if start == end {
        Vec::new()
    } else {
        vec![(start, end)]
    };
    RunResult {
        meta: RunMeta {
            overlay: *overlay.params(),
            workload: *workload,
            pricing,
            step_ranges,
            total_steps: state.total_steps,
            total_chunks: state.total_chunks,
            total_hops: state.total_hops,
        },
        nodes: overlay.nodes().iter().map(|a| a.value()).collect(),
        counters: state.counters,
        balances: ledger.nonzero_balances(),
        cheques: ledger.cheques().to_vec(),
    }
}
