//! Deterministic simulator of bandwidth-incentive mechanics in a
//! Kademlia-style p2p storage network.
//!
//! The crate models a static forwarding-Kademlia overlay in which chunks are
//! stored by the node closest to their address, download requests are greedily
//! forwarded hop by hop, and every hop is accounted for in a pairwise SWAP
//! ledger. On top of the per-node traffic and income counters it computes
//! fairness metrics: Gini coefficients and Lorenz curves over rewards and
//! contributions, plus forwarded-chunk histograms.
//!
//! Everything is seeded and reproducible: the same parameters always yield
//! the same overlay, the same workload, and the same results, and a run can
//! be sharded by step range and merged back together exactly.

pub mod accounting;
pub mod analysis;
pub mod error;
pub mod overlay;
pub mod rng;
pub mod routing;
pub mod simulation;

pub use accounting::{
    price, ChequeRecord, LedgerSettings, PairStatus, PaymentEvent, PricingMode, SwapLedger,
};
pub use analysis::{
    average_forwarded, f1_series, f2_series, fairness_report, forwarded_histogram, gini,
    gini_unnormalized, lorenz, merge_results, F1Variant, FairnessReport, Histogram, HistogramBin,
    LorenzPoint, ValueSeries,
};
pub use error::{Error, Result};
pub use overlay::{
    build_overlay, closest_node_global, generate_addresses, load_topology, proximity_order,
    save_topology, xor_distance, Address, Overlay, OverlayParams, RoutingTable,
};
pub use routing::{next_hop, route, Path};
pub use simulation::{
    originator_pool, run_experiment, run_shard, run_step, sample_file_request, FileRequest,
    NodeCounters, RunMeta, RunResult, RunState, WorkloadParams,
};
