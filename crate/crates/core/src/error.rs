//! Error type shared by all simulator modules.

use crate::overlay::Address;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Two addresses with different widths were combined.
    #[error("address width mismatch: {left} bits vs {right} bits")]
    WidthMismatch { left: u32, right: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// More addresses requested than the space holds.
    #[error("cannot draw {requested} distinct addresses from a {bits}-bit space")]
    Capacity { requested: usize, bits: u32 },

    /// An address that is not a node of the overlay was used where a node is required.
    #[error("address {0} is not a node of this overlay")]
    UnknownNode(u64),

    /// Greedy forwarding got stuck before reaching the storer. Only possible on
    /// an overlay whose bucket-completeness invariant is broken; carries the
    /// partial path for diagnostics.
    #[error("routing failure: no closer neighbor after {} hops (partial path {:?})",
            partial.len() - 1, partial.iter().map(|a| a.value()).collect::<Vec<_>>())]
    RoutingFailure { partial: Vec<Address> },

    /// A metric has no defined value (e.g. Gini of an all-zero series).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Results cannot be merged; names the first mismatched field.
    #[error("incompatible runs: {field} differs")]
    IncompatibleRuns { field: &'static str },

    #[error("unsupported {kind} file version {found} (expected {expected})")]
    SchemaVersion {
        kind: &'static str,
        found: u32,
        expected: u32,
    },

    /// A persisted topology violates an overlay invariant.
    #[error("corrupt topology: {0}")]
    CorruptTopology(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
