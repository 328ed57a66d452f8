//! Greedy forwarding over the overlay.
//!
//! A download request for a chunk starts at its originator and is forwarded,
//! hop by hop, to the table entry closest to the chunk address until no entry
//! is closer than the current node; the chunk then travels back along the
//! same hops. Bucket completeness guarantees the walk ends at the globally
//! closest node (the storer), so a stuck route can only mean a broken overlay.

use crate::error::{Error, Result};
use crate::overlay::{Address, Overlay};

/// The delivery path of one chunk request: `hops[0]` is the originator, the
/// last hop is the storer. Length 1 means the originator stores the chunk
/// itself and no traffic occurs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    hops: Vec<Address>,
}

impl Path {
    pub fn hops(&self) -> &[Address] {
        &self.hops
    }

    pub fn originator(&self) -> Address {
        self.hops[0]
    }

    pub fn storer(&self) -> Address {
        *self.hops.last().expect("path is never empty")
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of forwarding legs, `len() - 1`.
    pub fn hop_count(&self) -> usize {
        self.hops.len() - 1
    }
}

/// The entry of `current`'s table closest to `chunk`, if any entry is strictly
/// closer than `current` itself; `None` means `current` is locally closest.
pub fn next_hop(overlay: &Overlay, current: Address, chunk: Address) -> Result<Option<Address>> {
    if chunk.bits() != overlay.bits() {
        return Err(Error::WidthMismatch {
            left: chunk.bits(),
            right: overlay.bits(),
        });
    }
    let table = overlay.table(current)?;
    let own = current.distance_unchecked(chunk);
    let best = table
        .entries()
        .min_by_key(|e| e.distance_unchecked(chunk));
    Ok(best.filter(|e| e.distance_unchecked(chunk) < own))
}

/// Iterates `next_hop` from `originator` until the storer is reached.
///
/// XOR distance to the chunk strictly decreases along the path, so at most
/// `bits` hops can occur; the hard cap of `bits + 1` nodes is enforced.
/// Getting stuck at a node that is not the global closest, or exceeding the
/// cap, aborts with a routing failure carrying the partial path.
pub fn route(overlay: &Overlay, originator: Address, chunk: Address) -> Result<Path> {
    let cap = overlay.bits() as usize + 1;
    let mut hops = vec![originator];
    loop {
        let current = *hops.last().expect("path is never empty");
        match next_hop(overlay, current, chunk)? {
            None => {
                if current != crate::overlay::closest_node_global(overlay, chunk)? {
                    return Err(Error::RoutingFailure { partial: hops });
                }
                return Ok(Path { hops });
            }
            Some(next) => {
                hops.push(next);
                if hops.len() > cap {
                    return Err(Error::RoutingFailure { partial: hops });
                }
            }
        }
    }
}
