//! Overlay address space and bucketed Kademlia topology.
//!
//! Nodes and chunks share one fixed-width address space. Proximity between
//! two addresses is the length of their common most-significant-bit prefix;
//! distance is the XOR of their values. Each node keeps one bucket per prefix
//! depth, holding up to `k` peers whose proximity order to the owner is
//! exactly that depth. Construction is a pure function of the parameters and
//! the resulting topology can be persisted and reloaded bit-identically.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path as FsPath;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Version tag of the topology file format.
pub const TOPOLOGY_FILE_VERSION: u32 = 1;

/// Fixed-width overlay identifier, shared by nodes and chunks.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address {
    value: u64,
    bits: u32,
}

impl Address {
    /// Builds an address, rejecting values outside `[0, 2^bits)`.
    pub fn new(value: u64, bits: u32) -> Result<Self> {
        if !(2..=64).contains(&bits) {
            return Err(Error::InvalidArgument(format!(
                "address width must be in [2, 64], got {bits}"
            )));
        }
        if u128::from(value) >= (1u128 << bits) {
            return Err(Error::InvalidArgument(format!(
                "address value {value} does not fit in {bits} bits"
            )));
        }
        Ok(Self { value, bits })
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    fn check_width(self, other: Address) -> Result<()> {
        if self.bits == other.bits {
            Ok(())
        } else {
            Err(Error::WidthMismatch {
                left: self.bits,
                right: other.bits,
            })
        }
    }

    /// XOR distance without the width check; callers must guarantee equal widths.
    pub(crate) fn distance_unchecked(self, other: Address) -> u64 {
        debug_assert_eq!(self.bits, other.bits);
        self.value ^ other.value
    }

    pub(crate) fn proximity_unchecked(self, other: Address) -> u32 {
        let x = self.distance_unchecked(other);
        if x == 0 {
            self.bits
        } else {
            // Leading zeros of the XOR, counted within the address width.
            x.leading_zeros() - (64 - self.bits)
        }
    }
}

impl std::fmt::Debug for Address {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}b", self.value, self.bits)
    }
}

/// XOR of two equal-width addresses, interpreted as an unsigned integer.
pub fn xor_distance(a: Address, b: Address) -> Result<u64> {
    a.check_width(b)?;
    Ok(a.distance_unchecked(b))
}

/// Length of the common most-significant-bit prefix; `bits` iff the addresses
/// are equal.
pub fn proximity_order(a: Address, b: Address) -> Result<u32> {
    a.check_width(b)?;
    Ok(a.proximity_unchecked(b))
}

/// Parameters that fully determine an overlay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlayParams {
    /// Node count.
    pub n: usize,
    /// Address width in bits.
    pub bits: u32,
    /// Bucket capacity.
    pub k: usize,
    /// Root seed; topology draws from a sub-stream of it.
    pub seed: u64,
}

impl Default for OverlayParams {
    fn default() -> Self {
        Self {
            n: 1000,
            bits: 16,
            k: 4,
            seed: 1,
        }
    }
}

impl OverlayParams {
    pub fn validate(&self) -> Result<()> {
        if !(2..=64).contains(&self.bits) {
            return Err(Error::InvalidArgument(format!(
                "address width must be in [2, 64], got {}",
                self.bits
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("bucket capacity must be >= 1".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("node count must be >= 1".into()));
        }
        if (self.n as u128) > (1u128 << self.bits) {
            return Err(Error::Capacity {
                requested: self.n,
                bits: self.bits,
            });
        }
        Ok(())
    }
}

/// One node's bucketed view of the overlay: bucket `i` holds up to `k` peers
/// at proximity order exactly `i` from the owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingTable {
    owner: Address,
    buckets: Vec<Vec<Address>>,
}

impl RoutingTable {
    pub fn owner(&self) -> Address {
        self.owner
    }

    pub fn buckets(&self) -> &[Vec<Address>] {
        &self.buckets
    }

    pub fn bucket(&self, depth: u32) -> &[Address] {
        &self.buckets[depth as usize]
    }

    /// All peers the owner is connected to, bucket by bucket.
    pub fn entries(&self) -> impl Iterator<Item = Address> + '_ {
        self.buckets.iter().flatten().copied()
    }

    /// Depth of the first bucket with fewer candidates than `k`: from here
    /// inward the node is connected to every peer (its neighborhood).
    pub fn neighborhood_depth(&self, k: usize) -> u32 {
        for (i, b) in self.buckets.iter().enumerate() {
            if b.len() < k {
                return i as u32;
            }
        }
        self.owner.bits()
    }
}

/// The node set plus one routing table per node; immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlay {
    params: OverlayParams,
    nodes: Vec<Address>,
    tables: Vec<RoutingTable>,
    index: HashMap<u64, usize>,
}

impl Overlay {
    pub fn params(&self) -> &OverlayParams {
        &self.params
    }

    pub fn bits(&self) -> u32 {
        self.params.bits
    }

    /// Nodes in ascending address order.
    pub fn nodes(&self) -> &[Address] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Position of a node in the canonical (ascending) node order.
    pub fn node_index(&self, node: Address) -> Result<usize> {
        if node.bits() != self.params.bits {
            return Err(Error::WidthMismatch {
                left: node.bits(),
                right: self.params.bits,
            });
        }
        self.index
            .get(&node.value())
            .copied()
            .ok_or(Error::UnknownNode(node.value()))
    }

    pub fn table(&self, node: Address) -> Result<&RoutingTable> {
        Ok(&self.tables[self.node_index(node)?])
    }

    pub fn tables(&self) -> &[RoutingTable] {
        &self.tables
    }
}

/// Draws `n` distinct addresses uniformly from `[0, 2^bits)`, sorted ascending.
/// Deterministic in `seed`.
pub fn generate_addresses(n: usize, bits: u32, seed: u64) -> Result<Vec<Address>> {
    if !(2..=64).contains(&bits) {
        return Err(Error::InvalidArgument(format!(
            "address width must be in [2, 64], got {bits}"
        )));
    }
    let space = 1u128 << bits;
    if n as u128 > space {
        return Err(Error::Capacity { requested: n, bits });
    }
    let mut rng = rng::stream(seed);
    let mut values: Vec<u64>;
    if (n as u128) * 2 >= space {
        // Dense draw: shuffle the whole space (at most 2n values here).
        values = (0..space as u64).collect();
        partial_shuffle(&mut values, n, &mut rng);
        values.truncate(n);
    } else {
        // Sparse draw: rejection sampling.
        let mut seen = HashSet::with_capacity(n * 2);
        values = Vec::with_capacity(n);
        while values.len() < n {
            let v = random_value(bits, &mut rng);
            if seen.insert(v) {
                values.push(v);
            }
        }
    }
    values.sort_unstable();
    values.into_iter().map(|v| Address::new(v, bits)).collect()
}

/// Uniform value in `[0, 2^bits)`.
pub(crate) fn random_value(bits: u32, rng: &mut impl Rng) -> u64 {
    if bits == 64 {
        rng.random()
    } else {
        rng.random_range(0..(1u64 << bits))
    }
}

/// Fisher-Yates limited to the first `count` positions.
fn partial_shuffle<T>(items: &mut [T], count: usize, rng: &mut impl Rng) {
    let len = items.len();
    for i in 0..count.min(len.saturating_sub(1)) {
        let j = rng.random_range(i..len);
        items.swap(i, j);
    }
}

/// Builds the full overlay: node addresses, then one table per node where
/// bucket `i` holds all candidates at depth `i` if there are at most `k`,
/// otherwise `k` of them sampled uniformly without replacement.
pub fn build_overlay(params: OverlayParams) -> Result<Overlay> {
    params.validate()?;
    let nodes = generate_addresses(
        params.n,
        params.bits,
        rng::derive(params.seed, "topology/addresses"),
    )?;
    let mut bucket_rng = rng::stream(rng::derive(params.seed, "topology/buckets"));

    let bits = params.bits as usize;
    let mut tables = Vec::with_capacity(nodes.len());
    for &owner in &nodes {
        let mut candidates: Vec<Vec<Address>> = vec![Vec::new(); bits];
        for &other in &nodes {
            if other == owner {
                continue;
            }
            let po = owner.proximity_unchecked(other) as usize;
            candidates[po].push(other);
        }
        let mut buckets = Vec::with_capacity(bits);
        for mut cand in candidates {
            if cand.len() > params.k {
                partial_shuffle(&mut cand, params.k, &mut bucket_rng);
                cand.truncate(params.k);
            }
            cand.sort_unstable();
            buckets.push(cand);
        }
        tables.push(RoutingTable { owner, buckets });
    }

    let index = nodes
        .iter()
        .enumerate()
        .map(|(i, a)| (a.value(), i))
        .collect();
    Ok(Overlay {
        params,
        nodes,
        tables,
        index,
    })
}

/// The node minimizing XOR distance to `target` over all nodes. Unique:
/// XOR distances from distinct addresses to a fixed target are distinct.
///
/// Walks the dyadic structure of the sorted node list (the binary trie of
/// addresses) instead of scanning linearly; the linear scan is the defining
/// oracle and the tests cross-check against it.
pub fn closest_node_global(overlay: &Overlay, target: Address) -> Result<Address> {
    if target.bits() != overlay.bits() {
        return Err(Error::WidthMismatch {
            left: target.bits(),
            right: overlay.bits(),
        });
    }
    if overlay.nodes.is_empty() {
        return Err(Error::InvalidArgument("empty overlay".into()));
    }
    let (mut lo, mut hi) = (0usize, overlay.nodes.len());
    for level in (0..overlay.bits()).rev() {
        if hi - lo == 1 {
            break;
        }
        let bit = 1u64 << level;
        // Nodes in [lo, hi) share all bits above `level`; those with this bit
        // clear come first.
        let split = lo + overlay.nodes[lo..hi].partition_point(|a| a.value & bit == 0);
        if target.value & bit == 0 {
            (lo, hi) = if split > lo { (lo, split) } else { (split, hi) };
        } else {
            (lo, hi) = if split < hi { (split, hi) } else { (lo, split) };
        }
    }
    Ok(overlay.nodes[lo])
}

// ---------------------------------------------------------------------------
// Topology file
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TopologyFile {
    version: u32,
    params: OverlayParams,
    nodes: Vec<u64>,
    tables: Vec<TableRecord>,
}

#[derive(Serialize, Deserialize)]
struct TableRecord {
    owner: u64,
    buckets: Vec<Vec<u64>>,
}

/// Writes the canonical topology file: nodes sorted ascending, tables in node
/// order, bucket entries sorted ascending. Byte equality of two files implies
/// structural equality of the overlays.
pub fn save_topology(overlay: &Overlay, path: &FsPath) -> Result<()> {
    let file = TopologyFile {
        version: TOPOLOGY_FILE_VERSION,
        params: overlay.params,
        nodes: overlay.nodes.iter().map(|a| a.value()).collect(),
        tables: overlay
            .tables
            .iter()
            .map(|t| TableRecord {
                owner: t.owner.value(),
                buckets: t
                    .buckets
                    .iter()
                    .map(|b| b.iter().map(|a| a.value()).collect())
                    .collect(),
            })
            .collect(),
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &file)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Reads a topology file and revalidates every overlay invariant; corrupt or
/// non-canonical files are rejected.
pub fn load_topology(path: &FsPath) -> Result<Overlay> {
    let file: TopologyFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if file.version != TOPOLOGY_FILE_VERSION {
        return Err(Error::SchemaVersion {
            kind: "topology",
            found: file.version,
            expected: TOPOLOGY_FILE_VERSION,
        });
    }
    let params = file.params;
    params.validate()?;
    if file.nodes.len() != params.n {
        return Err(Error::CorruptTopology(format!(
            "params.n is {} but {} nodes listed",
            params.n,
            file.nodes.len()
        )));
    }
    if file.tables.len() != params.n {
        return Err(Error::CorruptTopology(format!(
            "expected {} tables, found {}",
            params.n,
            file.tables.len()
        )));
    }

    let mut nodes = Vec::with_capacity(file.nodes.len());
    for v in &file.nodes {
        nodes.push(
            Address::new(*v, params.bits)
                .map_err(|e| Error::CorruptTopology(e.to_string()))?,
        );
    }
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::CorruptTopology(
            "node list must be strictly ascending (duplicates or unsorted)".into(),
        ));
    }
    let index: HashMap<u64, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, a)| (a.value(), i))
        .collect();

    let mut tables: Vec<Option<RoutingTable>> = vec![None; params.n];
    for rec in &file.tables {
        let owner_idx = *index.get(&rec.owner).ok_or_else(|| {
            Error::CorruptTopology(format!("table owner {} is not a node", rec.owner))
        })?;
        let owner = nodes[owner_idx];
        if tables[owner_idx].is_some() {
            return Err(Error::CorruptTopology(format!(
                "duplicate table for owner {}",
                rec.owner
            )));
        }
        if rec.buckets.len() != params.bits as usize {
            return Err(Error::CorruptTopology(format!(
                "owner {}: expected {} buckets, found {}",
                rec.owner,
                params.bits,
                rec.buckets.len()
            )));
        }
        let mut buckets = Vec::with_capacity(rec.buckets.len());
        for (depth, entries) in rec.buckets.iter().enumerate() {
            let mut bucket = Vec::with_capacity(entries.len());
            for v in entries {
                if !index.contains_key(v) {
                    return Err(Error::CorruptTopology(format!(
                        "owner {}: bucket {depth} entry {v} is not a node",
                        rec.owner
                    )));
                }
                let entry = Address::new(*v, params.bits)
                    .map_err(|e| Error::CorruptTopology(e.to_string()))?;
                if entry == owner {
                    return Err(Error::CorruptTopology(format!(
                        "owner {} appears in its own bucket {depth}",
                        rec.owner
                    )));
                }
                if owner.proximity_unchecked(entry) as usize != depth {
                    return Err(Error::CorruptTopology(format!(
                        "owner {}: entry {v} has proximity order {} but sits in bucket {depth}",
                        rec.owner,
                        owner.proximity_unchecked(entry)
                    )));
                }
                bucket.push(entry);
            }
            if bucket.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::CorruptTopology(format!(
                    "owner {}: bucket {depth} entries must be strictly ascending",
                    rec.owner
                )));
            }
            // Completeness: |bucket| == min(k, candidates at this depth).
            let candidates = nodes
                .iter()
                .filter(|n| **n != owner && owner.proximity_unchecked(**n) as usize == depth)
                .count();
            let expected = candidates.min(params.k);
            if bucket.len() != expected {
                return Err(Error::CorruptTopology(format!(
                    "owner {}: bucket {depth} holds {} entries, expected {expected}",
                    rec.owner,
                    bucket.len()
                )));
            }
            buckets.push(bucket);
        }
        tables[owner_idx] = Some(RoutingTable { owner, buckets });
    }
    let tables: Vec<RoutingTable> = tables.into_iter().map(|t| t.unwrap()).collect();

    Ok(Overlay {
        params,
        nodes,
        tables,
        index,
    })
}

#[cfg(test)]
pub(crate) fn overlay_from_parts_unchecked(
    params: OverlayParams,
    nodes: Vec<Address>,
    tables: Vec<RoutingTable>,
) -> Overlay {
    let index = nodes
        .iter()
        .enumerate()
        .map(|(i, a)| (a.value(), i))
        .collect();
    Overlay {
        params,
        nodes,
        tables,
        index,
    }
}

#[cfg(test)]
pub(crate) fn routing_table_from_parts(owner: Address, buckets: Vec<Vec<Address>>) -> RoutingTable {
    RoutingTable { owner, buckets }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn addr(v: u64, bits: u32) -> Address {
        Address::new(v, bits).unwrap()
    }

    #[test]
    fn xor_distance_basics() {
        let a = addr(91, 8);
        assert_eq!(xor_distance(a, a).unwrap(), 0);
        assert_eq!(xor_distance(addr(91, 8), addr(245, 8)).unwrap(), 174);
        assert_eq!(xor_distance(addr(91, 8), addr(64, 8)).unwrap(), 27);
    }

    #[test]
    fn xor_distance_rejects_width_mismatch() {
        let e = xor_distance(addr(1, 8), addr(1, 16)).unwrap_err();
        assert!(matches!(e, Error::WidthMismatch { left: 8, right: 16 }));
    }

    #[test]
    fn proximity_order_examples() {
        // A node with id 91 contacts bucket 0 for a chunk at 245 and
        // bucket 3 for a chunk at 64.
        assert_eq!(proximity_order(addr(91, 8), addr(245, 8)).unwrap(), 0);
        assert_eq!(proximity_order(addr(91, 8), addr(64, 8)).unwrap(), 3);
        assert_eq!(proximity_order(addr(91, 8), addr(91, 8)).unwrap(), 8);
        assert_eq!(proximity_order(addr(0, 16), addr(0, 16)).unwrap(), 16);
    }

    /// Brute-force prefix scan, independent of the leading_zeros shortcut.
    fn proximity_oracle(a: u64, b: u64, bits: u32) -> u32 {
        for i in 0..bits {
            let shift = bits - 1 - i;
            if (a >> shift) & 1 != (b >> shift) & 1 {
                return i;
            }
        }
        bits
    }

    #[test]
    fn proximity_order_matches_bit_scan_oracle() {
        for bits in [2u32, 8, 16] {
            let cap = 1u64 << bits;
            for a in (0..cap).step_by(if bits == 16 { 251 } else { 1 }) {
                for b in (0..cap).step_by(if bits == 16 { 257 } else { 1 }) {
                    let got = proximity_order(addr(a, bits), addr(b, bits)).unwrap();
                    assert_eq!(got, proximity_oracle(a, b, bits), "a={a} b={b} bits={bits}");
                }
            }
        }
    }

    #[test]
    fn generate_addresses_saturated_space() {
        let got = generate_addresses(4, 2, 123).unwrap();
        let values: Vec<u64> = got.iter().map(|a| a.value()).collect();
        assert_eq!(values, vec![0, 1, 2, 3]);
    }

    #[test]
    fn generate_addresses_distinct_sorted_deterministic() {
        let a = generate_addresses(1000, 16, 99).unwrap();
        let b = generate_addresses(1000, 16, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 1000);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        let c = generate_addresses(1000, 16, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generate_addresses_over_capacity() {
        assert!(matches!(
            generate_addresses(5, 2, 1).unwrap_err(),
            Error::Capacity { requested: 5, bits: 2 }
        ));
    }

    #[test]
    fn two_node_overlay_connects_both_ways() {
        let params = OverlayParams {
            n: 2,
            bits: 4,
            k: 4,
            seed: 7,
        };
        let overlay = build_overlay(params).unwrap();
        for table in overlay.tables() {
            let entries: Vec<Address> = table.entries().collect();
            assert_eq!(entries.len(), 1);
            assert_ne!(entries[0], table.owner());
        }
    }

    #[test]
    fn buckets_hold_all_candidates_when_k_exceeds_them() {
        // k = 20 > n - 1, so every bucket must hold all candidates at its depth.
        let params = OverlayParams {
            n: 16,
            bits: 4,
            k: 20,
            seed: 3,
        };
        let overlay = build_overlay(params).unwrap();
        for table in overlay.tables() {
            for (depth, bucket) in table.buckets().iter().enumerate() {
                let expected: Vec<Address> = overlay
                    .nodes()
                    .iter()
                    .copied()
                    .filter(|n| {
                        *n != table.owner()
                            && proximity_order(table.owner(), *n).unwrap() as usize == depth
                    })
                    .collect();
                assert_eq!(bucket, &expected);
            }
        }
    }

    #[test]
    fn bucket_invariants_at_full_scale() {
        let overlay = build_overlay(OverlayParams::default()).unwrap();
        assert_eq!(overlay.len(), 1000);
        for table in overlay.tables() {
            for (depth, bucket) in table.buckets().iter().enumerate() {
                assert!(bucket.len() <= 4);
                for e in bucket {
                    assert_ne!(*e, table.owner());
                    assert_eq!(
                        proximity_order(table.owner(), *e).unwrap() as usize,
                        depth
                    );
                }
                let candidates = overlay
                    .nodes()
                    .iter()
                    .filter(|n| {
                        **n != table.owner()
                            && proximity_order(table.owner(), **n).unwrap() as usize == depth
                    })
                    .count();
                assert_eq!(bucket.len(), candidates.min(4));
            }
            // With 1000 nodes ~half differ in the first bit, so bucket 0 is full.
            assert_eq!(table.bucket(0).len(), 4);
        }
    }

    #[test]
    fn build_is_deterministic() {
        let params = OverlayParams {
            n: 200,
            bits: 12,
            k: 4,
            seed: 5,
        };
        assert_eq!(build_overlay(params).unwrap(), build_overlay(params).unwrap());
    }

    #[test]
    fn closest_node_matches_linear_scan_oracle() {
        let params = OverlayParams {
            n: 64,
            bits: 8,
            k: 4,
            seed: 11,
        };
        let overlay = build_overlay(params).unwrap();
        for t in 0..256u64 {
            let target = addr(t, 8);
            let got = closest_node_global(&overlay, target).unwrap();
            let mut best = overlay.nodes()[0];
            let mut best_d = xor_distance(best, target).unwrap();
            for n in overlay.nodes().iter().skip(1) {
                let d = xor_distance(*n, target).unwrap();
                if d < best_d {
                    best = *n;
                    best_d = d;
                }
            }
            assert_eq!(got, best);
        }
    }

    #[test]
    fn closest_node_exact_hit_and_two_node_case() {
        let params = OverlayParams {
            n: 2,
            bits: 4,
            k: 4,
            seed: 2,
        };
        let overlay = build_overlay(params).unwrap();
        let first = overlay.nodes()[0];
        assert_eq!(closest_node_global(&overlay, first).unwrap(), first);
    }

    #[test]
    fn topology_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("topology.json");
        let overlay = build_overlay(OverlayParams {
            n: 50,
            bits: 8,
            k: 4,
            seed: 17,
        })
        .unwrap();
        save_topology(&overlay, &path).unwrap();
        let loaded = load_topology(&path).unwrap();
        assert_eq!(overlay, loaded);

        // Saving the loaded overlay reproduces the bytes (canonical form).
        let path2 = dir.path().join("topology2.json");
        save_topology(&loaded, &path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn load_rejects_duplicate_node() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("topology.json");
        let overlay = build_overlay(OverlayParams {
            n: 8,
            bits: 4,
            k: 2,
            seed: 1,
        })
        .unwrap();
        save_topology(&overlay, &path).unwrap();
        let mut doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        doc["nodes"][1] = doc["nodes"][0].clone();
        std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
        assert!(matches!(
            load_topology(&path).unwrap_err(),
            Error::CorruptTopology(_)
        ));
    }

    #[test]
    fn load_rejects_wrong_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("topology.json");
        let overlay = build_overlay(OverlayParams {
            n: 8,
            bits: 4,
            k: 2,
            seed: 1,
        })
        .unwrap();
        save_topology(&overlay, &path).unwrap();
        let text = std::fs::read_to_string(&path)
            .unwrap()
            .replacen("\"version\": 1", "\"version\": 99", 1);
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            load_topology(&path).unwrap_err(),
            Error::SchemaVersion { found: 99, .. }
        ));
    }

    #[test]
    fn cross_load_with_different_k() {
        let dir = tempfile::tempdir().unwrap();
        let p4 = dir.path().join("k4.json");
        let p20 = dir.path().join("k20.json");
        let o4 = build_overlay(OverlayParams {
            n: 64,
            bits: 8,
            k: 4,
            seed: 9,
        })
        .unwrap();
        let o20 = build_overlay(OverlayParams {
            n: 64,
            bits: 8,
            k: 20,
            seed: 9,
        })
        .unwrap();
        save_topology(&o4, &p4).unwrap();
        save_topology(&o20, &p20).unwrap();
        // Each file carries its own params and is usable as-is.
        assert_eq!(load_topology(&p4).unwrap().params().k, 4);
        assert_eq!(load_topology(&p20).unwrap().params().k, 20);
        assert_ne!(load_topology(&p4).unwrap(), load_topology(&p20).unwrap());
    }
}
