//! Core domain types: node and channel identities, per-link statistics, the
//! per-channel connectivity matrix, and ordered sniffer sets.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of radio channels in the 2.4 GHz IEEE 802.15.4 band.
pub const NUM_CHANNELS: usize = 16;

/// Dense node index in `[0, n_nodes)`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Zero-based channel index in `[0, 16)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChannelId(u8);

impl ChannelId {
    pub fn new(index: u8) -> Result<Self> {
        if (index as usize) < NUM_CHANNELS {
            Ok(ChannelId(index))
        } else {
            Err(Error::usage(format!(
                "channel index {index} out of range (0..{NUM_CHANNELS})"
            )))
        }
    }

    pub fn index(&self) -> usize {
        self.0 as usize
    }

    /// All 16 channels in ascending order.
    pub fn all() -> impl Iterator<Item = ChannelId> {
        (0..NUM_CHANNELS as u8).map(ChannelId)
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Statistics for one directed link on one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkStat {
    /// Packet delivery ratio in `[0, 1]`.
    pub pdr: f64,
    /// Mean received signal strength in dBm, when measured.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rssi_dbm: Option<f64>,
}

impl LinkStat {
    pub fn new(pdr: f64, rssi_dbm: Option<f64>) -> Self {
        LinkStat { pdr, rssi_dbm }
    }
}

/// A named invariant violation found by [`ConnectivityMatrix::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub src: NodeId,
    pub dst: NodeId,
    pub channel: ChannelId,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},ch{}): {}",
            self.src, self.dst, self.channel, self.message
        )
    }
}

/// Directed, per-channel link statistics for all node pairs.
///
/// The matrix is the algorithms' sole view of radio reality. Absent entries
/// mean "never delivers" (PDR 0). Self-links are not meaningful and are
/// rejected by the accessors; `validate` reports them if a raw entry was
/// forced in. Immutable after construction by convention: loaders and
/// generators build it once, everything else only reads.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityMatrix {
    n_nodes: usize,
    stats: Vec<Option<LinkStat>>,
}

impl ConnectivityMatrix {
    pub fn new(n_nodes: usize) -> Result<Self> {
        if n_nodes < 2 {
            return Err(Error::data(format!(
                "connectivity matrix needs at least 2 nodes, got {n_nodes}"
            )));
        }
        Ok(ConnectivityMatrix {
            n_nodes,
            stats: vec![None; n_nodes * n_nodes * NUM_CHANNELS],
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    fn check_node(&self, id: NodeId) -> Result<()> {
        if id.0 < self.n_nodes {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "node {} out of range (n_nodes = {})",
                id, self.n_nodes
            )))
        }
    }

    fn idx(&self, src: NodeId, dst: NodeId, ch: ChannelId) -> usize {
        (src.0 * self.n_nodes + dst.0) * NUM_CHANNELS + ch.index()
    }

    /// Store a link entry. Indices are checked; the statistic values are
    /// not, so that `validate` can report bad data instead of the loader
    /// silently dropping it.
    pub fn set(&mut self, src: NodeId, dst: NodeId, ch: ChannelId, stat: LinkStat) -> Result<()> {
        self.check_node(src)?;
        self.check_node(dst)?;
        let i = self.idx(src, dst, ch);
        self.stats[i] = Some(stat);
        Ok(())
    }

    /// Raw entry lookup, `None` when the link is absent.
    pub fn stat(&self, src: NodeId, dst: NodeId, ch: ChannelId) -> Option<&LinkStat> {
        if src.0 >= self.n_nodes || dst.0 >= self.n_nodes {
            return None;
        }
        self.stats[self.idx(src, dst, ch)].as_ref()
    }

    /// PDR of the directed link `src -> dst` on `ch`; 0.0 when absent.
    pub fn link_pdr(&self, src: NodeId, dst: NodeId, ch: ChannelId) -> Result<f64> {
        self.check_node(src)?;
        self.check_node(dst)?;
        if src == dst {
            return Err(Error::usage(format!("self-link query for node {src}")));
        }
        Ok(self.pdr(src, dst, ch))
    }

    /// Unchecked fast path used by inner loops after inputs are validated.
    #[inline]
    pub(crate) fn pdr(&self, src: NodeId, dst: NodeId, ch: ChannelId) -> f64 {
        self.stats[self.idx(src, dst, ch)]
            .as_ref()
            .map_or(0.0, |s| s.pdr)
    }

    /// Sum over all 16 channels of the PDR from `sensor` toward `sniffer`.
    ///
    /// Direction is sensor -> sniffer: a sniffer captures what a node
    /// transmits. This is the per-pair quality term of the removal ordering.
    pub fn pdr_sum_toward(&self, sniffer: NodeId, sensor: NodeId) -> Result<f64> {
        self.check_node(sniffer)?;
        self.check_node(sensor)?;
        if sniffer == sensor {
            return Err(Error::usage(format!(
                "pdr_sum_toward needs distinct nodes, got {sniffer} twice"
            )));
        }
        Ok(ChannelId::all()
            .map(|ch| self.pdr(sensor, sniffer, ch))
            .sum())
    }

    /// Check every stored entry against the type invariants. Violations are
    /// data, not errors: an empty list means the matrix is well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for src in self.nodes() {
            for dst in self.nodes() {
                for ch in ChannelId::all() {
                    let Some(stat) = self.stats[self.idx(src, dst, ch)].as_ref() else {
                        continue;
                    };
                    let mut push = |message: String| {
                        out.push(Violation {
                            src,
                            dst,
                            channel: ch,
                            message,
                        })
                    };
                    if src == dst {
                        push("self-link entry".to_string());
                    }
                    if !(0.0..=1.0).contains(&stat.pdr) {
                        push(format!("pdr {} outside [0, 1]", stat.pdr));
                    }
                    if let Some(rssi) = stat.rssi_dbm {
                        if !(-130.0..=0.0).contains(&rssi) {
                            push(format!("rssi {rssi} dBm outside [-130, 0]"));
                        }
                    }
                }
            }
        }
        out
    }

    /// All node ids in ascending order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n_nodes).map(NodeId)
    }

    /// All stored entries in `(src, dst, channel)` index order.
    pub fn entries(&self) -> impl Iterator<Item = (NodeId, NodeId, ChannelId, &LinkStat)> {
        self.stats.iter().enumerate().filter_map(move |(i, s)| {
            let stat = s.as_ref()?;
            let ch = i % NUM_CHANNELS;
            let dst = (i / NUM_CHANNELS) % self.n_nodes;
            let src = i / (NUM_CHANNELS * self.n_nodes);
            Some((NodeId(src), NodeId(dst), ChannelId(ch as u8), stat))
        })
    }
}

/// An insertion-ordered, duplicate-free set of node ids designated as
/// sniffer locations. Iteration order is insertion order, which downstream
/// passes rely on for determinism.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SnifferSet {
    members: Vec<NodeId>,
}

impl SnifferSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append `id` unless already present. Returns whether it was added.
    pub fn insert(&mut self, id: NodeId) -> bool {
        if self.members.contains(&id) {
            false
        } else {
            self.members.push(id);
            true
        }
    }

    pub fn remove(&mut self, id: NodeId) -> bool {
        if let Some(pos) = self.members.iter().position(|&m| m == id) {
            self.members.remove(pos);
            true
        } else {
            false
        }
    }

    /// Re-insert `id` at `pos` (undo of a tentative removal).
    pub fn insert_at(&mut self, pos: usize, id: NodeId) {
        debug_assert!(!self.members.contains(&id));
        self.members.insert(pos, id);
    }

    pub fn position(&self, id: NodeId) -> Option<usize> {
        self.members.iter().position(|&m| m == id)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.members.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.members
    }

    /// Members as a sorted set, for order-insensitive comparisons.
    pub fn as_btree(&self) -> BTreeSet<NodeId> {
        self.members.iter().copied().collect()
    }
}

impl FromIterator<NodeId> for SnifferSet {
    fn from_iter<T: IntoIterator<Item = NodeId>>(iter: T) -> Self {
        let mut set = SnifferSet::new();
        for id in iter {
            set.insert(id);
        }
        set
    }
}
