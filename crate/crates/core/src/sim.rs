//! Slotted channel-hopping detection simulation.
//!
//! A reduced TSCH analogue: every non-root node originates one data frame
//! per slotframe and forwards queued frames one hop toward the root along a
//! BFS tree. Each transmission attempt occupies a random distinct slot of
//! the sender's slotframe, hops channels as `(absolute slot + per-frame
//! offset) mod 16`, and is a separately sniffable on-air frame. Sniffer
//! reception is per-channel PDR, with optional destructive collisions when
//! audible frames share a `(slot, channel)` cell.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelId, ConnectivityMatrix, NodeId, SnifferSet, NUM_CHANNELS};
use crate::seed::mix;
use crate::selection::quality;

/// Simulation parameters. `root = None` picks the node with the highest
/// total link quality (ties to the lowest id).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub slotframes: u64,
    pub slotframe_length: usize,
    pub max_link_attempts: u32,
    pub collisions_enabled: bool,
    pub root: Option<NodeId>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            slotframes: 1000,
            slotframe_length: 101,
            max_link_attempts: 3,
            collisions_enabled: true,
            root: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.slotframes < 1 || self.slotframe_length < 1 || self.max_link_attempts < 1 {
            return Err(Error::usage(
                "slotframes, slotframe_length, and max_link_attempts must all be at least 1"
                    .to_string(),
            ));
        }
        Ok(())
    }
}

/// Convergecast routing tree; the root maps to itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingTree {
    pub root: NodeId,
    parent: Vec<NodeId>,
}

impl RoutingTree {
    pub fn parent(&self, u: NodeId) -> NodeId {
        self.parent[u.0]
    }

    pub fn depth(&self, u: NodeId) -> usize {
        let mut d = 0;
        let mut cur = u;
        while cur != self.root {
            cur = self.parent(cur);
            d += 1;
        }
        d
    }
}

/// Default root: the node with the maximum total quality, ties to the
/// lowest id.
pub fn default_root(m: &ConnectivityMatrix) -> Result<NodeId> {
    let mut best = (f64::NEG_INFINITY, NodeId(0));
    for v in m.nodes() {
        let q = quality(m, v)?;
        if q > best.0 {
            best = (q, v);
        }
    }
    Ok(best.1)
}

/// Breadth-first convergecast tree on the support graph (a link exists when
/// any channel has nonzero PDR in either direction). Among equal-depth
/// parent candidates the one with the best mean PDR from the child wins,
/// ties to the lowest id.
pub fn build_tree(m: &ConnectivityMatrix, root: NodeId) -> Result<RoutingTree> {
    let n = m.n_nodes();
    if root.0 >= n {
        return Err(Error::usage(format!("root {root} out of range")));
    }
    let connected = |a: NodeId, b: NodeId| {
        ChannelId::all().any(|ch| m.pdr(a, b, ch) > 0.0 || m.pdr(b, a, ch) > 0.0)
    };

    let mut depth = vec![usize::MAX; n];
    depth[root.0] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for u in m.nodes() {
            if depth[u.0] == usize::MAX && connected(v, u) {
                depth[u.0] = depth[v.0] + 1;
                queue.push_back(u);
            }
        }
    }
    if let Some(stranded) = (0..n).find(|&u| depth[u] == usize::MAX) {
        return Err(Error::data(format!(
            "node {stranded} is unreachable from root {root}"
        )));
    }

    let mean_pdr_toward = |child: NodeId, parent: NodeId| {
        ChannelId::all()
            .map(|ch| m.pdr(child, parent, ch))
            .sum::<f64>()
            / NUM_CHANNELS as f64
    };
    let mut parent: Vec<NodeId> = (0..n).map(NodeId).collect();
    for u in m.nodes() {
        if u == root {
            continue;
        }
        let mut best: Option<(f64, NodeId)> = None;
        for p in m.nodes() {
            if depth[p.0] + 1 == depth[u.0] && connected(u, p) {
                let score = mean_pdr_toward(u, p);
                if best.is_none() || score > best.unwrap().0 {
                    best = Some((score, p));
                }
            }
        }
        parent[u.0] = best.expect("non-root node has a parent at depth-1").1;
    }
    Ok(RoutingTree { root, parent })
}

/// Per-run detection counters. One on-air transmission attempt is counted
/// exactly once in `tx_frames`; `detected = unique + multiple`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DetectionStats {
    pub tx_frames: u64,
    pub detected: u64,
    pub unique: u64,
    pub multiple: u64,
    pub per_sniffer_rx: BTreeMap<NodeId, u64>,
    pub collisions_at_sniffers: u64,
}

impl DetectionStats {
    fn pct(num: u64, den: u64) -> f64 {
        if den == 0 {
            0.0
        } else {
            100.0 * num as f64 / den as f64
        }
    }

    pub fn detection_pct(&self) -> f64 {
        Self::pct(self.detected, self.tx_frames)
    }

    pub fn unique_pct(&self) -> f64 {
        Self::pct(self.unique, self.tx_frames)
    }

    pub fn multiple_pct(&self) -> f64 {
        Self::pct(self.multiple, self.tx_frames)
    }
}

/// A frame waiting in some node's queue.
#[derive(Debug, Clone, Copy)]
struct QueuedFrame {
    origin: NodeId,
    channel_offset: u8,
}

/// One on-air transmission attempt.
#[derive(Debug, Clone, Copy)]
pub struct FrameTx {
    pub sender: NodeId,
    pub slotframe_idx: u64,
    pub slot: usize,
    pub channel: ChannelId,
    pub origin: NodeId,
}

/// Draws distinct random slots for one sender within one slotframe via a
/// lazy Fisher-Yates shuffle.
struct SlotSampler {
    slots: Vec<usize>,
    next: usize,
}

impl SlotSampler {
    fn new(len: usize) -> Self {
        SlotSampler {
            slots: (0..len).collect(),
            next: 0,
        }
    }

    fn draw(&mut self, rng: &mut ChaCha8Rng) -> Option<usize> {
        if self.next == self.slots.len() {
            return None;
        }
        let j = rng.gen_range(self.next..self.slots.len());
        self.slots.swap(self.next, j);
        let s = self.slots[self.next];
        self.next += 1;
        Some(s)
    }
}

fn bernoulli(p: f64, rng: &mut ChaCha8Rng) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.gen::<f64>() < p
    }
}

/// Run the detection simulation. Deterministic given identical inputs and
/// seed; the traffic stream and the sniffer reception stream use separate
/// RNGs so the generated traffic does not depend on the sniffer set.
pub fn run_simulation(
    m: &ConnectivityMatrix,
    sniffers: &SnifferSet,
    cfg: &SimConfig,
    seed: u64,
) -> Result<DetectionStats> {
    cfg.validate()?;
    for s in sniffers.iter() {
        if s.0 >= m.n_nodes() {
            return Err(Error::usage(format!(
                "sniffer {s} out of range (n_nodes = {})",
                m.n_nodes()
            )));
        }
    }
    let root = match cfg.root {
        Some(r) => r,
        None => default_root(m)?,
    };
    let tree = build_tree(m, root)?;

    let mut rng_traffic = ChaCha8Rng::seed_from_u64(mix(seed, &[0x7261_6666_6963])); // "raffic"
    let mut rng_sniff = ChaCha8Rng::seed_from_u64(mix(seed, &[0x736e696666])); // "sniff"

    let n = m.n_nodes();
    let mut queues: Vec<VecDeque<QueuedFrame>> = vec![VecDeque::new(); n];
    let mut stats = DetectionStats::default();
    for s in sniffers.iter() {
        stats.per_sniffer_rx.insert(s, 0);
    }

    for sf in 0..cfg.slotframes {
        // new data frames
        for u in m.nodes() {
            if u != root {
                queues[u.0].push_back(QueuedFrame {
                    origin: u,
                    channel_offset: rng_traffic.gen_range(0..NUM_CHANNELS as u8),
                });
            }
        }

        // transmissions of this slotframe
        let mut frames: Vec<FrameTx> = Vec::new();
        let mut delivered: Vec<(NodeId, QueuedFrame)> = Vec::new();
        for u in m.nodes() {
            if u == root || queues[u.0].is_empty() {
                continue;
            }
            let parent = tree.parent(u);
            let mut sampler = SlotSampler::new(cfg.slotframe_length);
            let mut pending = std::mem::take(&mut queues[u.0]);
            'frames: while let Some(frame) = pending.pop_front() {
                let mut success = false;
                for _attempt in 0..cfg.max_link_attempts {
                    let Some(slot) = sampler.draw(&mut rng_traffic) else {
                        // out of slots this slotframe; try again next time
                        queues[u.0].push_back(frame);
                        queues[u.0].extend(pending.drain(..));
                        break 'frames;
                    };
                    let abs_slot = sf * cfg.slotframe_length as u64 + slot as u64;
                    let channel = ChannelId::new(
                        ((abs_slot + frame.channel_offset as u64) % NUM_CHANNELS as u64) as u8,
                    )?;
                    frames.push(FrameTx {
                        sender: u,
                        slotframe_idx: sf,
                        slot,
                        channel,
                        origin: frame.origin,
                    });
                    if bernoulli(m.pdr(u, parent, channel), &mut rng_traffic) {
                        success = true;
                        break;
                    }
                }
                if success && parent != root {
                    delivered.push((parent, frame));
                }
                // delivered frames reaching the root leave the network;
                // frames failing all attempts are dropped
            }
        }

        // sniffer reception
        let mut cell_count: HashMap<(usize, u8), u32> = HashMap::new();
        if cfg.collisions_enabled {
            for f in &frames {
                *cell_count
                    .entry((f.slot, f.channel.index() as u8))
                    .or_insert(0) += 1;
            }
        }
        for (fi, f) in frames.iter().enumerate() {
            let shared_cell =
                cfg.collisions_enabled && cell_count[&(f.slot, f.channel.index() as u8)] > 1;
            let mut rx_count: u32 = 0;
            for s in sniffers.iter() {
                let audible_p = if f.sender == s {
                    1.0
                } else {
                    m.pdr(f.sender, s, f.channel)
                };
                if audible_p <= 0.0 {
                    continue;
                }
                if shared_cell {
                    let collided = frames.iter().enumerate().any(|(oi, o)| {
                        oi != fi
                            && o.slot == f.slot
                            && o.channel == f.channel
                            && (o.sender == s || m.pdr(o.sender, s, o.channel) > 0.0)
                    });
                    if collided {
                        stats.collisions_at_sniffers += 1;
                        continue;
                    }
                }
                if bernoulli(audible_p, &mut rng_sniff) {
                    rx_count += 1;
                    *stats.per_sniffer_rx.get_mut(&s).expect("sniffer counter") += 1;
                }
            }
            stats.tx_frames += 1;
            match rx_count {
                0 => {}
                1 => {
                    stats.detected += 1;
                    stats.unique += 1;
                }
                _ => {
                    stats.detected += 1;
                    stats.multiple += 1;
                }
            }
        }

        for (p, frame) in delivered {
            queues[p.0].push_back(frame);
        }
    }

    Ok(stats)
}
