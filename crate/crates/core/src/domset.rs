//! Per-channel coverage relations and dominating-set machinery: the greedy
//! set-cover heuristic used by the selection pipeline, plus an exhaustive
//! oracle for validating it at small sizes.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{ChannelId, ConnectivityMatrix, NodeId, SnifferSet};

/// Upper node count accepted by the exact solver.
pub const EXACT_MAX_NODES: usize = 20;

/// Directed coverage relation for one channel: `covers(v)` is the set of
/// nodes a sniffer at `v` hears above the threshold, plus `v` itself
/// (a sniffer co-located with a node always hears that node).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageRelation {
    n_nodes: usize,
    covers: Vec<BTreeSet<NodeId>>,
}

impl CoverageRelation {
    /// Relation with self-coverage only.
    pub fn new(n_nodes: usize) -> Self {
        CoverageRelation {
            n_nodes,
            covers: (0..n_nodes).map(|v| BTreeSet::from([NodeId(v)])).collect(),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Record that a sniffer at `v` hears `u`.
    pub fn add(&mut self, v: NodeId, u: NodeId) -> Result<()> {
        if v.0 >= self.n_nodes || u.0 >= self.n_nodes {
            return Err(Error::usage(format!(
                "coverage pair ({v}, {u}) out of range (n_nodes = {})",
                self.n_nodes
            )));
        }
        self.covers[v.0].insert(u);
        Ok(())
    }

    pub fn covers(&self, v: NodeId) -> &BTreeSet<NodeId> {
        &self.covers[v.0]
    }

    /// Max closed-neighborhood size minus one; the Δ of the greedy
    /// set-cover approximation bound.
    pub fn max_degree(&self) -> usize {
        self.covers.iter().map(|c| c.len() - 1).max().unwrap_or(0)
    }
}

/// Build the coverage relation of one channel: `u ∈ covers(v)` iff `u == v`
/// or the PDR of `u -> v` on `ch` is strictly greater than the threshold.
pub fn build_coverage(
    m: &ConnectivityMatrix,
    ch: ChannelId,
    sniffer_link_pdr: f64,
) -> Result<CoverageRelation> {
    if !(0.0..=1.0).contains(&sniffer_link_pdr) {
        return Err(Error::usage(format!(
            "sniffer_link_pdr must lie in [0, 1], got {sniffer_link_pdr}"
        )));
    }
    let mut cov = CoverageRelation::new(m.n_nodes());
    for v in m.nodes() {
        for u in m.nodes() {
            if u != v && m.pdr(u, v, ch) > sniffer_link_pdr {
                cov.add(v, u)?;
            }
        }
    }
    Ok(cov)
}

/// True iff every node is covered by some member of `s`.
pub fn is_dominating(s: &SnifferSet, cov: &CoverageRelation) -> bool {
    let mut covered = vec![false; cov.n_nodes()];
    for v in s.iter() {
        for &u in cov.covers(v) {
            covered[u.0] = true;
        }
    }
    covered.iter().all(|&c| c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomSetMethod {
    Greedy,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomSetResult {
    pub members: SnifferSet,
    pub method: DomSetMethod,
}

/// Greedy set cover over closed coverage neighborhoods: repeatedly pick the
/// node covering the most not-yet-covered nodes, ties to the lowest id.
/// Always succeeds (self-coverage guarantees progress) and is deterministic.
pub fn greedy_min_dominating_set(cov: &CoverageRelation) -> DomSetResult {
    let n = cov.n_nodes();
    let mut covered = vec![false; n];
    let mut remaining = n;
    let mut members = SnifferSet::new();
    while remaining > 0 {
        let mut best: Option<(usize, NodeId)> = None;
        for v in (0..n).map(NodeId) {
            let gain = cov.covers(v).iter().filter(|u| !covered[u.0]).count();
            if gain > best.map_or(0, |(g, _)| g) {
                best = Some((gain, v));
            }
        }
        // gain >= 1 always exists while some node is uncovered
        let (_, pick) = best.expect("uncovered node must cover itself");
        members.insert(pick);
        for &u in cov.covers(pick) {
            if !covered[u.0] {
                covered[u.0] = true;
                remaining -= 1;
            }
        }
    }
    DomSetResult {
        members,
        method: DomSetMethod::Greedy,
    }
}

/// Minimum-cardinality dominating set by subset enumeration in increasing
/// size order; among equal-size solutions the lexicographically smallest
/// member list wins. Guarded to `n_nodes <= 20`.
pub fn exact_min_dominating_set(cov: &CoverageRelation) -> Result<DomSetResult> {
    let n = cov.n_nodes();
    if n > EXACT_MAX_NODES {
        return Err(Error::usage(format!(
            "exact solver limited to {EXACT_MAX_NODES} nodes, got {n}"
        )));
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let masks: Vec<u32> = (0..n)
        .map(|v| {
            cov.covers(NodeId(v))
                .iter()
                .fold(0u32, |acc, u| acc | (1 << u.0))
        })
        .collect();

    for k in 0..=n {
        if let Some(members) = first_dominating_combination(&masks, full, n, k) {
            return Ok(DomSetResult {
                members: members.into_iter().map(NodeId).collect(),
                method: DomSetMethod::Exact,
            });
        }
    }
    unreachable!("the full node set always dominates");
}

/// First size-`k` combination (in lexicographic order) whose coverage masks
/// union to `full`.
fn first_dominating_combination(
    masks: &[u32],
    full: u32,
    n: usize,
    k: usize,
) -> Option<Vec<usize>> {
    if k == 0 {
        return (full == 0).then(Vec::new);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let union = idx.iter().fold(0u32, |acc, &i| acc | masks[i]);
        if union == full {
            return Some(idx);
        }
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        if idx[i] == i + n - k {
            return None;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
