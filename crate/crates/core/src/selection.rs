//! The three-part sniffer selection pipeline: per-channel candidate
//! selection (union of 16 greedy dominating sets), quality ordering by PDR
//! sum, and redundancy removal under the all-channel domination constraint.

use serde::{Deserialize, Serialize};

use crate::domset::{build_coverage, greedy_min_dominating_set, is_dominating, CoverageRelation};
use crate::error::{Error, Result};
use crate::model::{ChannelId, ConnectivityMatrix, NodeId, SnifferSet};

/// Order in which the reduction pass visits candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalOrder {
    /// Lowest quality first (the stated intent of the removal pass).
    #[default]
    WorstFirst,
    /// Highest quality first (the listing's literal "descending order").
    BestFirst,
    /// Leave the candidate order untouched.
    Insertion,
}

impl std::str::FromStr for RemovalOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "worst_first" | "worst-first" => Ok(RemovalOrder::WorstFirst),
            "best_first" | "best-first" => Ok(RemovalOrder::BestFirst),
            "insertion" => Ok(RemovalOrder::Insertion),
            other => Err(Error::usage(format!(
                "unknown removal order {other:?} (expected worst-first, best-first, or insertion)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    pub sniffer_link_pdr: f64,
    pub removal_load: f64,
    #[serde(default)]
    pub removal_order: RemovalOrder,
}

impl SelectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.sniffer_link_pdr) {
            return Err(Error::usage(format!(
                "sniffer_link_pdr must lie in [0, 1], got {}",
                self.sniffer_link_pdr
            )));
        }
        if !(0.0..=1.0).contains(&self.removal_load) {
            return Err(Error::usage(format!(
                "removal_load must lie in [0, 1], got {}",
                self.removal_load
            )));
        }
        Ok(())
    }
}

/// Outcome of the reduction pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub candidates_before: SnifferSet,
    #[serde(rename = "final")]
    pub final_set: SnifferSet,
    pub target_sniffer_num: usize,
    pub removed: Vec<NodeId>,
    pub per_channel_set_sizes: Vec<usize>,
}

/// The 16 per-channel coverage relations at the given threshold.
pub fn channel_coverages(
    m: &ConnectivityMatrix,
    sniffer_link_pdr: f64,
) -> Result<Vec<CoverageRelation>> {
    ChannelId::all()
        .map(|ch| build_coverage(m, ch, sniffer_link_pdr))
        .collect()
}

/// Part 1: per-channel greedy dominating sets, one per channel.
pub fn per_channel_sets(m: &ConnectivityMatrix, sniffer_link_pdr: f64) -> Result<Vec<SnifferSet>> {
    channel_coverages(m, sniffer_link_pdr)?
        .iter()
        .map(|cov| Ok(greedy_min_dominating_set(cov).members))
        .collect()
}

/// Part 1 output: the union of the 16 per-channel sets, insertion-ordered
/// by `(channel, pick order)` and deduplicated.
pub fn select_candidates(m: &ConnectivityMatrix, sniffer_link_pdr: f64) -> Result<SnifferSet> {
    let mut union = SnifferSet::new();
    for set in per_channel_sets(m, sniffer_link_pdr)? {
        for v in set.iter() {
            union.insert(v);
        }
    }
    Ok(union)
}

/// Quality of a sniffer location: total PDR it receives from every other
/// node, summed over all channels.
pub fn quality(m: &ConnectivityMatrix, v: NodeId) -> Result<f64> {
    let mut sum = 0.0;
    for u in m.nodes() {
        if u != v {
            sum += m.pdr_sum_toward(v, u)?;
        }
    }
    Ok(sum)
}

/// Order candidates by quality. Ties break toward the lowest node id.
pub fn order_by_pdr_sum(
    cands: &SnifferSet,
    m: &ConnectivityMatrix,
    order: RemovalOrder,
) -> Result<Vec<NodeId>> {
    if cands.is_empty() {
        return Err(Error::usage("cannot order an empty candidate set"));
    }
    let mut scored: Vec<(NodeId, f64)> = cands
        .iter()
        .map(|v| Ok((v, quality(m, v)?)))
        .collect::<Result<_>>()?;
    match order {
        RemovalOrder::WorstFirst => {
            scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        }
        RemovalOrder::BestFirst => {
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        }
        RemovalOrder::Insertion => {}
    }
    Ok(scored.into_iter().map(|(v, _)| v).collect())
}

/// Part 2: attempt to remove redundant candidates while preserving
/// domination on all 16 channels.
///
/// `target_sniffer_num = ceil(|cands| * (1 - removal_load))`. Candidates
/// are visited in quality order; the size check runs before each removal
/// attempt, so `removal_load = 0` removes nothing. A removal is kept only
/// if the remaining set still dominates every channel.
pub fn reduce_candidates(
    m: &ConnectivityMatrix,
    params: &SelectionParams,
    cands: &SnifferSet,
) -> Result<SelectionReport> {
    params.validate()?;
    let coverages = channel_coverages(m, params.sniffer_link_pdr)?;
    for (ch, cov) in coverages.iter().enumerate() {
        if !is_dominating(cands, cov) {
            let uncovered = first_uncovered(cands, cov);
            return Err(Error::data(format!(
                "candidate set does not dominate channel {ch}: node {} uncovered",
                uncovered.map_or_else(|| "?".to_string(), |u| u.to_string())
            )));
        }
    }

    let per_channel_set_sizes = per_channel_sets(m, params.sniffer_link_pdr)?
        .iter()
        .map(SnifferSet::len)
        .collect();

    let target_sniffer_num = ceil_target(cands.len(), params.removal_load);
    let visit = order_by_pdr_sum(cands, m, params.removal_order)?;

    let mut current = cands.clone();
    let mut removed = Vec::new();
    for v in visit {
        if current.len() <= target_sniffer_num {
            break;
        }
        let pos = current
            .position(v)
            .expect("candidate present until visited");
        current.remove(v);
        if coverages.iter().all(|cov| is_dominating(&current, cov)) {
            removed.push(v);
        } else {
            current.insert_at(pos, v);
        }
    }

    Ok(SelectionReport {
        candidates_before: cands.clone(),
        final_set: current,
        target_sniffer_num,
        removed,
        per_channel_set_sizes,
    })
}

/// Run Part 1 and Part 2 back to back.
pub fn run_selection(m: &ConnectivityMatrix, params: &SelectionParams) -> Result<SelectionReport> {
    params.validate()?;
    let cands = select_candidates(m, params.sniffer_link_pdr)?;
    reduce_candidates(m, params, &cands)
}

fn first_uncovered(s: &SnifferSet, cov: &CoverageRelation) -> Option<NodeId> {
    let mut covered = vec![false; cov.n_nodes()];
    for v in s.iter() {
        for &u in cov.covers(v) {
            covered[u.0] = true;
        }
    }
    covered.iter().position(|&c| !c).map(NodeId)
}

/// `ceil(len * (1 - load))` with a tolerance for the floating-point noise
/// of products like `10 * 0.3`.
fn ceil_target(len: usize, removal_load: f64) -> usize {
    let raw = len as f64 * (1.0 - removal_load);
    ((raw * 1e9).round() / 1e9).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LinkStat;

    fn ch(i: u8) -> ChannelId {
        ChannelId::new(i).unwrap()
    }

    /// Symmetric link on one channel.
    fn link(m: &mut ConnectivityMatrix, a: usize, b: usize, c: u8, pdr: f64) {
        m.set(NodeId(a), NodeId(b), ch(c), LinkStat::new(pdr, None))
            .unwrap();
        m.set(NodeId(b), NodeId(a), ch(c), LinkStat::new(pdr, None))
            .unwrap();
    }

    /// Symmetric link on all 16 channels.
    fn link_all(m: &mut ConnectivityMatrix, a: usize, b: usize, pdr: f64) {
        for c in 0..16 {
            link(m, a, b, c, pdr);
        }
    }

    fn params(thr: f64, load: f64) -> SelectionParams {
        SelectionParams {
            sniffer_link_pdr: thr,
            removal_load: load,
            removal_order: RemovalOrder::WorstFirst,
        }
    }

    #[test]
    fn identical_complete_channels_collapse_to_node_zero() {
        let mut m = ConnectivityMatrix::new(4).unwrap();
        for a in 0..4 {
            for b in (a + 1)..4 {
                link_all(&mut m, a, b, 0.9);
            }
        }
        let cands = select_candidates(&m, 0.5).unwrap();
        assert_eq!(cands.as_slice(), &[NodeId(0)]);
    }

    #[test]
    fn threshold_one_selects_all_nodes() {
        let mut m = ConnectivityMatrix::new(5).unwrap();
        link_all(&mut m, 0, 1, 1.0);
        let cands = select_candidates(&m, 1.0).unwrap();
        assert_eq!(cands.len(), 5);
    }

    #[test]
    fn union_of_two_star_channels() {
        // channel 0: star centered at 2; channel 1: star centered at 5;
        // other channels are self-only at this threshold.
        let mut m = ConnectivityMatrix::new(6).unwrap();
        for other in [0, 1, 3, 4, 5] {
            link(&mut m, 2, other, 0, 0.9);
        }
        for other in [0, 1, 2, 3, 4] {
            link(&mut m, 5, other, 1, 0.9);
        }
        let cands = select_candidates(&m, 0.5).unwrap();
        assert!(cands.contains(NodeId(2)));
        assert!(cands.contains(NodeId(5)));
        // recompute the per-channel union independently
        let mut expected = SnifferSet::new();
        for set in per_channel_sets(&m, 0.5).unwrap() {
            for v in set.iter() {
                expected.insert(v);
            }
        }
        assert_eq!(cands, expected);
    }

    #[test]
    fn order_single_candidate() {
        let mut m = ConnectivityMatrix::new(3).unwrap();
        link_all(&mut m, 0, 1, 0.5);
        let cands: SnifferSet = [NodeId(1)].into_iter().collect();
        let order = order_by_pdr_sum(&cands, &m, RemovalOrder::WorstFirst).unwrap();
        assert_eq!(order, vec![NodeId(1)]);
    }

    #[test]
    fn order_by_quality_ascending() {
        // qualities: node 1 = 4.0, node 2 = 2.0, node 3 = 9.0
        let mut m = ConnectivityMatrix::new(4).unwrap();
        for c in 0..4 {
            link(&mut m, 0, 1, c, 1.0); // quality(1) contribution 4.0
        }
        for c in 0..2 {
            link(&mut m, 0, 2, c, 1.0); // quality(2) = 2.0
        }
        for c in 0..9 {
            link(&mut m, 0, 3, c, 1.0); // quality(3) = 9.0
        }
        assert_eq!(quality(&m, NodeId(2)).unwrap(), 2.0);
        let cands: SnifferSet = [NodeId(1), NodeId(2), NodeId(3)].into_iter().collect();
        let asc = order_by_pdr_sum(&cands, &m, RemovalOrder::WorstFirst).unwrap();
        assert_eq!(asc, vec![NodeId(2), NodeId(1), NodeId(3)]);
        let desc = order_by_pdr_sum(&cands, &m, RemovalOrder::BestFirst).unwrap();
        assert_eq!(desc, vec![NodeId(3), NodeId(1), NodeId(2)]);
    }

    #[test]
    fn order_ties_break_by_node_id() {
        let m = ConnectivityMatrix::new(4).unwrap();
        let cands: SnifferSet = [NodeId(3), NodeId(1), NodeId(2)].into_iter().collect();
        let order = order_by_pdr_sum(&cands, &m, RemovalOrder::WorstFirst).unwrap();
        assert_eq!(order, vec![NodeId(1), NodeId(2), NodeId(3)]);
        let ins = order_by_pdr_sum(&cands, &m, RemovalOrder::Insertion).unwrap();
        assert_eq!(ins, vec![NodeId(3), NodeId(1), NodeId(2)]);
    }

    #[test]
    fn order_empty_input_is_usage_error() {
        let m = ConnectivityMatrix::new(2).unwrap();
        assert!(order_by_pdr_sum(&SnifferSet::new(), &m, RemovalOrder::WorstFirst).is_err());
    }

    #[test]
    fn removal_load_zero_removes_nothing() {
        let mut m = ConnectivityMatrix::new(4).unwrap();
        for a in 0..4 {
            for b in (a + 1)..4 {
                link_all(&mut m, a, b, 0.9);
            }
        }
        let cands: SnifferSet = (0..4).map(NodeId).collect();
        let report = reduce_candidates(&m, &params(0.5, 0.0), &cands).unwrap();
        assert_eq!(report.target_sniffer_num, 4);
        assert_eq!(report.final_set, cands);
        assert!(report.removed.is_empty());
    }

    #[test]
    fn removal_load_one_is_inclusion_minimal() {
        let mut m = ConnectivityMatrix::new(4).unwrap();
        for a in 0..4 {
            for b in (a + 1)..4 {
                link_all(&mut m, a, b, 0.9);
            }
        }
        let cands: SnifferSet = (0..4).map(NodeId).collect();
        let report = reduce_candidates(&m, &params(0.5, 1.0), &cands).unwrap();
        assert_eq!(report.target_sniffer_num, 0);
        assert_eq!(report.final_set.len(), 1);
        let coverages = channel_coverages(&m, 0.5).unwrap();
        // no remaining member is removable
        for v in report.final_set.iter() {
            let mut smaller = report.final_set.clone();
            smaller.remove(v);
            assert!(coverages.iter().any(|cov| !is_dominating(&smaller, cov)));
        }
    }

    #[test]
    fn redundant_candidate_is_removed() {
        // covers(0) = {0,2,3} is a subset of covers(1) ∪ covers(2) =
        // {1,4} ∪ {0,2,3,4}; nodes 1 and 2 are both irreplaceable.
        let mut m = ConnectivityMatrix::new(5).unwrap();
        link_all(&mut m, 0, 3, 0.9);
        link_all(&mut m, 0, 2, 0.9);
        link_all(&mut m, 1, 4, 0.9);
        link_all(&mut m, 2, 3, 0.9);
        link_all(&mut m, 2, 4, 0.9);
        let cands: SnifferSet = [NodeId(0), NodeId(1), NodeId(2)].into_iter().collect();
        let report = reduce_candidates(&m, &params(0.5, 1.0), &cands).unwrap();
        assert_eq!(report.final_set.len(), 2);
        assert_eq!(report.removed, vec![NodeId(0)]);
        assert_eq!(report.final_set.as_btree().len(), 2);
        assert!(report.final_set.contains(NodeId(1)));
        assert!(report.final_set.contains(NodeId(2)));
    }

    #[test]
    fn precondition_violation_names_channel_and_node() {
        let mut m = ConnectivityMatrix::new(3).unwrap();
        link_all(&mut m, 0, 1, 0.9);
        // {0} does not cover node 2 on any channel
        let cands: SnifferSet = [NodeId(0)].into_iter().collect();
        let err = reduce_candidates(&m, &params(0.5, 0.5), &cands).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("channel 0"), "{msg}");
        assert!(msg.contains("node 2"), "{msg}");
    }

    #[test]
    fn threshold_one_pipeline_keeps_all_nodes() {
        let mut m = ConnectivityMatrix::new(5).unwrap();
        link_all(&mut m, 0, 1, 1.0);
        for load in [0.0, 0.5, 1.0] {
            let report = run_selection(&m, &params(1.0, load)).unwrap();
            assert_eq!(report.final_set.len(), 5);
        }
    }

    #[test]
    fn ceil_target_handles_float_noise() {
        assert_eq!(ceil_target(10, 0.7), 3);
        assert_eq!(ceil_target(10, 0.0), 10);
        assert_eq!(ceil_target(10, 1.0), 0);
        assert_eq!(ceil_target(7, 0.5), 4);
        assert_eq!(ceil_target(3, 0.33), 3);
    }
}
