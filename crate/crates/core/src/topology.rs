//! Connectivity matrix sources: random topology generation under density
//! constraints, trace-file ingestion, and topology (de)serialization.
//!
//! The generator drops nodes uniformly into a square area, derives per-link
//! per-channel PDR from log-distance path loss plus frozen Gaussian fading,
//! and then repairs the placement until every node has enough well-connected
//! neighbors. Output is a pure function of `(config, seed)`.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelId, ConnectivityMatrix, LinkStat, NodeId, NUM_CHANNELS};
use crate::seed::mix;

/// Radius of the disc used when re-placing a constraint-violating node.
pub const REPAIR_RADIUS_M: f64 = 300.0;

/// Full-restart budget before the configuration is declared infeasible.
pub const MAX_RESTARTS: u64 = 100;

/// Node position in meters within the deployment square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Parameters of the random topology generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TopologyConfig {
    pub n_nodes: usize,
    pub area_side_m: f64,
    pub min_neighbors: usize,
    pub neighbor_min_pdr: f64,
    pub tx_power_dbm: f64,
    pub path_loss_exponent: f64,
    pub ref_loss_db_at_1m: f64,
    pub fading_sigma_db: f64,
    pub max_regen_attempts: u64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            n_nodes: 50,
            area_side_m: 2000.0,
            min_neighbors: 3,
            neighbor_min_pdr: 0.5,
            tx_power_dbm: 0.0,
            path_loss_exponent: 2.0,
            ref_loss_db_at_1m: 40.0,
            fading_sigma_db: 3.0,
            max_regen_attempts: 1000,
        }
    }
}

impl TopologyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return Err(Error::usage(format!(
                "n_nodes must be at least 2, got {}",
                self.n_nodes
            )));
        }
        if !(self.neighbor_min_pdr > 0.0 && self.neighbor_min_pdr < 1.0) {
            return Err(Error::usage(format!(
                "neighbor_min_pdr must lie strictly between 0 and 1, got {}",
                self.neighbor_min_pdr
            )));
        }
        if self.area_side_m <= 0.0 {
            return Err(Error::usage(format!(
                "area_side_m must be positive, got {}",
                self.area_side_m
            )));
        }
        Ok(())
    }
}

/// Node placement plus the connectivity matrix derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub config: TopologyConfig,
    pub positions: Vec<Position>,
    pub matrix: ConnectivityMatrix,
}

/// Log-distance path loss in dB at distance `d_m` meters.
pub fn path_loss_db(d_m: f64, cfg: &TopologyConfig) -> Result<f64> {
    if d_m <= 0.0 {
        return Err(Error::usage(format!(
            "path loss needs a positive distance, got {d_m}"
        )));
    }
    Ok(cfg.ref_loss_db_at_1m + 10.0 * cfg.path_loss_exponent * d_m.log10())
}

/// Piecewise-linear receiver waterfall: 0 at or below -97 dBm, 1 at or above
/// -87 dBm, linear in between.
pub fn rssi_to_pdr(rssi_dbm: f64) -> f64 {
    ((rssi_dbm + 97.0) / 10.0).clamp(0.0, 1.0)
}

/// Per-node audit of the density constraint: a node is satisfied when at
/// least `min_neighbors` other nodes have PDR above `neighbor_min_pdr` in
/// both directions on every channel.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborAudit {
    pub n_nodes: usize,
    pub violators: Vec<NodeId>,
}

impl NeighborAudit {
    pub fn satisfied(&self) -> usize {
        self.n_nodes - self.violators.len()
    }

    pub fn all_satisfied(&self) -> bool {
        self.violators.is_empty()
    }
}

/// Worst-channel PDR between `u` and `v` (min over channels and directions).
fn pair_min_pdr(m: &ConnectivityMatrix, u: NodeId, v: NodeId) -> f64 {
    ChannelId::all()
        .map(|ch| m.pdr(u, v, ch).min(m.pdr(v, u, ch)))
        .fold(f64::INFINITY, f64::min)
}

/// Audit a finished topology against its own config's density constraint.
pub fn neighbor_audit(t: &Topology) -> NeighborAudit {
    let m = &t.matrix;
    let violators = m
        .nodes()
        .filter(|&u| {
            let good = m
                .nodes()
                .filter(|&v| v != u && pair_min_pdr(m, u, v) > t.config.neighbor_min_pdr)
                .count();
            good < t.config.min_neighbors
        })
        .collect();
    NeighborAudit {
        n_nodes: m.n_nodes(),
        violators,
    }
}

/// Internal working state of one generation attempt. Links are kept dense
/// and symmetric; the sparse matrix is materialized at the end.
struct GenAttempt {
    n: usize,
    positions: Vec<Position>,
    /// `pdr[(u * n + v) * 16 + ch]`, symmetric, diagonal unused.
    pdr: Vec<f64>,
    rssi: Vec<f64>,
    /// Worst-channel PDR per unordered pair, mirrored.
    min_pdr: Vec<f64>,
}

impl GenAttempt {
    fn new(cfg: &TopologyConfig, rng: &mut ChaCha8Rng) -> Result<Self> {
        let n = cfg.n_nodes;
        let positions = (0..n)
            .map(|_| Position {
                x: rng.gen::<f64>() * cfg.area_side_m,
                y: rng.gen::<f64>() * cfg.area_side_m,
            })
            .collect();
        let mut a = GenAttempt {
            n,
            positions,
            pdr: vec![0.0; n * n * NUM_CHANNELS],
            rssi: vec![f64::NEG_INFINITY; n * n * NUM_CHANNELS],
            min_pdr: vec![0.0; n * n],
        };
        for u in 0..n {
            for v in (u + 1)..n {
                a.redraw_pair(cfg, u, v, rng)?;
            }
        }
        Ok(a)
    }

    /// Draw fresh frozen fading for the pair `{u, v}` and recompute its
    /// per-channel link stats, identical in both directions.
    fn redraw_pair(
        &mut self,
        cfg: &TopologyConfig,
        u: usize,
        v: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<()> {
        let d = self.positions[u].distance(&self.positions[v]).max(1e-3);
        let loss = path_loss_db(d, cfg)?;
        let fading = Normal::new(0.0, cfg.fading_sigma_db)
            .map_err(|e| Error::usage(format!("bad fading sigma: {e}")))?;
        let mut worst = f64::INFINITY;
        for ch in 0..NUM_CHANNELS {
            let rssi = cfg.tx_power_dbm - loss + fading.sample(rng);
            let pdr = rssi_to_pdr(rssi);
            let (i, j) = (
                (u * self.n + v) * NUM_CHANNELS + ch,
                (v * self.n + u) * NUM_CHANNELS + ch,
            );
            self.pdr[i] = pdr;
            self.pdr[j] = pdr;
            self.rssi[i] = rssi;
            self.rssi[j] = rssi;
            worst = worst.min(pdr);
        }
        self.min_pdr[u * self.n + v] = worst;
        self.min_pdr[v * self.n + u] = worst;
        Ok(())
    }

    /// Re-place node `u` and recompute all of its links.
    fn resample_node(
        &mut self,
        cfg: &TopologyConfig,
        u: usize,
        center: Position,
        rng: &mut ChaCha8Rng,
    ) -> Result<()> {
        loop {
            let r = REPAIR_RADIUS_M * rng.gen::<f64>().sqrt();
            let theta = TAU * rng.gen::<f64>();
            let x = center.x + r * theta.cos();
            let y = center.y + r * theta.sin();
            if (0.0..=cfg.area_side_m).contains(&x) && (0.0..=cfg.area_side_m).contains(&y) {
                self.positions[u] = Position { x, y };
                break;
            }
        }
        for v in 0..self.n {
            if v != u {
                self.redraw_pair(cfg, u.min(v), u.max(v), rng)?;
            }
        }
        Ok(())
    }

    fn good_neighbor_count(&self, cfg: &TopologyConfig, u: usize) -> usize {
        (0..self.n)
            .filter(|&v| v != u && self.min_pdr[u * self.n + v] > cfg.neighbor_min_pdr)
            .count()
    }

    fn satisfies(&self, cfg: &TopologyConfig, u: usize) -> bool {
        self.good_neighbor_count(cfg, u) >= cfg.min_neighbors
    }

    fn into_topology(self, cfg: &TopologyConfig) -> Result<Topology> {
        let mut matrix = ConnectivityMatrix::new(self.n).map_err(|e| match e {
            Error::Data(msg) => Error::Infeasible(msg),
            other => other,
        })?;
        for u in 0..self.n {
            for v in 0..self.n {
                if u == v {
                    continue;
                }
                for ch in 0..NUM_CHANNELS {
                    let i = (u * self.n + v) * NUM_CHANNELS + ch;
                    if self.pdr[i] > 0.0 {
                        matrix.set(
                            NodeId(u),
                            NodeId(v),
                            ChannelId::new(ch as u8)?,
                            LinkStat::new(self.pdr[i], Some(self.rssi[i])),
                        )?;
                    }
                }
            }
        }
        Ok(Topology {
            config: cfg.clone(),
            positions: self.positions,
            matrix,
        })
    }
}

/// Generate a random topology satisfying the density constraint.
///
/// Placement repair: while some node lacks `min_neighbors` good neighbors,
/// the lowest-id violator is re-placed uniformly within a 300 m disc around
/// a uniformly chosen satisfying node (or the area center while none
/// satisfy). After `max_regen_attempts` repairs the attempt restarts from a
/// fresh seed derived from `(seed, restart_counter)`; after
/// [`MAX_RESTARTS`] restarts the config is reported infeasible.
pub fn generate(cfg: &TopologyConfig, seed: u64) -> Result<Topology> {
    cfg.validate()?;
    if cfg.n_nodes - 1 < cfg.min_neighbors {
        return Err(Error::Infeasible(format!(
            "{} nodes cannot each have {} neighbors",
            cfg.n_nodes, cfg.min_neighbors
        )));
    }
    for restart in 0..MAX_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, &[restart]));
        let mut attempt = GenAttempt::new(cfg, &mut rng)?;
        let mut repairs: u64 = 0;
        loop {
            let violator = (0..attempt.n).find(|&u| !attempt.satisfies(cfg, u));
            let Some(u) = violator else {
                return attempt.into_topology(cfg);
            };
            if repairs >= cfg.max_regen_attempts {
                break;
            }
            let anchors: Vec<usize> = (0..attempt.n)
                .filter(|&v| v != u && attempt.satisfies(cfg, v))
                .collect();
            let center = if anchors.is_empty() {
                Position {
                    x: cfg.area_side_m / 2.0,
                    y: cfg.area_side_m / 2.0,
                }
            } else {
                attempt.positions[anchors[rng.gen_range(0..anchors.len())]]
            };
            attempt.resample_node(cfg, u, center, &mut rng)?;
            repairs += 1;
        }
    }
    Err(Error::Infeasible(format!(
        "constraints unmet after {MAX_RESTARTS} restarts (n_nodes={}, min_neighbors={}, neighbor_min_pdr={})",
        cfg.n_nodes, cfg.min_neighbors, cfg.neighbor_min_pdr
    )))
}

// ---------------------------------------------------------------------------
// Trace ingestion
// ---------------------------------------------------------------------------

/// Map a raw channel number from a trace file to the zero-based index.
/// IEEE channel numbers 11-26 map to 0-15; values 0-10 are taken as already
/// zero-based. Zero-based indices 11-15 cannot be expressed directly; use
/// the IEEE numbers 22-26 for those channels.
pub fn map_trace_channel(raw: u32) -> Option<ChannelId> {
    match raw {
        11..=26 => ChannelId::new((raw - 11) as u8).ok(),
        0..=10 => ChannelId::new(raw as u8).ok(),
        _ => None,
    }
}

/// Result of loading a trace or topology file: the data plus non-fatal
/// warnings (duplicate rows, out-of-area positions).
#[derive(Debug)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

const TRACE_HEADER: &str = "src,dst,channel,pdr,rssi_dbm";

/// Load a connectivity trace CSV: `src,dst,channel,pdr,rssi_dbm` with an
/// optional header, `#` comments, and an optional empty rssi field.
/// Duplicate `(src, dst, channel)` rows: last wins, with a warning.
pub fn load_trace(path: impl AsRef<Path>) -> Result<Loaded<ConnectivityMatrix>> {
    let text = fs::read_to_string(path)?;
    load_trace_str(&text)
}

pub fn load_trace_str(text: &str) -> Result<Loaded<ConnectivityMatrix>> {
    struct Row {
        line: usize,
        src: usize,
        dst: usize,
        ch: ChannelId,
        stat: LinkStat,
    }
    let mut rows: Vec<Row> = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == TRACE_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 && fields.len() != 5 {
            return Err(Error::parse(
                lineno,
                format!("expected 4 or 5 fields, got {}", fields.len()),
            ));
        }
        let src: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad src node id {:?}", fields[0])))?;
        let dst: usize = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad dst node id {:?}", fields[1])))?;
        if src == dst {
            return Err(Error::parse(
                lineno,
                format!("self-link row for node {src}"),
            ));
        }
        let raw_ch: u32 = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad channel {:?}", fields[2])))?;
        let ch = map_trace_channel(raw_ch)
            .ok_or_else(|| Error::parse(lineno, format!("unknown channel {raw_ch}")))?;
        let pdr: f64 = fields[3]
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad pdr {:?}", fields[3])))?;
        if !(0.0..=1.0).contains(&pdr) {
            return Err(Error::parse(lineno, format!("pdr {pdr} outside [0, 1]")));
        }
        let rssi_dbm = match fields.get(4).map(|s| s.trim()) {
            None | Some("") => None,
            Some(s) => {
                let r: f64 = s
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad rssi {s:?}")))?;
                if !(-130.0..=0.0).contains(&r) {
                    return Err(Error::parse(
                        lineno,
                        format!("rssi {r} dBm outside [-130, 0]"),
                    ));
                }
                Some(r)
            }
        };
        rows.push(Row {
            line: lineno,
            src,
            dst,
            ch,
            stat: LinkStat::new(pdr, rssi_dbm),
        });
    }

    let n_nodes = rows.iter().map(|r| r.src.max(r.dst) + 1).max().unwrap_or(0);
    let mut matrix = ConnectivityMatrix::new(n_nodes)
        .map_err(|_| Error::data(format!("trace describes fewer than 2 nodes ({n_nodes})")))?;
    let mut warnings = Vec::new();
    for row in &rows {
        let (src, dst) = (NodeId(row.src), NodeId(row.dst));
        if matrix.stat(src, dst, row.ch).is_some() {
            warnings.push(format!(
                "line {}: duplicate entry for ({},{},ch{}), last wins",
                row.line, src, dst, row.ch
            ));
        }
        matrix.set(src, dst, row.ch, row.stat)?;
    }
    Ok(Loaded {
        value: matrix,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Topology file I/O
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct LinkRow {
    src: NodeId,
    dst: NodeId,
    channel: ChannelId,
    pdr: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rssi_dbm: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct TopologyFile {
    config: TopologyConfig,
    positions: Vec<Position>,
    links: Vec<LinkRow>,
}

/// Serialize a topology to the JSON document format.
pub fn topology_to_string(t: &Topology) -> Result<String> {
    let file = TopologyFile {
        config: t.config.clone(),
        positions: t.positions.clone(),
        links: t
            .matrix
            .entries()
            .map(|(src, dst, channel, stat)| LinkRow {
                src,
                dst,
                channel,
                pdr: stat.pdr,
                rssi_dbm: stat.rssi_dbm,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

pub fn save_topology(t: &Topology, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, topology_to_string(t)?)?;
    Ok(())
}

pub fn topology_from_str(text: &str) -> Result<Loaded<Topology>> {
    let file: TopologyFile = serde_json::from_str(text)?;
    let n = file.positions.len();
    let mut matrix = ConnectivityMatrix::new(n)
        .map_err(|_| Error::data(format!("topology file has {n} positions, need at least 2")))?;
    for row in &file.links {
        matrix
            .set(
                row.src,
                row.dst,
                row.channel,
                LinkStat::new(row.pdr, row.rssi_dbm),
            )
            .map_err(|e| Error::data(format!("bad link row ({},{}): {e}", row.src, row.dst)))?;
    }
    let mut warnings = Vec::new();
    for (i, p) in file.positions.iter().enumerate() {
        if !(0.0..=file.config.area_side_m).contains(&p.x)
            || !(0.0..=file.config.area_side_m).contains(&p.y)
        {
            warnings.push(format!(
                "position of node {i} ({}, {}) lies outside the {} m area",
                p.x, p.y, file.config.area_side_m
            ));
        }
    }
    let violations = matrix.validate();
    for v in &violations {
        warnings.push(format!("link invariant violation: {v}"));
    }
    Ok(Loaded {
        value: Topology {
            config: file.config,
            positions: file.positions,
            matrix,
        },
        warnings,
    })
}

pub fn load_topology(path: impl AsRef<Path>) -> Result<Loaded<Topology>> {
    let text = fs::read_to_string(path)?;
    topology_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_loss_reference_distance() {
        let cfg = TopologyConfig::default();
        assert_eq!(path_loss_db(1.0, &cfg).unwrap(), 40.0);
    }

    #[test]
    fn path_loss_at_100m() {
        let cfg = TopologyConfig::default();
        assert!((path_loss_db(100.0, &cfg).unwrap() - 80.0).abs() < 1e-12);
    }

    #[test]
    fn path_loss_at_waterfall_edge() {
        // 10^((92-40)/20) meters puts the loss at 92 dB with defaults
        let cfg = TopologyConfig::default();
        let d = 10f64.powf((92.0 - 40.0) / 20.0);
        assert!((d - 398.1).abs() < 0.1);
        assert!((path_loss_db(d, &cfg).unwrap() - 92.0).abs() < 1e-9);
    }

    #[test]
    fn path_loss_rejects_nonpositive_distance() {
        let cfg = TopologyConfig::default();
        assert!(path_loss_db(0.0, &cfg).is_err());
        assert!(path_loss_db(-5.0, &cfg).is_err());
    }

    #[test]
    fn waterfall_endpoints_and_midpoint() {
        assert_eq!(rssi_to_pdr(-100.0), 0.0);
        assert_eq!(rssi_to_pdr(-97.0), 0.0);
        assert_eq!(rssi_to_pdr(-87.0), 1.0);
        assert_eq!(rssi_to_pdr(-50.0), 1.0);
        assert!((rssi_to_pdr(-92.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn waterfall_is_monotone() {
        let mut last = -1.0;
        for i in 0..200 {
            let v = rssi_to_pdr(-110.0 + i as f64 * 0.5);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn generate_rejects_impossible_neighbor_count() {
        let cfg = TopologyConfig {
            n_nodes: 2,
            area_side_m: 10.0,
            ..TopologyConfig::default()
        };
        match generate(&cfg, 0) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn generate_is_deterministic() {
        let cfg = TopologyConfig {
            n_nodes: 12,
            ..TopologyConfig::default()
        };
        let a = generate(&cfg, 7).unwrap();
        let b = generate(&cfg, 7).unwrap();
        assert_eq!(
            topology_to_string(&a).unwrap(),
            topology_to_string(&b).unwrap()
        );
    }

    #[test]
    fn generated_topology_satisfies_constraints_and_validates() {
        for seed in 0..3 {
            let t = generate(&TopologyConfig::default(), seed).unwrap();
            assert!(t.matrix.validate().is_empty());
            let audit = neighbor_audit(&t);
            assert!(audit.all_satisfied(), "violators: {:?}", audit.violators);
        }
    }

    #[test]
    fn generated_matrix_is_symmetric() {
        let t = generate(&TopologyConfig::default(), 3).unwrap();
        for u in t.matrix.nodes() {
            for v in t.matrix.nodes() {
                if u == v {
                    continue;
                }
                for ch in ChannelId::all() {
                    assert_eq!(t.matrix.pdr(u, v, ch), t.matrix.pdr(v, u, ch));
                }
            }
        }
    }

    #[test]
    fn trace_single_row_maps_ieee_channel() {
        let loaded = load_trace_str("0,1,11,0.85,-80.5").unwrap();
        let m = loaded.value;
        assert_eq!(m.n_nodes(), 2);
        assert_eq!(
            m.link_pdr(NodeId(0), NodeId(1), ChannelId::new(0).unwrap())
                .unwrap(),
            0.85
        );
    }

    #[test]
    fn trace_rejects_pdr_out_of_range() {
        let err = load_trace_str("# comment\n0,1,11,1.5,-80.5").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn trace_empty_data_is_error() {
        assert!(load_trace_str("# nothing here\n").is_err());
    }

    #[test]
    fn trace_duplicate_row_last_wins_with_warning() {
        let loaded = load_trace_str("0,1,11,0.5\n0,1,11,0.9\n").unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        assert_eq!(
            loaded
                .value
                .link_pdr(NodeId(0), NodeId(1), ChannelId::new(0).unwrap())
                .unwrap(),
            0.9
        );
    }

    #[test]
    fn trace_header_and_empty_rssi_accepted() {
        let loaded = load_trace_str("src,dst,channel,pdr,rssi_dbm\n0,1,26,0.4,\n").unwrap();
        let stat = *loaded
            .value
            .stat(NodeId(0), NodeId(1), ChannelId::new(15).unwrap())
            .unwrap();
        assert_eq!(stat, LinkStat::new(0.4, None));
    }

    #[test]
    fn topology_round_trips() {
        let cfg = TopologyConfig {
            n_nodes: 10,
            ..TopologyConfig::default()
        };
        let t = generate(&cfg, 11).unwrap();
        let text = topology_to_string(&t).unwrap();
        let back = topology_from_str(&text).unwrap();
        assert!(back.warnings.is_empty());
        assert_eq!(back.value, t);
        assert_eq!(topology_to_string(&back.value).unwrap(), text);
    }

    #[test]
    fn topology_load_missing_file_is_io_error() {
        match load_topology("/nonexistent/topology.json") {
            Err(Error::Io(_)) => {}
            other => panic!("expected io error, got {other:?}"),
        }
    }

    #[test]
    fn topology_out_of_area_position_warns() {
        let cfg = TopologyConfig {
            n_nodes: 8,
            ..TopologyConfig::default()
        };
        let t = generate(&cfg, 5).unwrap();
        let text = topology_to_string(&t).unwrap();
        let mut file: serde_json::Value = serde_json::from_str(&text).unwrap();
        file["positions"][0]["x"] = serde_json::json!(99999.0);
        let back = topology_from_str(&file.to_string()).unwrap();
        assert!(back.warnings.iter().any(|w| w.contains("outside")));
    }
}
