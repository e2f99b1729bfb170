//! Parameter-sweep harness: run the full pipeline over a
//! `(sniffer_link_pdr, removal_load)` grid with deterministic per-run
//! seeds, emit per-run CSV rows, and aggregate box-plot-ready summaries.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::mix;
use crate::selection::{run_selection, RemovalOrder, SelectionParams};
use crate::sim::{run_simulation, SimConfig};
use crate::topology::{generate, TopologyConfig};

/// Grid sweep configuration. The default grid matches the evaluation
/// protocol: thresholds 0.0..1.0 and loads 0.1..1.0 in steps of 0.1,
/// 100 repetitions per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub topology: TopologyConfig,
    pub sim: SimConfig,
    pub sniffer_link_pdr_values: Vec<f64>,
    pub removal_load_values: Vec<f64>,
    pub repetitions: u32,
    pub master_seed: u64,
    pub removal_order: RemovalOrder,
    /// Reuse one topology (derived from the master seed alone) for every
    /// run instead of regenerating per repetition.
    pub pin_topology: bool,
}

fn tenths(from: usize, to: usize) -> Vec<f64> {
    (from..=to).map(|i| i as f64 / 10.0).collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            topology: TopologyConfig::default(),
            sim: SimConfig::default(),
            sniffer_link_pdr_values: tenths(0, 10),
            removal_load_values: tenths(1, 10),
            repetitions: 100,
            master_seed: 0,
            removal_order: RemovalOrder::default(),
            pin_topology: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        self.sim.validate()?;
        if self.repetitions < 1 {
            return Err(Error::usage("repetitions must be at least 1"));
        }
        for &v in self
            .sniffer_link_pdr_values
            .iter()
            .chain(&self.removal_load_values)
        {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::usage(format!("grid value {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// One per-run metrics row. `error` is empty for successful runs and holds
/// the failure message otherwise (metrics columns are zero in that case).
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub sniffer_link_pdr: f64,
    pub removal_load: f64,
    pub seed: u64,
    pub n_sniffers: usize,
    pub tx_frames: u64,
    pub detected: u64,
    pub unique: u64,
    pub multiple: u64,
    pub detection_pct: f64,
    pub unique_pct: f64,
    pub multiple_pct: f64,
    pub collisions_at_sniffers: u64,
    pub error: Option<String>,
}

impl RunRow {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

const TOPOLOGY_SALT: u64 = 0x746f_706f; // "topo"
const SIM_SALT: u64 = 0x73_696d; // "sim"
const PIN_SALT: u64 = 0x70_696e; // "pin"

/// Execute one grid cell repetition.
fn execute_run(cfg: &SweepConfig, t_idx: usize, r_idx: usize, rep: u32) -> RunRow {
    let threshold = cfg.sniffer_link_pdr_values[t_idx];
    let load = cfg.removal_load_values[r_idx];
    let run_seed = mix(cfg.master_seed, &[t_idx as u64, r_idx as u64, rep as u64]);
    let mut row = RunRow {
        sniffer_link_pdr: threshold,
        removal_load: load,
        seed: run_seed,
        n_sniffers: 0,
        tx_frames: 0,
        detected: 0,
        unique: 0,
        multiple: 0,
        detection_pct: 0.0,
        unique_pct: 0.0,
        multiple_pct: 0.0,
        collisions_at_sniffers: 0,
        error: None,
    };
    let topo_seed = if cfg.pin_topology {
        mix(cfg.master_seed, &[PIN_SALT])
    } else {
        mix(run_seed, &[TOPOLOGY_SALT])
    };
    let result = (|| -> Result<()> {
        let topo = generate(&cfg.topology, topo_seed)?;
        let params = SelectionParams {
            sniffer_link_pdr: threshold,
            removal_load: load,
            removal_order: cfg.removal_order,
        };
        let report = run_selection(&topo.matrix, &params)?;
        let stats = run_simulation(
            &topo.matrix,
            &report.final_set,
            &cfg.sim,
            mix(run_seed, &[SIM_SALT]),
        )?;
        row.n_sniffers = report.final_set.len();
        row.tx_frames = stats.tx_frames;
        row.detected = stats.detected;
        row.unique = stats.unique;
        row.multiple = stats.multiple;
        row.detection_pct = stats.detection_pct();
        row.unique_pct = stats.unique_pct();
        row.multiple_pct = stats.multiple_pct();
        row.collisions_at_sniffers = stats.collisions_at_sniffers;
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    row
}

/// Run the whole sweep. Rows come back grid-major, repetition-minor,
/// independent of how many runs execute in parallel.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<RunRow>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize, u32)> = (0..cfg.sniffer_link_pdr_values.len())
        .flat_map(|t| {
            (0..cfg.removal_load_values.len())
                .flat_map(move |r| (0..cfg.repetitions).map(move |k| (t, r, k)))
        })
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(t, r, k)| execute_run(cfg, t, r, k))
        .collect())
}

// ---------------------------------------------------------------------------
// CSV formats
// ---------------------------------------------------------------------------

pub const RUNS_HEADER: &str = "sniffer_link_pdr,removal_load,seed,n_sniffers,tx_frames,detected,unique,multiple,detection_pct,unique_pct,multiple_pct,collisions_at_sniffers,error";

/// Fixed-precision percentage formatting keeps run files byte-stable.
fn fmt_pct(v: f64) -> String {
    format!("{v:.4}")
}

pub fn run_row_to_csv(row: &RunRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        row.sniffer_link_pdr,
        row.removal_load,
        row.seed,
        row.n_sniffers,
        row.tx_frames,
        row.detected,
        row.unique,
        row.multiple,
        fmt_pct(row.detection_pct),
        fmt_pct(row.unique_pct),
        fmt_pct(row.multiple_pct),
        row.collisions_at_sniffers,
        row.error
            .as_deref()
            .map_or(String::new(), |e| e.replace(',', ";").replace('\n', " ")),
    )
}

pub fn write_runs_csv(rows: &[RunRow]) -> String {
    let mut out = String::from(RUNS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&run_row_to_csv(row));
        out.push('\n');
    }
    out
}

pub fn parse_runs_csv(text: &str) -> Result<Vec<RunRow>> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') || line == RUNS_HEADER {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 13 {
            return Err(Error::parse(
                lineno,
                format!("expected 13 fields, got {}", f.len()),
            ));
        }
        let num = |idx: usize| -> Result<f64> {
            f[idx]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad numeric field {:?}", f[idx])))
        };
        let int = |idx: usize| -> Result<u64> {
            f[idx]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad integer field {:?}", f[idx])))
        };
        rows.push(RunRow {
            sniffer_link_pdr: num(0)?,
            removal_load: num(1)?,
            seed: int(2)?,
            n_sniffers: int(3)? as usize,
            tx_frames: int(4)?,
            detected: int(5)?,
            unique: int(6)?,
            multiple: int(7)?,
            detection_pct: num(8)?,
            unique_pct: num(9)?,
            multiple_pct: num(10)?,
            collisions_at_sniffers: int(11)?,
            error: if f[12].is_empty() {
                None
            } else {
                Some(f[12].to_string())
            },
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// Summary statistics for one `(sniffer_link_pdr, removal_load)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub sniffer_link_pdr: f64,
    pub removal_load: f64,
    pub n_runs: usize,
    pub n_errors: usize,
    pub mean_detection_pct: f64,
    pub median_detection_pct: f64,
    pub q1_detection_pct: f64,
    pub q3_detection_pct: f64,
    pub min_detection_pct: f64,
    pub max_detection_pct: f64,
    pub mean_n_sniffers: f64,
    pub mean_unique_pct: f64,
    pub mean_multiple_pct: f64,
}

/// Quantile by linear interpolation between order statistics
/// (position `p * (n - 1)`); `values` must be sorted.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    debug_assert!(!values.is_empty());
    let pos = p * (values.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        values[lo]
    } else {
        values[lo] + (pos - lo as f64) * (values[hi] - values[lo])
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for v in values {
        sum += v;
        count += 1;
    }
    sum / count as f64
}

/// Group rows by grid point and summarize. Error rows are excluded from
/// the statistics and counted in `n_errors`; groups with no successful
/// rows are omitted. Output is sorted by `(sniffer_link_pdr,
/// removal_load)` and therefore invariant to input order.
pub fn aggregate(rows: &[RunRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(u64, u64)> = rows
        .iter()
        .map(|r| (r.sniffer_link_pdr.to_bits(), r.removal_load.to_bits()))
        .collect();
    keys.sort_by(|a, b| {
        f64::from_bits(a.0)
            .total_cmp(&f64::from_bits(b.0))
            .then(f64::from_bits(a.1).total_cmp(&f64::from_bits(b.1)))
    });
    keys.dedup();

    let mut out = Vec::new();
    for (tb, rb) in keys {
        let (threshold, load) = (f64::from_bits(tb), f64::from_bits(rb));
        let group: Vec<&RunRow> = rows
            .iter()
            .filter(|r| r.sniffer_link_pdr.to_bits() == tb && r.removal_load.to_bits() == rb)
            .collect();
        let ok: Vec<&RunRow> = group.iter().copied().filter(|r| r.is_ok()).collect();
        let n_errors = group.len() - ok.len();
        if ok.is_empty() {
            eprintln!("warning: grid point ({threshold}, {load}) has no successful runs; omitted");
            continue;
        }
        let mut det: Vec<f64> = ok.iter().map(|r| r.detection_pct).collect();
        det.sort_by(f64::total_cmp);
        out.push(SummaryRow {
            sniffer_link_pdr: threshold,
            removal_load: load,
            n_runs: ok.len(),
            n_errors,
            mean_detection_pct: mean(det.iter().copied()),
            median_detection_pct: quantile(&det, 0.5),
            q1_detection_pct: quantile(&det, 0.25),
            q3_detection_pct: quantile(&det, 0.75),
            min_detection_pct: det[0],
            max_detection_pct: *det.last().unwrap(),
            mean_n_sniffers: mean(ok.iter().map(|r| r.n_sniffers as f64)),
            mean_unique_pct: mean(ok.iter().map(|r| r.unique_pct)),
            mean_multiple_pct: mean(ok.iter().map(|r| r.multiple_pct)),
        });
    }
    out
}

pub const SUMMARY_HEADER: &str = "sniffer_link_pdr,removal_load,n_runs,n_errors,mean_detection_pct,median_detection_pct,q1_detection_pct,q3_detection_pct,min_detection_pct,max_detection_pct,mean_n_sniffers,mean_unique_pct,mean_multiple_pct";

pub fn write_summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.sniffer_link_pdr,
            r.removal_load,
            r.n_runs,
            r.n_errors,
            fmt_pct(r.mean_detection_pct),
            fmt_pct(r.median_detection_pct),
            fmt_pct(r.q1_detection_pct),
            fmt_pct(r.q3_detection_pct),
            fmt_pct(r.min_detection_pct),
            fmt_pct(r.max_detection_pct),
            fmt_pct(r.mean_n_sniffers),
            fmt_pct(r.mean_unique_pct),
            fmt_pct(r.mean_multiple_pct),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> SweepConfig {
        SweepConfig {
            topology: TopologyConfig {
                n_nodes: 10,
                ..TopologyConfig::default()
            },
            sim: SimConfig {
                slotframes: 10,
                ..SimConfig::default()
            },
            sniffer_link_pdr_values: vec![0.5],
            removal_load_values: vec![0.5],
            repetitions: 1,
            master_seed: 3,
            removal_order: RemovalOrder::WorstFirst,
            pin_topology: false,
        }
    }

    #[test]
    fn one_by_one_grid_one_rep_gives_one_row() {
        let rows = run_sweep(&small_cfg()).unwrap();
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn sweep_output_is_byte_identical_across_runs() {
        let cfg = SweepConfig {
            sniffer_link_pdr_values: vec![0.4, 0.6],
            removal_load_values: vec![0.3, 0.8],
            repetitions: 2,
            ..small_cfg()
        };
        let a = write_runs_csv(&run_sweep(&cfg).unwrap());
        let b = write_runs_csv(&run_sweep(&cfg).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 1 + 2 * 2 * 2);
    }

    #[test]
    fn runs_csv_round_trips() {
        let rows = run_sweep(&small_cfg()).unwrap();
        let text = write_runs_csv(&rows);
        let back = parse_runs_csv(&text).unwrap();
        assert_eq!(back.len(), rows.len());
        assert_eq!(back[0].seed, rows[0].seed);
        assert_eq!(back[0].tx_frames, rows[0].tx_frames);
    }

    #[test]
    fn corrupted_runs_row_names_line() {
        let text = format!("{RUNS_HEADER}\n0.5,0.5,bogus\n");
        match parse_runs_csv(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    fn row(thr: f64, load: f64, det: f64) -> RunRow {
        RunRow {
            sniffer_link_pdr: thr,
            removal_load: load,
            seed: 0,
            n_sniffers: 5,
            tx_frames: 100,
            detected: det as u64,
            unique: 0,
            multiple: 0,
            detection_pct: det,
            unique_pct: 0.0,
            multiple_pct: 0.0,
            collisions_at_sniffers: 0,
            error: None,
        }
    }

    #[test]
    fn aggregate_three_values() {
        let rows = vec![
            row(0.5, 0.5, 0.0),
            row(0.5, 0.5, 50.0),
            row(0.5, 0.5, 100.0),
        ];
        let s = aggregate(&rows);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].median_detection_pct, 50.0);
        assert_eq!(s[0].min_detection_pct, 0.0);
        assert_eq!(s[0].max_detection_pct, 100.0);
    }

    #[test]
    fn aggregate_identical_values_collapse() {
        let rows: Vec<RunRow> = (0..5).map(|_| row(0.2, 0.4, 42.0)).collect();
        let s = aggregate(&rows);
        assert_eq!(s[0].mean_detection_pct, 42.0);
        assert_eq!(s[0].median_detection_pct, 42.0);
        assert_eq!(s[0].q1_detection_pct, 42.0);
        assert_eq!(s[0].q3_detection_pct, 42.0);
        assert_eq!(s[0].min_detection_pct, 42.0);
        assert_eq!(s[0].max_detection_pct, 42.0);
    }

    #[test]
    fn quantiles_interpolate_order_statistics() {
        let values: Vec<f64> = (1..=100).map(|v| v as f64).collect();
        assert!((quantile(&values, 0.25) - 25.75).abs() < 1e-12);
        assert!((quantile(&values, 0.75) - 75.25).abs() < 1e-12);
        assert!((quantile(&values, 0.5) - 50.5).abs() < 1e-12);
    }

    #[test]
    fn aggregate_is_reorder_invariant() {
        let mut rows = vec![
            row(0.5, 0.5, 10.0),
            row(0.5, 0.5, 20.0),
            row(0.7, 0.3, 30.0),
            row(0.7, 0.3, 40.0),
        ];
        let a = aggregate(&rows);
        rows.reverse();
        rows.swap(0, 2);
        assert_eq!(aggregate(&rows), a);
    }

    #[test]
    fn aggregate_excludes_error_rows() {
        let mut bad = row(0.5, 0.5, 0.0);
        bad.error = Some("boom".to_string());
        let rows = vec![row(0.5, 0.5, 80.0), bad];
        let s = aggregate(&rows);
        assert_eq!(s[0].n_runs, 1);
        assert_eq!(s[0].n_errors, 1);
        assert_eq!(s[0].mean_detection_pct, 80.0);
    }

    #[test]
    fn error_marked_row_survives_csv_round_trip() {
        let mut bad = row(0.1, 0.9, 0.0);
        bad.error = Some("generation, failed".to_string());
        let text = write_runs_csv(&[bad]);
        let back = parse_runs_csv(&text).unwrap();
        assert_eq!(back[0].error.as_deref(), Some("generation; failed"));
    }

    #[test]
    fn default_grid_matches_evaluation_protocol() {
        let cfg = SweepConfig::default();
        assert_eq!(cfg.sniffer_link_pdr_values.len(), 11);
        assert_eq!(cfg.removal_load_values.len(), 10);
        assert_eq!(cfg.repetitions, 100);
    }
}
