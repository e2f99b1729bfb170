//! `snifferplan`: generate topologies, select sniffer placements, simulate
//! TSCH traffic capture, and sweep parameter grids from the command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or validation
//! errors.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use snifferplan_core::domset::{
    exact_min_dominating_set, greedy_min_dominating_set, CoverageRelation, EXACT_MAX_NODES,
};
use snifferplan_core::experiment::{
    aggregate, run_sweep, write_runs_csv, write_summary_csv, RunRow, SweepConfig, RUNS_HEADER,
};
use snifferplan_core::selection::{run_selection, RemovalOrder, SelectionParams, SelectionReport};
use snifferplan_core::sim::{run_simulation, SimConfig};
use snifferplan_core::topology::{
    generate, load_topology, load_trace, neighbor_audit, save_topology, TopologyConfig,
};
use snifferplan_core::{ConnectivityMatrix, Error, NodeId, Result, SnifferSet};

#[derive(Parser)]
#[command(
    name = "snifferplan",
    version,
    about = "Sniffer placement planning and evaluation for multi-channel wireless sensor networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random topology satisfying the density constraint
    GenTopology(GenTopologyArgs),
    /// Select a sniffer set from a topology or a trace
    Select(SelectArgs),
    /// Simulate TSCH convergecast traffic and sniffer capture
    Simulate(SimulateArgs),
    /// Run a full parameter sweep from a config file
    Sweep(SweepArgs),
    /// Re-aggregate an existing per-run CSV into a summary CSV
    Report(ReportArgs),
    /// Compare greedy and exact dominating sets on a small relation file
    OracleDomset(OracleDomsetArgs),
}

#[derive(Args)]
struct GenTopologyArgs {
    /// Number of nodes
    #[arg(long, default_value_t = 50)]
    nodes: usize,
    /// Side of the square deployment area in meters
    #[arg(long, default_value_t = 2000.0)]
    area: f64,
    /// Minimum good neighbors per node
    #[arg(long, default_value_t = 3)]
    min_neighbors: usize,
    /// PDR a pair must exceed on every channel, both ways, to count as good
    #[arg(long, default_value_t = 0.5)]
    min_pdr: f64,
    /// Topology seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output topology file
    #[arg(long, default_value = "topology.json")]
    out: PathBuf,
}

#[derive(Args)]
struct SelectArgs {
    /// Input topology file (mutually exclusive with --trace)
    #[arg(long, conflicts_with = "trace")]
    topology: Option<PathBuf>,
    /// Input trace CSV (mutually exclusive with --topology)
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Coverage threshold: a sniffer covers a node only above this PDR
    #[arg(long, default_value_t = 0.6)]
    sniffer_link_pdr: f64,
    /// Fraction of candidates the reduction pass attempts to remove
    #[arg(long, default_value_t = 0.5)]
    removal_load: f64,
    /// Removal order: worst-first, best-first, or insertion
    #[arg(long, default_value = "worst-first")]
    order: String,
    /// Output sniffer-set file
    #[arg(long, default_value = "sniffers.json")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Input topology file
    #[arg(long, default_value = "topology.json")]
    topology: PathBuf,
    /// Input sniffer-set file (as written by `select`)
    #[arg(long, default_value = "sniffers.json")]
    sniffers: PathBuf,
    /// Slotframes to simulate
    #[arg(long, default_value_t = 1000)]
    slotframes: u64,
    /// Simulation seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable the collision model (internal interference)
    #[arg(long)]
    no_collisions: bool,
    /// Runs CSV to append the metrics row to
    #[arg(long, default_value = "runs.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep config file (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output per-run CSV
    #[arg(long, default_value = "runs.csv")]
    out_runs: PathBuf,
    /// Output summary CSV
    #[arg(long, default_value = "summary.csv")]
    out_summary: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Existing per-run CSV
    #[arg(long)]
    runs: PathBuf,
    /// Output summary CSV
    #[arg(long, default_value = "summary.csv")]
    out_summary: PathBuf,
}

#[derive(Args)]
struct OracleDomsetArgs {
    /// Relation file: first line is the node count, then "v u" pairs
    /// meaning a sniffer at v hears u
    #[arg(long)]
    relation: PathBuf,
}

/// On-disk sniffer-set document: the selected node ids plus the parameters
/// and report that produced them.
#[derive(Serialize, Deserialize)]
struct SnifferSetFile {
    params: SelectionParams,
    report: SelectionReport,
    members: Vec<NodeId>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().expect("write clap diagnostics");
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(if e.is_usage() { 1 } else { 2 });
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::GenTopology(args) => gen_topology(args),
        Command::Select(args) => select(args),
        Command::Simulate(args) => simulate(args),
        Command::Sweep(args) => sweep(args),
        Command::Report(args) => report(args),
        Command::OracleDomset(args) => oracle_domset(args),
    }
}

fn gen_topology(args: GenTopologyArgs) -> Result<()> {
    let cfg = TopologyConfig {
        n_nodes: args.nodes,
        area_side_m: args.area,
        min_neighbors: args.min_neighbors,
        neighbor_min_pdr: args.min_pdr,
        ..TopologyConfig::default()
    };
    cfg.validate()?;
    let topo = generate(&cfg, args.seed)?;
    save_topology(&topo, &args.out)?;
    let audit = neighbor_audit(&topo);
    println!(
        "wrote {}: {} nodes, {}/{} satisfy >= {} neighbors with pdr > {}",
        args.out.display(),
        cfg.n_nodes,
        audit.satisfied(),
        audit.n_nodes,
        cfg.min_neighbors,
        cfg.neighbor_min_pdr
    );
    Ok(())
}

/// Load the connectivity matrix from whichever input source was given,
/// printing any loader warnings to stderr.
fn load_matrix(args: &SelectArgs) -> Result<ConnectivityMatrix> {
    match (&args.topology, &args.trace) {
        (Some(path), None) => {
            let loaded = load_topology(path)?;
            print_warnings(&loaded.warnings);
            Ok(loaded.value.matrix)
        }
        (None, Some(path)) => {
            let loaded = load_trace(path)?;
            print_warnings(&loaded.warnings);
            Ok(loaded.value)
        }
        (None, None) => {
            // Fall back to the gen-topology default so the bare pipeline
            // `gen-topology && select && simulate` works without flags.
            let default = PathBuf::from("topology.json");
            if default.exists() {
                let loaded = load_topology(&default)?;
                print_warnings(&loaded.warnings);
                Ok(loaded.value.matrix)
            } else {
                Err(Error::usage(
                    "no input: pass --topology or --trace (default topology.json not found)",
                ))
            }
        }
        (Some(_), Some(_)) => unreachable!("clap rejects conflicting flags"),
    }
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn select(args: SelectArgs) -> Result<()> {
    let params = SelectionParams {
        sniffer_link_pdr: args.sniffer_link_pdr,
        removal_load: args.removal_load,
        removal_order: args.order.parse::<RemovalOrder>()?,
    };
    params.validate()?;
    let matrix = load_matrix(&args)?;
    let report = run_selection(&matrix, &params)?;
    let doc = SnifferSetFile {
        params,
        members: report.final_set.iter().collect(),
        report,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(&args.out, text)?;
    println!(
        "wrote {}: candidates_before = {}, target_sniffer_num = {}, final = {}",
        args.out.display(),
        doc.report.candidates_before.len(),
        doc.report.target_sniffer_num,
        doc.report.final_set.len()
    );
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let loaded = load_topology(&args.topology)?;
    print_warnings(&loaded.warnings);
    let matrix = loaded.value.matrix;

    let text = fs::read_to_string(&args.sniffers)?;
    let doc: SnifferSetFile = serde_json::from_str(&text)
        .map_err(|e| Error::data(format!("bad sniffer-set file: {e}")))?;
    let sniffers: SnifferSet = doc.members.iter().copied().collect();
    if let Some(&max) = doc.members.iter().max() {
        if max.0 >= matrix.n_nodes() {
            return Err(Error::data(format!(
                "sniffer {max} out of range: topology has {} nodes",
                matrix.n_nodes()
            )));
        }
    }

    let sim_cfg = SimConfig {
        slotframes: args.slotframes,
        collisions_enabled: !args.no_collisions,
        ..SimConfig::default()
    };
    let stats = run_simulation(&matrix, &sniffers, &sim_cfg, args.seed)?;

    let row = RunRow {
        sniffer_link_pdr: doc.params.sniffer_link_pdr,
        removal_load: doc.params.removal_load,
        seed: args.seed,
        n_sniffers: sniffers.len(),
        tx_frames: stats.tx_frames,
        detected: stats.detected,
        unique: stats.unique,
        multiple: stats.multiple,
        detection_pct: stats.detection_pct(),
        unique_pct: stats.unique_pct(),
        multiple_pct: stats.multiple_pct(),
        collisions_at_sniffers: stats.collisions_at_sniffers,
        error: None,
    };
    append_runs_row(&args.out, &row)?;
    println!("detection_pct: {:.4}", stats.detection_pct());
    Ok(())
}

/// Append one row to a runs CSV, writing the header first when the file is
/// new or empty.
fn append_runs_row(path: &PathBuf, row: &RunRow) -> Result<()> {
    let need_header = fs::metadata(path).map_or(true, |m| m.len() == 0);
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    if need_header {
        writeln!(file, "{RUNS_HEADER}")?;
    }
    writeln!(
        file,
        "{}",
        snifferplan_core::experiment::run_row_to_csv(row)
    )?;
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)?;
    let cfg: SweepConfig =
        serde_json::from_str(&text).map_err(|e| Error::usage(format!("bad sweep config: {e}")))?;
    cfg.validate()?;
    let rows = run_sweep(&cfg)?;
    fs::write(&args.out_runs, write_runs_csv(&rows))?;
    let summary = aggregate(&rows);
    fs::write(&args.out_summary, write_summary_csv(&summary))?;
    let n_errors: usize = rows.iter().filter(|r| !r.is_ok()).count();
    println!(
        "wrote {} ({} rows, {} errors) and {} ({} points)",
        args.out_runs.display(),
        rows.len(),
        n_errors,
        args.out_summary.display(),
        summary.len()
    );
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let text = fs::read_to_string(&args.runs)?;
    let rows = snifferplan_core::experiment::parse_runs_csv(&text)?;
    let summary = aggregate(&rows);
    fs::write(&args.out_summary, write_summary_csv(&summary))?;
    println!(
        "wrote {} ({} points from {} rows)",
        args.out_summary.display(),
        summary.len(),
        rows.len()
    );
    Ok(())
}

/// Parse a relation file: '#' comments and blank lines ignored, first data
/// line is the node count, each further line "v u" adds u to covers(v).
fn parse_relation(text: &str) -> Result<CoverageRelation> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, first) = lines
        .next()
        .ok_or_else(|| Error::data("empty relation file"))?;
    let n: usize = first
        .parse()
        .map_err(|_| Error::parse(line, format!("expected node count, got {first:?}")))?;
    if n > EXACT_MAX_NODES {
        return Err(Error::usage(format!(
            "relation has {n} nodes; the exact solver accepts at most {EXACT_MAX_NODES}"
        )));
    }
    if n == 0 {
        return Err(Error::data("relation must have at least one node"));
    }
    let mut cov = CoverageRelation::new(n);
    for (line, l) in lines {
        let mut fields = l.split_whitespace();
        let (v, u) = match (fields.next(), fields.next(), fields.next()) {
            (Some(v), Some(u), None) => (v, u),
            _ => return Err(Error::parse(line, format!("expected \"v u\", got {l:?}"))),
        };
        let v: usize = v
            .parse()
            .map_err(|_| Error::parse(line, format!("bad node id {v:?}")))?;
        let u: usize = u
            .parse()
            .map_err(|_| Error::parse(line, format!("bad node id {u:?}")))?;
        cov.add(NodeId(v), NodeId(u))
            .map_err(|e| Error::parse(line, e.to_string()))?;
    }
    Ok(cov)
}

fn oracle_domset(args: OracleDomsetArgs) -> Result<()> {
    let text = fs::read_to_string(&args.relation)?;
    let cov = parse_relation(&text)?;
    let greedy = greedy_min_dominating_set(&cov);
    let exact = exact_min_dominating_set(&cov)?;
    println!(
        "greedy: {} {:?}",
        greedy.members.len(),
        greedy.members.iter().map(|v| v.0).collect::<Vec<_>>()
    );
    println!(
        "exact: {} {:?}",
        exact.members.len(),
        exact.members.iter().map(|v| v.0).collect::<Vec<_>>()
    );
    Ok(())
}
