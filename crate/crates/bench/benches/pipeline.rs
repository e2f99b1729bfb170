//! Benchmarks for the hot paths: dominating-set search, topology
//! generation, selection, and simulation.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use snifferplan_core::domset::{
    exact_min_dominating_set, greedy_min_dominating_set, CoverageRelation,
};
use snifferplan_core::selection::{run_selection, SelectionParams};
use snifferplan_core::sim::{run_simulation, SimConfig};
use snifferplan_core::topology::{generate, TopologyConfig};
use snifferplan_core::NodeId;

fn random_relation(seed: u64, n: usize) -> CoverageRelation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cov = CoverageRelation::new(n);
    for _ in 0..3 * n {
        let v = NodeId(rng.gen_range(0..n));
        let u = NodeId(rng.gen_range(0..n));
        cov.add(v, u).unwrap();
    }
    cov
}

fn bench_domset(c: &mut Criterion) {
    let small = random_relation(1, 12);
    let large = random_relation(2, 50);
    c.bench_function("greedy_domset_n50", |b| {
        b.iter(|| greedy_min_dominating_set(&large))
    });
    c.bench_function("exact_domset_n12", |b| {
        b.iter(|| exact_min_dominating_set(&small).unwrap())
    });
}

fn bench_topology(c: &mut Criterion) {
    let cfg = TopologyConfig::default();
    let mut seed = 0u64;
    c.bench_function("generate_topology_n50", |b| {
        b.iter_batched(
            || {
                seed += 1;
                seed
            },
            |s| generate(&cfg, s).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_selection_and_sim(c: &mut Criterion) {
    let topo = generate(&TopologyConfig::default(), 0).unwrap();
    let params = SelectionParams {
        sniffer_link_pdr: 0.6,
        removal_load: 0.5,
        removal_order: Default::default(),
    };
    c.bench_function("select_sniffers_n50", |b| {
        b.iter(|| run_selection(&topo.matrix, &params).unwrap())
    });

    let report = run_selection(&topo.matrix, &params).unwrap();
    let sim_cfg = SimConfig {
        slotframes: 100,
        ..SimConfig::default()
    };
    c.bench_function("simulate_100_slotframes", |b| {
        b.iter(|| run_simulation(&topo.matrix, &report.final_set, &sim_cfg, 0).unwrap())
    });
}

criterion_group!(
    benches,
    bench_domset,
    bench_topology,
    bench_selection_and_sim
);
criterion_main!(benches);
