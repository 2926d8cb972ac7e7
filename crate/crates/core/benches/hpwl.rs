// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use optbench::mixed_size::{generate_ms, MsConfig, WhiteSpace};
use optbench::par::Execution;
use optbench::wirelength::total_hpwl_with;
use optbench::DegreeHistogram;

fn bench_hpwl(c: &mut Criterion) {
    let mut group = c.benchmark_group("total_hpwl");
    for cells in [10_000usize, 100_000] {
        let hist = DegreeHistogram::from_pairs([(2, cells as u64 / 2), (3, cells as u64 / 4), (5, cells as u64 / 10)]);
        let mut cfg = MsConfig::new("bench", hist, cells);
        cfg.white_space = WhiteSpace::Uniform(0.1);
        let out = generate_ms(&cfg).expect("generation");
        let (nl, pl) = (&out.bundle.netlist, &out.bundle.placement);
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), cells), &exec, |b, &exec| {
                b.iter(|| total_hpwl_with(nl, pl, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_hpwl);
criterion_main!(benches);
