//! Wall time of every polynomial solver on seeded random instances.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use groupid::poly::solver_by_name;
use groupid_bench::inputs;

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solvers");
    group.sample_size(10);
    for (name, n, inst) in inputs() {
        let solve = solver_by_name(name).expect("registered solver");
        group.bench_with_input(BenchmarkId::new(name, n), &inst, |b, inst| {
            b.iter(|| solve(black_box(inst)).expect("solver runs"))
        });
    }
    group.finish();
}

criterion_group!(benches, solvers);
criterion_main!(benches);
