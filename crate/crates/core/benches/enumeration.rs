use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use knotcubes::actions::connect_sum;
use knotcubes::knot::standard_knot;
use knotcubes::par::Execution;
use knotcubes::quadrisecant::{enumerate_alternating_quadrisecants, EnumerateOptions};

fn enumeration(c: &mut Criterion) {
    let trefoil = standard_knot("right_trefoil").unwrap();
    let eight = standard_knot("figure_eight").unwrap();
    let knots = [
        ("trefoil", trefoil.clone()),
        ("granny", standard_knot("granny").unwrap()),
        ("trefoil#figure_eight#trefoil", connect_sum(&connect_sum(&trefoil, &eight).unwrap(), &trefoil).unwrap()),
    ];
    let mut group = c.benchmark_group("enumeration");
    group.sample_size(10);
    for (name, f) in &knots {
        let f = f.perturb(7, f.reach_estimate().unwrap() / 20.0).unwrap();
        let label = format!("{name} ({} segments)", f.segment_count());
        for (mode, execution) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            let opts = EnumerateOptions { execution, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(mode, &label), &f, |b, f| {
                b.iter(|| enumerate_alternating_quadrisecants(black_box(f), opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, enumeration);
criterion_main!(benches);
