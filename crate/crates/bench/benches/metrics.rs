use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use edi_bench::{boundary, noisy};
use edi_core::estimators::{binned_mi, ksg_mi, EstimatorChoice};
use edi_core::metrics::{parse_metric, JointPolicy, Metric, MiCache};

fn estimators(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimators");
    g.sample_size(10);
    for n in [1_000, 10_000] {
        let rep = noisy(n);
        let x = rep.factors.column(0);
        let y = rep.codes.column(0);
        g.bench_with_input(BenchmarkId::new("ksg3", n), &n, |b, _| {
            b.iter(|| ksg_mi(&[&x], &[&y], 3).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("binned20", n), &n, |b, _| {
            b.iter(|| binned_mi(&x, &y, 20).unwrap())
        });
    }
    g.finish();
}

fn metrics(c: &mut Criterion) {
    let mut g = c.benchmark_group("metrics");
    g.sample_size(10);
    let plugin = EstimatorChoice::DiscretePlugin;
    let joint = JointPolicy::Auto;
    let rep = boundary(10_000);
    for name in ["edi", "mig", "dcimig", "modularity", "sap", "zmin", "dci"] {
        let spec = parse_metric(name, &plugin, &joint).unwrap();
        g.bench_function(BenchmarkId::new(name, "111/10000"), |b| {
            b.iter(|| spec.evaluate(&MiCache::new(&rep), 1).unwrap())
        });
    }
    let ksg = EstimatorChoice::Ksg { k_neighbors: 3 };
    let spec = parse_metric("edi", &ksg, &JointPolicy::Fixed(ksg.clone())).unwrap();
    let rep = noisy(5_000);
    g.bench_function("edi/ksg/noise/5000", |b| b.iter(|| spec.evaluate(&MiCache::new(&rep), 1).unwrap()));
    g.finish();
}

criterion_group!(benches, estimators, metrics);
criterion_main!(benches);
