use bubbletest::{adf_full, bsadf_sequence, critical_values, gsadf, sadf, LagPolicy, NullSpec, TestConfig, TestKind};
use bubbletest_bench::walk;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_tests(c: &mut Criterion) {
    let cfg = TestConfig::default();
    let mut group = c.benchmark_group("tests");
    for t in [200, 1000, 5000] {
        let s = walk(t);
        group.bench_with_input(BenchmarkId::new("adf", t), &s, |b, s| b.iter(|| adf_full(s, &cfg)));
        group.bench_with_input(BenchmarkId::new("sadf", t), &s, |b, s| b.iter(|| sadf(s, &cfg)));
        group.bench_with_input(BenchmarkId::new("gsadf", t), &s, |b, s| b.iter(|| gsadf(s, &cfg)));
    }
    group.sample_size(10);
    let s = walk(1000);
    let mut bic = cfg;
    bic.adf.lag_policy = LagPolicy::Bic(4);
    group.bench_function("bsadf_bic4/1000", |b| b.iter(|| bsadf_sequence(&s, &bic)));
    group.finish();
}

fn bench_mc(c: &mut Criterion) {
    let mut group = c.benchmark_group("critical_values");
    group.sample_size(10);
    group.bench_function("gsadf_T200_x100", |b| {
        b.iter(|| critical_values(TestKind::Gsadf, 200, &TestConfig::default(), &NullSpec::default(), 100, 1))
    });
    group.finish();
}

criterion_group!(benches, bench_tests, bench_mc);
criterion_main!(benches);
