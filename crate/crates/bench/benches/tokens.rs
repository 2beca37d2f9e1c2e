use argen_bench::standard_taxonomy;
use argen_core::classes::taxonomy::special_point;
use argen_core::classes::taxonomy_member;
use argen_core::gen::e2e;
use criterion::{black_box, criterion_group, criterion_main, Criterion};

/// Long-run prompts are where the run-length representation earns its
/// keep: generation at s = 260 touches strings of length ~520 every step.
fn bench_tokens(c: &mut Criterion) {
    let params = standard_taxonomy();
    let member = taxonomy_member(&params, 260, 4).unwrap();
    let probe = special_point(260, 2);

    c.bench_function("taxonomy_e2e/horizon_260", |b| {
        b.iter(|| e2e(black_box(&member), black_box(&probe), 260))
    });
    c.bench_function("special_point/build", |b| {
        b.iter(|| special_point(black_box(260), black_box(2)))
    });
    c.bench_function("token/concat_suffix", |b| {
        b.iter(|| {
            let x = probe.concat(black_box(&probe));
            black_box(x.suffix(black_box(probe.len())))
        })
    });
}

criterion_group!(benches, bench_tokens);
criterion_main!(benches);
