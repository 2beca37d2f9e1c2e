use argen_core::classes::hard::{green_red_branches, hard_class_sample, walk_prompt, HardClassParams};
use argen_core::classes::rules::{hard_filter_count, prefix_path_rule, resolve_for_hard};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn bench_hard(c: &mut Criterion) {
    let m = 8;
    let params = HardClassParams { d: 1, m, n_members: 10_000, minority_num: 1, minority_den: m, seed: 70 };

    c.bench_function("hard_class_sample/10k", |b| {
        b.iter(|| hard_class_sample(black_box(&params), 1 << 24).unwrap())
    });

    let sample = hard_class_sample(&params, 1 << 24).unwrap();
    let (green, _) = green_red_branches(m);
    let rule = prefix_path_rule(&walk_prompt(1, m), &green, m);
    let resolved = resolve_for_hard(&rule, m).unwrap();
    c.bench_function("hard_filter_count/full_green", |b| {
        b.iter(|| hard_filter_count(black_box(&sample), black_box(&resolved)))
    });
}

criterion_group!(benches, bench_hard);
criterion_main!(benches);
