use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use tiltkit::{sharp, tilt_add, tilt_mul, witt, WittCtx};
use tiltkit_bench::{one_flat, uniformizer_flat};

fn tilt_ops(c: &mut Criterion) {
    let w = uniformizer_flat();
    c.bench_function("sharp kummer", |b| b.iter(|| sharp(black_box(&w))));
    c.bench_function("tilt_mul kummer", |b| b.iter(|| tilt_mul(black_box(&w), &w).unwrap()));
    let one = one_flat(5, 6, 6);
    c.bench_function("tilt_add Z/5^6", |b| b.iter(|| tilt_add(black_box(&one), &one).unwrap()));
    let ctx = WittCtx::new(9, 4).unwrap();
    c.bench_function("sharp vs teichmuller q=9 M=4", |b| b.iter(|| witt::sharp_equals_teichmuller(black_box(&ctx)).unwrap()));
}

criterion_group!(benches, tilt_ops);
criterion_main!(benches);
