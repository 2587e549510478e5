use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use tiltkit::{closure, RingExt};
use tiltkit::valuation::{self, ValModel};
use tiltkit_bench::{cusp, kummer};

fn closure_checks(c: &mut Criterion) {
    let a = cusp();
    c.bench_function("p-root closed cusp", |b| b.iter(|| closure::is_p_root_closed(black_box(&a))));
    c.bench_function("closure cusp", |b| b.iter(|| closure::closure_report(black_box(&a))));
    let r = kummer();
    let w = r.parse_elem("x").unwrap();
    c.bench_function("hypothesis audit kummer", |b| b.iter(|| closure::mt2_hypotheses_audit(black_box(&r), &w).unwrap()));
    let model = ValModel::standard(2).unwrap();
    c.bench_function("valuation closure rank 2", |b| b.iter(|| valuation::val_cic_report(black_box(&model), 20).unwrap()));
}

criterion_group!(benches, closure_checks);
criterion_main!(benches);
