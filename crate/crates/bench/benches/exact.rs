use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use talbot_core::{
    detect_plateaux, CycInt, DensitySamples, GaussTable, Rational, SumContext, WellParams,
};

fn zero_test(c: &mut Criterion) {
    // order 1064 = lcm(8, 4·19, 19·7), the largest in the default scan
    let p = WellParams::new(Rational::frac(40, 7), 3, Rational::frac(5, 19)).unwrap();
    let ctx = SumContext::new(&p).unwrap();
    let (plus, _) = ctx.sums(&[0, 1, 2, 3, 4, 5]);
    c.bench_function("is_zero order 1064", |b| b.iter(|| black_box(&plus).is_zero()));
    c.bench_function("remainder order 1064", |b| {
        b.iter(|| black_box(&plus).rem_cyclotomic())
    });
    let z = CycInt::root(1064, 3);
    c.bench_function("galois conjugate order 1064", |b| {
        b.iter(|| black_box(&z).galois_conjugate(5).unwrap())
    });
}

fn gauss_table(c: &mut Criterion) {
    c.bench_function("gauss table q=50", |b| b.iter(|| GaussTable::new(black_box(7), 50).unwrap()));
}

fn detector(c: &mut Criterion) {
    let p = WellParams::from_parts(5, 2, 3, 13, 18).unwrap();
    c.bench_function("detect_plateaux 5/2 13/18 N=3", |b| {
        b.iter(|| detect_plateaux(black_box(&p)).unwrap())
    });
    let p = WellParams::from_parts(107, 10, 2, 1, 12).unwrap();
    c.bench_function("density 4000 samples", |b| {
        b.iter(|| DensitySamples::midpoint_grid(black_box(&p), 4000).unwrap())
    });
}

criterion_group!(benches, zero_test, gauss_table, detector);
criterion_main!(benches);
