use aarhus_bench::{gaussian, wheel, CAPS};
use aarhus_core::bch::{compute_bch, m_via_bch};
use aarhus_core::gaussian::integrate;
use aarhus_core::pipeline::{kirby2_check, merge_gaussian};
use aarhus_core::{build_basis, canonicalize, rat, reduce, var, Grade, LinComb};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn diagrams(c: &mut Criterion) {
    let w = wheel(6);
    c.bench_function("canonicalize wheel6", |b| b.iter(|| canonicalize(black_box(&w))));
    c.bench_function("basis V4 legs xxxx", |b| {
        b.iter(|| build_basis(black_box(&Grade::new(4, vec![var("x"); 4]))).unwrap())
    });
    let s = LinComb::from_diagram(wheel(4), rat(1, 1), CAPS);
    c.bench_function("reduce wheel4", |b| b.iter(|| reduce(black_box(&s))));
}

fn gaussians(c: &mut Criterion) {
    let g = gaussian(1, &["x", "y"]);
    c.bench_function("integrate xy", |b| b.iter(|| integrate(black_box(&g)).unwrap()));
    let g3 = gaussian(2, &["x", "y", "w"]);
    c.bench_function("merge xy", |b| {
        b.iter(|| merge_gaussian(black_box(&g3), &var("x"), &var("y"), &var("z")).unwrap())
    });
    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("kirby2 check", |b| {
        b.iter(|| kirby2_check(black_box(&g3), &var("x"), &var("y")).unwrap())
    });
    group.finish();
}

fn bch(c: &mut Criterion) {
    c.bench_function("bch trees 5", |b| b.iter(|| compute_bch(black_box(5))));
    let s = LinComb::from_diagram(wheel(2).disjoint_union(&wheel(2)), rat(1, 1), CAPS);
    c.bench_function("merge via bch", |b| {
        b.iter(|| m_via_bch(black_box(&s), "x", "y", "z").unwrap())
    });
}

criterion_group!(benches, diagrams, gaussians, bch);
criterion_main!(benches);
