use criterion::{black_box, criterion_group, criterion_main, Criterion};
use fgap_core::dg::{self, SolveOptions};
use fgap_core::types::{self, AlphaVector, TypeVector};
use fgap_core::Lattice;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn reference_lattice() -> Lattice {
    Lattice::from_periods(c(2.0, 0.0), c(0.6, 1.7)).unwrap()
}

fn bench_wp(cr: &mut Criterion) {
    let lat = reference_lattice();
    let z = c(0.31, 0.47);
    cr.bench_function("wp_all", |b| {
        b.iter(|| lat.wp_all(black_box(z)).unwrap())
    });
    let x = lat.wp(z).unwrap();
    cr.bench_function("invert_wp", |b| {
        b.iter(|| lat.invert_wp(black_box(x), None).unwrap())
    });
}

fn bench_lattice_construction(cr: &mut Criterion) {
    cr.bench_function("lattice_from_periods", |b| {
        b.iter(|| Lattice::from_periods(black_box(c(2.0, 0.0)), black_box(c(0.6, 1.7))).unwrap())
    });
}

fn bench_solvers(cr: &mut Criterion) {
    let lat = reference_lattice();
    let opts = SolveOptions::default();

    let alpha1 = AlphaVector::new([1, 1, 1, 1]).unwrap();
    cr.bench_function("solve_d1", |b| {
        b.iter(|| dg::solve_d1(black_box(&alpha1), &lat, &opts).unwrap())
    });

    let alpha2 = AlphaVector::new([4, 0, 0, 0]).unwrap();
    let mut group = cr.benchmark_group("depth2");
    group.sample_size(10);
    group.bench_function("solve_d2", |b| {
        b.iter(|| dg::solve_d2(black_box(&alpha2), &lat, &opts).unwrap())
    });
    group.finish();
}

fn bench_counting(cr: &mut Criterion) {
    let mu = TypeVector::new([3, 2, 2, 2]).unwrap();
    let base = types::standard_base(&mu, 2).unwrap();
    let pot0 = types::standard_pot_zero();
    cr.bench_function("recursion_count", |b| {
        b.iter(|| types::recursion_count(black_box(&mu), 2, &base, &pot0).unwrap())
    });
    cr.bench_function("severi_sweep_6", |b| {
        b.iter(|| {
            let mut acc = 0i64;
            for mu in types::class_zero_sweep(black_box(6)) {
                acc += types::severi_count(&mu, 2).unwrap();
            }
            acc
        })
    });
    let alpha = AlphaVector::new([1, 2, 2, 2]).unwrap();
    cr.bench_function("spectral_enumeration", |b| {
        b.iter(|| types::spectral_enumeration(black_box(&alpha)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_wp,
    bench_lattice_construction,
    bench_solvers,
    bench_counting
);
criterion_main!(benches);
