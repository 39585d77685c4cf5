use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lgcavity::modes::DFT6_BASIS;
use lgcavity::{
    decompose, dft6_coefficients, laguerre_polynomial, sample_mode, superpose, BeamGeometry,
    GridSpec, LGIndex,
};

fn geometry() -> BeamGeometry {
    BeamGeometry::new(780e-9, 0.75e-3, 0.0).unwrap()
}

fn bench_laguerre(c: &mut Criterion) {
    c.bench_function("laguerre_polynomial_p3_a15", |b| {
        b.iter(|| laguerre_polynomial(black_box(3), black_box(15), black_box(7.3)))
    });
}

fn bench_sample_mode(c: &mut Criterion) {
    let geom = geometry();
    let grid = GridSpec::centered(512, 20e-6).unwrap();
    let mut group = c.benchmark_group("sample_mode_512");
    group.sample_size(20);
    for l in [0i32, 15] {
        group.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| sample_mode(LGIndex::new(0, l), &geom, &grid, 0.0).unwrap())
        });
    }
    group.finish();
}

fn bench_decompose(c: &mut Criterion) {
    let geom = geometry();
    let grid = GridSpec::centered(256, 40e-6).unwrap();
    let field = superpose(&dft6_coefficients(2, geom).unwrap(), &grid, 0.0).unwrap();
    c.bench_function("decompose_six_modes_256", |b| {
        b.iter(|| decompose(black_box(&field), &DFT6_BASIS, &geom, 0.0).unwrap())
    });
}

criterion_group!(benches, bench_laguerre, bench_sample_mode, bench_decompose);
criterion_main!(benches);
