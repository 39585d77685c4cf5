use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lgcavity::cavity::default_mirrors;
use lgcavity::{
    collins_propagate, equivalent_thin_lens, round_trip, sample_mode, BeamGeometry, CavityLayout,
    GridSpec, LGIndex, RayMatrix, SampledField, ThickLensSpec,
};

fn reference_lens() -> ThickLensSpec {
    ThickLensSpec::new(38.9e-3, 4.0e-3, 1.51, 22.8e-3).unwrap()
}

fn geometry() -> BeamGeometry {
    BeamGeometry::new(780e-9, 0.75e-3, 0.0).unwrap()
}

fn relay_grid(n: usize) -> GridSpec {
    let eq = equivalent_thin_lens(&reference_lens()).unwrap();
    let pitch = (780e-9 * 2.0 * eq.focal_length / n as f64).sqrt();
    GridSpec::centered(n, pitch).unwrap()
}

fn fundamental(n: usize) -> SampledField {
    sample_mode(LGIndex::new(0, 0), &geometry(), &relay_grid(n), 0.0).unwrap()
}

fn bench_collins(c: &mut Criterion) {
    let mut group = c.benchmark_group("collins_propagate");
    for n in [256usize, 512] {
        let field = fundamental(n);
        let geom = geometry();
        let z = geom.rayleigh_range();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                collins_propagate(black_box(&field), &RayMatrix::free_space(z), z).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_round_trip(c: &mut Criterion) {
    let ring = CavityLayout::degenerate_ring(reference_lens(), default_mirrors(), 0.999).unwrap();
    let mut group = c.benchmark_group("cavity_round_trip");
    group.sample_size(20);
    for n in [256usize, 512] {
        let field = fundamental(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| round_trip(black_box(&field), &ring).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_collins, bench_round_trip);
criterion_main!(benches);
