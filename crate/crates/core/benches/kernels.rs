use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twistkit::fixtures;
use twistkit::linalg::{Field, Matrix};
use twistkit::par;
use twistkit::twist::{fixture_twist, verify_twist};

fn mode_name(sequential: bool) -> &'static str {
    if sequential {
        "sequential"
    } else {
        "parallel"
    }
}

fn dense(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense");
    for (p, n) in [(2u32, 192usize), (3, 192), (0, 48)] {
        let f = if p == 0 { Field::new(0).unwrap() } else { Field::prime(p) };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = Matrix::random(f, n, n, &mut rng);
        let b = Matrix::random(f, n, n, &mut rng);
        let label = format!("{f}/{n}");
        group.bench_with_input(BenchmarkId::new("mul_sequential", &label), &(), |bch, _| bch.iter(|| a.mul_seq(&b)));
        group.bench_with_input(BenchmarkId::new("mul_parallel", &label), &(), |bch, _| bch.iter(|| a.mul_par(&b)));
        group.bench_with_input(BenchmarkId::new("rref_sequential", &label), &(), |bch, _| bch.iter(|| a.rref_seq()));
        group.bench_with_input(BenchmarkId::new("rref_parallel", &label), &(), |bch, _| bch.iter(|| a.rref_par()));
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    let t = fixture_twist("brauer_line_3_p3", "1,2", 4, 0, 10_000).unwrap();
    let kq8 = fixtures::load("kq8_p2").unwrap();
    for sequential in [true, false] {
        group.bench_function(BenchmarkId::new("verify_twist", mode_name(sequential)), |b| {
            par::set_sequential(sequential);
            b.iter(|| verify_twist(&t, None, 0, 10_000));
        });
        group.bench_function(BenchmarkId::new("kq8_certify", mode_name(sequential)), |b| {
            par::set_sequential(sequential);
            b.iter(|| twistkit::periodicity::certify_twisted_periodicity(&kq8, 4, 0, 10_000).unwrap());
        });
    }
    par::set_sequential(false);
    group.finish();
}

criterion_group!(benches, dense, pipeline);
criterion_main!(benches);
