use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use halfsign::quadform::fixtures::{q1, q2};
use halfsign::quadform::RepresentationCounter;
use halfsign::spinor::fixtures::q1_q2;
use halfsign::PrimeSieve;

fn theta_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("theta_sweep");
    for n_max in [10_000u64, 100_000] {
        group.bench_with_input(BenchmarkId::new("Q2", n_max), &n_max, |b, &n| {
            b.iter(|| q2().theta_coefficients(black_box(n)))
        });
    }
    group.finish();
}

fn single_count(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_p_squared");
    let n = 9973u64 * 9973;
    let form = q1();
    let enumerating = RepresentationCounter::enumerating(&form);
    let closed = RepresentationCounter::new(&form, n);
    group.bench_function("enumeration", |b| b.iter(|| enumerating.count(black_box(n))));
    group.bench_function("closed_form", |b| b.iter(|| closed.count(black_box(n))));
    group.finish();
}

fn automorphisms(c: &mut Criterion) {
    c.bench_function("automorphism_order_Q2", |b| b.iter(|| black_box(q2()).automorphism_order()));
}

fn cusp_prime_series(c: &mut Criterion) {
    let set = q1_q2();
    let primes = PrimeSieve::new(10_000).unwrap().primes().to_vec();
    let mut group = c.benchmark_group("cusp_prime_series");
    group.sample_size(10);
    group.bench_function("p<=1e4", |b| b.iter(|| set.cusp_prime_series(1, black_box(&primes)).unwrap()));
    group.finish();
}

criterion_group!(benches, theta_sweep, single_count, automorphisms, cusp_prime_series);
criterion_main!(benches);
