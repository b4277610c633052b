use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ergopt::dynamics::SystemDescriptor;
use ergopt::enumeration::{beta_bruteforce, enumerate_orbits_with};
use ergopt::numeric::rat;
use ergopt::observables::{Expr, Observable, Weight};
use ergopt::par::Exec;
use ergopt::shadowing::{random_pseudo_orbit, shadow_batch};

const PATHS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_orbits");
    group.sample_size(10).warm_up_time(Duration::from_millis(500));
    let shift = SystemDescriptor::full_shift(2);
    for (name, exec) in PATHS {
        group.bench_with_input(BenchmarkId::new(name, 16), &16, |b, &n| {
            b.iter(|| black_box(enumerate_orbits_with(&shift, n, exec).unwrap()))
        });
    }
    group.finish();
}

fn brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("beta_bruteforce");
    group.sample_size(10).warm_up_time(Duration::from_millis(500));
    let circle = SystemDescriptor::circle(2);
    let u = Observable::ClosedForm(Expr::neg_cos());
    let w = Weight::unit(&circle);
    for (name, exec) in PATHS {
        group.bench_with_input(BenchmarkId::new(name, 12), &12, |b, &n| {
            b.iter(|| black_box(beta_bruteforce(&circle, &u, &w, n, exec).unwrap()))
        });
    }
    group.finish();
}

fn shadowing(c: &mut Criterion) {
    let mut group = c.benchmark_group("shadow_batch");
    group.sample_size(10).warm_up_time(Duration::from_millis(500));
    let torus = SystemDescriptor::torus_cat([[2, 1], [1, 1]]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let eta = &torus.asp.delta / rat(4, 1);
    let batch: Vec<_> = (0..256).map(|i| random_pseudo_orbit(&torus, 4 + i % 12, &eta, &mut rng).unwrap()).collect();
    for (name, exec) in PATHS {
        group.bench_with_input(BenchmarkId::new(name, batch.len()), &batch, |b, batch| {
            b.iter(|| black_box(shadow_batch(&torus, batch, exec)))
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, brute_force, shadowing);
criterion_main!(benches);
