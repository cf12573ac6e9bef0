//! Sequential against data-parallel evaluation of the three scan workloads.
//! Without the `parallel` feature both variants run on one thread.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;

use rankone::params::generate_t2_min;
use rankone::tensor::{build_p_applied, tensor_inner};
use rankone::verify::{default_floor, mixing_profile, sidon_scan, ScanMode, SidonScope};
use rankone::{Exec, Int, StageTable};

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn table(count: usize) -> StageTable {
    StageTable::new(&generate_t2_min(BigInt::from(4), &vec![(5, BigInt::from(3)); count]).unwrap())
}

fn sidon(c: &mut Criterion) {
    let t = table(3);
    let mut group = c.benchmark_group("sidon_scan");
    group.sample_size(10);
    for (name, exec) in EXECS {
        group.bench_function(BenchmarkId::new(name, "stage1"), |b| {
            b.iter(|| sidon_scan(&t, 1, 2, ScanMode::Exhaustive, SidonScope::Full, exec).unwrap())
        });
        group.bench_function(BenchmarkId::new(name, "stage2-sample"), |b| {
            let mode = ScanMode::Sample { n: 2_000, seed: 1 };
            b.iter(|| sidon_scan(&t, 2, 2, mode, SidonScope::Full, exec).unwrap())
        });
    }
    group.finish();
}

fn mixing(c: &mut Criterion) {
    let t = table(3);
    let a = default_floor(&t);
    let shifts: Vec<Int> = (4..=20_000).map(BigInt::from).collect();
    let mut group = c.benchmark_group("mixing_profile");
    group.sample_size(10);
    for (name, exec) in EXECS {
        group.bench_function(name, |b| b.iter(|| mixing_profile(&t, &a, &a, &shifts, 2, exec)));
    }
    group.finish();
}

fn gram(c: &mut Criterion) {
    let t = table(3);
    let a = default_floor(&t);
    let p = build_p_applied(&t, 5, &BigInt::from(3), &a).unwrap();
    let mut group = c.benchmark_group("gram_grid");
    for (name, exec) in EXECS {
        group.bench_function(name, |b| b.iter(|| tensor_inner(&t, &p, &p, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sidon, mixing, gram);
criterion_main!(benches);
