//! Grid sweeps on one worker thread against the default rayon pool.
//!
//! `cargo bench -p disc-osc-core` compares the two; building with
//! `--no-default-features` makes both rows sequential.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use disc_osc::constructions::example_gamma;
use disc_osc::kernel::norms::{weighted_sup_estimate, SupKind};
use disc_osc::kernel::{Closed, GridSpec, Polynomial, SharedOracle};
use disc_osc::ode::{share, SolutionOracle};
use disc_osc::{DiscPoint, C64};

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    let label = format!("default_pool_{}", default.current_num_threads());
    vec![
        ("1_thread".into(), rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        (label, default),
    ]
}

fn sweeps(c: &mut Criterion) {
    let grid = GridSpec::Dyadic { k_max: 12, base_angles: 16, angle_cap: 1024 };
    let gamma = example_gamma(1.0).unwrap().bundle.f;
    let a: SharedOracle = Arc::new(Closed(Polynomial(vec![C64::new(4.0, 0.0), C64::new(0.0, 1.0)])));
    let ode = share(SolutionOracle::new(a, DiscPoint::origin(), C64::new(0.0, 0.0), C64::new(1.0, 0.0)));
    let small = GridSpec::Dyadic { k_max: 6, base_angles: 8, angle_cap: 64 };

    let mut g = c.benchmark_group("weighted_sup");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_with_input(BenchmarkId::new("closed_form", &name), &pool, |b, pool| {
            b.iter(|| pool.install(|| weighted_sup_estimate(&*gamma, 1.0, &grid, SupKind::Spherical).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("ode_solution", &name), &pool, |b, pool| {
            b.iter(|| pool.install(|| weighted_sup_estimate(&*ode, 1.0, &small, SupKind::Modulus).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
