use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use exact_penalty::cones::DualElement;
use exact_penalty::instances::{build_nlp_circle, build_nlp_mixed};
use exact_penalty::penalty::eval_penalized;
use exact_penalty::subsolver::{grid_scan_sequential, SubsolverConfig};

fn bench_grid_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_scan");
    for (inst, points) in [
        (build_nlp_circle(), 101usize),
        (build_nlp_mixed(), 101),
        (build_nlp_circle(), 301),
    ] {
        let tau = inst.exact_tau_param().unwrap();
        let f = |x: &[f64]| eval_penalized(&inst, &tau, x);
        let label = format!("{}_{points}", inst.name);

        group.bench_with_input(BenchmarkId::new("sequential", &label), &points, |b, &p| {
            b.iter(|| grid_scan_sequential(&inst.feasible_set, &f, p).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", &label), &points, |b, &p| {
            b.iter(|| {
                exact_penalty::subsolver::grid_scan_parallel(&inst.feasible_set, &f, p).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_global_minimize(c: &mut Criterion) {
    let inst = build_nlp_circle();
    let tau = DualElement::unit(inst.cone.clone()).scale(1.2);
    let cfg = SubsolverConfig::default();
    c.bench_function("global_minimize_circle", |b| {
        b.iter(|| exact_penalty::subsolver::global_minimize(&inst, &tau, &cfg).unwrap())
    });
}

criterion_group!(benches, bench_grid_scan, bench_global_minimize);
criterion_main!(benches);
