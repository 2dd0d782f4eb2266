use criterion::{criterion_group, criterion_main, Criterion};

use tdmin_core::driver::{minimize_project, run_pass};
use tdmin_core::semantics::build_lenient;
use tdmin_core::Algorithm;

fn bench(c: &mut Criterion) {
    let subjects = tdmin_bench::subjects();
    let mut g = c.benchmark_group("minimize");
    for (name, p, cfg) in &subjects {
        g.bench_function(name.as_str(), |b| b.iter(|| minimize_project(p.clone(), cfg).unwrap()));
    }
    g.finish();

    let mut g = c.benchmark_group("phase");
    let (name, p, cfg) = &subjects[1];
    g.bench_function(format!("resolve/{name}"), |b| b.iter(|| build_lenient(p)));
    g.bench_function(format!("pass/{name}"), |b| b.iter(|| run_pass(p, cfg, 1).unwrap()));
    let mut class = cfg.clone();
    class.algorithm = Algorithm::ClassGranular;
    g.bench_function(format!("baseline/{name}"), |b| b.iter(|| run_pass(p, &class, 1).unwrap()));
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
