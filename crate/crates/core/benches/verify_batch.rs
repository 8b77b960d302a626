use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use thomae_core::transforms::TheoremKind;
use thomae_core::verify::{generate_cases, run_cases, terminating_sweep, Execution, Profile, VerifyOptions};

fn batches(c: &mut Criterion) {
    let opts = VerifyOptions::default();
    let sweep = terminating_sweep();
    let euler = generate_cases(7, &Profile::new(TheoremKind::Euler1, 64)).cases;
    let mut thomae_profile = Profile::new(TheoremKind::Thomae, 16);
    thomae_profile.min_excess = Some(thomae_core::exact::int(1));
    let thomae = generate_cases(6, &thomae_profile).cases;

    let mut group = c.benchmark_group("verify_batch");
    group.sample_size(10);
    for (name, cases) in [("terminating-sweep", &sweep), ("euler1", &euler), ("thomae", &thomae)] {
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, label), cases, |b, cases| {
                b.iter(|| run_cases(cases, &opts, exec))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, batches);
criterion_main!(benches);
