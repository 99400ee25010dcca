use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use mu_alba::algebra::{enumerate_les, CorpusConfig};
use mu_alba::classifier::classify_inequality_with;
use mu_alba::engine::{run, RunConfig};
use mu_alba::gen::rich_signature;
use mu_alba::par::Exec;
use mu_alba::syntax::parse_inequality;
use mu_alba::verify::check_reduction;

const INPUTS: [&str; 3] = [
    "f(p) <= g(p)",
    "mu X. (p \\/ f(X)) <= g(p)",
    "h(p, mu X. (q \\/ f(X))) <= k(g(q), p)",
];

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

pub fn oracle(c: &mut Criterion) {
    let sig = rich_signature();
    let corpus = enumerate_les(&sig, CorpusConfig { max_size: 8, budget: 20, seed: 1 });
    let mut group = c.benchmark_group("check_reduction");
    for (i, text) in INPUTS.iter().enumerate() {
        let input = parse_inequality(text, &sig).unwrap();
        let output = run(&input, &sig, &RunConfig::default()).unwrap().output().expect("reducible");
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, i), &exec, |b, &exec| {
                b.iter(|| check_reduction(black_box(&input), black_box(&output), &corpus, exec).unwrap())
            });
        }
    }
    group.finish();
}

pub fn classify(c: &mut Criterion) {
    let sig = rich_signature();
    let input = parse_inequality("h(p, mu X. (q \\/ f(X))) <= k(g(q), g(r \\/ p))", &sig).unwrap();
    let mut group = c.benchmark_group("classify");
    for (name, exec) in modes() {
        group.bench_function(name, |b| b.iter(|| classify_inequality_with(black_box(&input), exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, oracle, classify);
criterion_main!(benches);
