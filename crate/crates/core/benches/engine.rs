use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cylklrw::bundles::{verify_all, WordClass};
use cylklrw::coulomb::Coulomb;
use cylklrw::normal::Engine;
use cylklrw::operator::Mode;
use cylklrw::par;
use cylklrw::props::{self, Property};

fn property_batches(c: &mut Criterion) {
    let plain = Engine::new(Mode::Plain);
    let deformed = Engine::new(Mode::Deformed);
    let seeds: Vec<u64> = (0..64).collect();
    let mut g = c.benchmark_group("properties");
    g.sample_size(10);
    for prop in [Property::Confluence, Property::Associativity] {
        for parallel in [false, true] {
            let id = BenchmarkId::new(prop.name(), if parallel { "parallel" } else { "sequential" });
            g.bench_function(id, |b| b.iter(|| props::run(prop, &plain, &deformed, &seeds, parallel)));
        }
    }
    g.finish();
}

fn transitions(c: &mut Criterion) {
    let co = Coulomb::new(4, 2, Mode::Plain).unwrap();
    let classes = WordClass::ALL;
    let mut g = c.benchmark_group("transitions");
    g.sample_size(10);
    g.bench_function("sequential", |b| {
        b.iter(|| par::map(&classes, false, |&cl| cylklrw::bundles::verify_transitions(&co, cl)))
    });
    g.bench_function("parallel", |b| b.iter(|| verify_all(&co, &classes)));
    g.finish();
}

criterion_group!(benches, property_batches, transitions);
criterion_main!(benches);
