use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sumprod::coloring::{Coloring, RationalColoring};
use sumprod::identities;
use sumprod::par;
use sumprod::pipeline::{direct_witness, Pattern};
use sumprod::search::vdw::vdw_witness;
use sumprod::search::{SearchBudget, Tracker};

fn modes(c: &mut Criterion, group: &str, f: impl Fn()) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("mode", "parallel"), |b| b.iter(&f));
    g.bench_function(BenchmarkId::new("mode", "sequential"), |b| b.iter(|| par::sequential(&f)));
    g.finish();
}

fn identity_suites(c: &mut Criterion) {
    modes(c, "identities_300", || {
        identities::run_all(1, 300).unwrap();
    });
}

fn direct_scan(c: &mut Criterion) {
    // Undefined above height 4, so nothing is found and the scan covers the
    // whole space.
    let col: Arc<dyn RationalColoring> = Arc::new(
        Coloring::from_json(r#"{"kind":"restricted","inner":{"kind":"random","r":3,"seed":4},"max_height":4}"#).unwrap(),
    );
    modes(c, "sums_products_scan_k2_h24", || {
        let t = Tracker::new(&SearchBudget::default().with_height(24));
        direct_witness(Pattern::SumsAndProducts, 2, col.as_ref(), &t).unwrap();
    });
}

fn progression_scan(c: &mut Criterion) {
    let col = Coloring::random(2, 17).unwrap();
    modes(c, "vdw_k14_n3000", || {
        vdw_witness(&|n| col.color_natural(n), 14, 3000).unwrap();
    });
}

criterion_group!(benches, identity_suites, direct_scan, progression_scan);
criterion_main!(benches);
