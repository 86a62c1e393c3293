use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use zcolor_core::coloring::{bounded_small_image_search, find_nontrivial_coloring, is_simple};
use zcolor_core::fixtures::link_table;
use zcolor_core::moves::legal_moves;
use zcolor_core::{par, pretzel};

fn modes() -> [(&'static str, bool); 2] {
    [("parallel", false), ("sequential", true)]
}

fn small_image_search(c: &mut Criterion) {
    let table = link_table().unwrap();
    let (_, d) = table.iter().find(|(n, _)| *n == "L10n32").unwrap();
    let mut g = c.benchmark_group("bounded_small_image_search");
    for (name, seq) in modes() {
        par::force_sequential(seq);
        g.bench_with_input(BenchmarkId::new(name, "L10n32 k=3 b=4"), d, |b, d| {
            b.iter(|| black_box(bounded_small_image_search(d, 3, 4)))
        });
    }
    par::force_sequential(false);
    g.finish();
}

fn batch_analyze(c: &mut Criterion) {
    let table = link_table().unwrap();
    let mut g = c.benchmark_group("batch_analyze");
    for (name, seq) in modes() {
        par::force_sequential(seq);
        g.bench_function(BenchmarkId::new(name, "link table"), |b| {
            b.iter(|| {
                par::map(&table, |(_, d)| {
                    let found = find_nontrivial_coloring(d);
                    found.map(|g| is_simple(d, &g))
                })
            })
        });
    }
    par::force_sequential(false);
    g.finish();
}

fn move_enumeration(c: &mut Criterion) {
    let d = pretzel(&[4, -4, 4, -4]).unwrap();
    let col = find_nontrivial_coloring(&d).unwrap();
    let mut g = c.benchmark_group("legal_moves");
    for (name, seq) in modes() {
        par::force_sequential(seq);
        g.bench_function(BenchmarkId::new(name, "pretzel(4,-4,4,-4)"), |b| b.iter(|| black_box(legal_moves(&d, &col))));
    }
    par::force_sequential(false);
    g.finish();
}

criterion_group!(benches, small_image_search, batch_analyze, move_enumeration);
criterion_main!(benches);
