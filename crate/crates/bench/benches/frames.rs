use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gfusion::gen::{self, FrameKind, GenConfig};
use gfusion::identities::{run_pair_suite, run_suite, FrameContext};
use gfusion::operators::frame_operator;
use gfusion::pairs::analyze_pair;
use gfusion::SuiteConfig;

const SEED: u64 = 7;

fn frame(dim: usize, atoms: usize, kind: FrameKind) -> gfusion::GFusionFrame {
    gen::random_frame(&GenConfig::new(dim, atoms, SEED).complex().kind(kind)).unwrap()
}

fn operators(c: &mut Criterion) {
    let mut group = c.benchmark_group("frame_operator");
    for &(dim, atoms) in &[(4, 8), (8, 16), (16, 64)] {
        let f = frame(dim, atoms, FrameKind::Random);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{dim}x{atoms}")), &f, |b, f| {
            b.iter(|| frame_operator(f))
        });
    }
    group.finish();
}

fn context(c: &mut Criterion) {
    let f = frame(8, 16, FrameKind::Random);
    c.bench_function("frame_context/8x16", |b| b.iter(|| FrameContext::new(&f).unwrap()));
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    let f = frame(6, 12, FrameKind::Parseval);
    for parallel in [false, true] {
        let cfg = SuiteConfig { trials: 20, parallel, ..SuiteConfig::default() };
        group.bench_function(if parallel { "parseval/parallel" } else { "parseval/serial" }, |b| {
            b.iter(|| run_suite(&f, &cfg).unwrap())
        });
    }
    let w = gen::perturbed_partner(&f, 0.1, SEED).unwrap();
    let cfg = SuiteConfig { trials: 20, ..SuiteConfig::default() };
    group.bench_function("pair", |b| b.iter(|| run_pair_suite(&f, &w, &cfg).unwrap()));
    group.finish();
}

fn pairs(c: &mut Criterion) {
    let v = frame(8, 16, FrameKind::Random);
    let w = gen::perturbed_partner(&v, 0.2, SEED).unwrap();
    c.bench_function("analyze_pair/8x16", |b| b.iter(|| analyze_pair(&v, &w).unwrap()));
}

criterion_group!(benches, operators, context, suites, pairs);
criterion_main!(benches);
