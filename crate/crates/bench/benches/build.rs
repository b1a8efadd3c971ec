use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use slp_core::builders::{build_via_ctph, repair_build, CtphParams};
use slp_core::corpus::gen_corpus;
use slp_core::{EncodeOptions, ShapedSlpEncoding};

fn build(c: &mut Criterion) {
    let text = gen_corpus(10_000, 20, 0.001, 3).unwrap();
    let mut group = c.benchmark_group("build");
    group.sample_size(10);
    group.throughput(Throughput::Bytes(text.len() as u64));
    group.bench_function("repair", |b| b.iter(|| repair_build(&text).unwrap()));
    group.bench_function("ctph+repair", |b| {
        b.iter(|| build_via_ctph(&text, &CtphParams::default()).unwrap())
    });
    let slp = repair_build(&text).unwrap();
    group.bench_function("encode_shaped", |b| {
        b.iter(|| ShapedSlpEncoding::encode(&slp, &EncodeOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, build);
criterion_main!(benches);
