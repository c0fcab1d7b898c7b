use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ldpcc_core::windecode::Geometry;
use ldpcc_core::*;

fn desk_code() -> TerminatedCode {
    let spec = ConvCodeSpec::generate(5, 5, 10, 1, Some(24)).unwrap();
    TerminatedCode::new(&spec, 24).unwrap()
}

fn assembly(c: &mut Criterion) {
    c.bench_function("assemble_terminated_n1200", |b| {
        b.iter(|| {
            let spec = ConvCodeSpec::generate(5, 5, 10, 1, Some(24)).unwrap();
            TerminatedCode::new(&spec, 24).unwrap()
        })
    });
}

fn lp_relaxation(c: &mut Criterion) {
    let code = desk_code();
    let inst = make_instance(&code.h, 0.02, 3).unwrap();
    let model = build_exact_model(&code.h, &inst.received).unwrap();
    c.bench_function("lp_relaxation_n1200", |b| b.iter(|| solve_lp(&model).unwrap()));
}

fn window_decoders(c: &mut Criterion) {
    let code = desk_code();
    let w = Geometry::of(&code.spec).small_window();
    let inst = make_instance(&code.h, 0.02, 3).unwrap();
    let mut group = c.benchmark_group("sliding_p002");
    group.sample_size(10);
    for kind in [DecoderKind::CW, DecoderKind::FW, DecoderKind::RW] {
        for variant in [Variant::AllBinary, Variant::SomeBinary] {
            let params = DecoderParams::new(kind, variant, w).with_window_budget(SolveBudget::nodes(2_000));
            let id = BenchmarkId::from_parameter(format!("{}{kind}", variant.tag()));
            group.bench_function(id, |b| b.iter(|| decode_sliding(&code.matrix_view(), &inst.received, &params).unwrap()));
        }
    }
    group.finish();
}

fn gallager(c: &mut Criterion) {
    let code = desk_code();
    let inst = make_instance(&code.h, 0.02, 3).unwrap();
    c.bench_function("gallager_a_n1200", |b| b.iter(|| gallager_a(&code.h, &inst.received, 100).unwrap()));
}

criterion_group!(benches, assembly, lp_relaxation, window_decoders, gallager);
criterion_main!(benches);
