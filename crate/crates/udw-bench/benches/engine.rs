use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use udw_bench::{detector, field, gaussian};
use udw_core::feynman::{amplitude, enumerate_diagrams, ExternalState, QuadOptions, Quantum};
use udw_core::oracle::run_word_suite;
use udw_core::wick::{Evaluation, FieldModes, OperatorWord, WickConfig};
use udw_core::{FieldKind, ModeIndex, Model, Spin};

fn wick(c: &mut Criterion) {
    let f = field(1, FieldKind::RealScalar);
    let cfg = WickConfig::new().with_field(0, FieldModes::ball(f, 6)).with_detector(0, 1.0);
    let word = OperatorWord::parse("| T[ :phi0(0.4;0.1) phi0(0.4;0.1): :phi0(0.1;-0.3) phi0(0.1;-0.3): :phi0(-0.5;0.2) phi0(-0.5;0.2): ] |")
        .unwrap()
        .with_kinds(&cfg.kinds());
    c.bench_function("wick_six_point_normal_ordered", |b| b.iter(|| Evaluation::new(black_box(&word), &cfg).unwrap().total()));
}

fn diagrams(c: &mut Criterion) {
    let f = field(1, FieldKind::Spinor);
    let d = [detector(Model::Spinor, gaussian(0.5))];
    let fin = ExternalState::ground(1)
        .with_quantum(Quantum::particle(ModeIndex::new(&[1]).unwrap()).with_spin(Spin::Up))
        .with_quantum(Quantum::antiparticle(ModeIndex::new(&[-1]).unwrap()).with_spin(Spin::Up));
    let list = enumerate_diagrams(Model::Spinor, 2, &ExternalState::ground(1), &fin, 1).unwrap();
    c.bench_function("enumerate_pair_diagrams", |b| {
        b.iter(|| enumerate_diagrams(Model::Spinor, 2, &ExternalState::ground(1), black_box(&fin), 1).unwrap())
    });
    let quad = QuadOptions::default();
    c.bench_function("pair_amplitude_spinor", |b| b.iter(|| amplitude(black_box(&list[0]), &f, &d, 4, &quad).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("word_suite_50", |b| b.iter(|| run_word_suite(black_box(50), 3, 1e-10).unwrap()));
    g.finish();
}

criterion_group!(benches, wick, diagrams, oracle);
criterion_main!(benches);
