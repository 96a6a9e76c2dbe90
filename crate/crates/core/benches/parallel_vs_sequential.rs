use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use trustcbc::conjoint::{log_likelihood_with, simulate_respondents, Design, DesignKind};
use trustcbc::trust::{score_all, ScoreParams};
use trustcbc::{presets, Execution};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn design() -> Design {
    Design::generate(presets::survey_attributes(), DesignKind::HalfFraction, 4, 1).unwrap()
}

fn likelihood(c: &mut Criterion) {
    let design = design();
    let truth = presets::reference_part_worths();
    let choices = simulate_respondents(&truth, &design, 20_000, 1, Execution::Parallel).unwrap();
    let mut group = c.benchmark_group("log_likelihood_160k");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| log_likelihood_with(&design, black_box(&choices), &truth, mode).unwrap())
        });
    }
    group.finish();
}

fn simulate(c: &mut Criterion) {
    let design = design();
    let truth = presets::reference_part_worths();
    let mut group = c.benchmark_group("simulate_5k_respondents");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| simulate_respondents(&truth, &design, black_box(5_000), 1, mode).unwrap())
        });
    }
    group.finish();
}

fn scoring(c: &mut Criterion) {
    let annotations: Vec<_> = (0..20_000)
        .map(|i| {
            let mut a = presets::worked_example_annotation();
            a.id = format!("a{i}");
            a
        })
        .collect();
    let params = ScoreParams::default();
    let mut group = c.benchmark_group("score_all_20k");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| score_all(black_box(&annotations), &params, mode))
        });
    }
    group.finish();
}

criterion_group!(benches, likelihood, simulate, scoring);
criterion_main!(benches);
