use criterion::{criterion_group, criterion_main, Criterion};
use pfold_core::oracle;
use pfold_core::rules::{self, ActionSequence, RuleOptions};
use pfold_core::sim::{self, HoleSpec, Shape, Size};
use pfold_core::taskgen::{self, Family, GeneratorConfig};
use pfold_core::{Orientation, TriRef};
use std::hint::black_box;

fn enumeration(c: &mut Criterion) {
    for group in [4u8, 9] {
        c.bench_function(&format!("enumerate group {group}"), |b| {
            b.iter(|| rules::enumerate(black_box(group), RuleOptions::default()).unwrap())
        });
    }
}

fn simulation(c: &mut Criterion) {
    let seq: ActionSequence = "D1-F R90 H1-F R180 V2-F".parse().unwrap();
    let state = sim::fold_sequence(seq.actions()).unwrap();
    let at: TriRef = state.active_region().iter().next().unwrap();
    let hole = HoleSpec::new(Shape::Star, Size::Small, Orientation::ALL[1], at);
    c.bench_function("fold five actions", |b| b.iter(|| sim::fold_sequence(black_box(seq.actions())).unwrap()));
    c.bench_function("punch and unfold", |b| b.iter(|| sim::unfold_all(&state.punch(black_box(&[hole])).unwrap())));
}

fn planning(c: &mut Criterion) {
    let tasks = taskgen::generate(&GeneratorConfig::new(Family::Planning, 40, 1)).unwrap();
    for t in &tasks {
        oracle::solve_planning(t).unwrap();
    }
    c.bench_function("solve 40 planning tasks", |b| {
        b.iter(|| tasks.iter().filter(|t| oracle::solve_planning(t).unwrap().is_some()).count())
    });
}

fn generation(c: &mut Criterion) {
    c.bench_function("standard corpus", |b| {
        b.iter(|| {
            taskgen::standard_corpus(black_box(7))
                .iter()
                .map(|cfg| taskgen::generate(cfg).unwrap().len())
                .sum::<usize>()
        })
    });
}

criterion_group!(benches, enumeration, simulation, planning, generation);
criterion_main!(benches);
