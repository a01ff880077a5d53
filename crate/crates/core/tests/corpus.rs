use std::fs;
use std::path::PathBuf;

use pfold_core::codecs::{self, svg, text};
use pfold_core::oracle;
use pfold_core::scoring::{self, Modality};
use pfold_core::sim::LabelMode;
use pfold_core::taskgen::{self, Family, GeneratorConfig, GroundTruth, TaskInstance};

fn corpus(seed: u64) -> Vec<TaskInstance> {
    taskgen::standard_corpus(seed).iter().flat_map(|cfg| taskgen::generate(cfg).unwrap()).collect()
}

#[test]
fn corpus_shapes() {
    let tasks = corpus(2024);
    let count = |f: Family| tasks.iter().filter(|t| t.family == f).count();
    assert_eq!(count(Family::Prediction), 315);
    assert_eq!(count(Family::Backward), 180);
    assert_eq!(count(Family::Planning), 400);
    assert_eq!(count(Family::Generalization), 240);
    for g in 1..=9 {
        assert_eq!(tasks.iter().filter(|t| t.family == Family::Prediction && t.group == g).count(), 35);
        assert_eq!(tasks.iter().filter(|t| t.family == Family::Backward && t.group == g).count(), 20);
    }
    let mut ids: Vec<&str> = tasks.iter().map(|t| t.id.as_str()).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), tasks.len());
}

#[test]
fn prediction_self_consistency() {
    let cfg = GeneratorConfig::new(Family::Prediction, 1080, 99);
    let tasks = taskgen::generate(&cfg).unwrap();
    for task in tasks.iter().chain(&taskgen::generate(&GeneratorConfig::new(Family::Backward, 180, 99)).unwrap()) {
        let GroundTruth::Prediction(truth) = &task.ground_truth else { unreachable!() };
        let solved = oracle::solve_prediction(task, LabelMode::Geometric).unwrap();
        assert_eq!(solved.unfold_steps, truth.unfold_steps, "{}", task.id);
        assert_eq!(solved.pattern, truth.holes, "{}", task.id);
    }
}

#[test]
fn oracle_answers_score_perfectly() {
    for task in corpus(5).iter().step_by(7) {
        let answer = oracle::answer(task, LabelMode::Geometric).unwrap();
        let report = scoring::score_answer(task, Some(&answer), Modality::Visual).unwrap();
        assert!(report.exact_match, "{}", task.id);
        assert_eq!(report.error_class, None);
    }
}

#[test]
fn codec_round_trips_on_corpus() {
    for task in corpus(17) {
        let json = codecs::task_to_json(&task);
        assert_eq!(codecs::parse_task(&json).unwrap(), task);
        let answer = oracle::answer(&task, LabelMode::Geometric);
        if let Ok(answer) = answer {
            assert_eq!(codecs::parse_answer(&codecs::answer_to_json(&answer)).unwrap(), answer);
        }
        let doc = text::encode_text(&task, text::TextOptions::default()).unwrap();
        assert_eq!(doc.to_string().parse::<text::TextDocument>().unwrap(), doc);
    }
}

#[test]
fn deterministic_bytes() {
    let a: Vec<String> = corpus(3).iter().map(codecs::task_to_json).collect();
    let b: Vec<String> = corpus(3).iter().map(codecs::task_to_json).collect();
    assert_eq!(a, b);
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Fixed tasks whose encodings are pinned byte for byte.
pub fn golden_tasks() -> Vec<TaskInstance> {
    let pick = |family, group, seed| {
        let cfg = GeneratorConfig { groups: vec![group], ..GeneratorConfig::new(family, 1, seed) };
        taskgen::generate(&cfg).unwrap().remove(0)
    };
    vec![
        pick(Family::Prediction, 3, 1),
        pick(Family::Prediction, 7, 2),
        pick(Family::Backward, 5, 3),
        pick(Family::Planning, 2, 4),
        pick(Family::Generalization, 5, 5),
    ]
}

fn golden_outputs(task: &TaskInstance) -> Vec<(String, String)> {
    let opts = text::TextOptions { include_solution: true, ..Default::default() };
    let mut out = vec![
        (format!("{}.task.json", task.id), codecs::task_to_json(task)),
        (format!("{}.txt", task.id), text::encode_text(task, opts).unwrap().to_string()),
        (format!("{}.svg", task.id), svg::render_task(task).unwrap()),
    ];
    for (k, frame) in svg::render_task_steps(task, LabelMode::Geometric).unwrap().into_iter().enumerate() {
        out.push((format!("{}.step{:02}.svg", task.id, k + 1), frame));
    }
    out
}

#[test]
fn golden_files() {
    let dir = golden_dir();
    let update = std::env::var_os("PFOLD_UPDATE_GOLDEN").is_some();
    for task in golden_tasks() {
        for (name, contents) in golden_outputs(&task) {
            let path = dir.join(&name);
            if update {
                fs::create_dir_all(&dir).unwrap();
                fs::write(&path, &contents).unwrap();
                continue;
            }
            let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {name}"));
            assert_eq!(contents, want, "{name} differs from its golden copy");
        }
    }
}
