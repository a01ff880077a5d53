//! File formats: task and answer documents (JSON), text grids and SVG
//! renders.
//!
//! JSON output is pretty-printed with a trailing newline and a fixed field
//! order, so files are byte-stable and diff cleanly. Parsing is strict:
//! unknown fields and out-of-vocabulary values are rejected with the path of
//! the offending field.

pub mod svg;
pub mod text;

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rules::{self, ActionSequence, FoldSpec};
use crate::sim::HoleSpec;
use crate::taskgen::{Family, GeneralizationTruth, GroundTruth, PlanningTruth, PredictionTruth, TaskInstance};

/// A solver's answer to one task.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AnswerDoc {
    /// Used for prediction and backward tasks.
    Prediction {
        unfolding: Vec<FoldSpec>,
        holes: Vec<HoleSpec>,
    },
    Planning {
        folds: Vec<FoldSpec>,
        initial_holes: Vec<HoleSpec>,
    },
    Generalization {
        holes: Vec<HoleSpec>,
    },
}

impl AnswerDoc {
    pub fn fits(&self, family: Family) -> bool {
        matches!(
            (self, family),
            (AnswerDoc::Prediction { .. }, Family::Prediction | Family::Backward)
                | (AnswerDoc::Planning { .. }, Family::Planning)
                | (AnswerDoc::Generalization { .. }, Family::Generalization)
        )
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("document types always serialize");
    s.push('\n');
    s
}

/// Strict JSON parse that reports the failing field path.
pub fn from_json<T: DeserializeOwned>(s: &str) -> Result<T, Error> {
    let de = &mut serde_json::Deserializer::from_str(s);
    let value = serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Parse { path: path_or_root(e.path().to_string()), message: e.inner().to_string() })?;
    Ok(value)
}

fn path_or_root(path: String) -> String {
    if path == "." {
        "<root>".into()
    } else {
        path
    }
}

fn from_value<T: DeserializeOwned>(value: serde_json::Value, prefix: &str) -> Result<T, Error> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner == ".") {
            (true, _) => path_or_root(inner),
            (false, true) => prefix.to_string(),
            (false, false) => format!("{prefix}.{inner}"),
        };
        Error::Parse { path, message: e.inner().to_string() }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    id: String,
    family: Family,
    group: u8,
    actions: ActionSequence,
    holes: Vec<HoleSpec>,
    ground_truth: serde_json::Value,
    seed: u64,
}

pub fn task_to_json(task: &TaskInstance) -> String {
    to_json(task)
}

pub fn parse_task(s: &str) -> Result<TaskInstance, Error> {
    let raw: RawTask = from_json(s)?;
    let bad = |path: &str, message: String| Error::Parse { path: path.to_string(), message };
    if !raw.family.allowed_groups().contains(&raw.group) {
        return Err(bad("group", format!("group {} is not valid for {} tasks", raw.group, raw.family)));
    }
    match rules::classify_group(raw.actions.actions()) {
        Ok(g) if g == raw.group => {}
        Ok(g) => return Err(bad("actions", format!("actions form group {g}, not {}", raw.group))),
        Err(e) => return Err(bad("actions", e.to_string())),
    }
    let ground_truth = match raw.family {
        Family::Prediction | Family::Backward => {
            GroundTruth::Prediction(from_value::<PredictionTruth>(raw.ground_truth, "ground_truth")?)
        }
        Family::Planning => GroundTruth::Planning(from_value::<PlanningTruth>(raw.ground_truth, "ground_truth")?),
        Family::Generalization => {
            GroundTruth::Generalization(from_value::<GeneralizationTruth>(raw.ground_truth, "ground_truth")?)
        }
    };
    Ok(TaskInstance {
        id: raw.id,
        family: raw.family,
        group: raw.group,
        actions: raw.actions,
        holes: raw.holes,
        ground_truth,
        seed: raw.seed,
    })
}

pub fn answer_to_json(answer: &AnswerDoc) -> String {
    to_json(answer)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrediction {
    unfolding: Vec<FoldSpec>,
    holes: Vec<HoleSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlanning {
    folds: Vec<FoldSpec>,
    initial_holes: Vec<HoleSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeneralization {
    holes: Vec<HoleSpec>,
}

pub fn parse_answer(s: &str) -> Result<AnswerDoc, Error> {
    // Dispatch on the tag by hand so field paths survive into errors.
    let mut map: serde_json::Map<String, serde_json::Value> = from_json(s)?;
    let kind = match map.remove("kind") {
        Some(serde_json::Value::String(k)) => k,
        _ => {
            return Err(Error::Parse { path: "kind".into(), message: "missing or non-string answer kind".into() });
        }
    };
    let body = serde_json::Value::Object(map);
    Ok(match kind.as_str() {
        "prediction" => {
            let a: RawPrediction = from_value(body, "")?;
            AnswerDoc::Prediction { unfolding: a.unfolding, holes: a.holes }
        }
        "planning" => {
            let a: RawPlanning = from_value(body, "")?;
            AnswerDoc::Planning { folds: a.folds, initial_holes: a.initial_holes }
        }
        "generalization" => {
            let a: RawGeneralization = from_value(body, "")?;
            AnswerDoc::Generalization { holes: a.holes }
        }
        other => {
            return Err(Error::Parse { path: "kind".into(), message: format!("unknown answer kind {other:?}") });
        }
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

pub fn write_task(path: &Path, task: &TaskInstance) -> Result<(), Error> {
    write_file(path, &task_to_json(task))
}

pub fn read_task(path: &Path) -> Result<TaskInstance, Error> {
    parse_task(&fs::read_to_string(path)?)
}

pub fn write_answer(path: &Path, answer: &AnswerDoc) -> Result<(), Error> {
    write_file(path, &answer_to_json(answer))
}

pub fn read_answer(path: &Path) -> Result<AnswerDoc, Error> {
    parse_answer(&fs::read_to_string(path)?)
}

/// Write any document type as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    write_file(path, &to_json(value))
}

/// Write a text or SVG sidecar.
pub fn write_text(path: &Path, contents: &str) -> Result<(), Error> {
    write_file(path, contents)
}

/// Path of a task file under an output root: `family/group/id.task.json`.
pub fn task_path(root: &Path, task: &TaskInstance) -> std::path::PathBuf {
    root.join(task.family.name()).join(task.group.to_string()).join(format!("{}.task.json", task.id))
}
