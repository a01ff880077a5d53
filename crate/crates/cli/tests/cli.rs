use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pfold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfold")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_reports_group_and_violations() {
    let ok = pfold(&["validate", "H1-F", "R90", "V2-F"]);
    assert!(ok.status.success());
    assert!(stdout(&ok).contains("group 6"));
    let bad = pfold(&["validate", "H1-F", "H2-F", "H1-F"]);
    assert!(!bad.status.success());
    assert!(stdout(&bad).contains("base rule 1"));
    let garbage = pfold(&["validate", "Q7"]);
    assert!(!garbage.status.success());
    assert!(String::from_utf8_lossy(&garbage.stderr).starts_with("error:"));
}

#[test]
fn enumerate_one_group() {
    let o = pfold(&["enumerate", "5", "--list"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 49);
    assert!(out.ends_with("group 5: 48\n"));
    assert!(!pfold(&["enumerate", "10"]).status.success());
}

#[test]
fn generate_solve_score_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tasks");
    let answers = dir.path().join("answers");
    for family in ["prediction", "planning", "generalization"] {
        let o = pfold(&[
            "generate",
            "--family",
            family,
            "--count",
            "12",
            "--seed",
            "9",
            "--formats",
            "text,2d",
            "--out",
            path(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join(family).join("manifest.json").is_file());
    }
    assert!(pfold(&["solve", path(&out), "--out", path(&answers), "--workers", "3"]).status.success());
    assert_eq!(fs::read_dir(&answers).unwrap().count(), 36);

    // One unparseable answer and one answer with no task.
    let victim = fs::read_dir(&answers).unwrap().next().unwrap().unwrap().path();
    fs::write(&victim, "{\"kind\":\"prediction\"}").unwrap();
    fs::write(answers.join("nobody.answer.json"), "{}").unwrap();

    let report = dir.path().join("report.json");
    let lenient = pfold(&["score", "--answers", path(&answers), "--tasks", path(&out), "--out", path(&report)]);
    assert!(lenient.status.success());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 36);
    assert_eq!(rows.iter().filter(|r| r["parse_failure"] == true).count(), 1);
    assert_eq!(rows.iter().filter(|r| r["exact_match"] == true).count(), 35);
    assert_eq!(json["missing_tasks"], serde_json::json!(["nobody"]));

    let strict =
        pfold(&["score", "--answers", path(&answers), "--tasks", path(&out), "--out", path(&report), "--strict"]);
    assert!(!strict.status.success());
}

#[test]
fn verify_accepts_oracle_plan_and_rejects_wrong_fold_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert!(pfold(&["generate", "--family", "planning", "--groups", "2", "--count", "1", "--out", path(out)])
        .status
        .success());
    let task = out.join("planning/2/planning-g2-0000.task.json");
    let plan = out.join("plan.json");
    assert!(pfold(&["solve", path(&task), "--out", path(&plan)]).status.success());
    let o = pfold(&["verify", path(&plan), path(&task)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"matches_target\": true"));

    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&plan).unwrap()).unwrap();
    doc["folds"].as_array_mut().unwrap().pop();
    fs::write(&plan, doc.to_string()).unwrap();
    let o = pfold(&["verify", path(&plan), path(&task)]);
    assert!(!o.status.success());
    assert!(stdout(&o).contains("\"matches_target\": false"));
}

#[test]
fn render_writes_frames_text_and_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert!(pfold(&["generate", "--family", "prediction", "--groups", "5", "--count", "1", "--out", path(out)])
        .status
        .success());
    let task = out.join("prediction/5/prediction-g5-0000.task.json");
    let answer = out.join("a.json");
    assert!(pfold(&["solve", path(&task), "--out", path(&answer)]).status.success());
    let r = out.join("r");
    assert!(pfold(&["render", path(&task), "--steps", "--text", "--answer", path(&answer), "--out", path(&r)])
        .status
        .success());
    for name in [
        "prediction-g5-0000.svg",
        "prediction-g5-0000.txt",
        "prediction-g5-0000.compare.svg",
        "prediction-g5-0000.step01.svg",
    ] {
        assert!(r.join(name).is_file(), "{name}");
    }
}

#[test]
fn worker_count_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, workers) in [(&a, "1"), (&b, "8")] {
        let o = pfold(&[
            "generate",
            "--family",
            "backward",
            "--count",
            "27",
            "--seed",
            "4",
            "--formats",
            "frames",
            "--workers",
            workers,
            "--out",
            path(out),
        ]);
        assert!(o.status.success());
    }
    let read = |root: &Path| {
        let mut files: Vec<(String, Vec<u8>)> = Vec::new();
        for g in fs::read_dir(root.join("backward")).unwrap() {
            let g = g.unwrap().path();
            if g.is_dir() {
                for f in fs::read_dir(&g).unwrap() {
                    let f = f.unwrap().path();
                    files.push((f.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&f).unwrap()));
                }
            }
        }
        files.sort();
        files
    };
    let fa = read(&a);
    assert!(!fa.is_empty());
    assert_eq!(fa, read(&b));
}
