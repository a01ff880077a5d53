//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the test harness so the lines always print.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use pfold_core::codecs::{self, svg, text, AnswerDoc};
use pfold_core::mesh::{Orientation, Point, SheetMesh, TriRef, TriSet};
use pfold_core::oracle;
use pfold_core::rules::{Action, FoldAxis, FoldSpec, RotationSpec};
use pfold_core::scoring::{self, Modality, Score};
use pfold_core::sim::{self, FoldedState, HoleSpec, LabelMode, Shape, Size};
use pfold_core::taskgen::{self, Family, GeneratorConfig, GroundTruth, TaskInstance};
use pfold_core::{Facing, Isometry};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ENUMERATE_BUDGET: Duration = Duration::from_secs(60);
const SELF_CONSISTENCY_BUDGET: Duration = Duration::from_secs(120);
const SELF_CONSISTENCY_TASKS: usize = 1080;
const GEOMETRY_STATES: usize = 10_000;
const PLANNING_TASKS: usize = 400;
const PLAN_MEDIAN_BUDGET: Duration = Duration::from_secs(1);
const PLAN_MAX_BUDGET: Duration = Duration::from_secs(30);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn pfold(args: &[&str]) -> Result<(bool, String), String> {
    let out =
        Command::new(env!("CARGO_BIN_EXE_pfold")).args(args).output().map_err(|e| format!("running pfold: {e}"))?;
    let mut text = String::from_utf8_lossy(&out.stdout).into_owned();
    text.push_str(&String::from_utf8_lossy(&out.stderr));
    Ok((out.status.success(), text))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn enumeration_counts() -> Outcome {
    let start = Instant::now();
    let (ok, out) = pfold(&["enumerate", "--check"])?;
    let elapsed = start.elapsed();
    ensure(ok, || format!("enumerate --check failed:\n{out}"))?;
    let expected = [16, 160, 1408, 10752, 48, 768, 10368, 27648];
    for (g, n) in [1u8, 2, 3, 4, 5, 6, 7, 9].into_iter().zip(expected) {
        let line = format!("group {g}: {n} (expected {n}) ok");
        ensure(out.contains(&line), || format!("missing line {line:?}"))?;
    }
    let g8 = out.lines().find(|l| l.starts_with("group 8:")).ok_or("no group 8 line")?;
    ensure(g8.contains("18432") && g8.contains("deviation"), || format!("group 8 line {g8:?}"))?;
    ensure(elapsed < ENUMERATE_BUDGET, || format!("took {elapsed:?}"))?;
    let g8 = g8.split(" warning").next().unwrap_or(g8);
    Ok(format!("groups 1-7,9 exact; {g8}, documented deviation; {elapsed:.2?}"))
}

fn fold(axis: FoldAxis) -> FoldSpec {
    FoldSpec::new(axis, Facing::Forward)
}

fn rotation_tables() -> Outcome {
    use FoldAxis::*;
    let expected_90 = [(H1, V2), (H2, V1), (V1, H1), (V2, H2), (D1, D2), (D2, D4), (D3, D1), (D4, D3)];
    let expected_270 = [(H1, V1), (H2, V2), (V1, H2), (V2, H1), (D1, D3), (D2, D1), (D3, D4), (D4, D2)];
    let swap_180 = [(H1, H2), (H2, H1), (V1, V2), (V2, V1), (D1, D4), (D4, D1), (D2, D3), (D3, D2)];
    let unfold = |axis, r, mode| sim::derive_unfold_steps(&[Action::Fold(fold(axis)), Action::Rotate(r)], mode);
    let mut checked = 0;
    for (r, table) in [(RotationSpec::R90, expected_90), (RotationSpec::R270, expected_270)] {
        for (from, to) in table {
            let got = unfold(from, r, LabelMode::Geometric);
            ensure(got == vec![fold(to)], || format!("{from:?} then {r:?}: got {got:?}, expected {to:?}"))?;
            checked += 1;
        }
    }
    for (from, to) in swap_180 {
        let geometric = unfold(from, RotationSpec::R180, LabelMode::Geometric);
        ensure(geometric == vec![fold(to)], || format!("180 geometric {from:?}: {geometric:?}"))?;
        let compat = unfold(from, RotationSpec::R180, LabelMode::TableCompat);
        ensure(compat == vec![fold(from)], || format!("180 table-compat {from:?}: {compat:?}"))?;
    }
    Ok(format!("{checked} entries at 90/270 exact; 180 swap (geometric) and identity (table-compat)"))
}

fn self_consistency() -> Outcome {
    let start = Instant::now();
    let mut tasks = taskgen::generate(&GeneratorConfig::new(Family::Prediction, SELF_CONSISTENCY_TASKS, 7))
        .map_err(|e| e.to_string())?;
    tasks.extend(taskgen::generate(&GeneratorConfig::new(Family::Backward, 180, 7)).map_err(|e| e.to_string())?);
    let mut groups = [false; 9];
    for task in &tasks {
        groups[task.group as usize - 1] = true;
        let GroundTruth::Prediction(truth) = &task.ground_truth else {
            return Err(format!("{} has a non-prediction truth", task.id));
        };
        let solved = oracle::solve_prediction(task, LabelMode::Geometric).map_err(|e| e.to_string())?;
        ensure(solved.unfold_steps == truth.unfold_steps && solved.pattern == truth.holes, || {
            format!("{} disagrees with its stored truth", task.id)
        })?;
    }
    let elapsed = start.elapsed();
    ensure(groups.iter().all(|&g| g), || "not every group was covered".into())?;
    ensure(elapsed < SELF_CONSISTENCY_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{} tasks over 9 groups agree; {elapsed:.2?}", tasks.len()))
}

/// Layers whose posed triangles strictly contain the centroid of `at`.
fn brute_coverage(state: &FoldedState, at: TriRef) -> usize {
    let c = SheetMesh::centroid3(at);
    let inside = |v: [Point; 3]| {
        let cross = |a: Point, b: Point| (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        let s = [cross(v[0], v[1]), cross(v[1], v[2]), cross(v[2], v[0])];
        s.iter().all(|&x| x > 0) || s.iter().all(|&x| x < 0)
    };
    state
        .layers()
        .iter()
        .filter(|layer| {
            layer.triangles.iter().any(|t| {
                inside(SheetMesh::triangle_vertices(t).map(|p| {
                    let q = layer.pose.apply(p);
                    Point::new(3 * q.x, 3 * q.y)
                }))
            })
        })
        .count()
}

fn check_state(rng: &mut ChaCha8Rng, actions: &[Action], state: &FoldedState) -> Result<(), String> {
    let seq = || actions.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
    let mut seen = TriSet::EMPTY;
    let mut total = 0;
    for layer in state.layers() {
        ensure(seen.intersection(layer.triangles).is_empty(), || format!("{}: layers overlap", seq()))?;
        seen = seen.union(layer.triangles);
        total += layer.triangles.len();
    }
    ensure(seen == TriSet::FULL && total == 32, || format!("{}: triangles not conserved", seq()))?;

    let region: Vec<TriRef> = state.active_region().iter().collect();
    let at = *region.choose(rng).expect("nonempty region");
    let shape = *Shape::ALL.choose(rng).unwrap();
    let orientation = *Orientation::ALL.choose(rng).unwrap();
    let hole = HoleSpec::new(shape, Size::Small, orientation, at);
    let pattern = sim::unfold_all(&state.punch(&[hole]).map_err(|e| e.to_string())?);
    ensure(pattern.len() == brute_coverage(state, at), || format!("{}: hole count differs from coverage", seq()))?;
    ensure(pattern.holes().iter().all(|h| Orientation::ALL.contains(&h.orientation)), || {
        format!("{}: orientation left the quarter-turn set", seq())
    })?;

    let folds: Vec<FoldSpec> = Action::alphabet().into_iter().filter_map(Action::as_fold).collect();
    let r = state.crease_for(*folds.choose(rng).unwrap()).reflection();
    ensure(r.compose(&r) == Isometry::IDENTITY, || format!("{}: reflection is not an involution", seq()))?;

    // Same folds in the unrotated frame, compared after rotating back.
    let mut rotation = 0u16;
    let mut plain = Vec::new();
    for a in actions {
        match a {
            Action::Rotate(r) => rotation = (rotation + r.degrees()) % 360,
            Action::Fold(f) => {
                plain.push(Action::Fold(FoldSpec::new(f.axis.rotated((360 - rotation) % 360), f.facing)))
            }
        }
    }
    let unrotated = sim::fold_sequence(&plain).map_err(|e| format!("{}: unrotated twin: {e}", seq()))?;
    let back = Isometry::rotation((360 - rotation) % 360);
    let local = HoleSpec {
        location: back.map_triangle(at).ok_or("rotation left the mesh")?,
        orientation: orientation.rotated((360 - rotation) % 360),
        ..hole
    };
    let plain_pattern = sim::unfold_all(&unrotated.punch(&[local]).map_err(|e| e.to_string())?);
    ensure(plain_pattern.rotated(rotation) == pattern, || format!("{}: rotation frames disagree", seq()))?;
    Ok(())
}

fn geometry_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut states = 0;
    let mut off_mesh = 0;
    while states < GEOMETRY_STATES {
        let g = rng.random_range(1..=9u8);
        let seq = taskgen::sequences(g).choose(&mut rng).unwrap().clone();
        let Ok(state) = sim::fold_sequence(seq.actions()) else {
            off_mesh += 1;
            continue;
        };
        check_state(&mut rng, seq.actions(), &state)?;
        states += 1;
    }
    Ok(format!("{states} random valid states, zero failures ({off_mesh} off-mesh draws skipped)"))
}

fn planning_oracle() -> Outcome {
    let tasks =
        taskgen::generate(&GeneratorConfig::new(Family::Planning, PLANNING_TASKS, 11)).map_err(|e| e.to_string())?;
    let mut times = Vec::with_capacity(tasks.len());
    let mut solved = 0;
    for task in &tasks {
        let start = Instant::now();
        let plan = oracle::solve_planning(task).map_err(|e| e.to_string())?;
        times.push(start.elapsed());
        let plan = plan.ok_or_else(|| format!("{}: no plan found", task.id))?;
        let outcome = oracle::verify_plan(&plan, task).map_err(|e| e.to_string())?;
        ensure(outcome.matches_target, || format!("{}: plan rejected: {:?}", task.id, outcome.rejection_reason))?;
        solved += 1;
    }
    times.sort();
    let median = times[times.len() / 2];
    let max = *times.last().unwrap();
    ensure(median < PLAN_MEDIAN_BUDGET && max < PLAN_MAX_BUDGET, || format!("median {median:?}, max {max:?}"))?;
    Ok(format!("{solved}/{} verified; median {median:.2?}, max {max:.2?}", tasks.len()))
}

fn metric_fixtures() -> Outcome {
    let tasks = taskgen::generate(&GeneratorConfig {
        min_holes: 1,
        max_holes: 2,
        ..GeneratorConfig::new(Family::Prediction, 90, 21)
    })
    .map_err(|e| e.to_string())?;
    let task = tasks.iter().find(|t| t.expected_pattern().len() == 2).ok_or("no task with two holes")?;
    let GroundTruth::Prediction(truth) = &task.ground_truth else { unreachable!() };
    let t = truth.holes.holes().to_vec();
    let g = t.len() as u32;
    let wrong =
        TriRef::all().map(|at| HoleSpec { location: at, ..t[0] }).find(|h| !t.contains(h)).ok_or("no free location")?;

    // (name, predicted holes, predicted steps, expected overall partial)
    let steps = truth.unfold_steps.clone();
    let cases: Vec<(&str, Vec<HoleSpec>, Vec<FoldSpec>, Score)> = vec![
        ("exact", t.clone(), steps.clone(), Score::ONE),
        ("exact reordered", t.iter().rev().copied().collect(), steps.clone(), Score::ONE),
        ("empty answer", vec![], steps.clone(), Score::ZERO),
        ("one of G", vec![t[0]], steps.clone(), Score::new(1, g)),
        ("duplicates", vec![t[0]; 3], steps.clone(), Score::new(1, 3)),
        ("all plus one wrong", [t.clone(), vec![wrong]].concat(), steps.clone(), Score::new(g, g + 1)),
        ("holes right, steps missing", t.clone(), vec![], Score::ONE),
        ("G=2 P=5 M=1", vec![t[0], wrong, wrong, wrong, wrong], steps.clone(), Score::new(1, 5)),
    ];
    for (name, holes, unfolding, want) in &cases {
        let answer = AnswerDoc::Prediction { unfolding: unfolding.clone(), holes: holes.clone() };
        let report = scoring::score_answer(task, Some(&answer), Modality::Visual).map_err(|e| e.to_string())?;
        ensure(report.overall_partial == *want, || format!("{name}: got {}, want {want}", report.overall_partial))?;
        ensure(report.exact_match == (report.unfold_exact && report.overall_partial.is_one()), || {
            format!("{name}: exact_match inconsistent")
        })?;
    }
    // Count-level fixtures, including the stated example and an empty truth.
    let direct = [
        ((2, 5, 1), Score::new(1, 5)),
        ((3, 1, 1), Score::new(1, 3)),
        ((0, 0, 0), Score::ONE),
        ((0, 2, 0), Score::ZERO),
        ((4, 4, 3), Score::new(3, 4)),
    ];
    for ((g, p, m), want) in direct {
        let got = scoring::HoleMatch { g, p, m }.score();
        ensure(got == want, || format!("G={g} P={p} M={m}: got {got}, want {want}"))?;
    }
    ensure(Score::new(1, 5).to_string() == "1/5", || "1/5 does not print exactly".into())?;
    Ok(format!("{} answer fixtures and {} count fixtures; G=2,P=5,M=1 -> 1/5", cases.len(), direct.len()))
}

fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn golden_tasks() -> Result<Vec<TaskInstance>, String> {
    let pick = |family, group, seed| {
        let cfg = GeneratorConfig { groups: vec![group], ..GeneratorConfig::new(family, 1, seed) };
        taskgen::generate(&cfg).map(|mut v| v.remove(0)).map_err(|e| e.to_string())
    };
    Ok(vec![
        pick(Family::Prediction, 3, 1)?,
        pick(Family::Prediction, 7, 2)?,
        pick(Family::Backward, 5, 3)?,
        pick(Family::Planning, 2, 4)?,
        pick(Family::Generalization, 5, 5)?,
    ])
}

fn codecs_and_golden() -> Outcome {
    let corpus: Vec<TaskInstance> = taskgen::standard_corpus(2024)
        .iter()
        .map(taskgen::generate)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?
        .into_iter()
        .flatten()
        .collect();
    for task in &corpus {
        let back = codecs::parse_task(&codecs::task_to_json(task)).map_err(|e| format!("{}: {e}", task.id))?;
        ensure(&back == task, || format!("{}: task round trip changed it", task.id))?;
        let answer = oracle::answer(task, LabelMode::Geometric).map_err(|e| e.to_string())?;
        let parsed = codecs::parse_answer(&codecs::answer_to_json(&answer)).map_err(|e| e.to_string())?;
        ensure(parsed == answer, || format!("{}: answer round trip changed it", task.id))?;
        let doc = text::encode_text(task, text::TextOptions::default()).map_err(|e| e.to_string())?;
        let reparsed: text::TextDocument = doc.to_string().parse().map_err(|e: pfold_core::Error| e.to_string())?;
        ensure(reparsed == doc, || format!("{}: text grid round trip changed it", task.id))?;
    }

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let workers = if run == "a" { "1" } else { "4" };
        let (ok, log) = pfold(&[
            "dataset",
            "--seed",
            "2024",
            "--formats",
            "text,2d,frames",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ])?;
        ensure(ok, || format!("dataset run failed: {log}"))?;
        let mut tree = read_tree(&out);
        tree.remove(Path::new("manifest.json"));
        trees.push(tree);
    }
    ensure(trees[0] == trees[1], || "two dataset runs wrote different bytes".into())?;

    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden");
    let mut files = 0;
    for task in golden_tasks()? {
        let opts = text::TextOptions { include_solution: true, ..Default::default() };
        let mut outputs = vec![
            (format!("{}.task.json", task.id), codecs::task_to_json(&task)),
            (format!("{}.txt", task.id), text::encode_text(&task, opts).map_err(|e| e.to_string())?.to_string()),
            (format!("{}.svg", task.id), svg::render_task(&task).map_err(|e| e.to_string())?),
        ];
        for (k, frame) in
            svg::render_task_steps(&task, LabelMode::Geometric).map_err(|e| e.to_string())?.into_iter().enumerate()
        {
            outputs.push((format!("{}.step{:02}.svg", task.id, k + 1), frame));
        }
        for (name, contents) in outputs {
            let want = fs::read_to_string(golden.join(&name)).map_err(|_| format!("missing golden {name}"))?;
            ensure(want == contents, || format!("{name} differs from golden"))?;
            files += 1;
        }
    }
    Ok(format!(
        "{} tasks round-trip; {} files byte-identical across two runs; {files} golden files match",
        corpus.len(),
        trees[0].len()
    ))
}

fn dataset_shapes() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (ok, log) = pfold(&["dataset", "--seed", "1", "--out", tmp.path().to_str().unwrap()])?;
    ensure(ok, || format!("dataset failed: {log}"))?;
    let files = read_tree(tmp.path());
    let mut by_family: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for path in files.keys() {
        let name = path.to_string_lossy();
        if !name.ends_with(".task.json") {
            continue;
        }
        let parts: Vec<String> = path.iter().map(|c| c.to_string_lossy().into_owned()).collect();
        let id = parts[2].trim_end_matches(".task.json");
        // Generalization ids carry the altered attribute after the group.
        let key = match parts[0].as_str() {
            "generalization" => format!("{}-{}", parts[1], id.split('-').nth(2).unwrap_or("")),
            _ => parts[1].clone(),
        };
        *by_family.entry(parts[0].clone()).or_default().entry(key).or_default() += 1;
    }
    let summary = |f: &str| -> (usize, usize, Vec<usize>) {
        let cells = by_family.get(f).cloned().unwrap_or_default();
        let sizes: Vec<usize> = cells.values().copied().collect();
        (sizes.iter().sum(), cells.len(), sizes)
    };
    let expect = [
        ("prediction", 315, 9, 35),
        ("planning", 400, 4, 100),
        ("generalization", 240, 12, 20),
        ("backward", 180, 9, 20),
    ];
    let mut line = Vec::new();
    for (family, total, cells, each) in expect {
        let (n, c, sizes) = summary(family);
        ensure(n == total && c == cells && sizes.iter().all(|&s| s == each), || {
            format!("{family}: {n} tasks in {c} cells {sizes:?}")
        })?;
        line.push(format!("{family} {n}"));
    }
    Ok(line.join(", "))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("enumeration counts", enumeration_counts),
        ("rotation tables", rotation_tables),
        ("self-consistency", self_consistency),
        ("geometry properties", geometry_properties),
        ("planning oracle", planning_oracle),
        ("metric fixtures", metric_fixtures),
        ("codecs and golden files", codecs_and_golden),
        ("dataset shapes", dataset_shapes),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
