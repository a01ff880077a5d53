//! Seeded task generation for the four task families.
//!
//! Every task draws from its own ChaCha8 stream, seeded from the run seed
//! and the task's coordinates (family, group, attribute, index). Tasks are
//! therefore independent of generation order, and parallel runs match
//! serial ones.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::mesh::{Orientation, TriRef};
use crate::rules::{self, ActionSequence, Facing, FoldSpec, RuleOptions};
use crate::sim::{self, FoldedState, HoleAttribute, HolePattern, HoleSpec, LabelMode, Shape, Size};

/// Attempts per task before giving up.
pub const MAX_RETRIES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Prediction,
    Backward,
    Planning,
    Generalization,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Prediction, Family::Backward, Family::Planning, Family::Generalization];

    pub fn name(self) -> &'static str {
        match self {
            Family::Prediction => "prediction",
            Family::Backward => "backward",
            Family::Planning => "planning",
            Family::Generalization => "generalization",
        }
    }

    /// Groups a family can be generated for.
    pub fn allowed_groups(self) -> &'static [u8] {
        match self {
            Family::Prediction | Family::Backward => &[1, 2, 3, 4, 5, 6, 7, 8, 9],
            Family::Planning => &[1, 2, 3, 4],
            Family::Generalization => &[1, 2, 5],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::Input(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionTruth {
    pub unfold_steps: Vec<FoldSpec>,
    pub holes: HolePattern,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanningTruth {
    pub required_fold_count: usize,
    pub target_pattern: HolePattern,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralizationTruth {
    /// Unfolded result of the task's own holes (scenario A).
    pub scenario_a: HolePattern,
    /// Holes punched in scenario B, for which the result is asked.
    pub scenario_b_partial: Vec<HoleSpec>,
    pub answer_pattern: HolePattern,
    pub altered_attribute: HoleAttribute,
}

/// Ground truth, shaped by family. Prediction and backward tasks share one
/// shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum GroundTruth {
    Prediction(PredictionTruth),
    Planning(PlanningTruth),
    Generalization(GeneralizationTruth),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TaskInstance {
    pub id: String,
    pub family: Family,
    pub group: u8,
    pub actions: ActionSequence,
    /// Holes punched on the folded sheet, at display-frame positions.
    pub holes: Vec<HoleSpec>,
    pub ground_truth: GroundTruth,
    pub seed: u64,
}

impl TaskInstance {
    /// The hole pattern a solver must produce.
    pub fn expected_pattern(&self) -> &HolePattern {
        match &self.ground_truth {
            GroundTruth::Prediction(t) => &t.holes,
            GroundTruth::Planning(t) => &t.target_pattern,
            GroundTruth::Generalization(t) => &t.answer_pattern,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub family: Family,
    pub groups: Vec<u8>,
    /// Total tasks; split evenly across groups (and attributes).
    pub count: usize,
    pub seed: u64,
    pub min_holes: usize,
    pub max_holes: usize,
    pub shape_pool: Vec<Shape>,
    /// Facing forced onto every fold; `None` keeps the enumerated facing.
    pub facing: Option<Facing>,
    /// Generalization only: which attribute categories to cover.
    pub attributes: Vec<HoleAttribute>,
    /// One task per enumerated sequence instead of `count` samples.
    pub exhaustive: bool,
    pub label_mode: LabelMode,
}

impl GeneratorConfig {
    /// Defaults for a family: all its groups, family-specific hole counts
    /// and facing.
    pub fn new(family: Family, count: usize, seed: u64) -> Self {
        let (min_holes, max_holes) = match family {
            Family::Planning => (1, 2),
            _ => (1, 3),
        };
        let facing = match family {
            Family::Backward => Facing::Backward,
            _ => Facing::Forward,
        };
        GeneratorConfig {
            family,
            groups: family.allowed_groups().to_vec(),
            count,
            seed,
            min_holes,
            max_holes,
            shape_pool: Shape::ALL.to_vec(),
            facing: Some(facing),
            attributes: HoleAttribute::ALL.to_vec(),
            exhaustive: false,
            label_mode: LabelMode::Geometric,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let allowed = self.family.allowed_groups();
        if self.groups.is_empty() {
            return Err(Error::Input("no groups selected".into()));
        }
        if let Some(g) = self.groups.iter().find(|g| !allowed.contains(g)) {
            return Err(Error::Input(format!("group {g} is not available for {} tasks", self.family)));
        }
        let hole_cap = if self.family == Family::Planning { 2 } else { 3 };
        if self.min_holes == 0 || self.min_holes > self.max_holes || self.max_holes > hole_cap {
            return Err(Error::Input(format!(
                "hole range {}..={} outside 1..={hole_cap}",
                self.min_holes, self.max_holes
            )));
        }
        if self.family == Family::Backward && self.facing != Some(Facing::Backward) {
            return Err(Error::Input("backward tasks fold every crease backward".into()));
        }
        if self.family == Family::Generalization && self.attributes.is_empty() {
            return Err(Error::Input("no generalization attributes selected".into()));
        }
        for &g in &self.groups {
            if self.pool_for(g).len() < 2 {
                return Err(Error::Input(format!("shape pool too small for group {g}")));
            }
        }
        Ok(())
    }

    /// Shape pool for a group; rotation groups drop the rotation-symmetric
    /// circle and square.
    pub fn pool_for(&self, group: u8) -> Vec<Shape> {
        self.shape_pool.iter().copied().filter(|s| group < 5 || !matches!(s, Shape::Circle | Shape::Square)).collect()
    }
}

/// The four standard corpora: 315 prediction, 180 backward, 400 planning
/// and 240 generalization tasks.
pub fn standard_corpus(seed: u64) -> Vec<GeneratorConfig> {
    vec![
        GeneratorConfig::new(Family::Prediction, 315, seed),
        GeneratorConfig::new(Family::Backward, 180, seed),
        GeneratorConfig::new(Family::Planning, 400, seed),
        GeneratorConfig::new(Family::Generalization, 240, seed),
    ]
}

/// Coordinates of one task within a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaskSlot {
    pub group: u8,
    pub attribute: Option<HoleAttribute>,
    pub index: usize,
    /// In exhaustive runs, the enumerated sequence to use.
    pub sequence: Option<usize>,
}

/// All task slots of a run, in output order.
pub fn plan_slots(cfg: &GeneratorConfig) -> Result<Vec<TaskSlot>, Error> {
    cfg.validate()?;
    let attributes: Vec<Option<HoleAttribute>> = match cfg.family {
        Family::Generalization => cfg.attributes.iter().copied().map(Some).collect(),
        _ => vec![None],
    };
    let mut slots = Vec::new();
    if cfg.exhaustive {
        for &group in &cfg.groups {
            for &attribute in &attributes {
                let on_mesh =
                    sequences(group).iter().enumerate().filter(|(_, seq)| sim::fold_sequence(seq.actions()).is_ok());
                for (index, (i, _)) in on_mesh.enumerate() {
                    slots.push(TaskSlot { group, attribute, index, sequence: Some(i) });
                }
            }
        }
        return Ok(slots);
    }
    let cells: Vec<(u8, Option<HoleAttribute>)> =
        cfg.groups.iter().flat_map(|&g| attributes.iter().map(move |&a| (g, a))).collect();
    for (k, &(group, attribute)) in cells.iter().enumerate() {
        let n = cfg.count / cells.len() + usize::from(k < cfg.count % cells.len());
        for index in 0..n {
            slots.push(TaskSlot { group, attribute, index, sequence: None });
        }
    }
    Ok(slots)
}

/// Generate every task of a run, in slot order.
pub fn generate(cfg: &GeneratorConfig) -> Result<Vec<TaskInstance>, Error> {
    plan_slots(cfg)?.iter().map(|slot| generate_slot(cfg, slot)).collect()
}

pub fn gen_prediction(cfg: &GeneratorConfig) -> Result<Vec<TaskInstance>, Error> {
    expect_family(cfg, Family::Prediction)?;
    generate(cfg)
}

pub fn gen_backward(cfg: &GeneratorConfig) -> Result<Vec<TaskInstance>, Error> {
    expect_family(cfg, Family::Backward)?;
    generate(cfg)
}

pub fn gen_planning(cfg: &GeneratorConfig) -> Result<Vec<TaskInstance>, Error> {
    expect_family(cfg, Family::Planning)?;
    generate(cfg)
}

pub fn gen_generalization(cfg: &GeneratorConfig, attribute: HoleAttribute) -> Result<Vec<TaskInstance>, Error> {
    expect_family(cfg, Family::Generalization)?;
    let cfg = GeneratorConfig { attributes: vec![attribute], ..cfg.clone() };
    generate(&cfg)
}

fn expect_family(cfg: &GeneratorConfig, family: Family) -> Result<(), Error> {
    if cfg.family != family {
        return Err(Error::Input(format!("config is for {} tasks, not {family}", cfg.family)));
    }
    Ok(())
}

/// Valid sequences of a group, cached.
pub fn sequences(group: u8) -> &'static [ActionSequence] {
    static CACHE: [OnceLock<Vec<ActionSequence>>; 9] = [const { OnceLock::new() }; 9];
    CACHE[usize::from(group - 1)]
        .get_or_init(|| rules::enumerate(group, RuleOptions::default()).expect("group in range"))
}

/// Seed of one task's random stream. Kept below 2^53 so every JSON reader
/// holds it exactly.
pub fn child_seed(seed: u64, family: Family, slot: &TaskSlot) -> u64 {
    let attribute = slot.attribute.map_or(0, |a| a as u64 + 1);
    let mixed = [family as u64, u64::from(slot.group), attribute, slot.index as u64]
        .into_iter()
        .fold(splitmix(seed), |acc, v| splitmix(acc ^ v));
    mixed & ((1 << 53) - 1)
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn task_id(family: Family, slot: &TaskSlot) -> String {
    match slot.attribute {
        Some(a) => format!("{family}-g{}-{a}-{:04}", slot.group, slot.index),
        None => format!("{family}-g{}-{:04}", slot.group, slot.index),
    }
}

pub fn generate_slot(cfg: &GeneratorConfig, slot: &TaskSlot) -> Result<TaskInstance, Error> {
    let seed = child_seed(cfg.seed, cfg.family, slot);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = cfg.pool_for(slot.group);
    let candidates = sequences(slot.group);
    for _ in 0..MAX_RETRIES {
        let seq = match slot.sequence {
            Some(i) => &candidates[i],
            None => candidates.choose(&mut rng).expect("every group has sequences"),
        };
        let seq = match cfg.facing {
            Some(f) => seq.with_facing(f),
            None => seq.clone(),
        };
        let Ok(state) = sim::fold_sequence(seq.actions()) else {
            continue;
        };
        let n = rng.random_range(cfg.min_holes..=cfg.max_holes);
        let Some(holes) = sample_holes(&mut rng, &state, n, &pool) else {
            continue;
        };
        let ground_truth = match cfg.family {
            Family::Prediction | Family::Backward => GroundTruth::Prediction(PredictionTruth {
                unfold_steps: sim::derive_unfold_steps(seq.actions(), cfg.label_mode),
                holes: sim::unfold_all(&state.punch(&holes)?),
            }),
            Family::Planning => GroundTruth::Planning(PlanningTruth {
                required_fold_count: seq.fold_count(),
                target_pattern: sim::unfold_all(&state.punch(&holes)?),
            }),
            Family::Generalization => {
                let attribute = slot.attribute.expect("generalization slots carry an attribute");
                let Some(altered) = alter_holes(&mut rng, &state, &holes, attribute, &pool) else {
                    continue;
                };
                GroundTruth::Generalization(GeneralizationTruth {
                    scenario_a: sim::unfold_all(&state.punch(&holes)?),
                    answer_pattern: sim::unfold_all(&state.punch(&altered)?),
                    scenario_b_partial: altered,
                    altered_attribute: attribute,
                })
            }
        };
        return Ok(TaskInstance {
            id: task_id(cfg.family, slot),
            family: cfg.family,
            group: slot.group,
            actions: seq,
            holes,
            ground_truth,
            seed,
        });
    }
    Err(Error::Generation(format!("no valid task for {} after {MAX_RETRIES} attempts", task_id(cfg.family, slot))))
}

fn random_orientation(rng: &mut ChaCha8Rng) -> Orientation {
    *Orientation::ALL.choose(rng).expect("non-empty")
}

fn random_size(rng: &mut ChaCha8Rng) -> Size {
    if rng.random_bool(0.5) {
        Size::Small
    } else {
        Size::Large
    }
}

/// Up to `n` holes at distinct covered positions of the folded sheet.
pub fn sample_holes(rng: &mut ChaCha8Rng, state: &FoldedState, n: usize, pool: &[Shape]) -> Option<Vec<HoleSpec>> {
    let positions: Vec<TriRef> = state.active_region().iter().collect();
    if positions.is_empty() {
        return None;
    }
    let chosen: Vec<TriRef> = positions.choose_multiple(rng, n.min(positions.len())).copied().collect();
    Some(
        chosen
            .into_iter()
            .map(|location| {
                let shape = *pool.choose(rng).expect("validated pool");
                let size = random_size(rng);
                let orientation = random_orientation(rng);
                HoleSpec::new(shape, size, orientation, location)
            })
            .collect(),
    )
}

/// Scenario B holes: each hole of `holes` with `attribute` changed. New
/// locations keep the original's layer coverage so the answer differs from
/// scenario A only through the altered attribute.
pub fn alter_holes(
    rng: &mut ChaCha8Rng,
    state: &FoldedState,
    holes: &[HoleSpec],
    attribute: HoleAttribute,
    pool: &[Shape],
) -> Option<Vec<HoleSpec>> {
    let mut out: Vec<HoleSpec> = Vec::with_capacity(holes.len());
    for h in holes {
        let altered = match attribute {
            HoleAttribute::Shape => {
                let others: Vec<Shape> = pool.iter().copied().filter(|&s| s != h.shape).collect();
                HoleSpec { shape: *others.choose(rng)?, ..*h }
            }
            HoleAttribute::Size => HoleSpec {
                size: match h.size {
                    Size::Small => Size::Large,
                    Size::Large => Size::Small,
                },
                ..*h
            },
            HoleAttribute::Direction => {
                let others: Vec<Orientation> = Orientation::ALL.into_iter().filter(|&o| o != h.orientation).collect();
                HoleSpec { orientation: *others.choose(rng)?, ..*h }
            }
            HoleAttribute::Location => {
                let depth = state.covering(h.location).len();
                let taken = |t: TriRef| holes.iter().chain(&out).any(|o| o.location == t);
                let options: Vec<TriRef> =
                    state.active_region().iter().filter(|&t| !taken(t) && state.covering(t).len() == depth).collect();
                HoleSpec { location: *options.choose(rng)?, ..*h }
            }
        };
        out.push(altered);
    }
    Some(out)
}

/// Recompute ground truth from a task's actions and holes.
pub fn regenerate_truth(task: &TaskInstance, mode: LabelMode) -> Result<GroundTruth, Error> {
    let state = sim::fold_sequence(task.actions.actions())?;
    let unfold = |holes: &[HoleSpec]| -> Result<HolePattern, Error> { Ok(sim::unfold_all(&state.punch(holes)?)) };
    Ok(match &task.ground_truth {
        GroundTruth::Prediction(_) => GroundTruth::Prediction(PredictionTruth {
            unfold_steps: sim::derive_unfold_steps(task.actions.actions(), mode),
            holes: unfold(&task.holes)?,
        }),
        GroundTruth::Planning(_) => GroundTruth::Planning(PlanningTruth {
            required_fold_count: task.actions.fold_count(),
            target_pattern: unfold(&task.holes)?,
        }),
        GroundTruth::Generalization(g) => GroundTruth::Generalization(GeneralizationTruth {
            scenario_a: unfold(&task.holes)?,
            scenario_b_partial: g.scenario_b_partial.clone(),
            answer_pattern: unfold(&g.scenario_b_partial)?,
            altered_attribute: g.altered_attribute,
        }),
    })
}
