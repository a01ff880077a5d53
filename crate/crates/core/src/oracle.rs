//! Exact solvers: prediction by simulation, planning by inverse search over
//! enumerated sequences, and the plan verifier.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::codecs::AnswerDoc;
use crate::error::Error;
use crate::rules::{self, Action, FoldSpec, RuleOptions};
use crate::sim::{self, FoldedState, HolePattern, HoleSpec, LabelMode};
use crate::taskgen::{self, GroundTruth, TaskInstance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionSolution {
    pub unfold_steps: Vec<FoldSpec>,
    pub pattern: HolePattern,
}

/// Simulate a prediction or backward task.
pub fn solve_prediction(task: &TaskInstance, mode: LabelMode) -> Result<PredictionSolution, Error> {
    if !matches!(task.ground_truth, GroundTruth::Prediction(_)) {
        return Err(Error::Input(format!("{} is not a prediction task", task.id)));
    }
    let state = sim::simulate(&task.actions, RuleOptions::default())?;
    Ok(PredictionSolution {
        unfold_steps: sim::derive_unfold_steps(task.actions.actions(), mode),
        pattern: sim::unfold_all(&state.punch(&task.holes)?),
    })
}

/// Simulate scenario B of a generalization task.
pub fn solve_generalization(task: &TaskInstance) -> Result<HolePattern, Error> {
    let GroundTruth::Generalization(g) = &task.ground_truth else {
        return Err(Error::Input(format!("{} is not a generalization task", task.id)));
    };
    let state = sim::simulate(&task.actions, RuleOptions::default())?;
    Ok(sim::unfold_all(&state.punch(&g.scenario_b_partial)?))
}

/// Folds and punches proposed for a planning task.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    pub folds: Vec<FoldSpec>,
    pub initial_holes: Vec<HoleSpec>,
}

impl Plan {
    pub fn actions(&self) -> Vec<Action> {
        self.folds.iter().copied().map(Action::Fold).collect()
    }

    pub fn to_answer(&self) -> AnswerDoc {
        AnswerDoc::Planning { folds: self.folds.clone(), initial_holes: self.initial_holes.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub executed_pattern: HolePattern,
    pub matches_target: bool,
    pub rejection_reason: Option<String>,
}

impl VerifyOutcome {
    fn rejected(reason: String) -> Self {
        VerifyOutcome {
            executed_pattern: HolePattern::default(),
            matches_target: false,
            rejection_reason: Some(reason),
        }
    }
}

/// Most punches a plan may use.
pub const MAX_PLAN_HOLES: usize = 2;

fn planning_truth(task: &TaskInstance) -> Result<(usize, &HolePattern), Error> {
    match &task.ground_truth {
        GroundTruth::Planning(t) => Ok((t.required_fold_count, &t.target_pattern)),
        _ => Err(Error::Input(format!("{} is not a planning task", task.id))),
    }
}

/// Execute a plan and compare with the task's target.
pub fn verify_plan(plan: &Plan, task: &TaskInstance) -> Result<VerifyOutcome, Error> {
    let (required, target) = planning_truth(task)?;
    Ok(verify_against(plan, required, target))
}

pub fn verify_against(plan: &Plan, required: usize, target: &HolePattern) -> VerifyOutcome {
    if plan.folds.len() != required {
        return VerifyOutcome::rejected(format!(
            "plan has {} folds but the task requires {required}",
            plan.folds.len()
        ));
    }
    if plan.initial_holes.is_empty() || plan.initial_holes.len() > MAX_PLAN_HOLES {
        return VerifyOutcome::rejected(format!(
            "plan punches {} holes; 1 to {MAX_PLAN_HOLES} allowed",
            plan.initial_holes.len()
        ));
    }
    let actions = plan.actions();
    match rules::violations(&actions, RuleOptions::default()) {
        Ok(v) if v.is_empty() => {}
        Ok(v) => return VerifyOutcome::rejected(Error::Rules(v).to_string()),
        Err(e) => return VerifyOutcome::rejected(e.to_string()),
    }
    let executed = sim::fold_sequence(&actions).and_then(|state| state.punch(&plan.initial_holes));
    match executed {
        Ok(punched) => {
            let executed_pattern = sim::unfold_all(&punched);
            VerifyOutcome { matches_target: &executed_pattern == target, executed_pattern, rejection_reason: None }
        }
        Err(e) => VerifyOutcome::rejected(e.to_string()),
    }
}

type Candidate = (Vec<FoldSpec>, FoldedState);

/// Folded states of every valid rotation-free sequence with `folds` folds,
/// in enumeration order. Cached.
fn candidates(folds: usize) -> &'static [Candidate] {
    static CACHE: [OnceLock<Vec<Candidate>>; 4] = [const { OnceLock::new() }; 4];
    CACHE[folds - 1].get_or_init(|| {
        taskgen::sequences(folds as u8)
            .iter()
            .filter_map(|seq| {
                let state = sim::fold_sequence(seq.actions()).ok()?;
                Some((seq.folds().collect(), state))
            })
            .collect()
    })
}

/// Punches reproducing `target` on a folded state, if at most
/// [`MAX_PLAN_HOLES`] suffice.
///
/// Each target hole sits in exactly one layer, which fixes the one punch
/// that can produce it; that punch's orbit must then be part of the target.
pub fn punches_for(state: &FoldedState, target: &HolePattern) -> Option<Vec<HoleSpec>> {
    let mut remaining: Vec<HoleSpec> = target.holes().to_vec();
    let mut punches = Vec::new();
    while let Some(&h) = remaining.first() {
        if punches.len() == MAX_PLAN_HOLES {
            return None;
        }
        let layer = state.layers().iter().find(|l| l.triangles.contains(h.location))?;
        let punch = HoleSpec {
            location: layer.pose.map_triangle(h.location)?,
            orientation: h.orientation.transformed(&layer.pose),
            ..h
        };
        for i in state.covering(punch.location) {
            let l = &state.layers()[i];
            let produced = HoleSpec {
                location: l.source_of(punch.location)?,
                orientation: punch.orientation.transformed(&l.pose.inverse()),
                ..punch
            };
            let k = remaining.iter().position(|r| *r == produced)?;
            remaining.swap_remove(k);
        }
        punches.push(punch);
    }
    punches.sort();
    Some(punches)
}

/// Search for a plan with `folds` folds producing `target`. Candidates are
/// tried in enumeration order, so the result is deterministic.
pub fn solve_pattern(target: &HolePattern, folds: usize) -> Option<Plan> {
    if target.is_empty() || !(1..=4).contains(&folds) {
        return None;
    }
    candidates(folds).iter().find_map(|(seq, state)| {
        punches_for(state, target).map(|initial_holes| Plan { folds: seq.clone(), initial_holes })
    })
}

/// Solve a planning task; `None` means no plan exists.
pub fn solve_planning(task: &TaskInstance) -> Result<Option<Plan>, Error> {
    let (required, target) = planning_truth(task)?;
    Ok(solve_pattern(target, required))
}

/// The oracle's answer document for any task.
pub fn answer(task: &TaskInstance, mode: LabelMode) -> Result<AnswerDoc, Error> {
    Ok(match &task.ground_truth {
        GroundTruth::Prediction(_) => {
            let s = solve_prediction(task, mode)?;
            AnswerDoc::Prediction { unfolding: s.unfold_steps, holes: s.pattern.holes().to_vec() }
        }
        GroundTruth::Planning(_) => solve_planning(task)?
            .ok_or_else(|| Error::Generation(format!("no plan exists for {}", task.id)))?
            .to_answer(),
        GroundTruth::Generalization(_) => {
            AnswerDoc::Generalization { holes: solve_generalization(task)?.holes().to_vec() }
        }
    })
}
