//! Answer scoring: exact match, partial hole accuracy with an
//! over-prediction penalty, per-attribute accuracy, unfold-step accuracy and
//! the error taxonomy.
//!
//! Every score is an exact ratio `M / (G + max(0, P − G))`, where `G` and `P`
//! count truth and predicted items and `M` is their multiset intersection.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::codecs::AnswerDoc;
use crate::error::Error;
use crate::oracle::{self, Plan};
use crate::rules::FoldSpec;
use crate::sim::{HoleAttribute, HoleSpec};
use crate::taskgen::{Family, GroundTruth, TaskInstance};

/// An exact score in `[0, 1]`, written as `"n/d"` (or `"0"`, `"1"`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(pub Ratio<u32>);

impl Score {
    pub const ZERO: Score = Score(Ratio::new_raw(0, 1));
    pub const ONE: Score = Score(Ratio::new_raw(1, 1));

    pub fn new(num: u32, den: u32) -> Score {
        Score(Ratio::new(num, den))
    }

    pub fn value(self) -> f64 {
        f64::from(*self.0.numer()) / f64::from(*self.0.denom())
    }

    pub fn is_one(self) -> bool {
        self == Score::ONE
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Score {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let r: Ratio<u32> = s.parse().map_err(|_| Error::Input(format!("bad score {s:?}")))?;
        if r > Ratio::from_integer(1) {
            return Err(Error::Input(format!("score {s} above 1")));
        }
        Ok(Score(r))
    }
}

impl Serialize for Score {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// How answers were given. Text answers carry no hole direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    #[default]
    Visual,
    Text,
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "visual" | "2d" => Ok(Modality::Visual),
            "text" => Ok(Modality::Text),
            _ => Err(Error::Input(format!("unknown modality {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleMatch {
    /// Truth count.
    pub g: u32,
    /// Predicted count.
    pub p: u32,
    /// Matched count.
    pub m: u32,
}

impl HoleMatch {
    /// `M / (G + max(0, P − G))`; an empty truth matched by an empty answer
    /// scores 1.
    pub fn score(self) -> Score {
        let den = self.g + self.p.saturating_sub(self.g);
        if den == 0 {
            Score::ONE
        } else {
            Score::new(self.m, den)
        }
    }
}

fn count32(n: usize) -> u32 {
    u32::try_from(n).expect("answer sizes fit in u32")
}

/// Multiset intersection size of two item lists.
pub fn multiset_match<K: Ord>(pred: impl IntoIterator<Item = K>, truth: impl IntoIterator<Item = K>) -> HoleMatch {
    let mut counts: BTreeMap<K, (u32, u32)> = BTreeMap::new();
    for k in pred {
        counts.entry(k).or_default().0 += 1;
    }
    for k in truth {
        counts.entry(k).or_default().1 += 1;
    }
    let (p, g, m) = counts.values().fold((0, 0, 0), |(p, g, m), &(a, b)| (p + a, g + b, m + a.min(b)));
    HoleMatch { g, p, m }
}

fn comparable(h: &HoleSpec, modality: Modality) -> (u8, u8, u16, u8) {
    let direction = match modality {
        Modality::Visual => h.orientation.degrees(),
        Modality::Text => 0,
    };
    (h.location.slot() as u8, h.shape as u8, direction, h.size as u8)
}

pub fn hole_match(pred: &[HoleSpec], truth: &[HoleSpec], modality: Modality) -> HoleMatch {
    multiset_match(pred.iter().map(|h| comparable(h, modality)), truth.iter().map(|h| comparable(h, modality)))
}

/// Overall partial accuracy on full hole tuples.
pub fn partial_accuracy(pred: &[HoleSpec], truth: &[HoleSpec]) -> Score {
    hole_match(pred, truth, Modality::Visual).score()
}

fn attribute_key(h: &HoleSpec, attribute: HoleAttribute) -> u16 {
    match attribute {
        HoleAttribute::Shape => h.shape as u16,
        HoleAttribute::Size => h.size as u16,
        HoleAttribute::Location => h.location.slot() as u16,
        HoleAttribute::Direction => h.orientation.degrees(),
    }
}

/// Partial accuracy on one attribute's values, matched as free multisets.
pub fn field_partial_accuracy(
    pred: &[HoleSpec],
    truth: &[HoleSpec],
    attribute: HoleAttribute,
    modality: Modality,
) -> Result<Score, Error> {
    if modality == Modality::Text && attribute == HoleAttribute::Direction {
        return Err(Error::Input("text answers carry no hole direction".into()));
    }
    Ok(multiset_match(
        pred.iter().map(|h| attribute_key(h, attribute)),
        truth.iter().map(|h| attribute_key(h, attribute)),
    )
    .score())
}

/// Attributes scoreable under a modality.
pub fn scored_attributes(modality: Modality) -> Vec<HoleAttribute> {
    HoleAttribute::ALL.into_iter().filter(|&a| modality == Modality::Visual || a != HoleAttribute::Direction).collect()
}

/// Exactness and positional step accuracy of unfold labels.
pub fn unfold_accuracy(pred: &[FoldSpec], truth: &[FoldSpec]) -> (bool, Score) {
    let m = count32(pred.iter().zip(truth).filter(|(a, b)| a == b).count());
    let score = HoleMatch { g: count32(truth.len()), p: count32(pred.len()), m }.score();
    (pred == truth, score)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HoleCondition {
    Extra,
    Missing,
    Equal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnfoldStrategy {
    ExtraUnfolds,
    FoldDepth,
    ExactUnfolds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ErrorClass {
    pub holes: HoleCondition,
    pub strategy: UnfoldStrategy,
}

/// Bucket a wrong answer by hole count and unfolding strategy.
///
/// More steps than needed is `ExtraUnfolds`. Otherwise a right hole count
/// with wrong holes points at stacking depth (`FoldDepth`); a wrong hole
/// count is `ExactUnfolds` when the steps were right and `FoldDepth` when not.
pub fn classify_error(
    pred_holes: &[HoleSpec],
    truth_holes: &[HoleSpec],
    pred_steps: &[FoldSpec],
    truth_steps: &[FoldSpec],
) -> ErrorClass {
    let holes = match pred_holes.len().cmp(&truth_holes.len()) {
        std::cmp::Ordering::Greater => HoleCondition::Extra,
        std::cmp::Ordering::Less => HoleCondition::Missing,
        std::cmp::Ordering::Equal => HoleCondition::Equal,
    };
    let strategy = if pred_steps.len() > truth_steps.len() {
        UnfoldStrategy::ExtraUnfolds
    } else if holes == HoleCondition::Equal || pred_steps != truth_steps {
        UnfoldStrategy::FoldDepth
    } else {
        UnfoldStrategy::ExactUnfolds
    };
    ErrorClass { holes, strategy }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub task_id: String,
    pub family: Family,
    pub group: u8,
    /// The answer was missing, unparseable or of the wrong kind.
    pub parse_failure: bool,
    pub exact_match: bool,
    pub overall_partial: Score,
    pub field_partial: BTreeMap<HoleAttribute, Score>,
    pub unfold_exact: bool,
    pub unfold_step_accuracy: Score,
    pub extra_holes: bool,
    pub missing_holes: bool,
    /// `None` for exact matches.
    pub error_class: Option<ErrorClass>,
    /// Why a planning answer was rejected before execution.
    pub plan_rejection: Option<String>,
}

/// Score predicted holes and steps against the truth.
pub fn score_parts(
    task: &TaskInstance,
    pred_holes: &[HoleSpec],
    truth_holes: &[HoleSpec],
    pred_steps: &[FoldSpec],
    truth_steps: &[FoldSpec],
    modality: Modality,
) -> ScoreReport {
    let overall = hole_match(pred_holes, truth_holes, modality).score();
    let field_partial = scored_attributes(modality)
        .into_iter()
        .map(|a| {
            let s = field_partial_accuracy(pred_holes, truth_holes, a, modality).expect("attribute is scoreable");
            (a, s)
        })
        .collect();
    let (unfold_exact, unfold_step_accuracy) = unfold_accuracy(pred_steps, truth_steps);
    let exact_match = overall.is_one() && unfold_exact;
    ScoreReport {
        task_id: task.id.clone(),
        family: task.family,
        group: task.group,
        parse_failure: false,
        exact_match,
        overall_partial: overall,
        field_partial,
        unfold_exact,
        unfold_step_accuracy,
        extra_holes: pred_holes.len() > truth_holes.len(),
        missing_holes: pred_holes.len() < truth_holes.len(),
        error_class: (!exact_match).then(|| classify_error(pred_holes, truth_holes, pred_steps, truth_steps)),
        plan_rejection: None,
    }
}

/// Zero row for an answer that could not be used.
pub fn failure_report(task: &TaskInstance, modality: Modality) -> ScoreReport {
    ScoreReport {
        parse_failure: true,
        unfold_exact: false,
        unfold_step_accuracy: Score::ZERO,
        overall_partial: Score::ZERO,
        field_partial: scored_attributes(modality).into_iter().map(|a| (a, Score::ZERO)).collect(),
        exact_match: false,
        missing_holes: !task.expected_pattern().is_empty(),
        extra_holes: false,
        error_class: None,
        plan_rejection: None,
        task_id: task.id.clone(),
        family: task.family,
        group: task.group,
    }
}

/// Score an answer. Planning answers are executed by the plan verifier and
/// scored on the pattern they produce; a rejected plan scores zero.
pub fn score_answer(task: &TaskInstance, answer: Option<&AnswerDoc>, modality: Modality) -> Result<ScoreReport, Error> {
    let Some(answer) = answer.filter(|a| a.fits(task.family)) else {
        return Ok(failure_report(task, modality));
    };
    let truth = task.expected_pattern().holes();
    Ok(match (answer, &task.ground_truth) {
        (AnswerDoc::Prediction { unfolding, holes }, GroundTruth::Prediction(t)) => {
            score_parts(task, holes, truth, unfolding, &t.unfold_steps, modality)
        }
        (AnswerDoc::Generalization { holes }, GroundTruth::Generalization(_)) => {
            score_parts(task, holes, truth, &[], &[], modality)
        }
        (AnswerDoc::Planning { folds, initial_holes }, GroundTruth::Planning(_)) => {
            let plan = Plan { folds: folds.clone(), initial_holes: initial_holes.clone() };
            let outcome = oracle::verify_plan(&plan, task)?;
            let mut report = score_parts(task, outcome.executed_pattern.holes(), truth, &[], &[], modality);
            if let Some(reason) = outcome.rejection_reason {
                report.unfold_exact = false;
                report.unfold_step_accuracy = Score::ZERO;
                report.exact_match = false;
                report.error_class = Some(classify_error(outcome.executed_pattern.holes(), truth, &[], &[]));
                report.plan_rejection = Some(reason);
            }
            report
        }
        _ => unreachable!("answer kind checked against family"),
    })
}

/// Per-group rollup; percentages in `[0, 100]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub family: Family,
    pub group: u8,
    pub tasks: usize,
    pub parse_failures: usize,
    pub exact_match_pct: f64,
    pub overall_partial_pct: f64,
    pub extra_holes_pct: f64,
    pub missing_holes_pct: f64,
    pub unfold_exact_pct: f64,
    pub unfold_step_pct: f64,
    pub field_pct: BTreeMap<HoleAttribute, f64>,
    pub error_classes: BTreeMap<String, usize>,
}

fn pct(sum: f64, n: usize) -> f64 {
    // Two decimals keep reports stable and readable.
    (sum * 10000.0 / n as f64).round() / 100.0
}

pub fn summarize(reports: &[ScoreReport]) -> Vec<GroupSummary> {
    let mut groups: BTreeMap<(Family, u8), Vec<&ScoreReport>> = BTreeMap::new();
    for r in reports {
        groups.entry((r.family, r.group)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((family, group), rows)| {
            let n = rows.len();
            let frac = |f: &dyn Fn(&ScoreReport) -> f64| pct(rows.iter().map(|r| f(r)).sum(), n);
            let flag = |b: bool| if b { 1.0 } else { 0.0 };
            let mut field_pct = BTreeMap::new();
            for a in HoleAttribute::ALL {
                if rows.iter().all(|r| r.field_partial.contains_key(&a)) {
                    field_pct.insert(a, frac(&|r| r.field_partial[&a].value()));
                }
            }
            let mut error_classes = BTreeMap::new();
            for r in &rows {
                if let Some(c) = r.error_class {
                    *error_classes.entry(format!("{:?}/{:?}", c.holes, c.strategy)).or_default() += 1;
                }
            }
            GroupSummary {
                family,
                group,
                tasks: n,
                parse_failures: rows.iter().filter(|r| r.parse_failure).count(),
                exact_match_pct: frac(&|r| flag(r.exact_match)),
                overall_partial_pct: frac(&|r| r.overall_partial.value()),
                extra_holes_pct: frac(&|r| flag(r.extra_holes)),
                missing_holes_pct: frac(&|r| flag(r.missing_holes)),
                unfold_exact_pct: frac(&|r| flag(r.unfold_exact)),
                unfold_step_pct: frac(&|r| r.unfold_step_accuracy.value()),
                field_pct,
                error_classes,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Orientation, TriRef};
    use crate::rules::FoldAxis;
    use crate::sim::{Shape, Size};

    fn hole(shape: Shape, slot: usize) -> HoleSpec {
        HoleSpec::new(shape, Size::Small, Orientation::new(0).unwrap(), TriRef::from_slot(slot))
    }

    fn holes(n: usize, offset: usize) -> Vec<HoleSpec> {
        (0..n).map(|i| hole(Shape::Circle, i + offset)).collect()
    }

    #[test]
    fn partial_formula() {
        assert_eq!(partial_accuracy(&holes(4, 0), &holes(4, 0)), Score::ONE);
        // G=2, P=5, M=1.
        let pred: Vec<HoleSpec> = holes(1, 0).into_iter().chain(holes(4, 10)).collect();
        assert_eq!(partial_accuracy(&pred, &holes(2, 0)), Score::new(1, 5));
        // G=3, P=1, M=1.
        assert_eq!(partial_accuracy(&holes(1, 0), &holes(3, 0)), Score::new(1, 3));
        assert_eq!(partial_accuracy(&[], &[]), Score::ONE);
        assert_eq!(partial_accuracy(&[], &holes(2, 0)), Score::ZERO);
    }

    #[test]
    fn duplicates_count_once_each() {
        let dup = vec![hole(Shape::Star, 3), hole(Shape::Star, 3)];
        assert_eq!(partial_accuracy(&dup, &[hole(Shape::Star, 3)]), Score::new(1, 2));
        assert_eq!(partial_accuracy(&dup, &dup), Score::ONE);
    }

    #[test]
    fn field_scores() {
        let truth = vec![hole(Shape::Circle, 0), hole(Shape::Circle, 1)];
        let pred = vec![hole(Shape::Circle, 0), hole(Shape::Star, 1)];
        let f = |p: &[HoleSpec], a| field_partial_accuracy(p, &truth, a, Modality::Visual).unwrap();
        assert_eq!(f(&pred, HoleAttribute::Shape), Score::new(1, 2));
        assert_eq!(f(&pred, HoleAttribute::Size), Score::ONE);
        let three = vec![hole(Shape::Circle, 5), hole(Shape::Star, 6), hole(Shape::Star, 7)];
        let t2 = vec![hole(Shape::Circle, 8), hole(Shape::Triangle, 9)];
        assert_eq!(
            field_partial_accuracy(&three, &t2, HoleAttribute::Shape, Modality::Visual).unwrap(),
            Score::new(1, 3)
        );
        assert!(field_partial_accuracy(&pred, &truth, HoleAttribute::Direction, Modality::Text).is_err());
    }

    #[test]
    fn unfold_scores() {
        let h1 = FoldSpec::forward(FoldAxis::H1);
        let h2 = FoldSpec::forward(FoldAxis::H2);
        let v1 = FoldSpec::forward(FoldAxis::V1);
        let v2 = FoldSpec::forward(FoldAxis::V2);
        assert_eq!(unfold_accuracy(&[h1, v1], &[h1, v1]), (true, Score::ONE));
        assert_eq!(unfold_accuracy(&[h1, h2], &[h1, v1]), (false, Score::new(1, 2)));
        assert_eq!(unfold_accuracy(&[h1, v1, v2], &[h1]), (false, Score::new(1, 3)));
    }

    #[test]
    fn error_buckets() {
        let h1 = FoldSpec::forward(FoldAxis::H1);
        let v1 = FoldSpec::forward(FoldAxis::V1);
        let c = classify_error(&holes(3, 0), &holes(2, 0), &[h1, v1], &[h1]);
        assert_eq!((c.holes, c.strategy), (HoleCondition::Extra, UnfoldStrategy::ExtraUnfolds));
        let c = classify_error(&holes(2, 5), &holes(2, 0), &[h1], &[h1]);
        assert_eq!((c.holes, c.strategy), (HoleCondition::Equal, UnfoldStrategy::FoldDepth));
        let c = classify_error(&holes(1, 0), &holes(2, 0), &[h1], &[h1]);
        assert_eq!((c.holes, c.strategy), (HoleCondition::Missing, UnfoldStrategy::ExactUnfolds));
    }

    #[test]
    fn text_ignores_direction() {
        let a = hole(Shape::Star, 4);
        let b = HoleSpec { orientation: Orientation::new(180).unwrap(), ..a };
        assert_eq!(hole_match(&[a], &[b], Modality::Visual).m, 0);
        assert_eq!(hole_match(&[a], &[b], Modality::Text).m, 1);
    }

    #[test]
    fn score_strings() {
        assert_eq!(Score::new(2, 10).to_string(), "1/5");
        assert_eq!("1/5".parse::<Score>().unwrap(), Score::new(1, 5));
        assert!("3/2".parse::<Score>().is_err());
        assert_eq!(Score::ONE.to_string(), "1");
    }
}
