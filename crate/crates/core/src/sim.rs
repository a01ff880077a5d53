//! The folding engine: layered sheet state, folds, rotations, punching and
//! unfolding.
//!
//! A [`FoldedState`] is a stack of rigid layers. Each layer owns a set of
//! original triangles and a pose mapping original coordinates to where the
//! layer currently lies. Folding splits every layer along the crease,
//! mirrors the moving parts and restacks them; rotating turns the whole
//! stack about the sheet center. States are immutable values.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::mesh::{CreaseLine, Isometry, Orientation, Point, SheetMesh, TriRef, TriSet};
use crate::rules::{self, Action, ActionSequence, Facing, FoldSpec, RotationSpec, RuleOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle,
    Square,
    Triangle,
    Trapezoid,
    Star,
    Letter,
    Text,
    Ellipse,
    Rectangle,
}

impl Shape {
    pub const ALL: [Shape; 9] = [
        Shape::Circle,
        Shape::Square,
        Shape::Triangle,
        Shape::Trapezoid,
        Shape::Star,
        Shape::Letter,
        Shape::Text,
        Shape::Ellipse,
        Shape::Rectangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Circle => "circle",
            Shape::Square => "square",
            Shape::Triangle => "triangle",
            Shape::Trapezoid => "trapezoid",
            Shape::Star => "star",
            Shape::Letter => "letter",
            Shape::Text => "text",
            Shape::Ellipse => "ellipse",
            Shape::Rectangle => "rectangle",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Shape::ALL
            .into_iter()
            .find(|shape| shape.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown shape {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Size {
    Small,
    Large,
}

/// The four attributes that describe a hole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HoleAttribute {
    Shape,
    Size,
    Location,
    Direction,
}

impl HoleAttribute {
    pub const ALL: [HoleAttribute; 4] =
        [HoleAttribute::Shape, HoleAttribute::Size, HoleAttribute::Location, HoleAttribute::Direction];

    pub fn name(self) -> &'static str {
        match self {
            HoleAttribute::Shape => "shape",
            HoleAttribute::Size => "size",
            HoleAttribute::Location => "location",
            HoleAttribute::Direction => "direction",
        }
    }
}

impl fmt::Display for HoleAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HoleAttribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        HoleAttribute::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown hole attribute {s:?}")))
    }
}

/// One hole: what was punched and where.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleSpec {
    pub shape: Shape,
    pub size: Size,
    #[serde(rename = "orientation_deg")]
    pub orientation: Orientation,
    #[serde(rename = "position")]
    pub location: TriRef,
}

impl HoleSpec {
    pub fn new(shape: Shape, size: Size, orientation: Orientation, location: TriRef) -> Self {
        HoleSpec { shape, size, orientation, location }
    }

    fn sort_key(&self) -> (TriRef, Shape, Size, Orientation) {
        (self.location, self.shape, self.size, self.orientation)
    }
}

/// A multiset of holes in the display frame, kept in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HolePattern(Vec<HoleSpec>);

impl HolePattern {
    pub fn new(mut holes: Vec<HoleSpec>) -> Self {
        holes.sort_by_key(HoleSpec::sort_key);
        HolePattern(holes)
    }

    pub fn holes(&self) -> &[HoleSpec] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Rotate every hole (position and direction) about the sheet center.
    pub fn rotated(&self, ccw_degrees: u16) -> HolePattern {
        let r = Isometry::rotation(ccw_degrees);
        HolePattern::new(
            self.0
                .iter()
                .map(|h| HoleSpec {
                    location: r.map_triangle(h.location).expect("mesh is closed under quarter turns"),
                    orientation: h.orientation.transformed(&r),
                    ..*h
                })
                .collect(),
        )
    }
}

/// A rigid piece of the sheet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    /// Original-sheet triangles carried by this layer.
    pub triangles: TriSet,
    /// Original coordinates to current physical coordinates.
    pub pose: Isometry,
    footprint: TriSet,
}

impl Layer {
    fn new(triangles: TriSet, pose: Isometry) -> Self {
        let footprint = triangles.iter().map(|t| pose.map_triangle(t).expect("layers stay on the mesh")).collect();
        Layer { triangles, pose, footprint }
    }

    /// Physical positions this layer occupies.
    pub fn footprint(&self) -> TriSet {
        self.footprint
    }

    /// Original triangle lying at physical position `at`, if this layer covers it.
    pub fn source_of(&self, at: TriRef) -> Option<TriRef> {
        if !self.footprint.contains(at) {
            return None;
        }
        self.pose.inverse().map_triangle(at)
    }
}

/// The sheet after some actions. Layers are listed bottom to top, so a
/// layer's depth is its index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldedState {
    layers: Vec<Layer>,
    net_rotation: u16,
    history: Vec<Action>,
}

impl Default for FoldedState {
    fn default() -> Self {
        FoldedState::flat()
    }
}

impl FoldedState {
    pub fn flat() -> Self {
        FoldedState { layers: vec![Layer::new(TriSet::FULL, Isometry::IDENTITY)], net_rotation: 0, history: Vec::new() }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn net_rotation(&self) -> u16 {
        self.net_rotation
    }

    pub fn history(&self) -> &[Action] {
        &self.history
    }

    /// Physical positions covered by at least one layer. This is the region
    /// the next fold acts on.
    pub fn active_region(&self) -> TriSet {
        self.layers.iter().fold(TriSet::EMPTY, |acc, l| acc.union(l.footprint))
    }

    /// Indices (depths) of layers covering a physical position, bottom first.
    pub fn covering(&self, at: TriRef) -> Vec<usize> {
        (0..self.layers.len()).filter(|&i| self.layers[i].footprint.contains(at)).collect()
    }

    /// The layer seen from above at a physical position.
    pub fn top_layer_at(&self, at: TriRef) -> Option<usize> {
        self.covering(at).last().copied()
    }

    fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(i32::MAX, i32::MAX);
        let mut hi = Point::new(i32::MIN, i32::MIN);
        for t in self.active_region().iter() {
            for p in SheetMesh::triangle_vertices(t) {
                lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
        (lo, hi)
    }

    /// Crease for a fold: the line through the active region's bounding-box
    /// center at the axis angle, which halves the region.
    pub fn crease_for(&self, fold: FoldSpec) -> CreaseLine {
        let (lo, hi) = self.bounding_box();
        let center = Point::new((lo.x + hi.x) / 2, (lo.y + hi.y) / 2);
        CreaseLine::new(center, fold.axis.crease_angle())
    }

    pub fn apply_fold(&self, fold: FoldSpec) -> Result<FoldedState, Error> {
        let crease = self.crease_for(fold);
        let v = fold.axis.moving_side();
        let moving_sign = crease.side(Point::new(crease.anchor.x + v[0], crease.anchor.y + v[1]));
        let invalid = |reason: &str| Error::InvalidFold { fold: fold.to_string(), reason: reason.to_string() };

        let mut stationary = Vec::new();
        let mut moving = Vec::new();
        for layer in &self.layers {
            let mut keep = TriSet::EMPTY;
            let mut flip = TriSet::EMPTY;
            for t in layer.triangles.iter() {
                let phys = SheetMesh::triangle_vertices(t).map(|p| layer.pose.apply(p));
                let sides = phys.map(|p| crease.side(p));
                if sides.contains(&1) && sides.contains(&-1) {
                    return Err(invalid("crease cuts through a mesh triangle"));
                }
                if sides.contains(&moving_sign) {
                    flip.insert(t);
                } else {
                    keep.insert(t);
                }
            }
            if !keep.is_empty() {
                stationary.push(Layer::new(keep, layer.pose));
            }
            if !flip.is_empty() {
                moving.push((flip, layer.pose));
            }
        }
        if moving.is_empty() || stationary.is_empty() {
            return Err(invalid("crease does not split the folded paper"));
        }

        // Turning the flap over reverses its stack order.
        let mirror = crease.reflection();
        let flap: Vec<Layer> =
            moving.into_iter().rev().map(|(tris, pose)| Layer::new(tris, mirror.compose(&pose))).collect();
        let layers = match fold.facing {
            Facing::Forward => stationary.into_iter().chain(flap).collect(),
            Facing::Backward => flap.into_iter().chain(stationary).collect(),
        };
        let mut history = self.history.clone();
        history.push(Action::Fold(fold));
        Ok(FoldedState { layers, net_rotation: self.net_rotation, history })
    }

    pub fn apply_rotation(&self, rotation: RotationSpec) -> FoldedState {
        self.rotated_by(rotation.degrees(), Some(Action::Rotate(rotation)))
    }

    fn rotated_by(&self, degrees: u16, record: Option<Action>) -> FoldedState {
        let r = Isometry::rotation(degrees);
        let mut history = self.history.clone();
        history.extend(record);
        FoldedState {
            layers: self.layers.iter().map(|l| Layer::new(l.triangles, r.compose(&l.pose))).collect(),
            net_rotation: (self.net_rotation + degrees) % 360,
            history,
        }
    }

    pub fn apply(&self, action: Action) -> Result<FoldedState, Error> {
        match action {
            Action::Fold(f) => self.apply_fold(f),
            Action::Rotate(r) => Ok(self.apply_rotation(r)),
        }
    }

    /// Punch holes given at physical positions of the folded paper.
    ///
    /// Each hole goes through every layer stacked at its position. Positions
    /// must be distinct and lie on the paper.
    pub fn punch(&self, holes: &[HoleSpec]) -> Result<PunchedState, Error> {
        if holes.is_empty() || holes.len() > 3 {
            return Err(Error::Input(format!("{} holes requested, expected 1 to 3", holes.len())));
        }
        let mut pierced = Vec::new();
        for (k, hole) in holes.iter().enumerate() {
            if holes[..k].iter().any(|h| h.location == hole.location) {
                return Err(Error::InvalidPunch {
                    location: hole.location,
                    reason: "two holes at the same position".into(),
                });
            }
            let layers = self.covering(hole.location);
            if layers.is_empty() {
                return Err(Error::InvalidPunch {
                    location: hole.location,
                    reason: "no paper at this position".into(),
                });
            }
            for i in layers {
                let layer = &self.layers[i];
                let inverse = layer.pose.inverse();
                pierced.push(Pierced {
                    layer: i,
                    hole: k,
                    original: layer.source_of(hole.location).expect("covering layer has a source"),
                    orientation: hole.orientation.transformed(&inverse),
                });
            }
        }
        Ok(PunchedState { state: self.clone(), holes: holes.to_vec(), pierced })
    }
}

/// Run a sequence geometrically, without checking the rule book.
pub fn fold_sequence(actions: &[Action]) -> Result<FoldedState, Error> {
    actions.iter().try_fold(FoldedState::flat(), |state, &a| state.apply(a))
}

/// Validate a sequence against the rules, then run it.
///
/// Rule validity is a property of a complete sequence (the rotation rule
/// book replaces the base one as soon as a rotation appears), so checking
/// happens here rather than per fold.
pub fn simulate(actions: &ActionSequence, opts: RuleOptions) -> Result<FoldedState, Error> {
    rules::validate(actions.actions(), opts)?;
    fold_sequence(actions.actions())
}

/// One triangle a punch went through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pierced {
    /// Depth of the layer at punch time.
    pub layer: usize,
    /// Index of the punched hole.
    pub hole: usize,
    pub original: TriRef,
    /// Hole direction in the unrotated, unfolded sheet's frame.
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PunchedState {
    pub state: FoldedState,
    /// Holes as punched, at physical positions.
    pub holes: Vec<HoleSpec>,
    pub pierced: Vec<Pierced>,
}

impl PunchedState {
    /// Holes carried by one original triangle's punch event, keyed by original triangle.
    pub fn pierced_originals(&self) -> BTreeMap<TriRef, (HoleSpec, Orientation)> {
        self.pierced.iter().map(|p| (p.original, (self.holes[p.hole], p.orientation))).collect()
    }
}

/// Unfold completely. The sheet keeps its final rotation, so positions and
/// directions are reported in the display frame.
pub fn unfold_all(punched: &PunchedState) -> HolePattern {
    let r = Isometry::rotation(punched.state.net_rotation);
    HolePattern::new(
        punched
            .pierced
            .iter()
            .map(|p| {
                let src = punched.holes[p.hole];
                HoleSpec {
                    shape: src.shape,
                    size: src.size,
                    orientation: p.orientation.transformed(&r),
                    location: r.map_triangle(p.original).expect("mesh is closed under quarter turns"),
                }
            })
            .collect(),
    )
}

/// How rotations relabel unfold steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelMode {
    /// Transport the crease and moving side through the rotations.
    #[default]
    Geometric,
    /// Apply the reference relabelling tables verbatim (180° is the identity).
    TableCompat,
}

impl FromStr for LabelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "geometric" => Ok(LabelMode::Geometric),
            "table-compat" => Ok(LabelMode::TableCompat),
            _ => Err(Error::Input(format!("unknown label mode {s:?}"))),
        }
    }
}

/// Unfold steps: the folds in reverse order, each relabelled for the
/// rotations that came after it.
pub fn derive_unfold_steps(actions: &[Action], mode: LabelMode) -> Vec<FoldSpec> {
    let mut out = Vec::new();
    for (i, a) in actions.iter().enumerate().rev() {
        let Action::Fold(fold) = a else { continue };
        let later = actions[i + 1..].iter().filter_map(|a| match a {
            Action::Rotate(r) => Some(*r),
            Action::Fold(_) => None,
        });
        let axis = match mode {
            LabelMode::Geometric => fold.axis.rotated(later.map(|r| r.degrees()).sum::<u16>() % 360),
            LabelMode::TableCompat => later.fold(fold.axis, |axis, r| {
                rules::reference_rotation_table(r)
                    .into_iter()
                    .find(|(from, _)| *from == axis)
                    .map(|(_, to)| to)
                    .expect("tables cover every axis")
            }),
        };
        out.push(FoldSpec::new(axis, fold.facing));
    }
    out
}

/// What the sheet looks like at one step, in the current physical frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub label: String,
    pub stage: Stage,
    /// Positions with paper.
    pub covered: TriSet,
    /// Visible holes, at most one per position.
    pub holes: Vec<HoleSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Initial,
    Action,
    Punched,
    Unfold,
}

/// Frames for the full story of a task: flat sheet, one per action, the
/// punch, then one per unfold step (the last one is the fully unfolded sheet).
pub fn timeline(actions: &[Action], holes: &[HoleSpec], mode: LabelMode) -> Result<Vec<Frame>, Error> {
    let mut frames =
        vec![Frame { label: "initial".into(), stage: Stage::Initial, covered: TriSet::FULL, holes: Vec::new() }];
    let mut state = FoldedState::flat();
    for &a in actions {
        state = state.apply(a)?;
        frames.push(Frame {
            label: a.to_string(),
            stage: Stage::Action,
            covered: state.active_region(),
            holes: Vec::new(),
        });
    }
    let punched = state.punch(holes)?;
    frames.push(Frame {
        label: "punch".into(),
        stage: Stage::Punched,
        covered: state.active_region(),
        holes: HolePattern::new(holes.to_vec()).0,
    });

    let originals = punched.pierced_originals();
    let labels = derive_unfold_steps(actions, mode);
    let fold_positions: Vec<usize> = (0..actions.len()).filter(|&i| !actions[i].is_rotation()).rev().collect();
    for (label, &idx) in labels.iter().zip(&fold_positions) {
        let later: u16 = actions[idx..]
            .iter()
            .filter_map(|a| match a {
                Action::Rotate(r) => Some(r.degrees()),
                Action::Fold(_) => None,
            })
            .sum();
        let partial = fold_sequence(&actions[..idx])?.rotated_by(later % 360, None);
        let mut visible: BTreeMap<TriRef, HoleSpec> = BTreeMap::new();
        for layer in partial.layers() {
            for (orig, (hole, orient)) in originals.range(..) {
                if !layer.triangles.contains(*orig) {
                    continue;
                }
                let at = layer.pose.map_triangle(*orig).expect("layers stay on the mesh");
                visible.insert(at, HoleSpec::new(hole.shape, hole.size, orient.transformed(&layer.pose), at));
            }
        }
        frames.push(Frame {
            label: format!("unfold {label}"),
            stage: Stage::Unfold,
            covered: partial.active_region(),
            holes: visible.into_values().collect(),
        });
    }
    Ok(frames)
}
