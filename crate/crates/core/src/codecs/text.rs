//! Text-grid encoding.
//!
//! Each step is a header line `Step k: label` followed by four rows of four
//! cells. A cell is `[left,right]`, one value per triangle: `0` where no
//! paper lies, `1` where paper lies, or a shape letter where a hole shows.
//! Hole directions are not encoded.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::mesh::{TriRef, TriSet};
use crate::sim::{self, Frame, HoleSpec, LabelMode, Shape, Stage};
use crate::taskgen::{GroundTruth, TaskInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    Empty,
    Paper,
    Hole(Shape),
}

pub fn shape_letter(shape: Shape) -> char {
    match shape {
        Shape::Circle => 'C',
        Shape::Ellipse => 'E',
        Shape::Star => 'S',
        Shape::Triangle => 'A',
        Shape::Trapezoid => 'Z',
        Shape::Letter => 'T',
        Shape::Square => 'Q',
        Shape::Rectangle => 'R',
        Shape::Text => 'X',
    }
}

pub fn letter_shape(c: char) -> Option<Shape> {
    Shape::ALL.into_iter().find(|&s| shape_letter(s) == c)
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Empty => f.write_str("0"),
            Cell::Paper => f.write_str("1"),
            Cell::Hole(s) => write!(f, "{}", shape_letter(*s)),
        }
    }
}

impl FromStr for Cell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut chars = s.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(Error::Input(format!("bad cell value {s:?}")));
        };
        match c {
            '0' => Ok(Cell::Empty),
            '1' => Ok(Cell::Paper),
            _ => letter_shape(c).map(Cell::Hole).ok_or_else(|| Error::Input(format!("unknown shape letter {c:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextStep {
    pub label: String,
    /// `cells[row][col] = [left, right]`.
    pub cells: [[[Cell; 2]; 4]; 4],
}

impl TextStep {
    pub fn cell(&self, at: TriRef) -> Cell {
        self.cells[usize::from(at.row())][usize::from(at.col())][usize::from(at.tri())]
    }

    pub fn from_frame(frame: &Frame) -> TextStep {
        TextStep::from_parts(frame.label.clone(), frame.covered, &frame.holes)
    }

    pub fn from_parts(label: String, covered: TriSet, holes: &[HoleSpec]) -> TextStep {
        let mut cells = [[[Cell::Empty; 2]; 4]; 4];
        for t in TriRef::all() {
            let value = if let Some(h) = holes.iter().find(|h| h.location == t) {
                Cell::Hole(h.shape)
            } else if covered.contains(t) {
                Cell::Paper
            } else {
                Cell::Empty
            };
            cells[usize::from(t.row())][usize::from(t.col())][usize::from(t.tri())] = value;
        }
        TextStep { label, cells }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TextDocument {
    pub steps: Vec<TextStep>,
}

impl fmt::Display for TextDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, step) in self.steps.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            writeln!(f, "Step {}: {}", k + 1, step.label)?;
            for row in &step.cells {
                let cells: Vec<String> = row.iter().map(|[a, b]| format!("[{a},{b}]")).collect();
                writeln!(f, "{}", cells.join(" "))?;
            }
        }
        Ok(())
    }
}

impl FromStr for TextDocument {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = |line: usize, message: String| Error::Parse { path: format!("line {}", line + 1), message };
        let lines: Vec<&str> = s.lines().collect();
        let mut steps = Vec::new();
        let mut i = 0;
        while i < lines.len() {
            if lines[i].is_empty() && !steps.is_empty() {
                i += 1;
                continue;
            }
            let header = lines[i]
                .strip_prefix("Step ")
                .and_then(|rest| rest.split_once(": "))
                .ok_or_else(|| bad(i, "expected `Step k: label`".into()))?;
            if header.0 != (steps.len() + 1).to_string() {
                return Err(bad(i, format!("expected step {}", steps.len() + 1)));
            }
            let mut cells = [[[Cell::Empty; 2]; 4]; 4];
            for (r, row) in cells.iter_mut().enumerate() {
                let n = i + 1 + r;
                let line = lines.get(n).ok_or_else(|| bad(n, "missing grid row".into()))?;
                let parts: Vec<&str> = line.split(' ').collect();
                if parts.len() != 4 {
                    return Err(bad(n, "expected four cells".into()));
                }
                for (c, part) in parts.into_iter().enumerate() {
                    let inner = part
                        .strip_prefix('[')
                        .and_then(|p| p.strip_suffix(']'))
                        .and_then(|p| p.split_once(','))
                        .ok_or_else(|| bad(n, format!("bad cell {part:?}")))?;
                    row[c] = [
                        inner.0.parse().map_err(|e: Error| bad(n, e.to_string()))?,
                        inner.1.parse().map_err(|e: Error| bad(n, e.to_string()))?,
                    ];
                }
            }
            steps.push(TextStep { label: header.1.to_string(), cells });
            i += 5;
        }
        Ok(TextDocument { steps })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TextOptions {
    /// Keep only the initial, fully folded, punched and final steps.
    pub trim: bool,
    /// Include the unfolding steps (the answer) for the asked scenario.
    pub include_solution: bool,
    pub label_mode: LabelMode,
}

fn select(frames: Vec<Frame>, opts: &TextOptions, solution: bool, prefix: &str) -> Vec<TextStep> {
    let frames: Vec<Frame> = frames.into_iter().filter(|f| solution || f.stage != Stage::Unfold).collect();
    let keep = |i: usize, f: &Frame| {
        if !opts.trim {
            return true;
        }
        let last_of_stage = frames.get(i + 1).is_none_or(|next| next.stage != f.stage);
        match f.stage {
            Stage::Initial | Stage::Punched => true,
            Stage::Action | Stage::Unfold => last_of_stage,
        }
    };
    frames
        .iter()
        .enumerate()
        .filter(|(i, f)| keep(*i, f))
        .map(|(_, f)| {
            let mut step = TextStep::from_frame(f);
            step.label = format!("{prefix}{}", step.label);
            step
        })
        .collect()
}

/// Text document for a task: the sequence of sheet states the solver sees.
pub fn encode_text(task: &TaskInstance, opts: TextOptions) -> Result<TextDocument, Error> {
    let actions = task.actions.actions();
    let story = |holes: &[HoleSpec]| sim::timeline(actions, holes, opts.label_mode);
    let steps = match &task.ground_truth {
        GroundTruth::Prediction(_) => select(story(&task.holes)?, &opts, opts.include_solution, ""),
        GroundTruth::Planning(t) => {
            let mut steps = vec![
                TextStep::from_parts("initial".into(), TriSet::FULL, &[]),
                TextStep::from_parts("target".into(), TriSet::FULL, t.target_pattern.holes()),
            ];
            if opts.include_solution {
                steps.extend(select(story(&task.holes)?, &opts, true, "solution "));
            }
            steps
        }
        GroundTruth::Generalization(g) => {
            let mut steps = select(story(&task.holes)?, &opts, true, "A ");
            steps.extend(select(story(&g.scenario_b_partial)?, &opts, opts.include_solution, "B "));
            steps
        }
    };
    Ok(TextDocument { steps })
}
