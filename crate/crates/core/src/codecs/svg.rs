//! SVG renders of sheet states.
//!
//! Three colors carry meaning: white paper, black where no paper lies, green
//! holes. Triangles are drawn on the lattice scaled by a whole number of
//! pixels, glyph outlines come from fixed tables, and numbers are written
//! with fixed formatting, so output bytes depend only on the input.

use std::fmt::Write;

use crate::error::Error;
use crate::mesh::{SheetMesh, TriRef, TriSet, LATTICE, SIDE};
use crate::sim::{self, Frame, HolePattern, HoleSpec, LabelMode, Shape, Size};
use crate::taskgen::TaskInstance;

pub const WHITE: &str = "#ffffff";
pub const BLACK: &str = "#000000";
pub const GREEN: &str = "#00a651";

/// Pixels per lattice unit.
const SCALE: i32 = 10;
const MARGIN: i32 = 10;
const SHEET_PX: i32 = SIDE * SCALE;
/// Extra height for a caption under a sheet.
const CAPTION_PX: i32 = 24;

fn header(width: i32, height: i32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
         <rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"{WHITE}\"/>\n"
    )
}

/// Glyph body drawn pointing along +x at the origin.
fn glyph_body(shape: Shape) -> String {
    let tick = format!("<path d=\"M0 0H10\" stroke=\"{WHITE}\" stroke-width=\"2\"/>");
    let filled = |body: &str| format!("{body}{tick}");
    let stroked = |d: &str| format!("<path d=\"{d}\" fill=\"none\" stroke=\"{GREEN}\" stroke-width=\"3\"/>");
    match shape {
        Shape::Circle => filled(&format!("<circle r=\"10\" fill=\"{GREEN}\"/>")),
        Shape::Ellipse => filled(&format!("<ellipse rx=\"12\" ry=\"7\" fill=\"{GREEN}\"/>")),
        Shape::Square => filled(&format!("<rect x=\"-9\" y=\"-9\" width=\"18\" height=\"18\" fill=\"{GREEN}\"/>")),
        Shape::Rectangle => filled(&format!("<rect x=\"-12\" y=\"-6\" width=\"24\" height=\"12\" fill=\"{GREEN}\"/>")),
        Shape::Triangle => format!("<polygon points=\"12,0 -8,-9 -8,9\" fill=\"{GREEN}\"/>"),
        Shape::Trapezoid => format!("<polygon points=\"-8,-11 8,-6 8,6 -8,11\" fill=\"{GREEN}\"/>"),
        Shape::Star => format!(
            "<polygon points=\"12,0 4,-2.9 3.7,-11.4 -1.5,-4.8 -9.7,-7.1 -5,0 -9.7,7.1 -1.5,4.8 3.7,11.4 4,2.9\" fill=\"{GREEN}\"/>"
        ),
        Shape::Letter => stroked("M-6 10V-10H8M-6 0H4"),
        Shape::Text => stroked("M-10 -6H10M-10 0H10M-10 6H4"),
    }
}

fn glyph(hole: &HoleSpec, origin: (i32, i32)) -> String {
    let c = SheetMesh::centroid3(hole.location);
    // centroid3 is three times the centroid; lattice coordinates are even
    // multiples of three there, so the pixel position is exact.
    let x = origin.0 + c.x * SCALE / 3;
    let y = origin.1 + c.y * SCALE / 3;
    let scale = match hole.size {
        Size::Small => "0.6",
        Size::Large => "1",
    };
    format!(
        "<g transform=\"translate({x} {y}) rotate({}) scale({scale})\">{}</g>\n",
        -i32::from(hole.orientation.degrees()),
        glyph_body(hole.shape)
    )
}

fn sheet(out: &mut String, origin: (i32, i32), covered: TriSet, holes: &[HoleSpec]) {
    for t in TriRef::all() {
        let fill = if covered.contains(t) { WHITE } else { BLACK };
        let points: Vec<String> = SheetMesh::triangle_vertices(t)
            .iter()
            .map(|p| format!("{},{}", origin.0 + p.x * SCALE, origin.1 + p.y * SCALE))
            .collect();
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"{BLACK}\" stroke-width=\"1\"/>",
            points.join(" ")
        );
    }
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{SHEET_PX}\" height=\"{SHEET_PX}\" fill=\"none\" stroke=\"{BLACK}\" stroke-width=\"2\"/>",
        origin.0, origin.1
    );
    for h in holes {
        out.push_str(&glyph(h, origin));
    }
}

fn caption(out: &mut String, origin: (i32, i32), label: &str) {
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\" fill=\"{BLACK}\">{}</text>",
        origin.0 + SHEET_PX / 2,
        origin.1 + SHEET_PX + 18,
        escape(label)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One sheet state with an optional caption.
pub fn render_sheet(covered: TriSet, holes: &[HoleSpec], label: Option<&str>) -> String {
    let width = SHEET_PX + 2 * MARGIN;
    let height = width + if label.is_some() { CAPTION_PX } else { 0 };
    let mut out = header(width, height);
    sheet(&mut out, (MARGIN, MARGIN), covered, holes);
    if let Some(label) = label {
        caption(&mut out, (MARGIN, MARGIN), label);
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_frame(frame: &Frame) -> String {
    render_sheet(frame.covered, &frame.holes, Some(&frame.label))
}

/// A fully unfolded pattern.
pub fn render_pattern(pattern: &HolePattern, label: Option<&str>) -> String {
    render_sheet(TriSet::FULL, pattern.holes(), label)
}

/// An answer next to the ground truth.
pub fn render_comparison(answer: &[HoleSpec], truth: &HolePattern) -> String {
    let width = 2 * SHEET_PX + 3 * MARGIN;
    let height = SHEET_PX + 2 * MARGIN + CAPTION_PX;
    let mut out = header(width, height);
    let left = (MARGIN, MARGIN);
    let right = (2 * MARGIN + SHEET_PX, MARGIN);
    sheet(&mut out, left, TriSet::FULL, answer);
    caption(&mut out, left, "answer");
    sheet(&mut out, right, TriSet::FULL, truth.holes());
    caption(&mut out, right, "ground truth");
    out.push_str("</svg>\n");
    out
}

/// The sheet as presented with a task: fully folded with its holes.
pub fn render_task(task: &TaskInstance) -> Result<String, Error> {
    let state = sim::fold_sequence(task.actions.actions())?;
    Ok(render_sheet(state.active_region(), &task.holes, Some(&task.id)))
}

/// One render per step of the task's story, including unfolding.
pub fn render_task_steps(task: &TaskInstance, mode: LabelMode) -> Result<Vec<String>, Error> {
    Ok(sim::timeline(task.actions.actions(), &task.holes, mode)?.iter().map(render_frame).collect())
}

const _: () = assert!(LATTICE % 3 == 0);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Orientation;

    fn colors(svg: &str) -> Vec<String> {
        let mut found: Vec<String> = svg.match_indices('#').map(|(i, _)| svg[i..i + 7].to_string()).collect();
        found.sort();
        found.dedup();
        found
    }

    #[test]
    fn flat_sheet_is_white() {
        let svg = render_sheet(TriSet::FULL, &[], None);
        assert_eq!(svg.matches("<polygon").count(), 32);
        assert_eq!(svg.matches(&format!("fill=\"{BLACK}\"")).count(), 0);
        assert_eq!(svg, render_sheet(TriSet::FULL, &[], None));
    }

    #[test]
    fn folded_region_is_black() {
        let state = sim::fold_sequence(&"H1-F".parse::<crate::rules::ActionSequence>().unwrap().0).unwrap();
        let svg = render_sheet(state.active_region(), &[], None);
        assert_eq!(svg.matches(&format!("fill=\"{BLACK}\"")).count(), 16);
    }

    #[test]
    fn glyph_rotation_and_palette() {
        let at = TriRef::new(1, 2, 1).unwrap();
        let holes: Vec<HoleSpec> =
            Shape::ALL.into_iter().map(|s| HoleSpec::new(s, Size::Large, Orientation::new(90).unwrap(), at)).collect();
        let svg = render_sheet(TriSet::FULL, &holes, Some("x"));
        assert!(svg.contains("rotate(-90)"));
        assert_eq!(colors(&svg), vec![BLACK, GREEN, WHITE]);
    }
}
