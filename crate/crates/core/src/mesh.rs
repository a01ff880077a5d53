//! Sheet mesh, triangle addressing and the exact 2D reflection/rotation math.
//!
//! The sheet is a 4×4 grid of square cells, each split into two triangles,
//! for 32 triangles in total. Coordinates live on an integer lattice with
//! [`LATTICE`] steps per cell, origin at the top-left corner and `y` growing
//! downward. Every crease a valid fold can produce, every triangle centroid
//! and every rotation about the sheet center stays on this lattice, so no
//! floating point is involved anywhere in the geometry.
//!
//! Angles (crease angles and hole orientations) are measured counterclockwise
//! as seen by the observer, i.e. with the screen's `y` axis pointing down.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Lattice steps per cell edge. Divisible by 2 (midlines) and 3 (centroids).
pub const LATTICE: i32 = 6;
/// Cells per sheet side.
pub const CELLS: i32 = 4;
/// Sheet side in lattice units.
pub const SIDE: i32 = CELLS * LATTICE;
/// Number of triangles in the sheet.
pub const TRIANGLE_COUNT: usize = 32;

/// Address of one triangle: `[row, column, tri]`.
///
/// `tri = 0` is the triangle containing the cell's left edge, `tri = 1` the
/// one containing the right edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriRef {
    row: u8,
    col: u8,
    tri: u8,
}

impl TriRef {
    pub fn new(row: u8, col: u8, tri: u8) -> Result<Self, Error> {
        if row > 3 || col > 3 || tri > 1 {
            return Err(Error::Input(format!("triangle address [{row},{col},{tri}] out of range")));
        }
        Ok(TriRef { row, col, tri })
    }

    pub fn row(self) -> u8 {
        self.row
    }

    pub fn col(self) -> u8 {
        self.col
    }

    pub fn tri(self) -> u8 {
        self.tri
    }

    /// Position in `1..=32`, row-major, left triangle first.
    pub fn index(self) -> PositionIndex {
        PositionIndex(8 * self.row + 2 * self.col + self.tri + 1)
    }

    pub fn from_index(index: PositionIndex) -> Self {
        let k = index.0 - 1;
        TriRef { row: k / 8, col: (k % 8) / 2, tri: k % 2 }
    }

    /// Zero-based slot, handy for bitsets and tables.
    pub fn slot(self) -> usize {
        usize::from(self.index().0 - 1)
    }

    pub fn from_slot(slot: usize) -> Self {
        debug_assert!(slot < TRIANGLE_COUNT);
        TriRef::from_index(PositionIndex(slot as u8 + 1))
    }

    /// All 32 triangles in index order.
    pub fn all() -> impl Iterator<Item = TriRef> {
        (0..TRIANGLE_COUNT).map(TriRef::from_slot)
    }
}

impl fmt::Display for TriRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.row, self.col, self.tri)
    }
}

impl Serialize for TriRef {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.row, self.col, self.tri].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TriRef {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [row, col, tri] = <[u8; 3]>::deserialize(deserializer)?;
        TriRef::new(row, col, tri).map_err(serde::de::Error::custom)
    }
}

/// Triangle number in `1..=32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositionIndex(u8);

impl PositionIndex {
    pub fn new(value: u8) -> Result<Self, Error> {
        if !(1..=32).contains(&value) {
            return Err(Error::Input(format!("position {value} outside 1..=32")));
        }
        Ok(PositionIndex(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

pub fn tri_index(tri: TriRef) -> PositionIndex {
    tri.index()
}

/// Which diagonal a cell is cut along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    /// Top-left to bottom-right.
    Main,
    /// Top-right to bottom-left.
    Anti,
}

/// The flat sheet.
///
/// Cells whose `row + col` is even are cut along their TL–BR diagonal, the
/// others along TR–BL, so every 2×2 quadrant holds an "X". With this layout
/// both sheet diagonals, all grid lines and both diagonals of every quadrant
/// run along triangle edges, and the layout maps onto itself under every
/// halving reflection and every quarter turn about the center.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SheetMesh {
    /// Side length of one cell in output units (only used for rendering).
    pub cell_size: u32,
}

impl Default for SheetMesh {
    fn default() -> Self {
        SheetMesh { cell_size: 1 }
    }
}

impl SheetMesh {
    pub fn split(row: u8, col: u8) -> Split {
        if (row + col).is_multiple_of(2) {
            Split::Main
        } else {
            Split::Anti
        }
    }

    /// Triangle vertices in lattice coordinates.
    pub fn triangle_vertices(tri: TriRef) -> [Point; 3] {
        let x0 = i32::from(tri.col) * LATTICE;
        let y0 = i32::from(tri.row) * LATTICE;
        let tl = Point::new(x0, y0);
        let tr = Point::new(x0 + LATTICE, y0);
        let bl = Point::new(x0, y0 + LATTICE);
        let br = Point::new(x0 + LATTICE, y0 + LATTICE);
        match (SheetMesh::split(tri.row, tri.col), tri.tri) {
            (Split::Main, 0) => [tl, bl, br],
            (Split::Main, _) => [tr, br, tl],
            (Split::Anti, 0) => [tl, bl, tr],
            (Split::Anti, _) => [tr, br, bl],
        }
    }

    /// Three times the centroid, which is always a lattice point.
    pub fn centroid3(tri: TriRef) -> Point {
        let [a, b, c] = SheetMesh::triangle_vertices(tri);
        Point::new(a.x + b.x + c.x, a.y + b.y + c.y)
    }

    /// The triangle whose interior contains `p`, if `p` is strictly inside one.
    pub fn locate(p: Point) -> Option<TriRef> {
        if p.x <= 0 || p.y <= 0 || p.x >= SIDE || p.y >= SIDE {
            return None;
        }
        let col = p.x.div_euclid(LATTICE);
        let row = p.y.div_euclid(LATTICE);
        let u = p.x - col * LATTICE;
        let v = p.y - row * LATTICE;
        let (row, col) = (row as u8, col as u8);
        let tri = match SheetMesh::split(row, col) {
            Split::Main if v > u => 0,
            Split::Main if v < u => 1,
            Split::Anti if u + v < LATTICE => 0,
            Split::Anti if u + v > LATTICE => 1,
            _ => return None,
        };
        Some(TriRef { row, col, tri })
    }

    /// The mesh triangle occupying exactly the given vertices, if any.
    pub fn match_triangle(vertices: [Point; 3]) -> Option<TriRef> {
        let sum = Point::new(vertices.iter().map(|p| p.x).sum(), vertices.iter().map(|p| p.y).sum());
        if sum.x % 3 != 0 || sum.y % 3 != 0 {
            return None;
        }
        let tri = SheetMesh::locate(Point::new(sum.x / 3, sum.y / 3))?;
        let mut want = SheetMesh::triangle_vertices(tri);
        let mut got = vertices;
        want.sort();
        got.sort();
        (want == got).then_some(tri)
    }
}

pub fn triangle_vertices(tri: TriRef) -> [Point; 3] {
    SheetMesh::triangle_vertices(tri)
}

/// A lattice point (`LATTICE` units per cell).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const fn new(x: i32, y: i32) -> Self {
        Point { x, y }
    }

    /// A point given in whole cell units.
    pub const fn cells(x: i32, y: i32) -> Self {
        Point { x: x * LATTICE, y: y * LATTICE }
    }

    pub fn to_cells_f64(self) -> (f64, f64) {
        (f64::from(self.x) / f64::from(LATTICE), f64::from(self.y) / f64::from(LATTICE))
    }
}

/// The four crease directions, measured counterclockwise from the `+x` axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CreaseAngle {
    /// Horizontal.
    Deg0,
    /// Bottom-left to top-right (the anti-diagonal direction).
    Deg45,
    /// Vertical.
    Deg90,
    /// Top-left to bottom-right (the main-diagonal direction).
    Deg135,
}

impl CreaseAngle {
    pub fn degrees(self) -> u16 {
        match self {
            CreaseAngle::Deg0 => 0,
            CreaseAngle::Deg45 => 45,
            CreaseAngle::Deg90 => 90,
            CreaseAngle::Deg135 => 135,
        }
    }

    pub fn from_degrees(deg: u16) -> Result<Self, Error> {
        match deg % 180 {
            0 => Ok(CreaseAngle::Deg0),
            45 => Ok(CreaseAngle::Deg45),
            90 => Ok(CreaseAngle::Deg90),
            135 => Ok(CreaseAngle::Deg135),
            _ => Err(Error::Input(format!("crease angle {deg} not a multiple of 45"))),
        }
    }
}

/// A mirror line through `anchor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CreaseLine {
    pub anchor: Point,
    pub angle: CreaseAngle,
}

impl CreaseLine {
    pub fn new(anchor: Point, angle: CreaseAngle) -> Self {
        CreaseLine { anchor, angle }
    }

    /// Signed side of `p`: negative on the top / left / top-right / top-left
    /// side for angles 0 / 90 / 135 / 45 respectively, zero on the line.
    pub fn side(&self, p: Point) -> i32 {
        let a = self.anchor;
        let d = match self.angle {
            CreaseAngle::Deg0 => p.y - a.y,
            CreaseAngle::Deg90 => p.x - a.x,
            CreaseAngle::Deg135 => (p.y - p.x) - (a.y - a.x),
            CreaseAngle::Deg45 => (p.x + p.y) - (a.x + a.y),
        };
        d.signum()
    }

    /// The reflection across this line as an isometry.
    pub fn reflection(&self) -> Isometry {
        let a = self.anchor;
        match self.angle {
            CreaseAngle::Deg0 => Isometry::new([[1, 0], [0, -1]], [0, 2 * a.y]),
            CreaseAngle::Deg90 => Isometry::new([[-1, 0], [0, 1]], [2 * a.x, 0]),
            CreaseAngle::Deg135 => {
                let c = a.y - a.x;
                Isometry::new([[0, 1], [1, 0]], [-c, c])
            }
            CreaseAngle::Deg45 => {
                let s = a.x + a.y;
                Isometry::new([[0, -1], [-1, 0]], [s, s])
            }
        }
    }
}

pub fn reflect_point(p: Point, crease: &CreaseLine) -> Point {
    crease.reflection().apply(p)
}

/// Hole direction: one of 0, 90, 180, 270 degrees counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Orientation(u16);

impl Orientation {
    pub const ALL: [Orientation; 4] = [Orientation(0), Orientation(90), Orientation(180), Orientation(270)];

    pub fn new(degrees: u16) -> Result<Self, Error> {
        if !degrees.is_multiple_of(90) || degrees >= 360 {
            return Err(Error::Input(format!("orientation {degrees} not in {{0,90,180,270}}")));
        }
        Ok(Orientation(degrees))
    }

    pub fn degrees(self) -> u16 {
        self.0
    }

    pub fn rotated(self, ccw_degrees: u16) -> Self {
        Orientation((self.0 + ccw_degrees) % 360)
    }

    /// Unit direction vector in y-down lattice axes.
    fn vector(self) -> [i32; 2] {
        match self.0 {
            0 => [1, 0],
            90 => [0, -1],
            180 => [-1, 0],
            _ => [0, 1],
        }
    }

    fn from_vector(v: [i32; 2]) -> Self {
        match v {
            [1, 0] => Orientation(0),
            [0, -1] => Orientation(90),
            [-1, 0] => Orientation(180),
            [0, 1] => Orientation(270),
            _ => unreachable!("isometries keep axis-aligned unit vectors axis-aligned"),
        }
    }

    /// Direction after applying the linear part of `iso`.
    pub fn transformed(self, iso: &Isometry) -> Self {
        Orientation::from_vector(iso.apply_linear(self.vector()))
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Orientation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Orientation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Orientation::new(u16::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

/// Mirror a direction across a crease at `crease` degrees: `2θ − φ (mod 360)`.
pub fn reflect_orientation(phi: Orientation, crease: CreaseAngle) -> Orientation {
    let theta = i32::from(crease.degrees());
    Orientation((2 * theta - i32::from(phi.0)).rem_euclid(360) as u16)
}

/// An exact lattice isometry `p ↦ M·p + t` with `M` one of the eight
/// signed permutation matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Isometry {
    m: [[i32; 2]; 2],
    t: [i32; 2],
}

impl Default for Isometry {
    fn default() -> Self {
        Isometry::IDENTITY
    }
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry { m: [[1, 0], [0, 1]], t: [0, 0] };

    const fn new(m: [[i32; 2]; 2], t: [i32; 2]) -> Self {
        Isometry { m, t }
    }

    /// Counterclockwise rotation about the sheet center by a multiple of 90°.
    pub fn rotation(ccw_degrees: u16) -> Self {
        // One visual quarter turn in y-down axes maps (dx, dy) to (dy, -dx).
        let quarter = Isometry::new([[0, 1], [-1, 0]], [0, SIDE]);
        let mut out = Isometry::IDENTITY;
        for _ in 0..(ccw_degrees / 90) % 4 {
            out = quarter.compose(&out);
        }
        out
    }

    pub fn apply(&self, p: Point) -> Point {
        let [x, y] = self.apply_linear([p.x, p.y]);
        Point::new(x + self.t[0], y + self.t[1])
    }

    pub fn apply_linear(&self, v: [i32; 2]) -> [i32; 2] {
        [self.m[0][0] * v[0] + self.m[0][1] * v[1], self.m[1][0] * v[0] + self.m[1][1] * v[1]]
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Isometry) -> Isometry {
        let m = &self.m;
        let n = &inner.m;
        let mm = [
            [m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]],
            [m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]],
        ];
        let t = self.apply_linear(inner.t);
        Isometry::new(mm, [t[0] + self.t[0], t[1] + self.t[1]])
    }

    pub fn inverse(&self) -> Isometry {
        // Orthogonal linear part: the inverse is the transpose.
        let mt = [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]];
        let inv = Isometry::new(mt, [0, 0]);
        let t = inv.apply_linear(self.t);
        Isometry::new(mt, [-t[0], -t[1]])
    }

    /// True when the map reverses handedness.
    pub fn is_reflection(&self) -> bool {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0] < 0
    }

    /// Image of a mesh triangle, if it lands exactly on a mesh triangle.
    pub fn map_triangle(&self, tri: TriRef) -> Option<TriRef> {
        SheetMesh::match_triangle(SheetMesh::triangle_vertices(tri).map(|p| self.apply(p)))
    }
}

/// A set of triangles, stored as a 32-bit mask over slots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TriSet(u32);

impl TriSet {
    pub const EMPTY: TriSet = TriSet(0);
    pub const FULL: TriSet = TriSet(u32::MAX);

    pub fn insert(&mut self, tri: TriRef) {
        self.0 |= 1 << tri.slot();
    }

    pub fn contains(self, tri: TriRef) -> bool {
        self.0 & (1 << tri.slot()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: TriSet) -> TriSet {
        TriSet(self.0 | other.0)
    }

    pub fn intersection(self, other: TriSet) -> TriSet {
        TriSet(self.0 & other.0)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn iter(self) -> impl Iterator<Item = TriRef> {
        (0..TRIANGLE_COUNT).filter(move |s| self.0 & (1 << s) != 0).map(TriRef::from_slot)
    }
}

impl FromIterator<TriRef> for TriSet {
    fn from_iter<I: IntoIterator<Item = TriRef>>(iter: I) -> Self {
        let mut set = TriSet::EMPTY;
        for t in iter {
            set.insert(t);
        }
        set
    }
}
