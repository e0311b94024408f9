//! Square-lattice geometry shared by every stage of the pipeline.
//!
//! A lattice of side `n` has `n × n` cells and `(n + 1) × (n + 1)` vertices
//! in the unit square, with mesh `δ = 1/n`. Vertex `(row, col)` sits at
//! `(x, y) = (col·δ, row·δ)`, so row 0 is the bottom edge and "north" means
//! increasing row. Vertex ids are row-major; cell `(row, col)` is the square
//! whose lower-left corner is vertex `(row, col)`.

use serde::{Deserialize, Serialize};

/// A point in unit-square coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// The eight compass directions, indexed clockwise from north.
///
/// Clockwise rank arithmetic (`(a - b) mod 8`) is what the rotation system
/// and the contour sector computations are built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir8 {
    N = 0,
    NE = 1,
    E = 2,
    SE = 3,
    S = 4,
    SW = 5,
    W = 6,
    NW = 7,
}

impl Dir8 {
    pub const ALL: [Dir8; 8] = [
        Dir8::N,
        Dir8::NE,
        Dir8::E,
        Dir8::SE,
        Dir8::S,
        Dir8::SW,
        Dir8::W,
        Dir8::NW,
    ];

    /// The four axis directions, i.e. the possible grid edges at a vertex.
    pub const AXES: [Dir8; 4] = [Dir8::N, Dir8::E, Dir8::S, Dir8::W];

    /// The four diagonal directions, i.e. the quadrants (cells) around a vertex.
    pub const QUADRANTS: [Dir8; 4] = [Dir8::NE, Dir8::SE, Dir8::SW, Dir8::NW];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Dir8 {
        Self::ALL[i % 8]
    }

    /// Clockwise steps (in units of 45°) needed to rotate from `from` to `self`.
    pub fn cw_rank_from(self, from: Dir8) -> usize {
        (self.index() + 8 - from.index()) % 8
    }

    /// `(drow, dcol)` offset of the direction.
    pub fn offset(self) -> (i64, i64) {
        match self {
            Dir8::N => (1, 0),
            Dir8::NE => (1, 1),
            Dir8::E => (0, 1),
            Dir8::SE => (-1, 1),
            Dir8::S => (-1, 0),
            Dir8::SW => (-1, -1),
            Dir8::W => (0, -1),
            Dir8::NW => (1, -1),
        }
    }

    pub fn from_offset(drow: i64, dcol: i64) -> Option<Dir8> {
        Self::ALL
            .into_iter()
            .find(|d| d.offset() == (drow.signum(), dcol.signum()) && (drow != 0 || dcol != 0))
    }
}

/// Edge orientation in the lattice edge numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeAxis {
    /// `(r, c) – (r, c + 1)`
    Horizontal,
    /// `(r, c) – (r + 1, c)`
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    n: usize,
}

impl Lattice {
    /// Panics if `n == 0`; callers validate sizes before building a lattice.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "lattice needs at least one cell per side");
        Self { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Vertices per side, `n + 1`.
    pub fn side(&self) -> usize {
        self.n + 1
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn num_vertices(&self) -> usize {
        self.side() * self.side()
    }

    pub fn num_cells(&self) -> usize {
        self.n * self.n
    }

    pub fn num_horizontal_edges(&self) -> usize {
        self.side() * self.n
    }

    pub fn num_edges(&self) -> usize {
        2 * self.side() * self.n
    }

    pub fn vertex(&self, row: usize, col: usize) -> usize {
        debug_assert!(row <= self.n && col <= self.n);
        row * self.side() + col
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v / self.side(), v % self.side())
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        v < self.num_vertices()
    }

    pub fn position(&self, v: usize) -> Point {
        let (r, c) = self.coords(v);
        let d = self.spacing();
        Point::new(c as f64 * d, r as f64 * d)
    }

    pub fn center(&self) -> Point {
        Point::new(0.5, 0.5)
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        let (r, c) = self.coords(v);
        r == 0 || c == 0 || r == self.n || c == self.n
    }

    pub fn neighbor(&self, v: usize, dir: Dir8) -> Option<usize> {
        let (r, c) = self.coords(v);
        let (dr, dc) = dir.offset();
        let nr = r as i64 + dr;
        let nc = c as i64 + dc;
        let max = self.n as i64;
        if nr < 0 || nc < 0 || nr > max || nc > max {
            None
        } else {
            Some(self.vertex(nr as usize, nc as usize))
        }
    }

    /// Axis-neighbors of `v` in N, E, S, W order.
    pub fn axis_neighbors(&self, v: usize) -> impl Iterator<Item = (Dir8, usize)> + '_ {
        Dir8::AXES
            .into_iter()
            .filter_map(move |d| self.neighbor(v, d).map(|u| (d, u)))
    }

    /// Direction from `v` to the lattice-adjacent vertex `u` (axis or diagonal).
    pub fn direction(&self, v: usize, u: usize) -> Option<Dir8> {
        let (r0, c0) = self.coords(v);
        let (r1, c1) = self.coords(u);
        let dr = r1 as i64 - r0 as i64;
        let dc = c1 as i64 - c0 as i64;
        if dr.abs() > 1 || dc.abs() > 1 {
            return None;
        }
        Dir8::from_offset(dr, dc)
    }

    /// Outward direction at a boundary vertex: axis normal on a side, diagonal
    /// at a corner. This is the direction of the spoke to the super-root.
    pub fn outward(&self, v: usize) -> Option<Dir8> {
        let (r, c) = self.coords(v);
        let dr: i64 = if r == 0 {
            -1
        } else if r == self.n {
            1
        } else {
            0
        };
        let dc: i64 = if c == 0 {
            -1
        } else if c == self.n {
            1
        } else {
            0
        };
        Dir8::from_offset(dr, dc)
    }

    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let h = self.num_horizontal_edges();
        if e < h {
            let r = e / self.n;
            let c = e % self.n;
            (self.vertex(r, c), self.vertex(r, c + 1))
        } else {
            let k = e - h;
            let r = k / self.side();
            let c = k % self.side();
            (self.vertex(r, c), self.vertex(r + 1, c))
        }
    }

    pub fn edge_axis(&self, e: usize) -> EdgeAxis {
        if e < self.num_horizontal_edges() {
            EdgeAxis::Horizontal
        } else {
            EdgeAxis::Vertical
        }
    }

    /// Id of the lattice edge joining two axis-adjacent vertices.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let (r0, c0) = self.coords(u);
        let (r1, c1) = self.coords(v);
        if r0 == r1 && c0.abs_diff(c1) == 1 {
            Some(r0 * self.n + c0.min(c1))
        } else if c0 == c1 && r0.abs_diff(r1) == 1 {
            Some(self.num_horizontal_edges() + r0.min(r1) * self.side() + c0)
        } else {
            None
        }
    }

    /// Whether the edge lies on the outer boundary of the square.
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        let (u, v) = self.edge_endpoints(e);
        let (r0, c0) = self.coords(u);
        let (r1, c1) = self.coords(v);
        (r0 == r1 && (r0 == 0 || r0 == self.n)) || (c0 == c1 && (c0 == 0 || c0 == self.n))
    }

    /// The two cells on either side of an edge; `None` stands for outside the square.
    /// Horizontal edges return (below, above); vertical edges return (left, right).
    pub fn edge_cells(&self, e: usize) -> (Option<usize>, Option<usize>) {
        let (u, _) = self.edge_endpoints(e);
        let (r, c) = self.coords(u);
        match self.edge_axis(e) {
            EdgeAxis::Horizontal => {
                let below = (r > 0).then(|| self.cell(r - 1, c));
                let above = (r < self.n).then(|| self.cell(r, c));
                (below, above)
            }
            EdgeAxis::Vertical => {
                let left = (c > 0).then(|| self.cell(r, c - 1));
                let right = (c < self.n).then(|| self.cell(r, c));
                (left, right)
            }
        }
    }

    pub fn cell(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.n && col < self.n);
        row * self.n + col
    }

    pub fn cell_coords(&self, cell: usize) -> (usize, usize) {
        (cell / self.n, cell % self.n)
    }

    pub fn cell_center(&self, cell: usize) -> Point {
        let (r, c) = self.cell_coords(cell);
        let d = self.spacing();
        Point::new((c as f64 + 0.5) * d, (r as f64 + 0.5) * d)
    }

    /// The cell in quadrant `q` of vertex `v`, if it lies inside the square.
    pub fn quadrant_cell(&self, v: usize, q: Dir8) -> Option<usize> {
        let (r, c) = self.coords(v);
        let (dr, dc) = q.offset();
        if dr == 0 || dc == 0 {
            return None;
        }
        let cr = if dr > 0 { r as i64 } else { r as i64 - 1 };
        let cc = if dc > 0 { c as i64 } else { c as i64 - 1 };
        let max = self.n as i64;
        if cr < 0 || cc < 0 || cr >= max || cc >= max {
            None
        } else {
            Some(self.cell(cr as usize, cc as usize))
        }
    }

    /// The cell containing the center of the square (half-open cells).
    pub fn center_cell(&self) -> usize {
        let k = (self.n / 2).min(self.n - 1);
        self.cell(k, k)
    }

    /// Boundary vertices in counterclockwise order around the square,
    /// starting at vertex 0 (the lower-left corner).
    pub fn boundary_ccw(&self) -> Vec<usize> {
        let n = self.n;
        let mut out = Vec::with_capacity(4 * n);
        for c in 0..n {
            out.push(self.vertex(0, c));
        }
        for r in 0..n {
            out.push(self.vertex(r, n));
        }
        for c in (1..=n).rev() {
            out.push(self.vertex(n, c));
        }
        for r in (1..=n).rev() {
            out.push(self.vertex(r, 0));
        }
        out
    }

    /// The cell adjacent to the boundary edge between two consecutive
    /// boundary vertices.
    pub fn boundary_edge_cell(&self, a: usize, b: usize) -> Option<usize> {
        let e = self.edge_between(a, b)?;
        let (x, y) = self.edge_cells(e);
        x.or(y)
    }
}

/// Clockwise angle in `[0, 2π)` that rotates direction `from` onto direction `to`.
pub fn clockwise_angle(from: (f64, f64), to: (f64, f64)) -> f64 {
    let a0 = from.1.atan2(from.0);
    let a1 = to.1.atan2(to.0);
    let tau = std::f64::consts::TAU;
    let mut d = a0 - a1;
    while d < 0.0 {
        d += tau;
    }
    while d >= tau {
        d -= tau;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_roundtrip() {
        let l = Lattice::new(5);
        for v in 0..l.num_vertices() {
            let (r, c) = l.coords(v);
            assert_eq!(l.vertex(r, c), v);
        }
        for e in 0..l.num_edges() {
            let (u, v) = l.edge_endpoints(e);
            assert_eq!(l.edge_between(u, v), Some(e));
            assert_eq!(l.edge_between(v, u), Some(e));
        }
    }

    #[test]
    fn boundary_cycle_is_ccw_and_complete() {
        let l = Lattice::new(4);
        let b = l.boundary_ccw();
        assert_eq!(b.len(), 16);
        assert_eq!(b[0], 0);
        assert_eq!(b[1], 1);
        let mut sorted = b.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 16);
        for i in 0..b.len() {
            let a = b[i];
            let c = b[(i + 1) % b.len()];
            assert!(l.edge_between(a, c).is_some());
            assert!(l.is_boundary_edge(l.edge_between(a, c).unwrap()));
        }
    }

    #[test]
    fn outward_directions() {
        let l = Lattice::new(3);
        assert_eq!(l.outward(0), Some(Dir8::SW));
        assert_eq!(l.outward(l.vertex(0, 1)), Some(Dir8::S));
        assert_eq!(l.outward(l.vertex(3, 3)), Some(Dir8::NE));
        assert_eq!(l.outward(l.vertex(1, 1)), None);
    }

    #[test]
    fn clockwise_angle_quarter_turn() {
        let north = (0.0, 1.0);
        let east = (1.0, 0.0);
        let a = clockwise_angle(north, east);
        assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert_eq!(Dir8::E.cw_rank_from(Dir8::N), 2);
        assert_eq!(Dir8::N.cw_rank_from(Dir8::E), 6);
    }

    #[test]
    fn quadrant_cells() {
        let l = Lattice::new(2);
        let v = l.vertex(1, 1);
        assert_eq!(l.quadrant_cell(v, Dir8::NE), Some(l.cell(1, 1)));
        assert_eq!(l.quadrant_cell(v, Dir8::SW), Some(l.cell(0, 0)));
        assert_eq!(l.quadrant_cell(0, Dir8::SW), None);
    }
}
