//! Contour exploration of a planar tree: the discrete space-filling loop.
//!
//! The curve walks around the tree clockwise, one *corner* per step. At a
//! vertex it turns from the incoming edge to the next edge in the rotation,
//! sweeping the angular sector between them; the grid quarter-cells in that
//! sector are the curve's *pieces*. Every quarter-cell of the grid lies in
//! exactly one sector, so the curve fills the square. The tree stays on the
//! curve's right and the dual tree on its left.

mod disk;
mod dual;
mod io;
mod order;

pub use disk::{disk_check, DiskReport};
pub use dual::{dual_tree, zipper_check, DualEdge, DualTree, ZipperReport};
pub use io::{parse_curve_binary, parse_curve_json, CurveJson};
pub use order::{recover_trees, visit_order_predicate, VisitOrder};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::AreaMeasure;
use crate::lattice::{Dir8, Lattice, Point};
use crate::tree::{PlanarTree, RootMode, TreeError};

#[derive(Debug, Error)]
pub enum WheelError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("rotation system disagrees with the embedding at vertices {0:?}")]
    Embedding(Vec<usize>),
    #[error("structural error: {0}")]
    Structure(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("vertices {z} and {w} are in ancestor relation; no proper merge point")]
    DegenerateMerge { z: usize, w: usize },
    #[error("corrupted corner word: {0}")]
    Decode(String),
}

/// Side of the tree edge the curve runs along, for edges oriented parent → child.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// Descending into a child.
    Left,
    /// Climbing back to the parent.
    Right,
}

/// One step of the contour: at `vertex`, turn from the edge to `incoming`
/// to the edge to `outgoing`, then walk along the latter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corner {
    pub vertex: usize,
    pub incoming: usize,
    pub outgoing: usize,
    pub side: Side,
    /// Length of the outgoing tree edge.
    pub length: f64,
}

/// Part of the plane swept by a corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Piece {
    /// The quarter of `cell` at its corner `vertex`.
    Quarter { vertex: usize, cell: usize },
    /// The outer face near boundary vertex `vertex` (point-rooted trees).
    Outer { vertex: usize },
    /// A pass through the super-root between consecutive boundary vertices.
    Infinity { from: usize, to: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct WheelCurve {
    pub(crate) lattice: Option<Lattice>,
    pub(crate) root_mode: Option<RootMode>,
    /// Positions for trees without a lattice.
    pub(crate) positions: Option<Vec<Option<Point>>>,
    pub(crate) num_vertices: usize,
    pub(crate) corners: Vec<Corner>,
    pub(crate) piece_start: Vec<usize>,
    pub(crate) pieces: Vec<Piece>,
    pub(crate) cells: Vec<usize>,
    pub(crate) cell_corner: Vec<usize>,
    pub(crate) times: Vec<f64>,
}

fn direction_to(lat: &Lattice, tree_len: usize, v: usize, u: usize) -> Option<Dir8> {
    if u == lat.num_vertices() && tree_len > u {
        lat.outward(v)
    } else {
        lat.direction(v, u)
    }
}

/// Pieces swept at lattice vertex `v` turning clockwise from `d_in` to `d_out`.
pub(crate) fn sector_pieces(
    lat: &Lattice,
    mode: RootMode,
    v: usize,
    d_in: Dir8,
    d_out: Dir8,
    out: &mut Vec<Piece>,
) {
    let mut r = d_out.cw_rank_from(d_in);
    if r == 0 {
        r = 8;
    }
    let mut outside_run = false;
    for k in 1..r {
        let d = Dir8::from_index(d_in.index() + k);
        if !Dir8::QUADRANTS.contains(&d) {
            continue;
        }
        match lat.quadrant_cell(v, d) {
            Some(cell) => {
                out.push(Piece::Quarter { vertex: v, cell });
                outside_run = false;
            }
            None => {
                if matches!(mode, RootMode::Point(_)) && !outside_run {
                    out.push(Piece::Outer { vertex: v });
                }
                outside_run = true;
            }
        }
    }
}

/// Walk the tree clockwise from the root's distinguished corner.
///
/// Times come from `mu` when given, else every cell gets equal mass.
pub fn contour_exploration(
    tree: &PlanarTree,
    mu: Option<&AreaMeasure>,
) -> Result<WheelCurve, WheelError> {
    if tree.num_edges() == 0 {
        return Err(WheelError::Parameter("tree has no edges".into()));
    }
    let bad = tree.rotation_violations();
    if !bad.is_empty() {
        return Err(WheelError::Embedding(bad));
    }
    let nv = tree.len();
    let mut child_slot = vec![0usize; nv];
    for v in 0..nv {
        for (i, &c) in tree.children(v).iter().enumerate() {
            child_slot[c] = i;
        }
    }
    let rotation_index = |v: usize, u: usize| -> usize {
        if tree.parent(v) == Some(u) {
            0
        } else {
            child_slot[u] + usize::from(tree.parent(v).is_some())
        }
    };
    let rotation_at = |v: usize, i: usize| -> usize {
        let has_parent = tree.parent(v).is_some();
        let deg = tree.degree(v);
        let i = i % deg;
        match (has_parent, i) {
            (true, 0) => tree.parent(v).expect("checked"),
            (true, i) => tree.children(v)[i - 1],
            (false, i) => tree.children(v)[i],
        }
    };

    let root = tree.root();
    let lattice = tree.lattice();
    let mode = tree.root_mode();
    let total = 2 * tree.num_edges();
    let mut corners = Vec::with_capacity(total);
    let mut piece_start = Vec::with_capacity(total + 1);
    let mut pieces = Vec::new();
    let root_children = tree.children(root);
    let (mut v, mut inc) = (root, root_children[root_children.len() - 1]);
    let mut out = root_children[0];
    for _ in 0..total {
        let side = if tree.parent(out) == Some(v) {
            Side::Left
        } else {
            Side::Right
        };
        let length = match side {
            Side::Left => tree.edge_len(out),
            Side::Right => tree.edge_len(v),
        };
        corners.push(Corner {
            vertex: v,
            incoming: inc,
            outgoing: out,
            side,
            length,
        });
        piece_start.push(pieces.len());
        if let (Some(lat), Some(mode)) = (lattice, mode) {
            if Some(v) == tree.super_root() {
                pieces.push(Piece::Infinity { from: inc, to: out });
            } else {
                let d_in = direction_to(&lat, nv, v, inc).ok_or_else(|| {
                    WheelError::Structure(format!("edge {v}-{inc} is not a lattice edge"))
                })?;
                let d_out = direction_to(&lat, nv, v, out).ok_or_else(|| {
                    WheelError::Structure(format!("edge {v}-{out} is not a lattice edge"))
                })?;
                sector_pieces(&lat, mode, v, d_in, d_out, &mut pieces);
            }
        }
        let next = rotation_at(out, rotation_index(out, v) + 1);
        inc = v;
        v = out;
        out = next;
    }
    piece_start.push(pieces.len());

    let num_cells = lattice.map_or(0, |l| l.num_cells());
    let mut seen = vec![false; num_cells];
    let mut cells = Vec::with_capacity(num_cells);
    let mut cell_corner = Vec::with_capacity(num_cells);
    for k in 0..corners.len() {
        for p in &pieces[piece_start[k]..piece_start[k + 1]] {
            if let Piece::Quarter { cell, .. } = *p {
                if !seen[cell] {
                    seen[cell] = true;
                    cells.push(cell);
                    cell_corner.push(k);
                }
            }
        }
    }
    if cells.len() != num_cells {
        return Err(WheelError::Structure(format!(
            "contour visited {} of {num_cells} cells",
            cells.len()
        )));
    }

    let mut curve = WheelCurve {
        lattice,
        root_mode: mode,
        positions: lattice.is_none().then(|| tree.positions().to_vec()),
        num_vertices: nv,
        corners,
        piece_start,
        pieces,
        cells,
        cell_corner,
        times: Vec::new(),
    };
    match mu {
        Some(mu) => area_parametrization(&mut curve, mu)?,
        None => curve.times = uniform_times(curve.cells.len()),
    }
    Ok(curve)
}

fn uniform_times(k: usize) -> Vec<f64> {
    (1..=k).map(|i| i as f64 / k as f64).collect()
}

/// Fill the visit times with cumulative `mu`-mass in visit order.
pub fn area_parametrization(curve: &mut WheelCurve, mu: &AreaMeasure) -> Result<(), WheelError> {
    let n = curve
        .lattice
        .map(|l| l.n())
        .ok_or_else(|| WheelError::Input("curve has no grid".into()))?;
    if mu.n() != n {
        return Err(WheelError::Input(format!(
            "measure is on a {}-grid, curve on a {n}-grid",
            mu.n()
        )));
    }
    let mut acc = 0.0;
    let mut cum = Vec::with_capacity(curve.cells.len());
    for &c in &curve.cells {
        acc += mu.mass(c);
        cum.push(acc);
    }
    curve.times = cum.into_iter().map(|x| x / acc).collect();
    Ok(())
}

impl WheelCurve {
    pub fn lattice(&self) -> Option<Lattice> {
        self.lattice
    }

    pub fn root_mode(&self) -> Option<RootMode> {
        self.root_mode
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    pub fn pieces(&self, corner: usize) -> &[Piece] {
        &self.pieces[self.piece_start[corner]..self.piece_start[corner + 1]]
    }

    pub fn all_pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Cells in order of first visit.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// Corner index at which each cell of `cells()` is first entered.
    pub fn cell_corners(&self) -> &[usize] {
        &self.cell_corner
    }

    /// Cumulative mass after each cell visit; the last value is 1.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Index into `cells()` of the cell containing the center of the square.
    pub fn anchor(&self) -> Option<usize> {
        let target = self.lattice?.center_cell();
        self.cells.iter().position(|&c| c == target)
    }

    /// Times shifted so that the center cell is visited at time 0.
    pub fn anchored_times(&self) -> Vec<f64> {
        match self.anchor() {
            Some(a) => {
                let t0 = self.times[a];
                self.times.iter().map(|t| t - t0).collect()
            }
            None => self.times.clone(),
        }
    }

    /// Cells whose visit time lies in `[a, b]`.
    pub fn cells_in_time(&self, a: f64, b: f64) -> &[usize] {
        let lo = self.times.partition_point(|&t| t < a);
        let hi = self.times.partition_point(|&t| t <= b);
        &self.cells[lo..hi.max(lo)]
    }

    /// First corner index at each vertex; `None` for vertices never visited.
    pub fn first_visits(&self) -> Vec<Option<usize>> {
        let mut first = vec![None; self.num_vertices];
        for (k, c) in self.corners.iter().enumerate() {
            if first[c.vertex].is_none() {
                first[c.vertex] = Some(k);
            }
        }
        first
    }

    /// Check the closed-circuit, edge-twice, cell-once and time invariants.
    pub fn validate(&self) -> Result<(), WheelError> {
        let k = self.corners.len();
        if k == 0 || k % 2 != 0 {
            return Err(WheelError::Decode(format!("corner count {k} is not a positive even number")));
        }
        if self.piece_start.len() != k + 1
            || self.piece_start[0] != 0
            || self.piece_start[k] != self.pieces.len()
            || self.piece_start.windows(2).any(|w| w[0] > w[1])
        {
            return Err(WheelError::Decode("piece offsets are inconsistent".into()));
        }
        let nv = self.num_vertices;
        let mut traversals = std::collections::HashMap::new();
        for (i, c) in self.corners.iter().enumerate() {
            if c.vertex >= nv || c.incoming >= nv || c.outgoing >= nv {
                return Err(WheelError::Decode(format!("corner {i} names a vertex out of range")));
            }
            let next = &self.corners[(i + 1) % k];
            if next.vertex != c.outgoing || next.incoming != c.vertex {
                return Err(WheelError::Decode(format!("corners {i} and {} do not chain", (i + 1) % k)));
            }
            if c.vertex == c.outgoing || !c.length.is_finite() || c.length < 0.0 {
                return Err(WheelError::Decode(format!("corner {i} has a bad edge")));
            }
            let key = (c.vertex.min(c.outgoing), c.vertex.max(c.outgoing));
            let entry = traversals.entry(key).or_insert((0usize, 0usize));
            match c.side {
                Side::Left => entry.0 += 1,
                Side::Right => entry.1 += 1,
            }
        }
        if traversals.values().any(|&(l, r)| l != 1 || r != 1) {
            return Err(WheelError::Decode("some edge is not traversed once per side".into()));
        }
        if traversals.len() + 1 != nv {
            return Err(WheelError::Decode(format!(
                "{} edges cannot span {nv} vertices",
                traversals.len()
            )));
        }
        let num_cells = self.lattice.map_or(0, |l| l.num_cells());
        let mut seen = vec![false; num_cells];
        if self.cells.len() != num_cells || self.cell_corner.len() != num_cells {
            return Err(WheelError::Decode("cell sequence has the wrong length".into()));
        }
        for (&c, &corner) in self.cells.iter().zip(&self.cell_corner) {
            if c >= num_cells || seen[c] || corner >= k {
                return Err(WheelError::Decode(format!("cell {c} is repeated or out of range")));
            }
            seen[c] = true;
        }
        if let Some(lat) = self.lattice {
            for p in &self.pieces {
                let ok = match *p {
                    Piece::Quarter { vertex, cell } => {
                        vertex < lat.num_vertices()
                            && cell < lat.num_cells()
                            && Dir8::QUADRANTS
                                .iter()
                                .any(|&q| lat.quadrant_cell(vertex, q) == Some(cell))
                    }
                    Piece::Outer { vertex } => {
                        lat.contains_vertex(vertex) && lat.is_boundary(vertex)
                    }
                    Piece::Infinity { from, to } => {
                        lat.contains_vertex(from) && lat.contains_vertex(to)
                    }
                };
                if !ok {
                    return Err(WheelError::Decode(format!("invalid piece {p:?}")));
                }
            }
            let mut quarter_seen = std::collections::HashSet::new();
            for p in &self.pieces {
                if let Piece::Quarter { vertex, cell } = *p {
                    if !quarter_seen.insert((vertex, cell)) {
                        return Err(WheelError::Decode(format!("quarter {vertex}/{cell} repeated")));
                    }
                }
            }
            if quarter_seen.len() != 4 * lat.num_cells() {
                return Err(WheelError::Decode("quarters do not cover the grid".into()));
            }
        } else if !self.pieces.is_empty() {
            return Err(WheelError::Decode("pieces without a grid".into()));
        }
        if self.times.len() != self.cells.len() {
            return Err(WheelError::Decode("times and cells differ in length".into()));
        }
        if !self.times.is_empty() {
            let increasing = self.times.windows(2).all(|w| w[0] < w[1]);
            let last = self.times[self.times.len() - 1];
            if !increasing || self.times[0] <= 0.0 || last != 1.0 {
                return Err(WheelError::Decode("times must increase strictly to 1".into()));
            }
        }
        if let Some(p) = &self.positions {
            if p.len() != nv {
                return Err(WheelError::Decode("positions have the wrong length".into()));
            }
        }
        Ok(())
    }
}
