//! The dual tree: duals of the primal edges the tree does not use.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Piece, WheelCurve, WheelError};
use crate::lattice::{Dir8, Lattice};
use crate::tree::{PlanarTree, RootMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualEdge {
    pub a: usize,
    pub b: usize,
    /// The primal lattice edge this edge crosses.
    pub primal: usize,
}

/// Spanning tree on the faces: the `n²` cells, plus the outer face (id `n²`)
/// for point-rooted trees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualTree {
    pub num_faces: usize,
    pub outer: Option<usize>,
    pub root: usize,
    /// Sorted by primal edge id.
    pub edges: Vec<DualEdge>,
    pub parent: Vec<Option<usize>>,
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

impl DualTree {
    fn from_edges(lat: Lattice, mode: RootMode, mut edges: Vec<DualEdge>) -> Result<Self, WheelError> {
        let cells = lat.num_cells();
        let (num_faces, outer, root) = match mode {
            RootMode::Wired => (cells, None, 0),
            RootMode::Point(_) => (cells + 1, Some(cells), cells),
        };
        edges.sort();
        edges.dedup();
        if edges.windows(2).any(|w| w[0].primal == w[1].primal) {
            return Err(WheelError::Structure("a primal edge has two different duals".into()));
        }
        let mut uf: Vec<usize> = (0..num_faces).collect();
        let mut adj = vec![Vec::new(); num_faces];
        for e in &edges {
            if e.a >= num_faces || e.b >= num_faces || e.a == e.b {
                return Err(WheelError::Structure(format!("bad dual edge {e:?}")));
            }
            let (ra, rb) = (find(&mut uf, e.a), find(&mut uf, e.b));
            if ra == rb {
                return Err(WheelError::Structure(format!(
                    "dual edges close a cycle at primal edge {}",
                    e.primal
                )));
            }
            uf[ra] = rb;
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        if edges.len() + 1 != num_faces {
            return Err(WheelError::Structure(format!(
                "{} dual edges cannot span {num_faces} faces",
                edges.len()
            )));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let mut parent = vec![None; num_faces];
        let mut seen = vec![false; num_faces];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(f) = queue.pop_front() {
            for &g in &adj[f] {
                if !seen[g] {
                    seen[g] = true;
                    parent[g] = Some(f);
                    queue.push_back(g);
                }
            }
        }
        Ok(Self {
            num_faces,
            outer,
            root,
            edges,
            parent,
        })
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_primal(&self, e: usize) -> bool {
        self.edges.binary_search_by_key(&e, |d| d.primal).is_ok()
    }
}

/// Dual tree of a lattice tree, built directly from the primal edges it leaves out.
///
/// For wired trees the boundary edges are not part of the graph (the spokes
/// to the super-root replace them), so the dual lives on the cells alone.
pub fn dual_tree(tree: &PlanarTree) -> Result<DualTree, WheelError> {
    let (lat, mode) = tree
        .lattice()
        .zip(tree.root_mode())
        .ok_or_else(|| WheelError::Structure("dual tree needs a lattice tree".into()))?;
    let outer = lat.num_cells();
    let mut edges = Vec::new();
    for e in 0..lat.num_edges() {
        let (u, v) = lat.edge_endpoints(e);
        if tree.adjacent(u, v) || (mode == RootMode::Wired && lat.is_boundary_edge(e)) {
            continue;
        }
        let (x, y) = lat.edge_cells(e);
        let (a, b) = (x.unwrap_or(outer), y.unwrap_or(outer));
        edges.push(DualEdge {
            a: a.min(b),
            b: a.max(b),
            primal: e,
        });
    }
    DualTree::from_edges(lat, mode, edges)
}

fn quadrant_of(lat: &Lattice, v: usize, cell: usize) -> Option<Dir8> {
    Dir8::QUADRANTS
        .into_iter()
        .find(|&q| lat.quadrant_cell(v, q) == Some(cell))
}

/// Dual edges crossed between consecutive pieces of one corner at lattice vertex `v`.
pub(crate) fn corner_separators(
    lat: &Lattice,
    v: usize,
    pieces: &[Piece],
) -> Result<Vec<DualEdge>, WheelError> {
    let outer = lat.num_cells();
    let face = |p: &Piece| match *p {
        Piece::Quarter { cell, .. } => Ok(cell),
        Piece::Outer { .. } => Ok(outer),
        Piece::Infinity { .. } => Err(WheelError::Decode("pass through infinity inside a sector".into())),
    };
    let quad = |p: &Piece| match *p {
        Piece::Quarter { vertex, cell } if vertex == v => quadrant_of(lat, v, cell),
        _ => None,
    };
    let mut out = Vec::new();
    for w in pieces.windows(2) {
        let sep = match (quad(&w[0]), quad(&w[1])) {
            (Some(p), Some(q)) if q.index() == (p.index() + 2) % 8 => Dir8::from_index(p.index() + 1),
            (Some(p), None) if matches!(w[1], Piece::Outer { vertex } if vertex == v) => {
                Dir8::from_index(p.index() + 1)
            }
            (None, Some(q)) if matches!(w[0], Piece::Outer { vertex } if vertex == v) => {
                Dir8::from_index(q.index() + 7)
            }
            _ => {
                return Err(WheelError::Decode(format!(
                    "pieces {:?} and {:?} are not adjacent around vertex {v}",
                    w[0], w[1]
                )))
            }
        };
        let u = lat
            .neighbor(v, sep)
            .ok_or_else(|| WheelError::Decode(format!("no lattice edge {sep:?} of vertex {v}")))?;
        let primal = lat.edge_between(v, u).expect("axis neighbours share an edge");
        let (a, b) = (face(&w[0])?, face(&w[1])?);
        out.push(DualEdge {
            a: a.min(b),
            b: a.max(b),
            primal,
        });
    }
    Ok(out)
}

/// Dual tree read off the curve: consecutive pieces of a corner are separated
/// by a primal edge outside the tree, whose dual joins their faces.
pub(crate) fn dual_from_curve(curve: &WheelCurve) -> Result<DualTree, WheelError> {
    let (lat, mode) = curve
        .lattice
        .zip(curve.root_mode)
        .ok_or_else(|| WheelError::Decode("curve has no grid".into()))?;
    let mut by_primal: BTreeMap<usize, DualEdge> = BTreeMap::new();
    for (k, c) in curve.corners.iter().enumerate() {
        if c.vertex >= lat.num_vertices() {
            continue;
        }
        for e in corner_separators(&lat, c.vertex, curve.pieces(k))? {
            if let Some(prev) = by_primal.insert(e.primal, e) {
                if prev != e {
                    return Err(WheelError::Decode(format!("edge {} has two duals", e.primal)));
                }
            }
        }
    }
    DualTree::from_edges(lat, mode, by_primal.into_values().collect())
        .map_err(|e| WheelError::Decode(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZipperReport {
    pub corners: usize,
    /// Every corner turns between two tree edges (the tree is on the right).
    pub tree_on_right: bool,
    /// Every edge crossed inside a sector is a dual-tree edge (the dual is on the left).
    pub dual_on_left: bool,
    /// No primal edge is both a tree edge and crossed by a dual-tree edge.
    pub disjoint: bool,
    pub failures: Vec<usize>,
}

impl ZipperReport {
    pub fn passed(&self) -> bool {
        self.tree_on_right && self.dual_on_left && self.disjoint
    }
}

pub fn zipper_check(
    curve: &WheelCurve,
    tree: &PlanarTree,
    dual: &DualTree,
) -> Result<ZipperReport, WheelError> {
    let lat = curve
        .lattice
        .ok_or_else(|| WheelError::Input("curve has no grid".into()))?;
    let mut failures = Vec::new();
    let mut right = true;
    let mut left = true;
    for (k, c) in curve.corners.iter().enumerate() {
        let r_ok = tree.adjacent(c.vertex, c.incoming) && tree.adjacent(c.vertex, c.outgoing);
        let l_ok = c.vertex >= lat.num_vertices()
            || corner_separators(&lat, c.vertex, curve.pieces(k))?
                .iter()
                .all(|e| dual.edges.binary_search(e).is_ok());
        right &= r_ok;
        left &= l_ok;
        if !(r_ok && l_ok) {
            failures.push(k);
        }
    }
    let disjoint = dual.edges.iter().all(|e| {
        let (u, v) = lat.edge_endpoints(e.primal);
        !tree.adjacent(u, v)
    });
    Ok(ZipperReport {
        corners: curve.corners.len(),
        tree_on_right: right,
        dual_on_left: left,
        disjoint,
        failures,
    })
}
