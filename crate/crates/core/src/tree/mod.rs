//! Geodesic trees with a planar rotation system, and the half-zipper checks.
//!
//! A [`PlanarTree`] stores, at every vertex, its children in clockwise order
//! starting right after the edge to the parent. That order is the rotation
//! system the contour exploration walks. Grid trees come in two flavours:
//!
//! * [`RootMode::Wired`]: all boundary vertices hang off a super-root (id
//!   `(n+1)²`, no position) through zero-weight spokes; this models the
//!   root at infinity. The super-root lists its children counterclockwise
//!   around the square starting at vertex 0, which is clockwise as seen from
//!   infinity.
//! * [`RootMode::Point`]: shortest-path tree rooted at a lattice vertex. The
//!   root's children are ordered clockwise starting from north (inclusive).

mod confluence;
mod corpus;
mod hair;
mod io;

pub use confluence::{
    compare_root_modes, compare_trees_in_ball, confluence_radius, crossing_set, AgreementReport,
    CrossingSet,
};
pub use corpus::{plane_trees, plane_trees_up_to};
pub use hair::{short_hair_subtree, Subtree};
pub use io::{parse_tree_json, TreeJson};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{clockwise_angle, Dir8, Lattice, Point};
use crate::metric::{MetricError, MetricGrid};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("no vertex lies outside the ball of radius {0}")]
    EmptyAnnulus(f64),
    #[error("input error: {0}")]
    Input(String),
    #[error("malformed tree: {0}")]
    Structure(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootMode {
    Wired,
    Point(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarTree {
    lattice: Option<Lattice>,
    root_mode: Option<RootMode>,
    positions: Vec<Option<Point>>,
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    dist: Vec<f64>,
    edge_len: Vec<f64>,
}

/// Shortest-path tree of the metric, rooted at the wired boundary or at a vertex.
pub fn build_geodesic_tree(m: &MetricGrid, mode: RootMode) -> Result<PlanarTree, TreeError> {
    let lat = m.lattice();
    let nv = lat.num_vertices();
    let sources: Vec<usize> = match mode {
        RootMode::Wired => (0..nv).filter(|&v| lat.is_boundary(v)).collect(),
        RootMode::Point(z) => {
            if !lat.contains_vertex(z) {
                return Err(MetricError::Index(z).into());
            }
            vec![z]
        }
    };
    let sp = m.shortest_paths(&sources, None, None);
    if let Some(vertex) = (0..nv).find(|&v| sp.tied[v]) {
        return Err(MetricError::Ambiguous {
            vertex,
            tie_eps: m.tie_eps(),
        }
        .into());
    }

    let (total, root) = match mode {
        RootMode::Wired => (nv + 1, nv),
        RootMode::Point(z) => (nv, z),
    };
    let mut parent: Vec<Option<usize>> = vec![None; total];
    let mut dist = vec![0.0; total];
    let mut edge_len = vec![0.0; total];
    for v in 0..nv {
        dist[v] = sp.dist[v];
        match sp.pred[v] {
            Some(p) => {
                parent[v] = Some(p);
                edge_len[v] = m.weight_between(p, v).expect("predecessor is adjacent");
            }
            None if v != root => parent[v] = Some(root),
            None => {}
        }
    }
    let mut positions: Vec<Option<Point>> = (0..nv).map(|v| Some(lat.position(v))).collect();
    if mode == RootMode::Wired {
        positions.push(None);
    }

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); total];
    if mode == RootMode::Wired {
        children[root] = lat.boundary_ccw();
    }
    for v in 0..nv {
        if let Some(p) = parent[v] {
            if p < nv {
                children[p].push(v);
            }
        }
    }
    for v in 0..nv {
        if children[v].len() < 2 {
            continue;
        }
        let reference = match parent[v] {
            Some(p) if p < nv => lat.direction(v, p).expect("parent is adjacent"),
            Some(_) => lat.outward(v).expect("super-root children are boundary vertices"),
            None => Dir8::N,
        };
        children[v].sort_by_key(|&c| {
            lat.direction(v, c)
                .expect("child is adjacent")
                .cw_rank_from(reference)
        });
    }

    Ok(PlanarTree {
        lattice: Some(lat),
        root_mode: Some(mode),
        positions,
        root,
        parent,
        children,
        dist,
        edge_len,
    })
}

impl PlanarTree {
    /// Assemble a tree from raw parts, validating the parent/children structure.
    ///
    /// `children[v]` must list exactly the vertices whose parent is `v`.
    pub fn from_parts(
        positions: Vec<Option<Point>>,
        root: usize,
        parent: Vec<Option<usize>>,
        children: Vec<Vec<usize>>,
        dist: Vec<f64>,
        edge_len: Vec<f64>,
    ) -> Result<Self, TreeError> {
        let tree = Self {
            lattice: None,
            root_mode: None,
            positions,
            root,
            parent,
            children,
            dist,
            edge_len,
        };
        tree.validate()?;
        Ok(tree)
    }

    pub(crate) fn with_lattice(
        mut self,
        lattice: Lattice,
        mode: RootMode,
    ) -> Result<Self, TreeError> {
        let nv = lattice.num_vertices();
        let expected = match mode {
            RootMode::Wired => nv + 1,
            RootMode::Point(_) => nv,
        };
        let root_ok = match mode {
            RootMode::Wired => self.root == nv,
            RootMode::Point(z) => self.root == z,
        };
        if self.len() != expected || !root_ok {
            return Err(TreeError::Structure(
                "vertex count or root does not match the lattice".into(),
            ));
        }
        for v in 0..nv {
            let want = lattice.position(v);
            if self.positions[v] != Some(want) {
                return Err(TreeError::Structure(format!("vertex {v} has the wrong position")));
            }
            if let Some(p) = self.parent[v] {
                let ok = if p == nv {
                    lattice.is_boundary(v)
                } else {
                    lattice.edge_between(v, p).is_some()
                };
                if !ok {
                    return Err(TreeError::Structure(format!(
                        "edge {v}-{p} is not a lattice edge"
                    )));
                }
            }
        }
        self.lattice = Some(lattice);
        self.root_mode = Some(mode);
        Ok(self)
    }

    /// Structural validation: sizes agree, parent/children are mutually
    /// consistent, every vertex reaches the root, distances are finite.
    pub fn validate(&self) -> Result<(), TreeError> {
        let nv = self.parent.len();
        if nv == 0 {
            return Err(TreeError::Structure("empty tree".into()));
        }
        if self.positions.len() != nv
            || self.children.len() != nv
            || self.dist.len() != nv
            || self.edge_len.len() != nv
        {
            return Err(TreeError::Structure("per-vertex arrays differ in length".into()));
        }
        if self.root >= nv || self.parent[self.root].is_some() {
            return Err(TreeError::Structure("root is missing or has a parent".into()));
        }
        let mut listed = vec![0usize; nv];
        for (v, kids) in self.children.iter().enumerate() {
            for &c in kids {
                if c >= nv || self.parent[c] != Some(v) {
                    return Err(TreeError::Structure(format!(
                        "vertex {c} listed as a child of {v} but its parent differs"
                    )));
                }
                listed[c] += 1;
            }
        }
        for v in 0..nv {
            let want = usize::from(v != self.root);
            if listed[v] != want {
                return Err(TreeError::Structure(format!(
                    "vertex {v} appears {} times in children lists",
                    listed[v]
                )));
            }
            if !self.dist[v].is_finite() || !self.edge_len[v].is_finite() {
                return Err(TreeError::Structure(format!("vertex {v} has a non-finite length")));
            }
            if let Some(p) = self.positions[v] {
                if !(p.x.is_finite() && p.y.is_finite()) {
                    return Err(TreeError::Structure(format!("vertex {v} has a bad position")));
                }
            }
        }
        // reachability: walk down from the root
        let mut seen = vec![false; nv];
        let mut stack = vec![self.root];
        let mut count = 0;
        while let Some(v) = stack.pop() {
            if seen[v] {
                return Err(TreeError::Structure("cycle in children lists".into()));
            }
            seen[v] = true;
            count += 1;
            stack.extend(self.children[v].iter().copied());
        }
        if count != nv {
            return Err(TreeError::Structure("not every vertex reaches the root".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn lattice(&self) -> Option<Lattice> {
        self.lattice
    }

    pub fn root_mode(&self) -> Option<RootMode> {
        self.root_mode
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn dist(&self, v: usize) -> f64 {
        self.dist[v]
    }

    pub fn dists(&self) -> &[f64] {
        &self.dist
    }

    /// Length of the edge from `v` to its parent (0 at the root).
    pub fn edge_len(&self, v: usize) -> f64 {
        self.edge_len[v]
    }

    pub fn position(&self, v: usize) -> Option<Point> {
        self.positions[v]
    }

    pub fn positions(&self) -> &[Option<Point>] {
        &self.positions
    }

    pub fn num_edges(&self) -> usize {
        self.len() - 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v != self.root && self.children[v].is_empty()
    }

    /// The super-root id in wired mode.
    pub fn super_root(&self) -> Option<usize> {
        match self.root_mode {
            Some(RootMode::Wired) => Some(self.root),
            _ => None,
        }
    }

    /// Whether `u` and `v` are joined by a tree edge.
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        u < self.len() && v < self.len() && (self.parent[u] == Some(v) || self.parent[v] == Some(u))
    }

    /// Cyclic clockwise order of all tree neighbours of `v`: parent first
    /// (when present), then the children.
    pub fn rotation(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree(v));
        if let Some(p) = self.parent[v] {
            out.push(p);
        }
        out.extend_from_slice(&self.children[v]);
        out
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.len()];
        for v in self.preorder() {
            if let Some(p) = self.parent[v] {
                depth[v] = depth[p] + 1;
            }
        }
        depth
    }

    /// Vertices in clockwise depth-first preorder from the root.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.children[v].iter().rev().copied());
        }
        out
    }

    /// Root-ward path from `v`, `v` first and the root last.
    pub fn path_to_root(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn is_ancestor(&self, a: usize, v: usize) -> bool {
        let mut cur = Some(v);
        while let Some(x) = cur {
            if x == a {
                return true;
            }
            cur = self.parent[x];
        }
        false
    }

    /// Deepest common ancestor.
    pub fn merge_vertex(&self, a: usize, b: usize) -> usize {
        let on_a: std::collections::HashSet<usize> = self.path_to_root(a).into_iter().collect();
        let mut cur = b;
        loop {
            if on_a.contains(&cur) {
                return cur;
            }
            cur = self.parent[cur].expect("root is a common ancestor");
        }
    }

    /// The unique tree path from `a` to `b`.
    pub fn tree_path(&self, a: usize, b: usize) -> Vec<usize> {
        let m = self.merge_vertex(a, b);
        let mut up: Vec<usize> = self.path_to_root(a);
        up.truncate(up.iter().position(|&x| x == m).expect("merge vertex on path") + 1);
        let mut down: Vec<usize> = self.path_to_root(b);
        down.truncate(down.iter().position(|&x| x == m).expect("merge vertex on path"));
        down.reverse();
        up.extend(down);
        up
    }

    /// Reference direction for the clockwise order at `v`: towards the
    /// parent, outward for children of the super-root, north at a positioned root.
    fn reference_vector(&self, v: usize) -> Option<(f64, f64)> {
        let here = self.positions[v]?;
        match self.parent[v] {
            Some(p) => match self.positions[p] {
                Some(q) => Some((q.x - here.x, q.y - here.y)),
                None => {
                    let lat = self.lattice?;
                    let d = lat.outward(self.lattice_vertex(v)?)?;
                    let (dr, dc) = d.offset();
                    Some((dc as f64, dr as f64))
                }
            },
            None => Some((0.0, 1.0)),
        }
    }

    fn lattice_vertex(&self, v: usize) -> Option<usize> {
        self.lattice.filter(|l| l.contains_vertex(v)).map(|_| v)
    }

    /// Clockwise angle at `v` from the reference direction to the edge towards `u`,
    /// computed from vertex positions; `None` when `v` or `u` has no position.
    pub fn clockwise_key(&self, v: usize, u: usize) -> Option<f64> {
        let here = self.positions[v]?;
        let there = self.positions[u]?;
        let reference = self.reference_vector(v)?;
        Some(clockwise_angle(
            reference,
            (there.x - here.x, there.y - here.y),
        ))
    }

    /// Check that every stored children order equals the geometric clockwise
    /// order of edge directions. Returns the offending vertices.
    pub fn rotation_violations(&self) -> Vec<usize> {
        let mut bad = Vec::new();
        for v in 0..self.len() {
            let kids = &self.children[v];
            if self.positions[v].is_none() {
                if !self.positionless_root_order_ok(v) {
                    bad.push(v);
                }
                continue;
            }
            let keys: Option<Vec<f64>> = kids.iter().map(|&c| self.clockwise_key(v, c)).collect();
            let ok = match keys {
                Some(keys) => {
                    let strictly_increasing = keys.windows(2).all(|w| w[0] < w[1]);
                    let after_parent = self.parent[v].is_none() || keys.iter().all(|&k| k > 0.0);
                    strictly_increasing && after_parent
                }
                None => false,
            };
            if !ok {
                bad.push(v);
            }
        }
        bad
    }

    // A vertex without a position is the super-root: its children must run
    // counterclockwise around the square's center.
    fn positionless_root_order_ok(&self, v: usize) -> bool {
        let kids = &self.children[v];
        let Some(first) = kids.first().and_then(|&c| self.positions[c]) else {
            return kids.is_empty();
        };
        let c = Point::new(0.5, 0.5);
        let angle = |p: Point| (p.y - c.y).atan2(p.x - c.x);
        let base = angle(first);
        let mut last = -1.0;
        for &k in kids {
            let Some(p) = self.positions[k] else {
                return false;
            };
            let mut a = angle(p) - base;
            if a < 0.0 {
                a += std::f64::consts::TAU;
            }
            if a <= last {
                return false;
            }
            last = a;
        }
        true
    }

    pub(crate) fn raw_parts(
        &self,
    ) -> (
        &[Option<Point>],
        usize,
        &[Option<usize>],
        &[Vec<usize>],
        &[f64],
        &[f64],
    ) {
        (
            &self.positions,
            self.root,
            &self.parent,
            &self.children,
            &self.dist,
            &self.edge_len,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfZipperReport {
    /// Every lattice vertex belongs to the tree.
    pub density: bool,
    /// Parent map acyclic, connected, `V - 1` edges.
    pub unique_paths: bool,
    /// Every non-leaf, non-root vertex separates its descendants from the root.
    pub cut_points: bool,
    pub vertices: usize,
    pub internal_vertices: usize,
    pub failures: Vec<usize>,
}

impl HalfZipperReport {
    pub fn passed(&self) -> bool {
        self.density && self.unique_paths && self.cut_points
    }
}

/// Check the discrete half-zipper axioms. Leaves are exempt from the cut-point
/// test (they play the role of geodesic starting points).
pub fn verify_half_zipper(tree: &PlanarTree) -> HalfZipperReport {
    let nv = tree.len();
    let unique_paths = tree.validate().is_ok();
    let density = match tree.lattice() {
        Some(lat) => {
            let grid_vertices = lat.num_vertices();
            unique_paths && (0..grid_vertices).all(|v| v < nv && (v == tree.root || tree.parent[v].is_some()))
        }
        None => unique_paths,
    };

    // Articulation test on the undirected edge set (Tarjan lowpoints).
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for v in 0..nv {
        if let Some(p) = tree.parent[v] {
            if p < nv {
                adj[v].push(p);
                adj[p].push(v);
            }
        }
    }
    let mut disc = vec![usize::MAX; nv];
    let mut low = vec![usize::MAX; nv];
    let mut dfs_parent = vec![usize::MAX; nv];
    let mut timer = 0;
    let mut stack: Vec<(usize, usize)> = vec![(tree.root, 0)];
    disc[tree.root] = 0;
    low[tree.root] = 0;
    timer += 1;
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if *next < adj[v].len() {
            let u = adj[v][*next];
            *next += 1;
            if disc[u] == usize::MAX {
                disc[u] = timer;
                low[u] = timer;
                timer += 1;
                dfs_parent[u] = v;
                stack.push((u, 0));
            } else if u != dfs_parent[v] {
                low[v] = low[v].min(disc[u]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                low[p] = low[p].min(low[v]);
            }
        }
    }
    let mut failures = Vec::new();
    let mut internal = 0;
    for v in 0..nv {
        if v == tree.root || tree.children[v].is_empty() {
            continue;
        }
        internal += 1;
        let separates = tree.children[v]
            .iter()
            .all(|&c| disc[c] != usize::MAX && dfs_parent[c] == v && low[c] >= disc[v]);
        if !separates {
            failures.push(v);
        }
    }
    let cut_points = unique_paths && failures.is_empty();
    failures.truncate(32);
    HalfZipperReport {
        density,
        unique_paths,
        cut_points,
        vertices: nv,
        internal_vertices: internal,
        failures,
    }
}

/// Which sides of an oriented tree path have branches attached at interior vertices.
///
/// Sides are read off the rotation system: travelling from `prev` to `next`
/// through `v`, a branch is on the right when it comes strictly between
/// `next` and `prev` in the clockwise order at `v`.
pub fn hairy_check(tree: &PlanarTree, path: &[usize]) -> Result<(bool, bool), TreeError> {
    if path.len() < 2 {
        return Err(TreeError::Input("path needs at least two vertices".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for &v in path {
        if v >= tree.len() || !seen.insert(v) {
            return Err(TreeError::Input(format!("vertex {v} invalid or repeated")));
        }
    }
    if path.windows(2).any(|p| !tree.adjacent(p[0], p[1])) {
        return Err(TreeError::Input("path uses a non-tree edge".into()));
    }
    let (mut left, mut right) = (false, false);
    for w in path.windows(3) {
        let (prev, v, next) = (w[0], w[1], w[2]);
        let rot = tree.rotation(v);
        let k = rot.len();
        let ip = rot.iter().position(|&x| x == prev).expect("prev adjacent");
        let inx = rot.iter().position(|&x| x == next).expect("next adjacent");
        let span = (ip + k - inx) % k;
        for j in 0..k {
            if j == ip || j == inx {
                continue;
            }
            if (j + k - inx) % k < span {
                right = true;
            } else {
                left = true;
            }
        }
    }
    Ok((left, right))
}
