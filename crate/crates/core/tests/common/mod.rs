//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::Deserialize;
use wheel_lab_core::field::GridField;
use wheel_lab_core::lattice::{Lattice, Point};
use wheel_lab_core::metric::MetricGrid;
use wheel_lab_core::tree::PlanarTree;
use wheel_lab_core::wheel::{Piece, WheelCurve};

#[derive(Deserialize)]
struct OracleFile {
    n: usize,
    xi: f64,
    tie_eps: f64,
    fields: Vec<OracleField>,
}

#[derive(Deserialize)]
struct OracleField {
    name: String,
    values: Vec<f64>,
}

pub struct OracleCorpus {
    pub xi: f64,
    pub tie_eps: f64,
    pub fields: Vec<(String, GridField)>,
}

pub fn oracle_corpus() -> OracleCorpus {
    let text = include_str!("../data/oracle_fields_3x3.json");
    let file: OracleFile = serde_json::from_str(text).expect("corpus parses");
    OracleCorpus {
        xi: file.xi,
        tie_eps: file.tie_eps,
        fields: file
            .fields
            .into_iter()
            .map(|f| (f.name, GridField::explicit(file.n, f.values).expect("valid corpus field")))
            .collect(),
    }
}

/// Edge weight recomputed from the field values: mean of `delta * exp(xi * h)`
/// at the endpoints, times the stored jitter factor.
pub fn oracle_edge_weight(field: &GridField, m: &MetricGrid, xi: f64, u: usize, v: usize) -> f64 {
    let lat = m.lattice();
    let delta = 1.0 / lat.n() as f64;
    let h = |x: usize| {
        let (r, c) = lat.coords(x);
        field.vertex_value(r, c)
    };
    let wu = delta * (xi * h(u)).exp();
    let wv = delta * (xi * h(v)).exp();
    let e = lat.edge_between(u, v).expect("grid neighbours");
    (wu + wv) / 2.0 * (1.0 + m.tie_jitter(e))
}

fn grid_neighbours(side: usize, v: usize) -> Vec<usize> {
    let (r, c) = (v / side, v % side);
    let mut out = Vec::new();
    if r > 0 {
        out.push(v - side);
    }
    if r + 1 < side {
        out.push(v + side);
    }
    if c > 0 {
        out.push(v - 1);
    }
    if c + 1 < side {
        out.push(v + 1);
    }
    out
}

/// Minimum-weight simple path by exhaustive enumeration. Returns the path,
/// its length and the runner-up length (infinite when only one path exists).
pub fn brute_force_geodesic(
    field: &GridField,
    m: &MetricGrid,
    xi: f64,
    z: usize,
    w: usize,
) -> (Vec<usize>, f64, f64) {
    let side = m.lattice().side();
    let mut best = (Vec::new(), f64::INFINITY);
    let mut second = f64::INFINITY;
    let mut path = vec![z];
    let mut on_path = vec![false; side * side];
    on_path[z] = true;
    fn dfs(
        ctx: &(&GridField, &MetricGrid, f64, usize, usize),
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        len: f64,
        best: &mut (Vec<usize>, f64),
        second: &mut f64,
    ) {
        let (field, m, xi, side, target) = *ctx;
        let v = *path.last().unwrap();
        if v == target {
            if len < best.1 {
                *second = best.1;
                *best = (path.clone(), len);
            } else if len < *second {
                *second = len;
            }
            return;
        }
        for u in grid_neighbours(side, v) {
            if on_path[u] {
                continue;
            }
            let step = oracle_edge_weight(field, m, xi, v, u);
            on_path[u] = true;
            path.push(u);
            dfs(ctx, path, on_path, len + step, best, second);
            path.pop();
            on_path[u] = false;
        }
    }
    dfs(&(field, m, xi, side, w), &mut path, &mut on_path, 0.0, &mut best, &mut second);
    (best.0, best.1, second)
}

/// Union-find with path halving.
pub struct Dsu(Vec<usize>);

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Component representative per vertex of the tree minus `removed` (`None` for removed vertices).
pub fn components_without(tree: &PlanarTree, removed: &dyn Fn(usize) -> bool) -> Vec<Option<usize>> {
    let n = tree.len();
    let mut dsu = Dsu::new(n);
    for v in 0..n {
        if let Some(p) = tree.parent(v) {
            if !removed(v) && !removed(p) {
                dsu.union(v, p);
            }
        }
    }
    (0..n).map(|v| (!removed(v)).then(|| dsu.find(v))).collect()
}

pub fn brute_diameter(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.max(points[i].dist(points[j]));
        }
    }
    d
}

/// Zero-boundary Green function `2 pi L^{-1}` from the sine eigenbasis.
pub fn green_sine_series(n: usize, a: (usize, usize), b: (usize, usize)) -> f64 {
    let nf = n as f64;
    let mut g = 0.0;
    for j in 1..n {
        for k in 1..n {
            let (jf, kf) = (j as f64, k as f64);
            let phi = |p: (usize, usize)| {
                (2.0 / nf) * (jf * PI * p.0 as f64 / nf).sin() * (kf * PI * p.1 as f64 / nf).sin()
            };
            let lambda = 4.0 - 2.0 * (jf * PI / nf).cos() - 2.0 * (kf * PI / nf).cos();
            g += phi(a) * phi(b) / lambda;
        }
    }
    2.0 * PI * g
}

/// Crossing vertices found by walking every qualifying vertex's path to the root.
pub fn crossing_filter(tree: &PlanarTree, t: f64, s: f64) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for v in 0..tree.len() {
        if tree.dist(v) < s {
            continue;
        }
        let mut cur = v;
        let mut hit = None;
        while let Some(p) = tree.parent(cur) {
            if tree.dist(p) < t && t <= tree.dist(cur) {
                hit = Some(cur);
            }
            cur = p;
        }
        out.insert(hit.expect("every deep path crosses the layer"));
    }
    out
}

/// Simple connectivity of the region swept by corners `start..start+len` of a
/// wired curve, decided on a pixel raster (one pixel per quarter cell) of
/// the sphere obtained by collapsing the square's rim to one point.
///
/// Closed quarters are 8-connected, the open complement is 4-connected; the
/// region is a disk exactly when both are connected. `None` when the
/// complement is empty.
pub fn raster_disk(curve: &WheelCurve, start: usize, len: usize) -> Option<bool> {
    let lat: Lattice = curve.lattice().expect("grid curve");
    let n = lat.n();
    let side = 2 * n;
    let total = curve.len();
    let mut region = vec![false; side * side];
    let mut inf_piece = false;
    for k in 0..len {
        for piece in curve.pieces((start + k) % total) {
            match *piece {
                Piece::Quarter { vertex, cell } => {
                    let (vr, vc) = lat.coords(vertex);
                    let (r, c) = lat.cell_coords(cell);
                    region[(2 * r + vr - r) * side + 2 * c + vc - c] = true;
                }
                Piece::Infinity { .. } => inf_piece = true,
                Piece::Outer { .. } => panic!("raster oracle handles wired curves only"),
            }
        }
    }
    let on_rim = |i: usize| {
        let (r, c) = (i / side, i % side);
        r == 0 || c == 0 || r + 1 == side || c + 1 == side
    };
    let inf_in_region = inf_piece || (0..side * side).any(|i| region[i] && on_rim(i));
    let inf = side * side;
    let label = |inside: bool, diagonal: bool| -> usize {
        let mut dsu = Dsu::new(side * side + 1);
        for r in 0..side {
            for c in 0..side {
                let i = r * side + c;
                if region[i] != inside {
                    continue;
                }
                let mut nb = vec![(r + 1, c), (r, c + 1)];
                if diagonal {
                    nb.push((r + 1, c + 1));
                    if c > 0 {
                        nb.push((r + 1, c - 1));
                    }
                }
                for (rr, cc) in nb {
                    if rr < side && cc < side && region[rr * side + cc] == inside {
                        dsu.union(i, rr * side + cc);
                    }
                }
                if on_rim(i) && inf_in_region == inside {
                    dsu.union(i, inf);
                }
            }
        }
        let mut roots = BTreeSet::new();
        for i in 0..side * side {
            if region[i] == inside {
                roots.insert(dsu.find(i));
            }
        }
        if inf_in_region == inside {
            roots.insert(dsu.find(inf));
        }
        roots.len()
    };
    let complement = label(false, false);
    if complement == 0 {
        return None;
    }
    Some(label(true, true) == 1 && complement == 1)
}

/// Preorder rank of every vertex by an explicit recursive walk over the clockwise children.
pub fn preorder_rank(tree: &PlanarTree) -> Vec<usize> {
    fn walk(tree: &PlanarTree, v: usize, next: &mut usize, rank: &mut [usize]) {
        rank[v] = *next;
        *next += 1;
        for &c in tree.children(v) {
            walk(tree, c, next, rank);
        }
    }
    let mut rank = vec![usize::MAX; tree.len()];
    let mut next = 0;
    walk(tree, tree.root(), &mut next, &mut rank);
    rank
}

/// Count how often each unordered tree edge occurs in the corner word, per side.
pub fn edge_side_counts(curve: &WheelCurve) -> BTreeMap<(usize, usize), (usize, usize)> {
    use wheel_lab_core::wheel::Side;
    let mut out: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for c in curve.corners() {
        let key = (c.vertex.min(c.outgoing), c.vertex.max(c.outgoing));
        let slot = out.entry(key).or_default();
        match c.side {
            Side::Left => slot.0 += 1,
            Side::Right => slot.1 += 1,
        }
    }
    out
}
