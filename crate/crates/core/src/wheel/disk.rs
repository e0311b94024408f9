//! Topology of the region swept by an interval of the curve.
//!
//! The region is the union of the closed quarter-cells (and outer sectors)
//! of the corners in the interval. It is examined on the sphere obtained by
//! closing up the square at infinity:
//!
//! * wired trees: the boundary of the square is collapsed to the point at
//!   infinity (the wired boundary *is* the discrete infinity);
//! * point-rooted trees: the outside of the square is one more face, split
//!   into one sector per boundary vertex by rays from the boundary edge
//!   midpoints to infinity.
//!
//! Coordinates: lattice points of the half-step grid are `(i, j)` with
//! `0 <= i, j <= 2n` (row, column); crossing points use quarter steps.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Piece, WheelCurve, WheelError};
use crate::lattice::Lattice;
use crate::tree::RootMode;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskReport {
    pub start: usize,
    pub len: usize,
    /// Cells with at least one quarter in the region.
    pub cells: Vec<usize>,
    /// Lattice vertices with a corner in the interval.
    pub vertices: Vec<usize>,
    pub euler: i64,
    pub components: usize,
    /// The interval's complement sweeps no area, so the region is everything.
    pub full_circle: bool,
    pub start_on_boundary: bool,
    pub end_on_boundary: bool,
}

impl DiskReport {
    pub fn simply_connected(&self) -> bool {
        self.euler == 1 && self.components == 1
    }

    pub fn endpoints_on_boundary(&self) -> bool {
        self.start_on_boundary && self.end_on_boundary
    }

    pub fn passed(&self) -> bool {
        self.full_circle || (self.simply_connected() && self.endpoints_on_boundary())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Face {
    Half(i64, i64),
    Outer(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum EdgeKey {
    /// `(i, j) – (i, j + 1)`
    H(i64, i64),
    /// `(i, j) – (i + 1, j)`
    V(i64, i64),
    /// From the boundary point `(i, j)` out to infinity.
    Ray(i64, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Spot {
    /// Quarter-step coordinates.
    At(i64, i64),
    Infinity,
    /// Ray through the half-step boundary point `(i, j)`.
    Ray(i64, i64),
}

struct Sphere {
    lat: Lattice,
    wired: bool,
    m: i64,
}

const INF: u64 = u64::MAX;

impl Sphere {
    fn on_rim(&self, i: i64, j: i64) -> bool {
        i == 0 || j == 0 || i == self.m || j == self.m
    }

    fn point(&self, i: i64, j: i64) -> u64 {
        if self.wired && self.on_rim(i, j) {
            INF
        } else {
            (i * (self.m + 1) + j) as u64
        }
    }

    fn half_cell(&self, vertex: usize, cell: usize) -> (i64, i64) {
        let (vr, vc) = self.lat.coords(vertex);
        let (cr, cc) = self.lat.cell_coords(cell);
        ((cr + vr) as i64, (cc + vc) as i64)
    }

    fn face_of(&self, p: &Piece) -> Option<Face> {
        match *p {
            Piece::Quarter { vertex, cell } => {
                let (i, j) = self.half_cell(vertex, cell);
                Some(Face::Half(i, j))
            }
            Piece::Outer { vertex } => Some(Face::Outer(vertex)),
            Piece::Infinity { .. } => None,
        }
    }

    /// Boundary neighbours of a boundary vertex along the rim.
    fn rim_neighbors(&self, v: usize) -> Vec<usize> {
        self.lat
            .axis_neighbors(v)
            .filter(|&(_, u)| {
                self.lat
                    .edge_between(v, u)
                    .is_some_and(|e| self.lat.is_boundary_edge(e))
            })
            .map(|(_, u)| u)
            .collect()
    }

    /// Closure of a face: (vertices, edges).
    fn closure(&self, f: Face, verts: &mut Vec<u64>, edges: &mut Vec<(EdgeKey, u64, u64)>) {
        match f {
            Face::Half(i, j) => {
                let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
                for (a, b) in corners {
                    verts.push(self.point(a, b));
                }
                let sides = [
                    (EdgeKey::H(i, j), (i, j), (i, j + 1)),
                    (EdgeKey::H(i + 1, j), (i + 1, j), (i + 1, j + 1)),
                    (EdgeKey::V(i, j), (i, j), (i + 1, j)),
                    (EdgeKey::V(i, j + 1), (i, j + 1), (i + 1, j + 1)),
                ];
                for (k, a, b) in sides {
                    if self.wired && self.on_rim(a.0, a.1) && self.on_rim(b.0, b.1) {
                        continue;
                    }
                    edges.push((k, self.point(a.0, a.1), self.point(b.0, b.1)));
                }
            }
            Face::Outer(v) => {
                let (vr, vc) = self.lat.coords(v);
                let (pi, pj) = (2 * vr as i64, 2 * vc as i64);
                verts.push(self.point(pi, pj));
                verts.push(INF);
                for u in self.rim_neighbors(v) {
                    let (ur, uc) = self.lat.coords(u);
                    let (mi, mj) = ((vr + ur) as i64, (vc + uc) as i64);
                    verts.push(self.point(mi, mj));
                    let key = if mi == pi {
                        EdgeKey::H(pi, pj.min(mj))
                    } else {
                        EdgeKey::V(pi.min(mi), pj)
                    };
                    edges.push((key, self.point(pi, pj), self.point(mi, mj)));
                    edges.push((EdgeKey::Ray(mi, mj), self.point(mi, mj), INF));
                }
            }
        }
    }

    fn rect(f: (i64, i64)) -> [i64; 4] {
        [2 * f.0, 2 * f.0 + 2, 2 * f.1, 2 * f.1 + 2]
    }

    fn quarter_outer(&self, h: (i64, i64), v: usize) -> Option<Spot> {
        let (vr, vc) = self.lat.coords(v);
        let p = (4 * vr as i64, 4 * vc as i64);
        let [r0, r1, c0, c1] = Self::rect(h);
        let rim = 4 * self.lat.n() as i64;
        let sides = [
            (r0 == 0 || r0 == rim, p.0 == r0, (r0, c0 + 1)),
            (r1 == 0 || r1 == rim, p.0 == r1, (r1, c0 + 1)),
            (c0 == 0 || c0 == rim, p.1 == c0, (r0 + 1, c0)),
            (c1 == 0 || c1 == rim, p.1 == c1, (r0 + 1, c1)),
        ];
        let inside = r0 <= p.0 && p.0 <= r1 && c0 <= p.1 && p.1 <= c1;
        if !inside {
            return None;
        }
        sides
            .iter()
            .find(|(on_rim, through, _)| *on_rim && *through)
            .map(|&(_, _, mid)| Spot::At(mid.0, mid.1))
            .or(Some(Spot::At(p.0, p.1)))
    }

    /// Where the curve passes from piece `p` to the next piece `q`.
    fn crossing(&self, p: &Piece, q: &Piece) -> Option<Spot> {
        let spot = match (self.face_of(p), self.face_of(q)) {
            (None, _) | (_, None) => Spot::Infinity,
            (Some(Face::Half(a, b)), Some(Face::Half(c, d))) => {
                let [a0, a1, b0, b1] = Self::rect((a, b));
                let [c0, c1, d0, d1] = Self::rect((c, d));
                let (r0, r1) = (a0.max(c0), a1.min(c1));
                let (s0, s1) = (b0.max(d0), b1.min(d1));
                if r0 > r1 || s0 > s1 {
                    return None;
                }
                Spot::At((r0 + r1) / 2, (s0 + s1) / 2)
            }
            (Some(Face::Half(a, b)), Some(Face::Outer(v)))
            | (Some(Face::Outer(v)), Some(Face::Half(a, b))) => self.quarter_outer((a, b), v)?,
            (Some(Face::Outer(u)), Some(Face::Outer(v))) => {
                if !self.rim_neighbors(u).contains(&v) {
                    return None;
                }
                let (ur, uc) = self.lat.coords(u);
                let (vr, vc) = self.lat.coords(v);
                Spot::Ray((ur + vr) as i64, (uc + vc) as i64)
            }
        };
        Some(self.normalize(spot))
    }

    fn normalize(&self, s: Spot) -> Spot {
        let rim = 2 * self.m;
        match s {
            Spot::At(r, c) if self.wired && (r == 0 || c == 0 || r == rim || c == rim) => {
                Spot::Infinity
            }
            s => s,
        }
    }

    fn adjacent_faces(&self, s: Spot) -> Vec<Face> {
        let m = self.m;
        let mut out = Vec::new();
        match s {
            Spot::At(r, c) => {
                for i in (r - 2).div_euclid(2)..=r.div_euclid(2) {
                    for j in (c - 2).div_euclid(2)..=c.div_euclid(2) {
                        let [r0, r1, c0, c1] = Self::rect((i, j));
                        let ok = (0..m).contains(&i) && (0..m).contains(&j);
                        if ok && r0 <= r && r <= r1 && c0 <= c && c <= c1 {
                            out.push(Face::Half(i, j));
                        }
                    }
                }
                let rim = 2 * m;
                if !self.wired && (r == 0 || c == 0 || r == rim || c == rim) {
                    let n = self.lat.n() as i64;
                    for vr in [r.div_euclid(4), r.div_euclid(4) + 1] {
                        for vc in [c.div_euclid(4), c.div_euclid(4) + 1] {
                            if !(0..=n).contains(&vr) || !(0..=n).contains(&vc) {
                                continue;
                            }
                            let v = self.lat.vertex(vr as usize, vc as usize);
                            if self.lat.is_boundary(v) && (r - 4 * vr).abs() + (c - 4 * vc).abs() <= 2 {
                                out.push(Face::Outer(v));
                            }
                        }
                    }
                }
            }
            Spot::Infinity => {
                if self.wired {
                    for i in 0..m {
                        for j in 0..m {
                            if i == 0 || j == 0 || i == m - 1 || j == m - 1 {
                                out.push(Face::Half(i, j));
                            }
                        }
                    }
                } else {
                    out.extend(self.lat.boundary_ccw().into_iter().map(Face::Outer));
                }
            }
            Spot::Ray(i, j) => {
                let u = self.lat.vertex(i.div_euclid(2) as usize, j.div_euclid(2) as usize);
                let v = self.lat.vertex((i + 1).div_euclid(2) as usize, (j + 1).div_euclid(2) as usize);
                out.push(Face::Outer(u));
                out.push(Face::Outer(v));
            }
        }
        out
    }
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

/// Check that the interval of `len` corners starting at `start` (circularly)
/// sweeps a closed disk with the images of its endpoints on the boundary.
pub fn disk_check(curve: &WheelCurve, start: usize, len: usize) -> Result<DiskReport, WheelError> {
    let total = curve.len();
    if len == 0 || len > total || start >= total {
        return Err(WheelError::Parameter(format!(
            "interval (start={start}, len={len}) is empty or exceeds the {total} corners"
        )));
    }
    let (lat, mode) = curve
        .lattice
        .zip(curve.root_mode)
        .ok_or_else(|| WheelError::Input("disk checks need a grid curve".into()))?;
    let sphere = Sphere {
        lat,
        wired: mode == RootMode::Wired,
        m: 2 * lat.n() as i64,
    };
    let corner_at = |k: usize| (start + k) % total;

    let mut faces: HashSet<Face> = HashSet::new();
    let mut has_infinity = false;
    let mut cells = HashSet::new();
    let mut vertices = HashSet::new();
    for k in 0..len {
        let ci = corner_at(k);
        let v = curve.corners[ci].vertex;
        if v < lat.num_vertices() {
            vertices.insert(v);
        }
        for p in curve.pieces(ci) {
            if let Piece::Quarter { cell, .. } = *p {
                cells.insert(cell);
            }
            match sphere.face_of(p) {
                Some(f) => {
                    faces.insert(f);
                }
                None => has_infinity = true,
            }
        }
    }
    let full_circle = len == total
        || (len..total).all(|k| {
            curve
                .pieces(corner_at(k))
                .iter()
                .all(|p| matches!(p, Piece::Infinity { .. }))
        });

    // cell complex census
    let mut verts = Vec::new();
    let mut edges = Vec::new();
    for &f in &faces {
        sphere.closure(f, &mut verts, &mut edges);
    }
    if has_infinity {
        verts.push(INF);
    }
    verts.sort_unstable();
    verts.dedup();
    let mut edge_map: HashMap<EdgeKey, (u64, u64)> = HashMap::new();
    for (k, a, b) in edges {
        edge_map.insert(k, (a, b));
    }
    let euler = verts.len() as i64 - edge_map.len() as i64 + faces.len() as i64;
    let index: HashMap<u64, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf: Vec<usize> = (0..verts.len()).collect();
    for &(a, b) in edge_map.values() {
        let (ra, rb) = (find(&mut uf, index[&a]), find(&mut uf, index[&b]));
        uf[ra] = rb;
    }
    let components = (0..verts.len()).filter(|&i| find(&mut uf, i) == i).count();

    let piece_before = |k: usize| -> Option<Piece> {
        // last piece strictly before corner-offset k, scanning backwards
        (1..=total).find_map(|back| {
            let ci = (start + total + k - back) % total;
            curve.pieces(ci).last().copied()
        })
    };
    let piece_from = |k: usize| -> Option<Piece> {
        (0..total).find_map(|fwd| curve.pieces((start + k + fwd) % total).first().copied())
    };
    let on_boundary = |spot: Option<Spot>| -> bool {
        let Some(s) = spot else { return false };
        let adj = sphere.adjacent_faces(s);
        let inside = adj.iter().any(|f| faces.contains(f)) || (s == Spot::Infinity && has_infinity);
        let interior = !adj.is_empty() && adj.iter().all(|f| faces.contains(f));
        inside && !interior
    };
    let (start_on_boundary, end_on_boundary) = if full_circle {
        (true, true)
    } else {
        let first_in = (0..len).find_map(|k| curve.pieces(corner_at(k)).first().copied());
        let last_in = (0..len).rev().find_map(|k| curve.pieces(corner_at(k)).last().copied());
        let start_spot = match (piece_before(0), first_in) {
            (Some(p), Some(q)) => sphere.crossing(&p, &q),
            _ => None,
        };
        let end_spot = match (last_in, piece_from(len)) {
            (Some(p), Some(q)) => sphere.crossing(&p, &q),
            _ => None,
        };
        (on_boundary(start_spot), on_boundary(end_spot))
    };

    let mut cells: Vec<usize> = cells.into_iter().collect();
    cells.sort_unstable();
    let mut vertices: Vec<usize> = vertices.into_iter().collect();
    vertices.sort_unstable();
    Ok(DiskReport {
        start,
        len,
        cells,
        vertices,
        euler,
        components,
        full_circle,
        start_on_boundary,
        end_on_boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridField;
    use crate::metric::build_metric;
    use crate::tree::build_geodesic_tree;
    use crate::wheel::contour_exploration;

    fn curve(n: usize, mode: RootMode) -> WheelCurve {
        let m = build_metric(&GridField::zeros(n).unwrap(), 0.5, 1e-9).unwrap();
        let t = build_geodesic_tree(&m, mode).unwrap();
        contour_exploration(&t, None).unwrap()
    }

    #[test]
    fn full_circle_covers_everything() {
        for mode in [RootMode::Wired, RootMode::Point(3)] {
            let c = curve(4, mode);
            let r = disk_check(&c, 5, c.len()).unwrap();
            assert!(r.full_circle && r.passed());
            assert_eq!(r.cells.len(), 16);
            assert_eq!(r.euler, 2);
        }
    }

    #[test]
    fn single_corners_are_disks() {
        for mode in [RootMode::Wired, RootMode::Point(12)] {
            let c = curve(4, mode);
            for k in 0..c.len() {
                let r = disk_check(&c, k, 1).unwrap();
                assert!(r.passed(), "corner {k}: {r:?}");
                assert!(r.cells.len() <= 4);
            }
        }
    }

    #[test]
    fn every_interval_of_a_small_curve_is_a_disk() {
        for mode in [RootMode::Wired, RootMode::Point(0), RootMode::Point(7)] {
            let c = curve(3, mode);
            for start in 0..c.len() {
                for len in 1..=c.len() {
                    let r = disk_check(&c, start, len).unwrap();
                    assert!(r.passed(), "{mode:?} start {start} len {len}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn empty_interval_is_rejected() {
        let c = curve(2, RootMode::Wired);
        assert!(matches!(disk_check(&c, 0, 0), Err(WheelError::Parameter(_))));
        assert!(disk_check(&c, 0, c.len() + 1).is_err());
    }
}
