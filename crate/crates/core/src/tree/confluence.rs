//! Confluence of geodesics: crossing sets across a metric annulus, the
//! Euclidean confluence radius, and agreement of the wired and point-rooted
//! trees near the center.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{build_geodesic_tree, PlanarTree, RootMode, TreeError};
use crate::lattice::Point;
use crate::metric::MetricGrid;

/// Points at metric distance ≈ `t` from the root through which every tree
/// path to a vertex outside the ball of radius `s` passes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingSet {
    pub center: usize,
    pub t: f64,
    pub s: f64,
    /// Sorted vertex ids.
    pub points: Vec<usize>,
}

/// Crossing set of a point-rooted tree.
///
/// A path from the root to `v` crosses the radius-`t` layer at the unique
/// vertex `x` with `dist(parent(x)) < t <= dist(x)`.
pub fn crossing_set(tree: &PlanarTree, z: usize, t: f64, s: f64) -> Result<CrossingSet, TreeError> {
    if !(t > 0.0 && s > t) {
        return Err(TreeError::Parameter(format!(
            "need 0 < t < s, got t={t}, s={s}"
        )));
    }
    if tree.root() != z || tree.super_root().is_some() {
        return Err(TreeError::Parameter(format!(
            "crossing sets need a tree rooted at vertex {z}"
        )));
    }
    let mut cross: Vec<Option<usize>> = vec![None; tree.len()];
    for v in tree.preorder() {
        if tree.dist(v) < t {
            continue;
        }
        let p = tree.parent(v).expect("root has distance 0 < t");
        cross[v] = if tree.dist(p) < t { Some(v) } else { cross[p] };
    }
    let mut outside = false;
    let mut points = BTreeSet::new();
    for v in 0..tree.len() {
        if tree.dist(v) >= s {
            outside = true;
            points.insert(cross[v].expect("dist >= s > t implies a crossing"));
        }
    }
    if !outside {
        return Err(TreeError::EmptyAnnulus(s));
    }
    Ok(CrossingSet {
        center: z,
        t,
        s,
        points: points.into_iter().collect(),
    })
}

/// Candidate radii `r, 1.25r, 1.5r, …` below one half, then `0.5`.
fn candidate_radii(r: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if r > 0.0 {
        let mut k = 0;
        loop {
            let radius = r * (1.0 + 0.25 * k as f64);
            if radius >= 0.5 {
                break;
            }
            out.push(radius);
            k += 1;
        }
    } else {
        out.push(0.0);
    }
    out.push(0.5);
    out
}

/// Smallest candidate `R` such that the tree paths from every vertex within
/// Euclidean distance `r` of the center coincide outside the open ball
/// `B_R(center)`; `None` when no candidate works at this resolution.
pub fn confluence_radius(tree: &PlanarTree, r: f64) -> Result<Option<f64>, TreeError> {
    if !(r >= 0.0 && r < 0.5) {
        return Err(TreeError::Parameter(format!(
            "source radius must lie in [0, 0.5), got {r}"
        )));
    }
    let center = Point::new(0.5, 0.5);
    let sources: Vec<usize> = (0..tree.len())
        .filter(|&v| tree.position(v).is_some_and(|p| p.dist(center) <= r))
        .collect();
    if sources.len() <= 1 {
        return Ok(Some(candidate_radii(r)[0]));
    }
    let paths: Vec<Vec<usize>> = sources.iter().map(|&v| tree.path_to_root(v)).collect();
    for radius in candidate_radii(r) {
        let outside = |path: &Vec<usize>| -> BTreeSet<usize> {
            path.iter()
                .copied()
                .filter(|&x| tree.position(x).is_none_or(|p| p.dist(center) >= radius))
                .collect()
        };
        let first = outside(&paths[0]);
        if paths[1..].iter().all(|p| outside(p) == first) {
            return Ok(Some(radius));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub radius: f64,
    /// Vertices strictly inside the ball.
    pub compared: usize,
    pub agreeing: usize,
    pub fraction: f64,
    /// Vertices whose in-ball tree edges differ between the two trees.
    pub disagreements: Vec<usize>,
}

fn ball_edges(tree: &PlanarTree, v: usize, inside: &[bool]) -> BTreeSet<usize> {
    tree.rotation(v)
        .into_iter()
        .filter(|&u| u < inside.len() && inside[u])
        .collect()
}

/// Compare the tree edges with both endpoints in `B_R(center)`, vertex by vertex.
pub fn compare_trees_in_ball(a: &PlanarTree, b: &PlanarTree, radius: f64) -> AgreementReport {
    let center = Point::new(0.5, 0.5);
    let count = a.len().max(b.len());
    let inside: Vec<bool> = (0..count)
        .map(|v| {
            let pa = (v < a.len()).then(|| a.position(v)).flatten();
            let pb = (v < b.len()).then(|| b.position(v)).flatten();
            match (pa, pb) {
                (Some(p), Some(q)) if p == q => p.dist(center) < radius,
                _ => false,
            }
        })
        .collect();
    let mut compared = 0;
    let mut disagreements = Vec::new();
    for v in 0..count {
        if !inside[v] {
            continue;
        }
        compared += 1;
        if ball_edges(a, v, &inside) != ball_edges(b, v, &inside) {
            disagreements.push(v);
        }
    }
    let agreeing = compared - disagreements.len();
    let fraction = if compared == 0 {
        1.0
    } else {
        agreeing as f64 / compared as f64
    };
    AgreementReport {
        radius,
        compared,
        agreeing,
        fraction,
        disagreements,
    }
}

/// Agreement near the center between the wired tree and the tree rooted at `z_far`.
pub fn compare_root_modes(
    m: &MetricGrid,
    radius: f64,
    z_far: usize,
) -> Result<AgreementReport, TreeError> {
    let lat = m.lattice();
    if !lat.contains_vertex(z_far) {
        return Err(TreeError::Parameter(format!("vertex {z_far} is off the lattice")));
    }
    if lat.position(z_far).dist(lat.center()) < radius {
        return Err(TreeError::Parameter(format!(
            "z_far={z_far} lies inside the comparison ball"
        )));
    }
    let wired = build_geodesic_tree(m, RootMode::Wired)?;
    let point = build_geodesic_tree(m, RootMode::Point(z_far))?;
    Ok(compare_trees_in_ball(&wired, &point, radius))
}
