//! Finite subtrees whose complement has only short hair.

use super::{PlanarTree, TreeError};
use crate::lattice::Point;

/// A connected subtree containing the root.
#[derive(Clone, Debug, PartialEq)]
pub struct Subtree {
    root: usize,
    member: Vec<bool>,
}

impl Subtree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn contains(&self, v: usize) -> bool {
        self.member.get(v).copied().unwrap_or(false)
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.member.len()).filter(|&v| self.member[v]).collect()
    }

    pub fn len(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset_of(&self, other: &Subtree) -> bool {
        self.member
            .iter()
            .enumerate()
            .all(|(v, &m)| !m || other.contains(v))
    }
}

/// Keep every vertex whose descendant set has Euclidean diameter `>= eps`,
/// plus the root; prune the rest.
///
/// Each pruned branch is a component of `tree ∖ T` and has diameter `< eps`.
/// Subtree diameters only grow towards the root, so the kept set is connected,
/// and shrinking `eps` can only keep more vertices.
pub fn short_hair_subtree(tree: &PlanarTree, eps: f64) -> Result<Subtree, TreeError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(TreeError::Parameter(format!("eps must be positive, got {eps}")));
    }
    let order = tree.preorder();
    let nv = tree.len();
    let mut pre_index = vec![0; nv];
    for (i, &v) in order.iter().enumerate() {
        pre_index[v] = i;
    }
    let mut size = vec![1usize; nv];
    let mut bbox: Vec<Option<[f64; 4]>> = tree
        .positions()
        .iter()
        .map(|p| p.map(|p| [p.x, p.x, p.y, p.y]))
        .collect();
    for &v in order.iter().rev() {
        if let Some(p) = tree.parent(v) {
            size[p] += size[v];
            if let Some(b) = bbox[v] {
                bbox[p] = Some(match bbox[p] {
                    Some(a) => [a[0].min(b[0]), a[1].max(b[1]), a[2].min(b[2]), a[3].max(b[3])],
                    None => b,
                });
            }
        }
    }
    let mut member = vec![false; nv];
    member[tree.root()] = true;
    for v in 0..nv {
        if v == tree.root() {
            continue;
        }
        let Some(b) = bbox[v] else {
            member[v] = true;
            continue;
        };
        let (w, h) = (b[1] - b[0], b[3] - b[2]);
        member[v] = if w.max(h) >= eps {
            true
        } else if w.hypot(h) < eps {
            false
        } else {
            let pts: Vec<Point> = order[pre_index[v]..pre_index[v] + size[v]]
                .iter()
                .filter_map(|&x| tree.position(x))
                .collect();
            point_set_diameter(&pts) >= eps
        };
    }
    Ok(Subtree {
        root: tree.root(),
        member,
    })
}

/// Exact diameter of a finite point set (convex hull, then all hull pairs).
pub fn point_set_diameter(points: &[Point]) -> f64 {
    let hull = convex_hull(points);
    let mut best: f64 = 0.0;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max(a.dist(*b));
        }
    }
    best
}

fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridField;
    use crate::metric::build_metric;
    use crate::tree::{build_geodesic_tree, RootMode};

    fn tree(n: usize) -> PlanarTree {
        let m = build_metric(&GridField::zeros(n).unwrap(), 0.5, 1e-9).unwrap();
        build_geodesic_tree(&m, RootMode::Wired).unwrap()
    }

    #[test]
    fn diameter_of_square_corners() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(0.5, 0.5),
        ];
        assert!((point_set_diameter(&pts) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn huge_eps_keeps_little() {
        let t = tree(8);
        let s = short_hair_subtree(&t, 2f64.sqrt()).unwrap();
        assert!(s.contains(t.root()));
        assert!(s.len() <= 3);
    }

    #[test]
    fn tiny_eps_keeps_internal_vertices() {
        let t = tree(8);
        let s = short_hair_subtree(&t, 0.05).unwrap();
        for v in 0..t.len() {
            assert_eq!(s.contains(v), !t.is_leaf(v), "vertex {v}");
        }
    }

    #[test]
    fn rejects_nonpositive_eps() {
        let t = tree(2);
        assert!(short_hair_subtree(&t, 0.0).is_err());
        assert!(short_hair_subtree(&t, -0.1).is_err());
    }
}
