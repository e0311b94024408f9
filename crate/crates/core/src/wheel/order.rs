//! Visit order of the curve versus merge side in the tree, and recovery of
//! both trees from the corner word.

use serde::{Deserialize, Serialize};

use super::dual::dual_from_curve;
use super::{DualTree, Side, WheelCurve, WheelError};
use crate::lattice::Point;
use crate::tree::{PlanarTree, RootMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitOrder {
    /// The curve reaches `z` before `w`.
    pub hit_before: bool,
    /// At the merge vertex the branch towards `z` comes clockwise before the
    /// branch towards `w`, counting from the edge towards the root.
    pub right_merge: bool,
}

impl VisitOrder {
    pub fn agrees(&self) -> bool {
        self.hit_before == self.right_merge
    }
}

/// Child of `m` on the tree path from `m` down to its descendant `v`.
fn branch_towards(tree: &PlanarTree, m: usize, v: usize) -> usize {
    let mut cur = v;
    while let Some(p) = tree.parent(cur) {
        if p == m {
            return cur;
        }
        cur = p;
    }
    unreachable!("m is a proper ancestor of v")
}

/// Compare the curve's first visits to `z` and `w` with the side on which
/// their root-ward paths merge. The branch order at the merge vertex is read
/// from vertex positions where available, so agreement is a real check of
/// the curve against the embedding rather than against its own rotation.
pub fn visit_order_predicate(
    curve: &WheelCurve,
    tree: &PlanarTree,
    z: usize,
    w: usize,
) -> Result<VisitOrder, WheelError> {
    if z == w {
        return Err(WheelError::Parameter(format!("z and w coincide ({z})")));
    }
    if z >= tree.len() || w >= tree.len() || tree.len() != curve.num_vertices {
        return Err(WheelError::Parameter("vertex out of range or tree/curve mismatch".into()));
    }
    if tree.is_ancestor(z, w) || tree.is_ancestor(w, z) {
        return Err(WheelError::DegenerateMerge { z, w });
    }
    let first = curve.first_visits();
    let (fz, fw) = match (first[z], first[w]) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(WheelError::Input("curve never visits z or w".into())),
    };
    let m = tree.merge_vertex(z, w);
    let (bz, bw) = (branch_towards(tree, m, z), branch_towards(tree, m, w));
    let right_merge = match (tree.clockwise_key(m, bz), tree.clockwise_key(m, bw)) {
        (Some(kz), Some(kw)) => kz < kw,
        _ => {
            let kids = tree.children(m);
            let iz = kids.iter().position(|&c| c == bz).expect("branch is a child");
            let iw = kids.iter().position(|&c| c == bw).expect("branch is a child");
            iz < iw
        }
    };
    Ok(VisitOrder {
        hit_before: fz < fw,
        right_merge,
    })
}

/// Rebuild the primal tree (parents, clockwise children, lengths, embedding)
/// and the dual tree from the curve alone.
pub fn recover_trees(curve: &WheelCurve) -> Result<(PlanarTree, Option<DualTree>), WheelError> {
    curve.validate()?;
    let nv = curve.num_vertices;
    let root = curve.corners[0].vertex;
    let mut parent: Vec<Option<usize>> = vec![None; nv];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut edge_len = vec![0.0; nv];
    for c in &curve.corners {
        if c.side == Side::Left {
            if parent[c.outgoing].is_some() || c.outgoing == root {
                return Err(WheelError::Decode(format!("vertex {} entered twice", c.outgoing)));
            }
            parent[c.outgoing] = Some(c.vertex);
            children[c.vertex].push(c.outgoing);
            edge_len[c.outgoing] = c.length;
        }
    }
    for c in &curve.corners {
        if c.side == Side::Right && parent[c.vertex] != Some(c.outgoing) {
            return Err(WheelError::Decode(format!(
                "climb from {} to {} does not follow a descent",
                c.vertex, c.outgoing
            )));
        }
    }
    let mut dist = vec![0.0; nv];
    let mut stack = vec![root];
    let mut reached = 0;
    while let Some(v) = stack.pop() {
        reached += 1;
        for &c in &children[v] {
            dist[c] = dist[v] + edge_len[c];
            stack.push(c);
        }
    }
    if reached != nv {
        return Err(WheelError::Decode("corner word does not reach every vertex".into()));
    }
    let positions: Vec<Option<Point>> = match (curve.lattice, curve.root_mode, &curve.positions) {
        (Some(lat), Some(mode), _) => {
            let mut p: Vec<Option<Point>> =
                (0..lat.num_vertices()).map(|v| Some(lat.position(v))).collect();
            if mode == RootMode::Wired {
                p.push(None);
            }
            p
        }
        (_, _, Some(p)) => p.clone(),
        _ => vec![None; nv],
    };
    if positions.len() != nv {
        return Err(WheelError::Decode("grid size does not match the vertex count".into()));
    }
    let tree = PlanarTree::from_parts(positions, root, parent, children, dist, edge_len)
        .map_err(|e| WheelError::Decode(e.to_string()))?;
    let tree = match curve.lattice.zip(curve.root_mode) {
        Some((lat, mode)) => tree
            .with_lattice(lat, mode)
            .map_err(|e| WheelError::Decode(e.to_string()))?,
        None => tree,
    };
    let dual = match curve.lattice {
        Some(_) => Some(dual_from_curve(curve)?),
        None => None,
    };
    Ok((tree, dual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridField;
    use crate::metric::build_metric;
    use crate::tree::{build_geodesic_tree, plane_trees};
    use crate::wheel::{contour_exploration, dual_tree};

    #[test]
    fn star_order_and_antisymmetry() {
        let t = &plane_trees(3)[4]; // root with three leaf children
        assert_eq!(t.children(0).len(), 3);
        let c = contour_exploration(t, None).unwrap();
        let (c1, c2) = (t.children(0)[0], t.children(0)[1]);
        let a = visit_order_predicate(&c, t, c1, c2).unwrap();
        assert!(a.hit_before && a.right_merge);
        let b = visit_order_predicate(&c, t, c2, c1).unwrap();
        assert!(!b.hit_before && !b.right_merge);
    }

    #[test]
    fn degenerate_inputs() {
        let t = &plane_trees(3)[0]; // a path
        let c = contour_exploration(t, None).unwrap();
        assert!(matches!(
            visit_order_predicate(&c, t, 1, 2),
            Err(WheelError::DegenerateMerge { .. })
        ));
        assert!(matches!(visit_order_predicate(&c, t, 1, 1), Err(WheelError::Parameter(_))));
    }

    #[test]
    fn corpus_roundtrip() {
        for k in 1..=5 {
            for t in plane_trees(k) {
                let c = contour_exploration(&t, None).unwrap();
                let (back, dual) = recover_trees(&c).unwrap();
                assert_eq!(back, t);
                assert!(dual.is_none());
            }
        }
    }

    #[test]
    fn grid_roundtrip() {
        let m = build_metric(&GridField::zeros(5).unwrap(), 0.5, 1e-9).unwrap();
        for mode in [RootMode::Wired, RootMode::Point(7)] {
            let t = build_geodesic_tree(&m, mode).unwrap();
            let c = contour_exploration(&t, None).unwrap();
            let (back, dual) = recover_trees(&c).unwrap();
            assert_eq!(back, t);
            assert_eq!(dual.unwrap(), dual_tree(&t).unwrap());
        }
    }

    #[test]
    fn corrupted_word_is_rejected() {
        let m = build_metric(&GridField::zeros(3).unwrap(), 0.5, 1e-9).unwrap();
        let t = build_geodesic_tree(&m, RootMode::Wired).unwrap();
        let mut c = contour_exploration(&t, None).unwrap();
        c.corners.swap(3, 4);
        assert!(matches!(recover_trees(&c), Err(WheelError::Decode(_))));
    }
}
