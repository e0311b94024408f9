//! Exhaustive corpus of small rooted plane trees.
//!
//! Trees with `k` edges correspond one-to-one with Dyck words of length `2k`
//! (there are Catalan(k) of them). Each tree gets a layered drawing so that
//! its rotation system is also the geometric clockwise order.

use super::PlanarTree;
use crate::lattice::Point;

/// Every rooted plane tree with exactly `edges` edges.
pub fn plane_trees(edges: usize) -> Vec<PlanarTree> {
    let mut words = Vec::new();
    let mut buf = Vec::with_capacity(2 * edges);
    dyck_words(edges, 0, 0, &mut buf, &mut words);
    words.iter().map(|w| tree_from_dyck(w)).collect()
}

/// Every rooted plane tree with `1..=max_edges` edges.
pub fn plane_trees_up_to(max_edges: usize) -> Vec<PlanarTree> {
    (1..=max_edges).flat_map(plane_trees).collect()
}

fn dyck_words(k: usize, open: usize, close: usize, buf: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
    if open == k && close == k {
        out.push(buf.clone());
        return;
    }
    if open < k {
        buf.push(true);
        dyck_words(k, open + 1, close, buf, out);
        buf.pop();
    }
    if close < open {
        buf.push(false);
        dyck_words(k, open, close + 1, buf, out);
        buf.pop();
    }
}

fn tree_from_dyck(word: &[bool]) -> PlanarTree {
    let nv = word.len() / 2 + 1;
    let mut parent: Vec<Option<usize>> = vec![None; nv];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut stack = vec![0usize];
    let mut next = 1;
    for &open in word {
        if open {
            let p = *stack.last().expect("stack holds the root");
            parent[next] = Some(p);
            children[p].push(next);
            stack.push(next);
            next += 1;
        } else {
            stack.pop();
        }
    }
    // Layered drawing: depth downwards, leaves spread right to left in
    // clockwise order, so children listed clockwise from the parent (north)
    // run from east to west.
    let mut depth = vec![0usize; nv];
    let mut x = vec![0.0f64; nv];
    let mut leaf_slot = 0usize;
    let leaves = (0..nv).filter(|&v| v != 0 && children[v].is_empty()).count().max(1);
    assign_x(0, &children, &mut depth, &mut x, &mut leaf_slot, leaves);
    let max_depth = depth.iter().copied().max().unwrap_or(0).max(1) as f64;
    let positions = (0..nv)
        .map(|v| Some(Point::new(x[v], 1.0 - depth[v] as f64 / max_depth)))
        .collect();
    let dist = depth.iter().map(|&d| d as f64).collect();
    let edge_len = (0..nv).map(|v| if v == 0 { 0.0 } else { 1.0 }).collect();
    PlanarTree::from_parts(positions, 0, parent, children, dist, edge_len)
        .expect("Dyck words encode valid trees")
}

fn assign_x(
    v: usize,
    children: &[Vec<usize>],
    depth: &mut [usize],
    x: &mut [f64],
    leaf_slot: &mut usize,
    leaves: usize,
) {
    if children[v].is_empty() {
        x[v] = 1.0 - (*leaf_slot as f64 + 0.5) / leaves as f64;
        *leaf_slot += 1;
        return;
    }
    for &c in &children[v] {
        depth[c] = depth[v] + 1;
        assign_x(c, children, depth, x, leaf_slot, leaves);
    }
    let k = children[v].len();
    x[v] = (x[children[v][0]] + x[children[v][k - 1]]) / 2.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_counts() {
        let counts: Vec<usize> = (1..=8).map(|k| plane_trees(k).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42, 132, 429, 1430]);
        assert_eq!(plane_trees_up_to(8).len(), 2055);
    }

    #[test]
    fn drawings_match_rotation_system() {
        for t in plane_trees_up_to(6) {
            assert!(t.rotation_violations().is_empty());
        }
    }
}
