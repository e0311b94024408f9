mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wheel_lab_core::field::{sample_field, FieldMode, GridField};
use wheel_lab_core::lattice::{clockwise_angle, Point};
use wheel_lab_core::metric::{build_metric, MetricGrid};
use wheel_lab_core::tree::{
    build_geodesic_tree, compare_root_modes, compare_trees_in_ball, confluence_radius,
    crossing_set, hairy_check, parse_tree_json, plane_trees, short_hair_subtree,
    verify_half_zipper, PlanarTree, RootMode, TreeError,
};

use common::{brute_diameter, brute_force_geodesic, components_without, crossing_filter};

fn seeded_metric(n: usize, seed: u64) -> MetricGrid {
    let f = sample_field(n, seed, FieldMode::ZeroBoundary).unwrap();
    build_metric(&f, 0.4, 1e-9).unwrap()
}

#[test]
fn single_cell_wired_tree_hangs_from_the_super_root() {
    let m = build_metric(&GridField::zeros(1).unwrap(), 0.5, 1e-9).unwrap();
    let t = build_geodesic_tree(&m, RootMode::Wired).unwrap();
    let sr = t.super_root().unwrap();
    assert_eq!(sr, 4);
    for v in 0..4 {
        assert_eq!(t.parent(v), Some(sr));
    }
}

#[test]
fn single_cell_point_tree_matches_enumeration() {
    let field = GridField::zeros(1).unwrap();
    let m = build_metric(&field, 0.5, 1e-9).unwrap();
    for z in 0..4 {
        let t = build_geodesic_tree(&m, RootMode::Point(z)).unwrap();
        for v in 0..4 {
            if v == z {
                assert_eq!(t.parent(v), None);
                continue;
            }
            let (path, _, _) = brute_force_geodesic(&field, &m, 0.5, z, v);
            assert_eq!(t.parent(v), Some(path[path.len() - 2]), "root {z}, vertex {v}");
        }
    }
}

#[test]
fn tree_distances_equal_metric_distances() {
    let m = seeded_metric(24, 4);
    let lat = m.lattice();
    let z = lat.vertex(7, 15);
    let t = build_geodesic_tree(&m, RootMode::Point(z)).unwrap();
    for v in (0..lat.num_vertices()).step_by(13) {
        // the metric sums from the lower id, so the last bit may differ
        let d = m.distance(z, v).unwrap();
        assert!((t.dist(v) - d).abs() <= 1e-12 * d, "{v}");
    }
    let wired = build_geodesic_tree(&m, RootMode::Wired).unwrap();
    let boundary: Vec<usize> = (0..lat.num_vertices()).filter(|&v| lat.is_boundary(v)).collect();
    let d = m.shortest_paths(&boundary, None, None).dist;
    for v in 0..lat.num_vertices() {
        assert_eq!(wired.dist(v), d[v]);
    }
}

#[test]
fn crossing_sets_match_the_path_filter() {
    for seed in 0..3 {
        let m = seeded_metric(16, seed);
        let lat = m.lattice();
        let z = lat.vertex(8, 8);
        let t = build_geodesic_tree(&m, RootMode::Point(z)).unwrap();
        let max = (0..lat.num_vertices()).map(|v| t.dist(v)).fold(0.0, f64::max);
        for (a, b) in [(0.3, 0.6), (0.2, 0.5), (0.1, 0.9)] {
            let set = crossing_set(&t, z, a * max, b * max).unwrap();
            let oracle: Vec<usize> = crossing_filter(&t, a * max, b * max).into_iter().collect();
            assert_eq!(set.points, oracle);
        }
    }
}

#[test]
fn crossing_set_edge_cases() {
    let path = &plane_trees(3)[0];
    let set = crossing_set(path, 0, 0.5, 1.5).unwrap();
    assert_eq!(set.points.len(), 1);
    assert!(matches!(crossing_set(path, 0, 1.0, 1.0), Err(TreeError::Parameter(_))));
    assert!(matches!(crossing_set(path, 0, 1.0, 10.0), Err(TreeError::EmptyAnnulus(_))));
    let m = seeded_metric(8, 1);
    let wired = build_geodesic_tree(&m, RootMode::Wired).unwrap();
    assert!(crossing_set(&wired, 40, 0.1, 0.2).is_err());
}

#[test]
fn confluence_radius_is_reverified() {
    let m = seeded_metric(64, 2);
    let t = build_geodesic_tree(&m, RootMode::Wired).unwrap();
    assert_eq!(confluence_radius(&t, 0.0).unwrap(), Some(0.0));
    assert!(confluence_radius(&t, 0.5).is_err());
    let center = Point::new(0.5, 0.5);
    for r in [0.03, 0.08] {
        let Some(big) = confluence_radius(&t, r).unwrap() else { continue };
        let tails: BTreeSet<BTreeSet<usize>> = (0..t.len())
            .filter(|&v| t.position(v).is_some_and(|p| p.dist(center) <= r))
            .map(|v| {
                t.path_to_root(v)
                    .into_iter()
                    .filter(|&x| t.position(x).is_none_or(|p| p.dist(center) >= big))
                    .collect()
            })
            .collect();
        assert_eq!(tails.len(), 1, "r = {r}, R = {big}");
    }
}

/// Fraction of in-ball vertices whose in-ball tree neighbours agree, from parent links.
fn agreement_by_parents(a: &PlanarTree, b: &PlanarTree, radius: f64) -> (usize, usize) {
    let center = Point::new(0.5, 0.5);
    let lat = a.lattice().unwrap();
    let inside = |v: usize| v < lat.num_vertices() && lat.position(v).dist(center) < radius;
    let nbrs = |t: &PlanarTree, v: usize| -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = t.children(v).iter().copied().filter(|&c| inside(c)).collect();
        if let Some(p) = t.parent(v).filter(|&p| inside(p)) {
            s.insert(p);
        }
        s
    };
    let ball: Vec<usize> = (0..lat.num_vertices()).filter(|&v| inside(v)).collect();
    let agree = ball.iter().filter(|&&v| nbrs(a, v) == nbrs(b, v)).count();
    (ball.len(), agree)
}

#[test]
fn root_mode_agreement_is_recomputed() {
    let m = seeded_metric(64, 3);
    let far = 0;
    let rep = compare_root_modes(&m, 0.125, far).unwrap();
    let wired = build_geodesic_tree(&m, RootMode::Wired).unwrap();
    let point = build_geodesic_tree(&m, RootMode::Point(far)).unwrap();
    let (compared, agree) = agreement_by_parents(&wired, &point, 0.125);
    assert_eq!((rep.compared, rep.agreeing), (compared, agree));

    let tiny = compare_root_modes(&m, 1e-3, far).unwrap();
    assert_eq!(tiny.fraction, 1.0);
    assert_eq!(compare_trees_in_ball(&point, &point, 0.3).fraction, 1.0);
    assert!(compare_root_modes(&m, 0.125, m.lattice().vertex(32, 32)).is_err());
}

#[test]
fn short_hair_components_by_bfs() {
    let m = seeded_metric(64, 5);
    let t = build_geodesic_tree(&m, RootMode::Wired).unwrap();
    let mut previous = None;
    for eps in [0.5, 0.25, 0.1] {
        let sub = short_hair_subtree(&t, eps).unwrap();
        assert!(sub.contains(t.root()));
        let labels = components_without(&t, &|v| sub.contains(v));
        let mut groups: std::collections::BTreeMap<usize, Vec<Point>> = Default::default();
        for v in 0..t.len() {
            if let (Some(l), Some(p)) = (labels[v], t.position(v)) {
                groups.entry(l).or_default().push(p);
            }
        }
        for g in groups.values() {
            assert!(brute_diameter(g) < eps);
        }
        // the kept set is connected
        let kept = components_without(&t, &|v| !sub.contains(v));
        let roots: BTreeSet<usize> = kept.iter().flatten().copied().collect();
        assert_eq!(roots.len(), 1);
        if let Some(prev) = previous.replace(sub.clone()) {
            assert!(prev.is_subset_of(&sub));
        }
    }
    let whole = short_hair_subtree(&t, std::f64::consts::SQRT_2).unwrap();
    assert!(whole.len() <= 3);
    let fine = short_hair_subtree(&t, 1e-3).unwrap();
    assert!((0..t.len()).all(|v| t.is_leaf(v) || fine.contains(v)));
    assert!(short_hair_subtree(&t, 0.0).is_err());
}

#[test]
fn half_zipper_with_component_labeling() {
    let path = &plane_trees(2)[0];
    assert_eq!(path.len(), 3);
    let rep = verify_half_zipper(path);
    assert!(rep.passed());
    assert_eq!(rep.internal_vertices, 1);

    let m = seeded_metric(64, 6);
    let t = build_geodesic_tree(&m, RootMode::Wired).unwrap();
    assert!(verify_half_zipper(&t).passed());
    let internal: Vec<usize> = (0..t.len()).filter(|&v| v != t.root() && !t.is_leaf(v)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let v = internal[rng.random_range(0..internal.len())];
        let labels = components_without(&t, &|u| u == v);
        let root_label = labels[t.root()];
        for u in 0..t.len() {
            if u != v {
                assert_eq!(labels[u] != root_label, t.is_ancestor(v, u), "removing {v}, vertex {u}");
            }
        }
    }
}

/// Side of each branch at interior path vertices from geometry alone.
fn sides_by_geometry(t: &PlanarTree, path: &[usize]) -> (bool, bool) {
    let lat = t.lattice().unwrap();
    let dir = |v: usize, u: usize| -> (f64, f64) {
        match (t.position(v), t.position(u)) {
            (Some(a), Some(b)) => (b.x - a.x, b.y - a.y),
            _ => {
                let (dr, dc) = lat.outward(v).unwrap().offset();
                (dc as f64, dr as f64)
            }
        }
    };
    let (mut left, mut right) = (false, false);
    for w in path.windows(3) {
        let (prev, v, next) = (w[0], w[1], w[2]);
        let back = clockwise_angle(dir(v, next), dir(v, prev));
        let mut others: Vec<usize> = t.children(v).to_vec();
        others.extend(t.parent(v));
        for u in others {
            if u == prev || u == next {
                continue;
            }
            if clockwise_angle(dir(v, next), dir(v, u)) < back {
                right = true;
            } else {
                left = true;
            }
        }
    }
    (left, right)
}

#[test]
fn hairy_sides_agree_with_geometry() {
    let path_tree = &plane_trees(3)[0];
    assert_eq!(hairy_check(path_tree, &[0, 1, 2, 3]).unwrap(), (false, false));
    let star = &plane_trees(3)[4];
    let kids = star.children(0);
    let (l, r) = hairy_check(star, &[kids[0], 0, kids[1]]).unwrap();
    assert!(l ^ r);
    assert!(hairy_check(star, &[kids[0], kids[1]]).is_err());

    let m = seeded_metric(64, 7);
    let t = build_geodesic_tree(&m, RootMode::Wired).unwrap();
    let nv = m.lattice().num_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 50 {
        let (a, b) = (rng.random_range(0..nv), rng.random_range(0..nv));
        if a == b {
            continue;
        }
        let p = t.tree_path(a, b);
        if p.len() < 32 {
            continue;
        }
        assert_eq!(hairy_check(&t, &p).unwrap(), sides_by_geometry(&t, &p));
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grid_trees_satisfy_the_axioms(n in 2usize..14, seed in any::<u64>(), point in any::<bool>(), z in any::<u32>()) {
        let m = seeded_metric(n, seed);
        let nv = m.lattice().num_vertices();
        let mode = if point { RootMode::Point(z as usize % nv) } else { RootMode::Wired };
        let t = build_geodesic_tree(&m, mode).unwrap();
        prop_assert!(verify_half_zipper(&t).passed());
        prop_assert!(t.rotation_violations().is_empty());
        let back = parse_tree_json(&t.to_json()).unwrap();
        prop_assert_eq!(back, t);
    }
}
