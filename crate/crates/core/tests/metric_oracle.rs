mod common;

use proptest::prelude::*;
use wheel_lab_core::field::{sample_field, FieldMode, GridField};
use wheel_lab_core::metric::{build_metric, parse_geodesic_json, MetricError};

use common::{brute_force_geodesic, oracle_corpus, oracle_edge_weight};

#[test]
fn corpus_distances_and_geodesics_match_enumeration() {
    let corpus = oracle_corpus();
    for (name, field) in &corpus.fields {
        let m = build_metric(field, corpus.xi, corpus.tie_eps).unwrap();
        let nv = m.lattice().num_vertices();
        for z in 0..nv {
            for w in 0..nv {
                if z == w {
                    assert_eq!(m.distance(z, w).unwrap(), 0.0);
                    continue;
                }
                let (path, len, runner_up) = brute_force_geodesic(field, &m, corpus.xi, z, w);
                assert!(runner_up > len, "{name}: tie between {z} and {w}");
                let d = m.distance(z, w).unwrap();
                assert!((d - len).abs() <= 1e-12 * len, "{name} {z}->{w}: {d} vs {len}");
                let g = m.geodesic(z, w).unwrap();
                assert_eq!(g.vertices, path, "{name} {z}->{w}");
                assert_eq!(g.length, d);
            }
        }
    }
}

#[test]
fn checkerboard_corner_to_corner() {
    let corpus = oracle_corpus();
    let (_, field) = &corpus.fields[0];
    let m = build_metric(field, 0.5, corpus.tie_eps).unwrap();
    let lat = m.lattice();
    let (z, w) = (lat.vertex(0, 0), lat.vertex(2, 2));
    let (_, len, _) = brute_force_geodesic(field, &m, 0.5, z, w);
    assert!((m.distance(z, w).unwrap() - len).abs() <= 1e-12 * len);
}

#[test]
fn ball_contains_median_vertex() {
    let corpus = oracle_corpus();
    for (_, field) in &corpus.fields {
        let m = build_metric(field, corpus.xi, corpus.tie_eps).unwrap();
        let z = 4;
        let mut by_dist: Vec<(f64, usize)> = (0..9)
            .map(|w| {
                let d = if w == z { 0.0 } else { brute_force_geodesic(field, &m, corpus.xi, z, w).1 };
                (d, w)
            })
            .collect();
        by_dist.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (d_med, w_med) = by_dist[4];
        let ball = m.metric_ball(z, d_med + 1e-12).unwrap();
        assert!(ball.contains(&w_med));
        assert!(m.metric_ball(z, 0.0).unwrap().is_empty());
    }
}

#[test]
fn zero_field_weights_and_half_step_ball() {
    let field = GridField::zeros(4).unwrap();
    let m = build_metric(&field, 0.7, 0.0).unwrap();
    let delta = 0.25;
    assert!(m.edge_weights().iter().all(|&w| w == delta));
    assert_eq!(m.metric_ball(7, delta / 2.0).unwrap(), vec![7]);
    // graph distance 4 between opposite corners of a 2x2 block
    let lat = m.lattice();
    let d = m.distance(lat.vertex(0, 0), lat.vertex(2, 2)).unwrap();
    assert!((d - 4.0 * delta).abs() < 1e-15);

    let jittered = build_metric(&field, 0.7, 1e-9).unwrap();
    let mut w = jittered.edge_weights().to_vec();
    assert!(w.iter().all(|&x| (delta..delta * (1.0 + 1e-9)).contains(&x)));
    w.sort_by(f64::total_cmp);
    assert!(w.windows(2).all(|p| p[0] < p[1]));
}

#[test]
fn adjacent_geodesic_is_the_edge_and_errors() {
    let m = build_metric(&GridField::zeros(3).unwrap(), 0.5, 0.0).unwrap();
    assert_eq!(m.geodesic(0, 1).unwrap().vertices, vec![0, 1]);
    assert!(matches!(m.geodesic(2, 2), Err(MetricError::DegeneratePath(2))));
    assert!(matches!(m.distance(0, 99), Err(MetricError::Index(99))));
    assert!(matches!(m.geodesic(0, 5), Err(MetricError::Ambiguous { .. })));
    assert!(m.metric_ball(0, -1.0).is_err());
}

#[test]
fn jitter_makes_every_path_unique_on_zero_field() {
    let m = build_metric(&GridField::zeros(32).unwrap(), 0.5, 1e-9).unwrap();
    let z = m.lattice().vertex(16, 16);
    let sp = m.shortest_paths(&[z], None, None);
    assert!(sp.tied.iter().all(|&t| !t));
    for w in [0, 100, 500, 1088] {
        m.geodesic(z, w).unwrap();
    }
}

#[test]
fn geodesic_export_round_trip() {
    let f = sample_field(8, 3, FieldMode::ZeroBoundary).unwrap();
    let m = build_metric(&f, 0.4, 1e-9).unwrap();
    let lat = m.lattice();
    let g = m.geodesic(0, 80).unwrap();
    assert_eq!(parse_geodesic_json(&g.to_json(&lat), &lat).unwrap(), g.vertices);
    assert!(parse_geodesic_json("[[0,0],[1,1]]", &lat).is_err());
    assert!(parse_geodesic_json("[[0,0],[9,0]]", &lat).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn axioms_on_random_fields(
        n in 2usize..7,
        seed in any::<u64>(),
        xi in 0.05f64..1.5,
        picks in prop::collection::vec(any::<u32>(), 6),
    ) {
        let f = sample_field(n, seed, FieldMode::ZeroBoundary).unwrap();
        let m = build_metric(&f, xi, 1e-9).unwrap();
        let nv = m.lattice().num_vertices();
        let v: Vec<usize> = picks.iter().map(|&p| p as usize % nv).collect();
        let (x, y, z) = (v[0], v[1], v[2]);
        let dxy = m.distance(x, y).unwrap();
        prop_assert_eq!(dxy, m.distance(y, x).unwrap());
        let dxz = m.distance(x, z).unwrap();
        let dyz = m.distance(y, z).unwrap();
        prop_assert!(dxz <= (dxy + dyz) * (1.0 + 1e-9));
        if x != y {
            let g = m.geodesic(x, y).unwrap();
            prop_assert_eq!(g.length, dxy);
            prop_assert_eq!(g.vertices[0], x);
            prop_assert_eq!(*g.vertices.last().unwrap(), y);
            let len = m.path_length(&g.vertices).unwrap();
            prop_assert!((len - dxy).abs() <= 1e-12 * dxy);
        }
        // balls are nested
        let small = m.metric_ball(x, dxy * 0.5).unwrap();
        let big = m.metric_ball(x, dxy + 1e-12).unwrap();
        prop_assert!(small.iter().all(|u| big.contains(u)));
    }

    #[test]
    fn oracle_weights_match_stored_weights(n in 2usize..6, seed in any::<u64>(), xi in 0.1f64..1.0) {
        let f = sample_field(n, seed, FieldMode::ZeroBoundary).unwrap();
        let m = build_metric(&f, xi, 1e-9).unwrap();
        let lat = m.lattice();
        for e in 0..lat.num_edges() {
            let (u, v) = lat.edge_endpoints(e);
            let w = oracle_edge_weight(&f, &m, xi, u, v);
            prop_assert!((w - m.edge_weight(e)).abs() <= 1e-15 * w);
        }
    }
}
