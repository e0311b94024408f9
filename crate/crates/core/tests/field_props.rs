mod common;

use proptest::prelude::*;
use wheel_lab_core::field::{
    area_measure, covariance_panel, covariance_report, parse_field_header, read_field_binary,
    read_field_csv, sample_field, AreaMeasure, FieldError, FieldMode, FieldSampler, GridField,
};

use common::green_sine_series;

#[test]
fn sampling_is_deterministic() {
    let a = sample_field(32, 7, FieldMode::ZeroBoundary).unwrap();
    let b = sample_field(32, 7, FieldMode::ZeroBoundary).unwrap();
    assert_eq!(a.values(), b.values());
    let c = sample_field(32, 8, FieldMode::ZeroBoundary).unwrap();
    assert_ne!(a.values(), c.values());
}

#[test]
fn torus_two_by_two_sums_to_zero() {
    for seed in 0..20 {
        let f = sample_field(2, seed, FieldMode::Torus).unwrap();
        assert_eq!(f.values().len(), 4);
        assert_eq!(f.values().iter().sum::<f64>(), 0.0);
    }
}

#[test]
fn zero_boundary_is_zero_on_the_rim() {
    let f = sample_field(16, 3, FieldMode::ZeroBoundary).unwrap();
    let lat = f.lattice();
    for v in 0..lat.num_vertices() {
        if lat.is_boundary(v) {
            let (r, c) = lat.coords(v);
            assert_eq!(f.vertex_value(r, c), 0.0);
        }
    }
    assert!(f.values().iter().all(|v| v.is_finite()));
}

#[test]
fn size_and_mode_errors() {
    assert!(matches!(
        sample_field(1, 0, FieldMode::ZeroBoundary),
        Err(FieldError::InvalidSize { .. })
    ));
    assert!("hyperbolic".parse::<FieldMode>().is_err());
    assert_eq!("torus".parse::<FieldMode>().unwrap(), FieldMode::Torus);
}

#[test]
fn area_measure_examples() {
    let mu = area_measure(&GridField::zeros(4).unwrap(), 1.3).unwrap();
    assert!(mu.cell_mass().iter().all(|&m| m == 1.0 / 16.0));

    let gamma = 0.8;
    let heights = [0.0, 2f64.ln() / gamma, 0.0, 0.0];
    let mu = AreaMeasure::from_cell_heights(2, &heights, gamma).unwrap();
    for (m, want) in mu.cell_mass().iter().zip([0.2, 0.4, 0.2, 0.2]) {
        assert!((m - want).abs() < 1e-15);
    }

    let f = sample_field(8, 1, FieldMode::ZeroBoundary).unwrap();
    assert!(area_measure(&f, (8.0f64 / 3.0).sqrt()).is_ok());
    assert!(area_measure(&f, 2.0).is_err());
    assert!(area_measure(&f, 0.0).is_err());
}

#[test]
fn dense_oracle_matches_sine_series() {
    for n in [4, 6, 9] {
        let rep = covariance_report(FieldMode::ZeroBoundary, n, 1000, 1).unwrap();
        for p in &rep.pairs {
            let g = green_sine_series(n, p.a, p.b);
            assert!((p.oracle - g).abs() <= 1e-10 * g.abs().max(1.0), "{:?}", p);
        }
    }
    assert_eq!(covariance_panel(FieldMode::ZeroBoundary, 4).len(), 6);
}

#[test]
fn covariance_report_preconditions_and_determinism() {
    assert!(covariance_report(FieldMode::ZeroBoundary, 4, 0, 1).is_err());
    assert!(matches!(
        covariance_report(FieldMode::ZeroBoundary, 33, 1000, 1),
        Err(FieldError::OracleInfeasible { .. })
    ));
    let a = covariance_report(FieldMode::Torus, 4, 3000, 9).unwrap();
    let b = covariance_report(FieldMode::Torus, 4, 3000, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn marginal_kurtosis_is_gaussian() {
    let sampler = FieldSampler::new(4, FieldMode::ZeroBoundary).unwrap();
    let count = 20_000;
    let xs: Vec<f64> = (0..count).map(|k| sampler.sample(5, k).vertex_value(2, 2)).collect();
    let mean = xs.iter().sum::<f64>() / count as f64;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / count as f64;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / count as f64;
    let kurtosis = m4 / (m2 * m2);
    let se = (24.0 / count as f64).sqrt();
    assert!((kurtosis - 3.0).abs() < 3.0 * se, "kurtosis {kurtosis}");
}

#[test]
fn tampered_exports_are_rejected() {
    let f = sample_field(4, 2, FieldMode::ZeroBoundary).unwrap();
    let h = f.header();
    let mut csv = f.to_csv();
    csv.replace_range(0..1, "1");
    assert!(read_field_csv(&h, &csv).is_err());
    assert!(read_field_binary(&h, &f.to_binary()[..16]).is_err());
    assert!(parse_field_header("{\"n\": 4}").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exports_round_trip(n in 2usize..12, seed in any::<u64>(), torus in any::<bool>()) {
        let mode = if torus { FieldMode::Torus } else { FieldMode::ZeroBoundary };
        let f = sample_field(n, seed, mode).unwrap();
        let h = parse_field_header(&serde_json::to_string(&f.header()).unwrap()).unwrap();
        prop_assert_eq!(&read_field_csv(&h, &f.to_csv()).unwrap(), &f);
        prop_assert_eq!(&read_field_binary(&h, &f.to_binary()).unwrap(), &f);
        if torus {
            prop_assert_eq!(f.values().iter().sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn area_measure_is_a_probability(n in 2usize..16, seed in any::<u64>(), gamma in 0.01f64..1.99) {
        let f = sample_field(n, seed, FieldMode::ZeroBoundary).unwrap();
        let mu = area_measure(&f, gamma).unwrap();
        let total: f64 = mu.cell_mass().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(mu.cell_mass().iter().all(|&m| m > 0.0 && m < 1.0));
    }
}
