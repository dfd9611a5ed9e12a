use taperlith_core::analysis::*;
use taperlith_core::bpm::BpmSettings;
use taperlith_core::geometry::{trapezoid_mask, ExposureSetup, FrustumGeometry, BENCHMARK_INDICES};
use taperlith_core::lithosim::PrintOptions;
use taperlith_core::{Grid2D, Polarization};

fn grid(d: f64) -> Grid2D {
    let n = (30.0 / d).round() as usize;
    Grid2D::centered(n, n, d, d, (0.0, 5.0)).unwrap()
}

fn scalar() -> BpmSettings {
    BpmSettings {
        polarization: Polarization::Scalar,
        ..BpmSettings::default()
    }
}

#[test]
fn matched_chain_is_lossless() {
    let g = grid(0.25);
    let s = scalar();
    let geom = FrustumGeometry::straight(6.0, 6.0, 200.0, BENCHMARK_INDICES).unwrap();
    let (facet, exit) = taper_modes(&geom, &g, &s).unwrap();
    let b = end_to_end_loss(&facet.field, &geom, &exit, &s).unwrap();
    assert!(b.total_db < 0.01, "{b:?}");
    let sum = b.facet_db + b.propagation_db + b.exit_db;
    assert!((b.total_db - sum).abs() < 1e-9);
    assert_eq!(b.n_ref, facet.n_eff);
}

#[test]
fn offset_fiber_loses_more() {
    let g = grid(0.25);
    let s = scalar();
    let geom = FrustumGeometry::straight(8.0, 8.0, 100.0, BENCHMARK_INDICES).unwrap();
    let opts = ChainOptions::default();
    let centred = FiberSpec {
        center: (0.0, 4.0),
        ..FiberSpec::default()
    };
    let offset = FiberSpec {
        center: (4.5, 4.0),
        ..centred
    };
    let a = chain_at(&geom, &g, &SourceSpec::FacetMode, &centred, &s, &opts).unwrap();
    let b = chain_at(&geom, &g, &SourceSpec::FacetMode, &offset, &s, &opts).unwrap();
    assert!(b.exit_db > a.exit_db + 0.5, "{} vs {}", b.exit_db, a.exit_db);
    assert!(b.total_db > a.total_db);
    assert_eq!(a.propagation_db, b.propagation_db);
}

#[test]
fn gaussian_source_adds_facet_loss() {
    let g = grid(0.25);
    let s = scalar();
    let geom = FrustumGeometry::straight(6.0, 6.0, 50.0, BENCHMARK_INDICES).unwrap();
    let src = SourceSpec::Gaussian {
        wx: 1.5,
        wy: 1.0,
        center: (0.0, 3.0),
    };
    let b = chain_at(&geom, &g, &src, &FiberSpec::default(), &s, &ChainOptions::default()).unwrap();
    assert!(b.facet_db > 0.5);
    assert!((b.total_db - b.facet_db - b.propagation_db - b.exit_db).abs() < 1e-9);
}

#[test]
fn wavelength_sweep_contract() {
    let g = grid(0.3);
    let s = scalar();
    let geom = FrustumGeometry {
        length: 200.0,
        ..FrustumGeometry::benchmark()
    };
    let fiber = FiberSpec::default();
    let opts = ChainOptions::default();
    let single = wavelength_sweep(&[1.55], &geom, &g, &SourceSpec::FacetMode, &fiber, &s, &opts).unwrap();
    let direct = chain_at(&geom, &g, &SourceSpec::FacetMode, &fiber, &s, &opts).unwrap();
    assert_eq!(single.rows.len(), 1);
    assert_eq!(single.rows[0].metric, direct.total_db);

    let lambdas: Vec<f64> = (0..7).map(|k| 1.26 + 0.07 * k as f64).collect();
    let sweep = wavelength_sweep(&lambdas, &geom, &g, &SourceSpec::FacetMode, &fiber, &s, &opts).unwrap();
    assert!(sweep.failures.is_empty(), "{:?}", sweep.failures);
    assert_eq!(sweep.rows.len(), 7);
    for (row, l) in sweep.rows.iter().zip(&lambdas) {
        assert_eq!(row.value, *l);
        assert!(row.metric.is_finite() && row.metric >= 0.0);
        assert_eq!(row.components.len(), 3);
    }
    assert!(wavelength_sweep(&[1.55, 1.31], &geom, &g, &SourceSpec::FacetMode, &fiber, &s, &opts).is_err());
}

#[test]
fn sweep_records_failing_points() {
    let g = grid(0.3);
    let s = scalar();
    let geom = FrustumGeometry {
        length: 50.0,
        ..FrustumGeometry::benchmark()
    };
    // Far below the taper's single-mode range the grid is too coarse for
    // the source waist, so that point fails alone.
    let src = SourceSpec::Gaussian {
        wx: 0.4,
        wy: 0.4,
        center: (0.0, 1.0),
    };
    let r = wavelength_sweep(&[1.55], &geom, &g, &src, &FiberSpec::default(), &s, &ChainOptions::default()).unwrap();
    assert!(r.rows.is_empty());
    assert_eq!(r.failures.len(), 1);
    assert_eq!(r.failures[0].value, 1.55);
}

#[test]
fn tilt_gap_sweep_shapes_and_failures() {
    let mask = trapezoid_mask(7.5, 14.5, 200.0).unwrap();
    let setup = ExposureSetup::default();
    let opts = PrintOptions::default();
    let r = tilt_gap_sweep(&[0.0, 10.0], &[-5.0, 200.0], &mask, &setup, &opts).unwrap();
    assert_eq!(r.cells.dim(), (2, 2));
    assert!(r.cells[[0, 0]].outcome.is_err());
    assert!(r.class(1, 1).is_some(), "{:?}", r.cells[[1, 1]]);
    let col = r.angle_vs_tilt(1);
    assert_eq!(col.rows.len(), 2);
    assert_eq!(col.rows[1].value, 10.0);
    let row = r.angle_vs_gap(1);
    assert_eq!(row.failures.len(), 1);
    assert!(tilt_gap_sweep(&[10.0, 5.0], &[200.0], &mask, &setup, &opts).is_err());
}
