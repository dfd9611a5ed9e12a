use taperlith_core::bpm::{interior_mode, propagate, BpmSettings};
use taperlith_core::geometry::{frustum_index_map, FrustumGeometry, FrustumProvider, BENCHMARK_INDICES};
use taperlith_core::{Grid2D, Polarization};

fn grid(d: f64) -> Grid2D {
    let n = (30.0 / d).round() as usize;
    Grid2D::centered(n, n, d, d, (0.0, 5.0)).unwrap()
}

#[test]
fn straight_guide_keeps_its_mode() {
    let g = grid(0.2);
    let geom = FrustumGeometry::straight(10.0, 10.0, 1000.0, BENCHMARK_INDICES).unwrap();
    let s = BpmSettings::default();
    let m = interior_mode(&frustum_index_map(&geom, 0.0, &g).unwrap(), &s, None).unwrap();
    let s = BpmSettings { n_ref: m.n_eff, ..s };
    let r = propagate(&m.field, &FrustumProvider::new(geom, g), &s, 1000.0, Some(&m)).unwrap();
    assert!(r.final_power() >= 0.999, "retention {}", r.final_power());
    // The interface-corrected TE stencil is not symmetric, so the monitor
    // may exceed one by the splitting error.
    assert!(r.power_vs_z.iter().all(|p| p.1 <= 1.0 + 1e-6));
}

#[test]
fn taper_transmission_is_reciprocal() {
    let g = grid(0.2);
    let geom = FrustumGeometry::benchmark();
    let s = BpmSettings {
        polarization: Polarization::Scalar,
        ..BpmSettings::default()
    };
    let small = interior_mode(&frustum_index_map(&geom, 0.0, &g).unwrap(), &s, None).unwrap();
    let large = interior_mode(&frustum_index_map(&geom, geom.length, &g).unwrap(), &s, None).unwrap();
    let s = BpmSettings { n_ref: small.n_eff, ..s };
    let fwd = propagate(&small.field, &FrustumProvider::new(geom, g), &s, geom.length, Some(&large)).unwrap();
    let bwd = propagate(&large.field, &FrustumProvider::new(geom.reversed(), g), &s, geom.length, Some(&small))
        .unwrap();
    let (a, b) = (fwd.final_power(), bwd.final_power());
    assert!((a - b).abs() < 1e-3, "forward {a} backward {b}");
    assert!(a > 0.5 && a < 1.0);
    for r in [&fwd, &bwd] {
        assert!(r.power_vs_z.iter().all(|p| (0.0..=1.0 + 1e-9).contains(&p.1)));
    }
}
