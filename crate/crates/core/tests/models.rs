#![allow(clippy::needless_range_loop)]

use accs::analysis::ConnectionSource;
use accs::geometry::levi_civita;
use accs::models::{by_name, catalog, planar_body, rolling_disk, ModelError};
use accs::symcore::{Expr, ZeroTest};

#[test]
fn planar_body_is_flat() {
    let s = planar_body(2.0, 0.7, 0.3).unwrap();
    let ConnectionSource::Metric(g) = s.source() else {
        panic!("planar body is Riemannian");
    };
    let lc = levi_civita(g).unwrap();
    assert!(lc.christoffels().iter().flatten().flatten().all(Expr::is_zero));
    assert_eq!(s.inputs().len(), 2);
    assert_eq!(s.chart().coords()[0].name(), "theta");
    assert!(s.warnings().is_empty());
}

#[test]
fn rolling_disk_frame_symbols_vanish_on_d() {
    let s = rolling_disk(1.5, 0.8, 0.6, 1.1).unwrap();
    let conn = s.connection();
    let zt = ZeroTest::default();
    for c in 0..4 {
        for a in 0..2 {
            for b in 0..2 {
                assert!(zt.is_zero(conn.frame_christoffel(c, a, b).unwrap()).unwrap());
            }
        }
    }
    assert_eq!(s.constraint().unwrap().len(), 2);
}

#[test]
fn parameters_are_validated() {
    assert!(matches!(
        planar_body(0.0, 1.0, 0.5),
        Err(ModelError::NonPositive { name: "m", .. })
    ));
    assert!(matches!(
        planar_body(1.0, -1.0, 0.5),
        Err(ModelError::NonPositive { name: "J", .. })
    ));
    assert!(!planar_body(1.0, 1.0, 0.0).unwrap().warnings().is_empty());
    assert!(rolling_disk(1.0, 0.0, 1.0, 1.0).is_err());
    assert!(rolling_disk(1.0, 1.0, 1.0, f64::NAN).is_err());
}

#[test]
fn catalog_builds_every_model() {
    let names: Vec<&str> = catalog().iter().map(|d| d.name).collect();
    assert_eq!(names, ["planar_body", "rolling_disk"]);
    for d in catalog() {
        let s = d.build_default().unwrap();
        assert_eq!(s.name(), d.name);
        for (p, v) in d.params {
            let sym = s.chart().params().iter().find(|s| s.name() == *p).unwrap();
            assert_eq!(s.params().get(sym), Some(*v));
        }
    }
    assert!(by_name("hovercraft").is_err());
    assert!(by_name("planar_body").unwrap().build(&[1.0]).is_err());
}
