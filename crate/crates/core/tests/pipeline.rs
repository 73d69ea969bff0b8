use std::f64::consts::PI;

use sixjtv::asympt::{appendix_growth_check, growth_series, odd_range, SeriesKind};
use sixjtv::fsl::{fsl_tv, load_fsl};
use sixjtv::lobachevsky::{AngleSextuple, V3, V8};
use sixjtv::qarith::Level;
use sixjtv::sixj::{bound_scan, ScanOptions, ScanReport};
use sixjtv::tvstate::{load_triangulation, seeds, tv_state_sum, Triangulation};
use sixjtv::Error;

fn lvl(r: i64) -> Level {
    Level::new(r).unwrap()
}

// mpmath, 28 digits, literal state sum (magnitude).
const BOUNDARY_4SIMPLEX_R7: f64 = 0.174_645_847_708_044_914_9;

#[test]
fn triangulation_document_round_trip() {
    let tri = Triangulation::from_vertex_tetrahedra(5, &seeds::boundary_4simplex()).unwrap();
    let again = load_triangulation(&tri.to_json()).unwrap();
    assert_eq!(again.doc(), tri.doc());
    let v = tv_state_sum(&again, &lvl(7)).unwrap();
    assert!((v.value - BOUNDARY_4SIMPLEX_R7).abs() < 1e-13);
    assert_eq!(v.colorings_counted, 16064);
    assert_eq!(v.imaginary_residue, 0.0);
}

#[test]
fn malformed_triangulations_rejected() {
    for doc in [
        "not json",
        r#"{"vertices": [], "edges": [{"id": 1, "interior": true}], "tetrahedra": [{"edges": [1,1,1,1,1]}]}"#,
        r#"{"vertices": [], "edges": [{"id": 1, "interior": true}], "tetrahedra": [{"edges": [1,1,1,1,1,9]}]}"#,
        r#"{"vertices": [], "edges": [{"id": 1, "interior": true}, {"id": 1, "interior": true}], "tetrahedra": []}"#,
    ] {
        assert!(matches!(load_triangulation(doc), Err(Error::InvalidDocument(_))), "{doc}");
    }
}

#[test]
fn pachner_pair_r9() {
    let (a, b) = seeds::pachner_pair();
    let l = lvl(9);
    let x = tv_state_sum(&a, &l).unwrap().value;
    let y = tv_state_sum(&b, &l).unwrap().value;
    assert!((x - y).abs() < 1e-9 * x.abs());
}

#[test]
fn scan_report_json_round_trip() {
    let rep = bound_scan(&lvl(9), &ScanOptions::default()).unwrap();
    let back: ScanReport = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
    assert_eq!(back, rep);
    assert_eq!(rep.histogram.values().sum::<u64>(), rep.count_admissible);
    assert!(matches!(bound_scan(&lvl(19), &ScanOptions::default()), Err(Error::ScanCeiling { .. })));
}

#[test]
fn fsl_document_to_series() {
    let p = load_fsl(r#"{"c": 2, "k": 3, "b2": 2, "blocks": [{"slots": [1,2,3,1,2,3]}, {"slots": [1,2,3,1,2,3]}]}"#).unwrap();
    let s = growth_series(&SeriesKind::Fsl(p.clone()), &odd_range(11, 31)).unwrap();
    assert!(s.is_increasing());
    let r = 21;
    let direct = fsl_tv(&p, &lvl(r)).unwrap();
    let point = s.points.iter().find(|q| q.0 == r as u32).unwrap().1;
    assert_eq!(point, direct.growth);
    assert!(direct.growth < 4.0 * V8);
}

#[test]
fn appendix_series_for_central_angles_is_the_central_series() {
    let theta = AngleSextuple::uniform(PI).unwrap();
    let rs: Vec<u32> = odd_range(11, 61).into_iter().filter(|r| (r + 1) % 4 == 0).collect();
    let check = appendix_growth_check(&theta, &rs).unwrap();
    let central = growth_series(&SeriesKind::SixjCentral, &rs).unwrap();
    assert_eq!(check.series.points, central.points);
    assert!((check.limit - V8).abs() < 1e-10);
    assert!(check.incoherent.is_empty());
}

#[test]
fn appendix_series_third_turn() {
    let theta = AngleSextuple::uniform(2.0 * PI / 3.0).unwrap();
    let check = appendix_growth_check(&theta, &odd_range(11, 101)).unwrap();
    assert!(check.series.gaps.is_empty());
    assert!((check.limit - V3).abs() < 1e-10);
    // Every realized growth value exceeds the limit and the series descends toward it.
    assert!(check.series.points.iter().all(|p| p.1 > V3));
}
