mod common;

use common::{configurations, pt};
use cubist_core::cubist::facet_points;
use cubist_core::{BaseIdeal, CubistError, CubistSet, Facet, LatticePoint, Reach, Window};
use proptest::prelude::*;

fn corner3() -> CubistSet {
    CubistSet::corner(pt(&[0, 0, 0])).unwrap()
}

#[test]
fn ideal_and_set_membership() {
    let c = corner3();
    assert!(c.contains_ideal(&pt(&[-3, 0, -1])).unwrap());
    assert!(!c.contains_ideal(&pt(&[1, -5, -5])).unwrap());
    let removed = CubistSet::new(3, c.base().clone(), vec![pt(&[0, 0, 0])]).unwrap();
    assert!(!removed.contains_ideal(&pt(&[0, 0, 0])).unwrap());
    assert!(c.contains(&pt(&[0, -2, -5])).unwrap());
    assert!(!c.contains(&pt(&[-1, -1, -1])).unwrap());
    assert!(CubistSet::flat(3, 2, 0).unwrap().contains(&pt(&[7, 0, -4])).unwrap());
    assert!(matches!(c.contains(&pt(&[0, 0])), Err(CubistError::RankMismatch { .. })));
}

#[test]
fn validation_reports_first_bad_removal() {
    let base = BaseIdeal::Corner { anchor: pt(&[0, 0, 0]) };
    assert!(CubistSet::new(3, base.clone(), vec![pt(&[0, 0, 0])]).is_ok());
    match CubistSet::new(3, base.clone(), vec![pt(&[-1, 0, 0])]) {
        Err(CubistError::InvalidRemoval { index, .. }) => assert_eq!(index, 0),
        other => panic!("{other:?}"),
    }
    assert!(CubistSet::new(3, base.clone(), vec![pt(&[0, 0, 0]), pt(&[-1, 0, 0])]).is_ok());
    assert!(CubistSet::new(3, BaseIdeal::Flat { axis: 1, level: 0 }, vec![pt(&[0, 0, 0])]).is_err());
    // deserialisation defers the check to validate
    let json = r#"{"rank":3,"base":{"type":"corner","anchor":[0,0,0]},"removals":[[0,0,0],[0,0,0]]}"#;
    let s: CubistSet = serde_json::from_str(json).unwrap();
    assert!(matches!(s.validate(), Err(CubistError::InvalidRemoval { index: 1, .. })));
}

#[test]
fn distances() {
    assert_eq!(pt(&[0, 0]).distance(&pt(&[2, -1])), 3);
    assert_eq!(pt(&[1, 2, 3]).distance(&pt(&[0, 0, 0])), 6);
    assert_eq!(pt(&[4, 4]).distance(&pt(&[4, 4])), 0);
}

#[test]
fn lambda_examples() {
    let x = pt(&[-2, 0, -1]);
    assert_eq!(corner3().lambda(&x).unwrap(), Facet { anchor: x, axis: 2 });
    for j in 1..=3 {
        let f = CubistSet::flat(3, j, 0).unwrap();
        let mut x = pt(&[3, -1, 2]);
        x[j - 1] = 0;
        assert_eq!(f.lambda(&x).unwrap().axis, j);
    }
    let one = CubistSet::corner(pt(&[5])).unwrap();
    let f = one.lambda(&pt(&[5])).unwrap();
    assert_eq!(f.points(), vec![pt(&[5])]);
    assert!(matches!(corner3().lambda(&pt(&[1, 1, 1])), Err(CubistError::NotInSet(_))));
}

#[test]
fn facet_point_lists() {
    let f = |axis, r| facet_points(&Facet { anchor: LatticePoint::zero(r), axis }, r);
    assert_eq!(f(1, 2), vec![pt(&[0, 0]), pt(&[0, -1])]);
    let mut got = f(2, 3);
    got.sort();
    let mut want = vec![pt(&[0, 0, 0]), pt(&[1, 0, 0]), pt(&[0, 0, -1]), pt(&[1, 0, -1])];
    want.sort();
    assert_eq!(got, want);
    assert!(f(4, 4).iter().all(|p| p.coords().iter().all(|&c| c >= 0)));
}

#[test]
fn cones() {
    let c = corner3();
    let b = pt(&[-2, 0, -1]);
    assert!(c.in_mu(&b, &b).unwrap());
    assert!(c.in_mu(&b, &pt(&[-2, 5, -1])).unwrap());
    let f = CubistSet::flat(3, 2, 0).unwrap();
    assert!(f.in_mu(&pt(&[0, 0, 0]), &pt(&[-1, 4, 2])).unwrap());
    assert!(!f.in_mu(&pt(&[0, 0, 0]), &pt(&[1, 4, 2])).unwrap());
}

#[test]
fn flat_and_crooked() {
    assert_eq!(CubistSet::flat(3, 2, 0).unwrap().is_flat(&pt(&[4, 0, 1])).unwrap(), Some(2));
    assert_eq!(CubistSet::corner(pt(&[0, 0])).unwrap().is_flat(&pt(&[0, 0])).unwrap(), None);
    assert_eq!(corner3().is_flat(&pt(&[0, -5, -5])).unwrap(), Some(1));
}

#[test]
fn local_sets() {
    assert_eq!(corner3().i_set(&pt(&[0, 0, 0])).unwrap(), vec![pt(&[0, 0, 0])]);
    let f = CubistSet::flat(3, 2, 0).unwrap();
    assert_eq!(f.i_set(&pt(&[1, 0, 1])).unwrap().len(), 4);
    // a flat set is a square grid: four squares at every vertex
    assert_eq!(f.facets_containing(&pt(&[1, 0, 1])).unwrap().len(), 4);
    assert_eq!(corner3().facets_containing(&pt(&[0, 0, 0])).unwrap().len(), 3);
    let one = CubistSet::corner(pt(&[2])).unwrap();
    assert_eq!(one.facets_containing(&pt(&[2])).unwrap().len(), 1);
    assert_eq!(one.opposite(&pt(&[2])).unwrap(), pt(&[2]));
    assert_eq!(f.opposite(&pt(&[3, 0, 3])).unwrap(), pt(&[4, 0, 2]));
}

#[test]
fn window_points() {
    let c2 = CubistSet::corner(pt(&[0, 0])).unwrap();
    let w = Window::new(pt(&[-1, -1]), pt(&[0, 0]));
    assert_eq!(c2.points_in_window(&w), vec![pt(&[-1, 0]), pt(&[0, -1]), pt(&[0, 0])]);
    assert!(c2.points_in_window(&Window::new(pt(&[1, 1]), pt(&[0, 0]))).is_empty());
    let one = CubistSet::corner(pt(&[3])).unwrap();
    assert_eq!(one.points_in_window(&Window::cube(&pt(&[2]), 4)), vec![pt(&[3])]);
}

#[test]
fn order_basics() {
    let c = corner3();
    let x = pt(&[-2, 0, -1]);
    for y in c.lambda(&x).unwrap().points() {
        assert_eq!(c.order_geq(&x, &y, None).unwrap(), Reach::Holds);
    }
    assert!(c.order_geq(&x, &x, None).unwrap() == Reach::Holds);
    assert!(c.order_geq_permuted(&x, &x, None, &[1, 1, 2]).is_err());
}

/// Properties that hold on every suite configuration.
#[test]
fn window_invariants() {
    for cfg in configurations().iter().filter(|c| c.set.rank() <= 3) {
        let s = &cfg.set;
        let center: Vec<i64> = cfg.window.lo.add(&cfg.window.hi).coords().iter().map(|c| c / 2).collect();
        let w = Window::cube(&LatticePoint::new(center), 2);
        let pts = s.points_in_window(&w);
        assert_eq!(pts, s.points_in_window_scan(&w), "{}", cfg.name);
        for x in &pts {
            // fiber property: x is the only point of its diagonal line in X
            assert!(!s.contains(&x.shift(1)).unwrap() && !s.contains(&x.shift(-1)).unwrap());
            assert!(s.lambda(x).unwrap().points().iter().all(|p| s.contains(p).unwrap()), "{}", cfg.name);
            let cube = Window::new(x.clone(), x.shift(1));
            assert!(!cube.points().all(|p| s.contains(&p).unwrap()));
            // antisymmetry and cones imply order
            for y in pts.iter().filter(|y| x.distance(y) <= 2 && *y != x) {
                let box_ = w.inflate(2);
                let xy = s.order_geq(x, y, Some(&box_)).unwrap() == Reach::Holds;
                let yx = s.order_geq(y, x, Some(&box_)).unwrap() == Reach::Holds;
                assert!(!(xy && yx), "{}: {x} {y}", cfg.name);
                if s.in_mu(y, x).unwrap() {
                    assert_eq!(s.order_geq(x, y, None).unwrap(), Reach::Holds, "{}: {x} in mu {y}", cfg.name);
                }
            }
        }
    }
}

#[test]
fn json_interchange() {
    let s = CubistSet::new(3, BaseIdeal::Corner { anchor: pt(&[0, 0, 0]) }, vec![pt(&[0, 0, 0])]).unwrap();
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(
        v,
        serde_json::json!({"rank": 3, "base": {"type": "corner", "anchor": [0, 0, 0]}, "removals": [[0, 0, 0]]})
    );
    assert_eq!(serde_json::from_value::<CubistSet>(v).unwrap(), s);
    let flat: CubistSet = serde_json::from_str(r#"{"rank":2,"base":{"type":"flat","axis":1,"level":0}}"#).unwrap();
    assert!(flat.contains(&pt(&[0, 9])).unwrap());
}

proptest! {
    #[test]
    fn fibers_meet_x_once(a in -6i64..6, b in -6i64..6, c in -6i64..6) {
        let s = corner3();
        let w = pt(&[a, b, c]);
        let hits = (-30..30).filter(|&t| s.contains(&w.shift(t)).unwrap()).count();
        prop_assert_eq!(hits, 1);
        let x = s.fiber_point(&w).unwrap();
        prop_assert!(s.contains(&x).unwrap());
    }
}
