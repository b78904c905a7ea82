mod common;

use std::collections::BTreeSet;

use common::{example_pyramid, pt};
use cubist_core::flips::{check_flip_cartan, flip, flip_conditions, flippable_in_window, is_flippable, predicted_flip_cartan, unflip, FlipError};
use cubist_core::{quantum_integer, BaseIdeal, CubistSet, Window};

#[test]
fn corner_examples() {
    let s = CubistSet::corner(pt(&[0, 0, 0])).unwrap();
    assert!(is_flippable(&s, &pt(&[0, 0, 0])).unwrap());
    let after = CubistSet::new(3, BaseIdeal::Corner { anchor: pt(&[0, 0, 0]) }, vec![pt(&[0, 0, 0])]).unwrap();
    assert!(is_flippable(&after, &pt(&[-1, 0, 0])).unwrap());
    assert!(matches!(is_flippable(&s, &pt(&[1, 1, 1])), Err(FlipError::Cubist(_))));
}

#[test]
fn flat_sets_have_no_flips() {
    for r in 2..=4 {
        let s = CubistSet::flat(r, 1, 0).unwrap();
        assert!(flippable_in_window(&s, &Window::cube(&cubist_core::LatticePoint::zero(r), 2)).is_empty());
    }
}

#[test]
fn flippable_vertices_are_simplices() {
    let s = CubistSet::weight2(7, example_pyramid()).unwrap();
    let w = Window::cube(&pt(&[-2, 4, 0]), 4);
    let zs = flippable_in_window(&s, &w);
    assert!(!zs.is_empty());
    for z in zs {
        let c = flip_conditions(&s, &z).unwrap();
        assert!(c.consistent() && c.maximal && c.simplex);
        assert_eq!(s.facets_containing(&z).unwrap().len(), 3);
        assert_eq!(s.i_set(&z).unwrap(), vec![z.clone()]);
    }
}

#[test]
fn membership_after_flip() {
    let s = CubistSet::corner(pt(&[0, 0, 0])).unwrap();
    let z = pt(&[0, 0, 0]);
    let f = flip(&s, &z).unwrap();
    let w = Window::cube(&z, 3);
    for x in w.points() {
        let changed = s.contains(&x).unwrap() != f.contains(&x).unwrap();
        assert_eq!(changed, x == z || x == z.shift(-1), "{x}");
    }
    assert_eq!(unflip(&f, &z).unwrap(), s);
    assert!(matches!(unflip(&f, &pt(&[-1, 0, 0])), Err(FlipError::NotUndoable(_))));
}

#[test]
fn independent_flips_commute() {
    let s = CubistSet::corner(pt(&[0, 0, 0])).unwrap();
    let s = flip(&s, &pt(&[0, 0, 0])).unwrap();
    let zs = flippable_in_window(&s, &Window::cube(&pt(&[0, 0, 0]), 2));
    let (a, b) = (&zs[0], &zs[1]);
    let ab = flip(&flip(&s, a).unwrap(), b).unwrap();
    let ba = flip(&flip(&s, b).unwrap(), a).unwrap();
    for x in Window::cube(&pt(&[0, 0, 0]), 3).points() {
        assert_eq!(ab.contains(&x).unwrap(), ba.contains(&x).unwrap());
    }
}

#[test]
fn predicted_matrix_corrections() {
    let s = CubistSet::corner(pt(&[0, 0, 0])).unwrap();
    let z = pt(&[0, 0, 0]);
    let m = predicted_flip_cartan(&s, &z, &Window::cube(&z, 3)).unwrap();
    assert!(m.value(&z, &z).is_zero());
    // d(z,x) + d(z,y) = r: no correction
    let (x, y) = (pt(&[-1, -1, 0]), pt(&[0, 0, -1]));
    let cu = cubist_core::qmatrix::c_u_brauer_points(&s, m.rows()).unwrap();
    assert_eq!(m.value(&x, &y), cu.value(&x, &y));
    let far = pt(&[-3, 0, 0]);
    assert_eq!(m.value(&far, &far), cu.value(&far, &far));
    assert_eq!(cu.value(&z, &z), quantum_integer(3).shift(2));
    assert!(predicted_flip_cartan(&CubistSet::flat(3, 1, 0).unwrap(), &z, &Window::cube(&z, 2)).is_err());
}

#[test]
fn tilt_cartan_reports() {
    for r in 2..=3 {
        let z = cubist_core::LatticePoint::zero(r);
        let s = CubistSet::corner(z.clone()).unwrap();
        let rep = check_flip_cartan(&s, &z, &Window::cube(&z, 4)).unwrap();
        assert!(rep.all_passed());
        assert_eq!(rep.replaced_by, z.shift(-1));
    }
    let s = CubistSet::weight2(5, BTreeSet::new()).unwrap();
    let w = Window::cube(&pt(&[0, 1, 0]), 3);
    let z = flippable_in_window(&s, &w)[0].clone();
    assert!(check_flip_cartan(&s, &z, &w).unwrap().all_passed());
}
