mod common;

use std::collections::BTreeSet;

use common::{pt, random_flips};
use cubist_core::qmatrix::{c_u_brauer, c_u_local, c_v, d_u, d_v, verify_identities, CHECK_NAMES};
use cubist_core::{quantum_integer, CubistSet, LatticePoint, LaurentPoly, Window};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn poly(t: &[(i64, i64)]) -> LaurentPoly {
    LaurentPoly::from_terms(t.iter().copied())
}

#[test]
fn rank_one_is_identity() {
    let s = CubistSet::corner(pt(&[0])).unwrap();
    let w = Window::cube(&pt(&[0]), 3);
    for m in [d_u(&s, &w).unwrap(), d_v(&s, &w).unwrap(), c_u_brauer(&s, &w).unwrap()] {
        assert_eq!(m.rows(), &[pt(&[0])]);
        assert_eq!(m.value(&pt(&[0]), &pt(&[0])), LaurentPoly::one());
    }
    let rep = verify_identities(&s, &w, 4).unwrap();
    assert!(rep.all_passed());
}

#[test]
fn decomposition_matrices() {
    for s in [CubistSet::corner(pt(&[0, 0, 0])).unwrap(), CubistSet::flat(3, 1, 0).unwrap()] {
        let w = Window::cube(&pt(&[0, 0, 0]), 3);
        let du = d_u(&s, &w).unwrap();
        let dv = d_v(&s, &w).unwrap();
        for x in du.rows() {
            assert_eq!(du.value(x, x), LaurentPoly::one());
            assert_eq!(dv.value(x, x), LaurentPoly::one());
            if s.lambda(x).unwrap().points().iter().all(|p| w.contains(p)) {
                let sum: i64 = du.cols().iter().map(|y| du.value(x, y).eval_at_one().try_into().unwrap_or(0i64)).sum();
                assert_eq!(sum, 4);
            }
        }
    }
    // flat rank 2: D_V follows the closed quadrant of the cone
    let s = CubistSet::flat(2, 1, 0).unwrap();
    let dv = d_v(&s, &Window::cube(&pt(&[0, 0]), 3)).unwrap();
    assert_eq!(dv.value(&pt(&[0, 0]), &pt(&[0, 2])), LaurentPoly::q_pow(2));
    assert!(dv.value(&pt(&[0, 0]), &pt(&[0, -1])).is_zero());
}

#[test]
fn cartan_values() {
    let line = CubistSet::flat(2, 1, 0).unwrap();
    let c = c_u_brauer(&line, &Window::cube(&pt(&[0, 0]), 3)).unwrap();
    assert_eq!(c.value(&pt(&[0, 0]), &pt(&[0, 0])), poly(&[(0, 1), (2, 1)]));
    assert_eq!(c.value(&pt(&[0, 0]), &pt(&[0, 1])), LaurentPoly::q_pow(1));

    let rouquier = CubistSet::weight2(5, BTreeSet::new()).unwrap();
    let w = Window::cube(&pt(&[0, 0, 0]), 3);
    let brauer = c_u_brauer(&rouquier, &w).unwrap();
    let local = c_u_local(&rouquier, &w).unwrap();
    assert_eq!(brauer.value(&pt(&[1, 1, 0]), &pt(&[1, 1, 0])), poly(&[(0, 1), (2, 2), (4, 1)]));
    assert_eq!(local.value(&pt(&[1, 0, 0]), &pt(&[1, 0, 0])), poly(&[(0, 1), (2, 3), (4, 1)]));
    assert_eq!(local.value(&pt(&[0, 0, 0]), &pt(&[0, 0, 0])), poly(&[(0, 1), (2, 1), (4, 1)]));

    // at a flippable vertex z, the z row is q^{r-1}[r - d(z,x)] on the unit cube below z
    let corner = CubistSet::corner(pt(&[0, 0, 0])).unwrap();
    let c = c_u_local(&corner, &w).unwrap();
    for x in c.rows().iter().filter(|x| pt(&[-1, -1, -1]).le(x)) {
        let d = x.distance(&pt(&[0, 0, 0]));
        assert_eq!(c.value(&pt(&[0, 0, 0]), x), quantum_integer(3 - d).shift(2));
    }
}

#[test]
fn cv_values() {
    let one = CubistSet::corner(pt(&[0])).unwrap();
    assert_eq!(c_v(&one, &Window::cube(&pt(&[0]), 2), 4).unwrap().nnz(), 1);
    let s2 = CubistSet::flat(2, 2, 0).unwrap();
    let m = c_v(&s2, &Window::cube(&pt(&[0, 0]), 2), 4).unwrap();
    assert_eq!(m.at(&pt(&[0, 0]), &pt(&[0, 0])).unwrap().to_poly(), poly(&[(0, 1), (2, 1), (4, 1)]));
    let s3 = CubistSet::corner(pt(&[0, 0, 0])).unwrap();
    let m = c_v(&s3, &Window::cube(&pt(&[0, 0, 0]), 2), 3).unwrap();
    assert_eq!(m.at(&pt(&[0, 0, 0]), &pt(&[-1, 0, 0])).unwrap().to_poly(), poly(&[(1, 1), (3, 2)]));
}

#[test]
fn support_and_cross_counts() {
    let s = CubistSet::corner(pt(&[0, 0, 0])).unwrap();
    let s = random_flips(s, &Window::cube(&pt(&[0, 0, 0]), 1), 4, &mut StdRng::seed_from_u64(3));
    let w = Window::cube(&pt(&[0, 0, 0]), 4);
    let c = c_u_brauer(&s, &w).unwrap();
    for (i, j, v) in c.entries() {
        let (x, y) = (&c.rows()[i], &c.cols()[j]);
        assert!(x.distance(y) <= 4);
        assert!(v.min_exponent().unwrap() >= 0 && v.max_exponent().unwrap() <= 4);
    }
    // C_U(1) row sums count (facet, vertex-of-facet) incidences through x
    let inner = Window::cube(&pt(&[0, 0, 0]), 2);
    for x in s.points_in_window(&inner) {
        let row: i64 = c.cols().iter().map(|y| i64::try_from(c.value(&x, y).eval_at_one()).unwrap()).sum();
        let want = 4 * s.facets_containing(&x).unwrap().len() as i64;
        assert_eq!(row, want, "{x}");
    }
}

#[test]
fn verify_reports_every_check() {
    let s = CubistSet::flat(2, 1, 0).unwrap();
    let rep = verify_identities(&s, &Window::cube(&pt(&[0, 0]), 5), 8).unwrap();
    assert!(rep.all_passed());
    assert_eq!(rep.checks.len(), 9);
    let s = CubistSet::corner(pt(&[0, 0, 0])).unwrap();
    let s = random_flips(s, &Window::cube(&pt(&[0, 0, 0]), 1), 3, &mut StdRng::seed_from_u64(9));
    let rep = verify_identities(&s, &Window::cube(&pt(&[0, 0, 0]), 4), 8).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
    let names: Vec<&str> = rep.checks.iter().map(|c| c.name).collect();
    assert_eq!(names, CHECK_NAMES);
    assert!(rep.checks.iter().all(|c| c.evaluated > 0));
    assert!(verify_identities(&s, &Window::cube(&LatticePoint::zero(3), 2), 5).is_err());
}

#[test]
fn matrix_json_layout() {
    let s = CubistSet::flat(2, 1, 0).unwrap();
    let m = c_u_brauer(&s, &Window::new(pt(&[0, 0]), pt(&[0, 1]))).unwrap();
    let v = serde_json::to_value(&m).unwrap();
    assert_eq!(v["rows"], serde_json::json!([[0, 0], [0, 1]]));
    assert_eq!(v["entries"][1], serde_json::json!({"r": 0, "c": 1, "poly": {"terms": {"1": 1}}}));
}
