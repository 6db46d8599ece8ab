use std::collections::BTreeMap;

use flatdeform::constraints::{
    check_candidate, derive_constraints, is_gap_monomial, reduce_two_ways, theta_candidate, IndexWindow,
};
use flatdeform::ring::{rat, QSeries};

fn window(i: i64) -> IndexWindow {
    IndexWindow::around(i, 24)
}

#[test]
fn w1_matches_hand_expansion() {
    // W = 1: each route stops after one step.
    let (r1, r2) = reduce_two_ways(0, 1, 2, window(0)).unwrap();
    assert_eq!(r1.terms.len(), 1);
    assert_eq!(r2.terms.len(), 1);
    assert_eq!(r1.terms[&vec![-1, 2, 2]].coeff(&[1]), rat(-1));
    assert_eq!(r2.terms[&vec![0, 0, 3]].coeff(&[1]), rat(-1));
    let set = derive_constraints(0, 1, 2, window(0)).unwrap();
    assert_eq!(set.constraints.len(), 2);
    assert!(set.frontier.is_empty());
}

#[test]
fn default_constraints_shape() {
    let set = derive_constraints(0, 6, 3, window(0)).unwrap();
    assert!(!set.constraints.is_empty());
    for c in &set.constraints {
        assert!(is_gap_monomial(&c.monomial));
        assert!(c.poly.min_degree().unwrap() >= 1, "degree-0 part at {:?}", c.monomial);
        assert!(c.poly.terms().keys().all(|e| e.iter().sum::<u32>() <= 3));
    }
    let w4 = derive_constraints(0, 4, 2, window(0)).unwrap();
    let c = w4.constraints.iter().find(|c| c.monomial == vec![-1, 2, 2]).unwrap();
    assert_eq!(c.poly.coeff(&[1, 0, 0, 0]), rat(-1));
}

#[test]
fn translation_invariance() {
    let base = derive_constraints(0, 6, 3, window(0)).unwrap();
    for i in [-3, 1, 5] {
        let shifted = derive_constraints(i, 6, 3, window(i)).unwrap();
        assert_eq!(shifted.constraints.len(), base.constraints.len());
        for (a, b) in base.constraints.iter().zip(&shifted.constraints) {
            let moved: Vec<i64> = a.monomial.iter().map(|x| x + i).collect();
            assert_eq!(moved, b.monomial);
            assert_eq!(a.poly, b.poly);
        }
        assert_eq!(shifted.frontier, base.frontier);
    }
}

#[test]
fn candidates() {
    let set = derive_constraints(0, 6, 3, window(0)).unwrap();

    let theta = theta_candidate(6);
    let rec = check_candidate(&theta, &set, 8, Some(12));
    assert!(!rec.status.is_fail(), "{rec:?}");

    let zero = BTreeMap::new();
    assert!(!check_candidate(&zero, &set, 8, None).status.is_fail());

    let mut single = BTreeMap::new();
    single.insert(1, QSeries::constant(rat(3)));
    let rec = check_candidate(&single, &set, 8, None);
    assert!(rec.status.is_fail());
}

#[test]
fn a1_alone_fails_linearly() {
    // The two first steps land on different gap-monomials, so the
    // coefficient of x_{-1} x_2^2 is exactly -a_1.
    let set = derive_constraints(0, 6, 3, window(0)).unwrap();
    let c = set.constraints.iter().find(|c| c.monomial == vec![-1, 2, 2]).unwrap();
    assert_eq!(c.poly.terms().len(), 1);
    assert_eq!(c.poly.coeff(&[1]), rat(-1));
    let mut a1 = BTreeMap::new();
    a1.insert(1, QSeries::monomial(rat(1), 1));
    let rec = check_candidate(&a1, &set, 8, None);
    assert!(rec.status.is_fail());
    assert!(rec.counterexample.unwrap().contains("q^1"));
}

#[test]
fn tight_window_escapes() {
    assert!(reduce_two_ways(0, 6, 3, IndexWindow::around(0, 6)).is_err());
}
