use flatdeform::report::Status;
use flatdeform::ring::{ExpVec, LaurentPoly};
use flatdeform::theta::{self, FnkSpec};

fn assert_pass(rec: &flatdeform::report::CheckRecord) {
    assert_eq!(rec.status, Status::Pass, "{rec:?}");
}

#[test]
fn vanishing_numerators() {
    for (k, m) in [(1, 8), (2, 6), (3, 4)] {
        let rec = theta::check_vanishing(k, m).unwrap();
        assert_pass(&rec);
        assert!(rec.window.unwrap().reaches(m), "{rec:?}");
    }
}

#[test]
fn quasi_periodicity() {
    for (n, k, m) in [(1, 1, 6), (2, 2, 6), (3, 3, 4), (1, 2, 6), (2, 3, 4)] {
        assert_pass(&theta::check_fpr(n, k, m).unwrap());
    }
}

#[test]
fn identities_reach_requested_order() {
    for rec in theta::check_theta_identities(12).unwrap() {
        assert_pass(&rec);
        assert!(rec.window.unwrap().reaches(12), "{rec:?}");
    }
}

#[test]
fn restrictions() {
    for k in 1..=4 {
        let rec = theta::check_rest1(k, 6).unwrap();
        assert_pass(&rec);
    }
    for (n, k, m) in [(1, 2, 6), (2, 2, 6), (1, 3, 4), (2, 3, 4), (1, 1, 6)] {
        assert_pass(&theta::check_rest2(n, k, m).unwrap());
    }
}

#[test]
fn fkk_is_symmetric_and_homogeneous() {
    for (k, m) in [(2, 6), (3, 4)] {
        let f = theta::fnk_series(FnkSpec::new(k, k, m).unwrap()).unwrap();
        let deg = (k * (k + 1) / 2) as i64;
        assert!(f.terms().all(|(e, _)| e.degree() == deg));
        let mut perm: Vec<usize> = (0..k).collect();
        perm.rotate_left(1);
        assert_eq!(f.permute(&perm), f);
        perm = (0..k).collect();
        perm.swap(0, 1);
        assert_eq!(f.permute(&perm), f);
    }
}

#[test]
fn back_multiplication() {
    let (n, k, m) = (2, 2, 6);
    let f = theta::fnk_series(FnkSpec::new(n, k, m).unwrap()).unwrap();
    let g = theta::theta_g(&theta::ThetaArg::from_slice(&[-1, -1]).unwrap(), m);
    let num = theta::req_numerator(1, k, m).unwrap();
    assert_eq!(f.mul_trunc(&g, m).unwrap(), num.truncate(m));
}

#[test]
fn q_zero_limits() {
    // f_{k,k} at q^0 is sum over S_k of z_{s(1)} z_{s(2)}^2 ... z_{s(k)}^k.
    for k in 1..=3usize {
        let f = theta::fnk_series(FnkSpec::new(k, k, 1).unwrap()).unwrap();
        let stair = LaurentPoly::monomial(
            ExpVec((1..=k as i64).collect()),
            flatdeform::ring::QSeries::one(),
        );
        assert_eq!(f, stair.symmetrize(false).truncate(1), "k={k}");
    }
}
