use flatdeform::algebra::{builtin_family, CutoffAlgebra, IdealFamily};
use flatdeform::feq::*;
use flatdeform::funcreal::Kind;
use flatdeform::linalg;
use flatdeform::ring::{rat, ratio, QSeries, Rational};
use flatdeform::theta::{f1_series, fnk_series, FnkSpec};
use proptest::prelude::*;

fn fam(name: &str, params: &[(&str, &str)]) -> IdealFamily {
    let p: Vec<(String, String)> = params.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    builtin_family(name, &p).unwrap()
}

#[test]
fn fah1_for_f33() {
    let f = fnk_series(FnkSpec::new(3, 3, 4).unwrap()).unwrap();
    let rec = check_fah1(3, &f, &RelationVector::theta(0, 6, 4), 4).unwrap();
    assert!(!rec.status.is_fail(), "{rec:?}");
}

#[test]
fn formal_solve_for_f1_series() {
    let spec = FamilySpec::quadratic(Kind::Bosonic, vec![1], vec![f1_series(8)], 3).unwrap();
    let space = solve_relation_space(&spec, 6, &ratio(1, 3), 8).unwrap();
    assert_eq!(space.dimension, 1);
    let SolveMode::FormalQ { precision } = space.mode else { panic!("expected formal solve") };
    assert!(precision >= 8);
    // Normalized at beta = 0 the kernel is the theta vector modulo q^8.
    let v = &space.basis[0];
    let lead = v.get(0, 0).inverse(8).unwrap();
    let theta = RelationVector::theta(3, 6, 8);
    for j in -6..=6 {
        let got = v.get(0, j).mul(&lead).truncate(8);
        assert!(got.sub(&theta.get(0, j)).is_zero(), "beta={j}: {got}");
    }
}

#[test]
fn fermionic_relations_exist() {
    let spec = FamilySpec::from_family(&fam("fermi-fkk", &[("k", "2")]), 3, 40).unwrap();
    let space = solve_relation_space(&spec, 6, &ratio(1, 3), 8).unwrap();
    assert!(space.dimension >= 1);
    let exact = FamilySpec::from_family(&fam("fermi-theta", &[]), 3, 40).unwrap();
    let space = solve_relation_space(&exact, 6, &ratio(1, 3), 8).unwrap();
    assert_eq!(space.dimension, 1);
}

#[test]
fn conj51_relations_match_d_s() {
    for s in 1..=3 {
        let spec = FamilySpec::from_family(&fam("conj51", &[("t", "2/3"), ("qt", "1"), ("qorder", "4")]), s, 12).unwrap();
        let space = solve_relation_space(&spec, 3, &ratio(1, 5), 4).unwrap();
        assert_eq!(space.dimension, ds_monomial(&[0, 1], s, 3).unwrap(), "s={s}");
    }
}

#[test]
fn dimension_is_stable_under_window_growth() {
    let spec = FamilySpec::from_family(&fam("theta-k1", &[]), 3, 80).unwrap();
    for w in [4, 6] {
        let a = solve_relation_space(&spec, w, &ratio(1, 3), 8).unwrap().dimension;
        let b = solve_relation_space(&spec, w + 2, &ratio(1, 3), 8).unwrap().dimension;
        assert_eq!(a, b);
    }
    for s in 1..=3 {
        assert_eq!(ds_monomial(&[0, 1], s, 4).unwrap(), ds_monomial(&[0, 1], s, 6).unwrap());
    }
}

#[test]
fn kernel_vectors_vanish_in_the_algebra() {
    let q = ratio(1, 3);
    for (name, kind) in [("theta-k1", Kind::Bosonic), ("fermi-theta", Kind::Fermionic)] {
        let f = fam(name, &[]);
        let spec = FamilySpec::from_family(&f, 3, 60).unwrap();
        let space = solve_relation_space(&spec, 8, &q, 8).unwrap();
        let alg = CutoffAlgebra::new(kind, 6).unwrap();
        for v in &space.basis {
            for i in -1..=1 {
                let side = algebra_side(&alg, &f, &spec, v, i, &q, 8).unwrap();
                assert!(side.is_empty(), "{name} i={i}: {side:?}");
            }
        }
    }
    let f = fam("monomial-pairs", &[]);
    for s in 1..=3 {
        let spec = FamilySpec::from_family(&f, s, 4).unwrap();
        let space = solve_relation_space(&spec, 4, &rat(0), 1).unwrap();
        let alg = CutoffAlgebra::new(Kind::Bosonic, 6).unwrap();
        for i in -1..=1 {
            assert!(algebra_side(&alg, &f, &spec, &space.basis[0], i, &rat(0), 1).unwrap().is_empty());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // The residual vanishes exactly on combinations of kernel vectors.
    #[test]
    fn residual_zero_iff_in_kernel(coeffs in prop::collection::vec(-3i64..4, 9), use_kernel in any::<bool>()) {
        let spec = FamilySpec::quadratic(
            Kind::Bosonic,
            vec![0, 1],
            vec![
                flatdeform::ring::poly(2, &[(2, &[0, 0])]),
                flatdeform::ring::poly(2, &[(1, &[1, 0]), (1, &[0, 1])]),
            ],
            2,
        ).unwrap();
        let space = solve_relation_space(&spec, 2, &rat(0), 1).unwrap();
        let v = if use_kernel {
            let c = Rational::from_integer(coeffs[0].into());
            RelationVector::from_entries(2, space.basis[0].entries.iter().map(|(k, x)| (*k, x.scale(&c))))
        } else {
            let keys: Vec<(usize, i64)> = (0..2).flat_map(|a| (-2..=2).map(move |j| (a, j))).collect();
            RelationVector::from_entries(2, keys.into_iter().zip(&coeffs).map(|(k, &c)| (k, QSeries::constant(rat(c)))))
        };
        let zero = residual(&spec, &v, 4).unwrap().is_zero();
        // Membership: v is a multiple of the (one-dimensional) kernel.
        let flat: Vec<Rational> = (0..2).flat_map(|a| (-2..=2).map(move |j| (a, j))).map(|(a, j)| v.get(a, j).coeff(0)).collect();
        let basis: Vec<Rational> = (0..2).flat_map(|a| (-2..=2).map(move |j| (a, j))).map(|(a, j)| space.basis[0].get(a, j).coeff(0)).collect();
        let member = flat.iter().all(|x| x.is_integer() && *x == rat(0)) || linalg::proportional(&flat, &basis);
        prop_assert_eq!(zero, member);
    }
}
