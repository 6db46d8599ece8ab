use flatdeform::algebra::{builtin_family, enumerate_monomials, graded_dim, CutoffAlgebra, GradedKey};
use flatdeform::funcreal::Kind;
use flatdeform::rewrite::{
    confluence_test, count_reduced, exhaustive_check, normal_form, phi, random_monomial, Strategy, XYMonomial,
};
use flatdeform::ring::rat;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn exhaustive_small_weights() {
    for k in 1..=2 {
        let rec = exhaustive_check(k, 4, 4).unwrap();
        assert!(!rec.status.is_fail(), "{rec:?}");
    }
}

#[test]
fn sampled_confluence() {
    for k in 1..=3 {
        let rec = confluence_test(k, 500, 11, 8, 10).unwrap();
        assert!(!rec.status.is_fail(), "{rec:?}");
    }
}

#[test]
fn reduced_count_with_ybar_is_ideal_rank() {
    let n = 4;
    for k in 1..=2usize {
        let params = vec![("w".to_string(), (k + 1).to_string())];
        let fam = builtin_family("monomial-run", &params).unwrap();
        let alg = CutoffAlgebra::new(Kind::Bosonic, n).unwrap();
        for l in 1..=4usize {
            for deg in -(n * l as i64)..=(n * l as i64) {
                let key = GradedKey::new(deg, l);
                let d = graded_dim(&alg, &fam, key, &rat(0), 4).unwrap();
                assert_eq!(count_reduced(k, n, key, true), d.rank, "k={k} key={key:?}");
                assert_eq!(count_reduced(k, n, key, false), d.ambient, "k={k} key={key:?}");
                assert_eq!(enumerate_monomials(&alg, key).len(), d.ambient);
            }
        }
    }
}

#[test]
fn zero_samples_is_an_error() {
    assert!(confluence_test(1, 0, 0, 4, 4).is_err());
}

proptest! {
    #[test]
    fn normal_forms_agree_and_preserve_phi(seed in any::<u64>(), k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_monomial(&mut rng, k, 7, 6);
        let forms: Vec<XYMonomial> = Strategy::all(seed).iter().map(|&s| normal_form(&m, s).unwrap()).collect();
        for f in &forms {
            prop_assert_eq!(f, &forms[0]);
            prop_assert_eq!(phi(f), phi(&m));
            prop_assert!(f.is_reduced());
            prop_assert_eq!(f.grade(), m.grade());
        }
    }
}
