use magnus::free_algebra::{q, qi, NCPolynomial, Word};
use magnus::magnus_core::*;
use magnus::Error;
use num_bigint::BigInt;

fn bch_oracle(n: usize) -> NCPolynomial {
    let e = NCPolynomial::var(1).truncated_exp(n).unwrap().mul(&NCPolynomial::var(2).truncated_exp(n).unwrap());
    e.truncated_log(n).unwrap().with_cap(None)
}

fn words(n: usize) -> Vec<Word> {
    (0..1usize << n)
        .map(|bits| Word((0..n).map(|i| if bits >> i & 1 == 1 { 2 } else { 1 }).collect()))
        .collect()
}

#[test]
fn direct_and_recursive_mu_agree() {
    for k in 1..=7 {
        assert!(recursive_matches_direct(k).unwrap(), "k = {k}");
    }
}

#[test]
fn mu_matches_solomon_projection() {
    for k in 1..=5 {
        assert_eq!(solomon_part(k).unwrap(), magnus_commutator_direct(k).unwrap(), "k = {k}");
    }
}

#[test]
fn bch_matches_truncated_log() {
    let oracle = bch_oracle(7);
    for n in 1..=7 {
        assert_eq!(bch_term(n).unwrap(), oracle.homogeneous_part(n), "n = {n}");
    }
}

#[test]
fn goldberg_matches_oracle() {
    let oracle = bch_oracle(7);
    for n in 1..=7 {
        for w in words(n) {
            assert_eq!(goldberg_coefficient(&w).unwrap(), oracle.coeff(&w), "{w}");
        }
    }
    assert!(goldberg_coefficient(&Word(vec![])).is_err());
    assert!(goldberg_coefficient(&Word(vec![1, 3])).is_err());
}

#[test]
fn ppod_identity() {
    for k in 1..=5 {
        assert!(ppod_check(k).unwrap(), "k = {k}");
    }
}

#[test]
fn theta_series_exact() {
    let want = [q(1, 1), q(1, 2), q(2, 9), q(7, 72), q(13, 300)];
    let s = theta_series(5);
    for (i, w) in want.iter().enumerate() {
        assert_eq!(&s.coeff(i + 1), w);
    }
}

#[test]
fn theta_is_l1_of_mu() {
    for k in 1..=6 {
        let l1 = magnus_commutator_direct(k).unwrap().l1_norm();
        assert_eq!(theta_coefficient(k) * factorial_q(k), l1, "k = {k}");
    }
}

#[test]
fn eulerian_brute_force() {
    for n in 1..=7 {
        for m in 0..n {
            assert_eq!(eulerian(n, m), BigInt::from(brute_force_descents(n, m)));
        }
    }
}

#[test]
fn bernoulli_and_beta() {
    assert_eq!(bernoulli(6), q(1, 42));
    assert_eq!(bernoulli(12), q(-691, 2730));
    for j in 1..10 {
        assert!(bernoulli_sign_ok(j));
    }
}

#[test]
fn resolvent_integrates_to_mu() {
    for k in 1..=6 {
        assert_eq!(resolvent_poly(k).unwrap().integrate(), magnus_commutator_direct(k).unwrap(), "k = {k}");
    }
    let r2 = resolvent_poly(2).unwrap();
    assert_eq!(r2.eval(&q(1, 2)), NCPolynomial::parse("1/2 X1X2 - 1/2 X2X1").unwrap());
    assert_eq!(r2.eval(&qi(1)), NCPolynomial::parse("X1X2").unwrap());
}

#[test]
fn schur_identities() {
    for n in 2..=5 {
        let (a, b) = gen_schur_sides(n);
        assert_eq!(a, b, "first form n = {n}");
        let (a, b) = gen_schur_sides_last(n);
        assert_eq!(a, b, "second form n = {n}");
    }
}

#[test]
fn caps_are_enforced() {
    assert!(matches!(magnus_commutator_direct(10), Err(Error::Resource(_))));
    assert!(magnus_commutator_direct_capped(10, 9).is_err());
    assert!(matches!(bch_term_capped(12, 9), Err(Error::Resource(_))));
}
