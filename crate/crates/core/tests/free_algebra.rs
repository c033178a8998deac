use magnus::free_algebra::{parse_word, q, LieExpression, LieTree, NCPolynomial, Q, Word};
use proptest::prelude::*;

fn poly_strategy(letters: u8, max_len: usize) -> impl Strategy<Value = NCPolynomial> {
    prop::collection::vec(
        (prop::collection::vec(1..=letters, 0..=max_len), -6i64..=6, 1i64..=4),
        0..6,
    )
    .prop_map(|terms| NCPolynomial::from_terms(terms.into_iter().map(|(w, n, d)| (Word(w), q(n, d)))))
}

fn nilpotent(letters: u8, max_len: usize) -> impl Strategy<Value = NCPolynomial> {
    prop::collection::vec((prop::collection::vec(1..=letters, 1..=max_len), -6i64..=6, 1i64..=4), 1..5)
        .prop_map(|terms| NCPolynomial::from_terms(terms.into_iter().map(|(w, n, d)| (Word(w), q(n, d)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly_strategy(3, 3), b in poly_strategy(3, 3), c in poly_strategy(3, 3)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn jacobi(a in poly_strategy(3, 2), b in poly_strategy(3, 2), c in poly_strategy(3, 2)) {
        let j = &(&a.commutator(&b.commutator(&c)) + &b.commutator(&c.commutator(&a))) + &c.commutator(&a.commutator(&b));
        prop_assert!(j.is_zero());
        prop_assert_eq!(a.commutator(&b), -&b.commutator(&a));
    }

    #[test]
    fn exp_log_inverse(p in nilpotent(2, 3)) {
        let n = 5;
        let e = p.truncated_exp(n).unwrap();
        prop_assert_eq!(e.truncated_log(n).unwrap(), p.clone().with_cap(Some(n)));
    }

    #[test]
    fn text_and_json_roundtrip(p in poly_strategy(4, 4)) {
        let back = NCPolynomial::parse(&p.to_string()).unwrap();
        prop_assert_eq!(&back, &p);
        let j = NCPolynomial::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(&j, &p);
    }

    #[test]
    fn dsw_scales_lie_elements(k in 2usize..=5) {
        let mu = magnus::magnus_core::magnus_commutator_direct(k).unwrap();
        prop_assert_eq!(mu.dsw_map().unwrap(), mu.scale(&q(k as i64, 1)));
    }
}

#[test]
fn parser_grammar() {
    let p = NCPolynomial::parse("[X, Y] - 1/2*X^2 + 3 X1X2").unwrap();
    assert_eq!(p.coeff_of(&[1, 2]), q(4, 1));
    assert_eq!(p.coeff_of(&[2, 1]), q(-1, 1));
    assert_eq!(p.coeff_of(&[1, 1]), q(-1, 2));
    assert!(NCPolynomial::parse("X1 +").is_err());
    assert!(NCPolynomial::parse("1/0 X1").is_err());
    assert_eq!(parse_word("XYX").unwrap(), Word(vec![1, 2, 1]));
}

#[test]
fn word_statistics() {
    let w = Word(vec![3, 1, 2, 4]);
    assert_eq!(w.des(), 1);
    assert_eq!(w.asc(), 2);
    assert!(w.is_multilinear());
    assert!(!Word(vec![1, 1]).is_multilinear());
}

#[test]
fn lie_trees_expand() {
    let t = LieTree::parse("[[1,2],3]").unwrap();
    assert_eq!(t.expand(), NCPolynomial::parse("X1X2X3 - X2X1X3 - X3X1X2 + X3X2X1").unwrap());
    let e = LieExpression::parse_lines("[1,2]:1/2\n[2,1]:1/2\n").unwrap();
    assert!(e.expand().is_zero());
    assert_eq!(e.l1_cost(), Q::from_integer(1.into()));
    assert!(LieTree::parse("[1,2").is_err());
}

#[test]
fn truncation_is_respected() {
    let x = NCPolynomial::var(1).with_cap(Some(2));
    assert!(x.pow(3).is_zero());
    assert!(NCPolynomial::one().truncated_exp(3).is_err());
    assert!(NCPolynomial::var(1).truncated_log(3).is_err());
}
