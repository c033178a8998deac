use std::f64::consts::PI;

use magnus::free_algebra::{q, qi, NCPolynomial, Q};
use magnus::gl2::{Mat2, I_TILDE, J_TILDE};
use magnus::magnus_core::resolvent_poly;
use magnus::timeordered::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn x(i: u8, cap: usize) -> NCPolynomial {
    NCPolynomial::var(i).with_cap(Some(cap))
}

fn random_mat_measure(rng: &mut StdRng, steps: usize, tv: f64) -> StepMeasure<Mat2> {
    let raw: Vec<(Mat2, f64)> = (0..steps)
        .map(|_| (Mat2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), rng.gen_range(0.2..1.0)))
        .collect();
    let s: f64 = raw.iter().map(|(m, d)| m.norm2() * d).sum();
    StepMeasure::new(raw.into_iter().map(|(m, d)| (m.scale(tv / s), d)).collect()).unwrap()
}

fn mat_strategy() -> impl Strategy<Value = StepMeasure<Mat2>> {
    prop::collection::vec(((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 0.05f64..0.5), 1..4)
        .prop_map(|v| StepMeasure::new(v.into_iter().map(|((a, b, c, d), t)| (Mat2::new(a, b, c, d), t)).collect()).unwrap())
}

fn poly_strategy(cap: usize) -> impl Strategy<Value = StepMeasure<NCPolynomial>> {
    prop::collection::vec((1u8..=3, -3i64..=3, 1i64..=3), 1..4).prop_map(move |v| {
        StepMeasure::new(v.into_iter().map(|(l, n, d)| (x(l, cap).scale(&q(n.max(1), 1)), q(d, 2))).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn concatenation_mat(a in mat_strategy(), b in mat_strategy()) {
        let lhs = rexp(&a.concat(&b)).unwrap();
        let rhs = rexp(&a).unwrap() * rexp(&b).unwrap();
        prop_assert!(lhs.dist(&rhs) < 1e-12);
        let inv = rexp(&a.inverse_path()).unwrap();
        prop_assert!((inv * rexp(&a).unwrap()).dist(&Mat2::identity()) < 1e-12);
        prop_assert!(lexp(&a).unwrap().dist(&rexp(&a.reversed()).unwrap()) < 1e-15);
    }

    #[test]
    fn concatenation_exact(a in poly_strategy(4), b in poly_strategy(4)) {
        prop_assert_eq!(rexp(&a.concat(&b)).unwrap(), rexp(&a).unwrap().mul(&rexp(&b).unwrap()));
    }

    #[test]
    fn splitting_changes_nothing_exact(a in poly_strategy(4), i in 0usize..3) {
        let i = i % a.len();
        let s = a.split_step(i);
        prop_assert_eq!(rexp(&s).unwrap(), rexp(&a).unwrap());
        for k in 1..=4 {
            prop_assert_eq!(magnus_term(&s, k).unwrap(), magnus_term(&a, k).unwrap());
            prop_assert_eq!(resolvent_term_direct(&s, &q(1, 3), k).unwrap(), resolvent_term_direct(&a, &q(1, 3), k).unwrap());
        }
    }

    #[test]
    fn splitting_changes_nothing_mat(a in mat_strategy(), i in 0usize..3) {
        let i = i % a.len();
        let s = a.split_step(i);
        for k in 1..=6 {
            let (u, v) = (magnus_term(&s, k).unwrap(), magnus_term(&a, k).unwrap());
            prop_assert!(u.dist(&v) < 1e-12, "k = {}", k);
        }
    }
}

#[test]
fn runs_agree_with_direct() {
    let mut rng = StdRng::seed_from_u64(7);
    let phi = random_mat_measure(&mut rng, 4, 1.5);
    let runs = magnus_terms_runs(&phi, 6).unwrap();
    let res = resolvent_terms(&phi, &0.3, 6).unwrap();
    for k in 1..=6 {
        assert!(runs[k - 1].dist(&magnus_term(&phi, k).unwrap()) < 1e-14);
        assert!(res[k - 1].dist(&resolvent_term_direct(&phi, &0.3, k).unwrap()) < 1e-14);
    }
    let p = StepMeasure::new(vec![(x(1, 4), qi(1)), (x(2, 4), q(1, 2)), (x(1, 4), qi(2))]).unwrap();
    let runs = magnus_terms_runs(&p, 4).unwrap();
    for k in 1..=4 {
        assert_eq!(runs[k - 1], magnus_term(&p, k).unwrap());
    }
}

#[test]
fn reconstruction_and_adjoint() {
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..20 {
        let phi = random_mat_measure(&mut rng, 3, 0.5);
        let ps = magnus_partial_sum(&phi, 8).unwrap();
        assert!(ps.sum.exp().dist(&rexp(&phi).unwrap()) < 1e-6);
        let y = Mat2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        assert!(adjoint_check(&phi, 8, &y).unwrap() < 1e-6);
    }
}

#[test]
fn truncated_partial_sum_is_log() {
    let phi = StepMeasure::new(vec![(x(1, 5), qi(1)), (x(2, 5), q(1, 2)), (x(1, 5).scale(&qi(-1)), q(1, 3))]).unwrap();
    let ps = magnus_partial_sum(&phi, 5).unwrap();
    assert_eq!(ps.sum, rexp(&phi).unwrap().truncated_log(5).unwrap());
}

#[test]
fn resolvent_two_steps() {
    let phi = StepMeasure::new(vec![(x(1, 3), qi(1)), (x(2, 3), qi(1))]).unwrap();
    let lam = q(1, 3);
    let r2 = resolvent_term_direct(&phi, &lam, 2).unwrap();
    // (1,1) gives λX1X2 − (1−λ)X2X1; (2,0) and (0,2) give (λ − 1/2) on the squares
    let want = NCPolynomial::parse("1/3 X1X2 - 2/3 X2X1 - 1/6 X1X1 - 1/6 X2X2").unwrap();
    assert_eq!(r2.with_cap(None), want);
    assert_eq!(resolvent_poly(2).unwrap().eval(&lam).coeff_of(&[1, 2]), lam);
}

#[test]
fn resolvent_integrates_to_magnus() {
    // five-point Gauss–Legendre on [0, 1], exact through degree 9
    let nodes = [
        (0.0, 128.0 / 225.0),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let mut rng = StdRng::seed_from_u64(9);
    let phi = random_mat_measure(&mut rng, 3, 1.0);
    for k in 1..=6 {
        let mut acc = Mat2::zero();
        for (t, w) in nodes {
            acc = acc + resolvent_term(&phi, &(0.5 * (t + 1.0)), k).unwrap().scale(0.5 * w);
        }
        assert!(acc.dist(&magnus_term(&phi, k).unwrap()) < 1e-8, "k = {k}");
    }
}

#[test]
fn resolvent_identity() {
    let mut rng = StdRng::seed_from_u64(10);
    for _ in 0..5 {
        let phi = random_mat_measure(&mut rng, 3, 1.0);
        assert!(resolvent_identity_check(&phi, &0.5, 20).unwrap() < 1e-8);
    }
    let p = StepMeasure::new(vec![(x(1, 4), qi(1)), (x(2, 4), qi(1))]).unwrap();
    let a = rexp(&p).unwrap();
    let lam = q(1, 4);
    let sum = (1..=4).fold(NCPolynomial::zero().with_cap(Some(4)), |s, k| &s + &resolvent_term_direct(&p, &lam, k).unwrap());
    let factor = &NCPolynomial::constant(lam.clone()).with_cap(Some(4)) + &a.scale(&(qi(1) - &lam));
    assert_eq!(factor.mul(&sum), &a - &NCPolynomial::one());
}

#[test]
fn contraction_identity() {
    let n = 5;
    let empty: StepMeasure<NCPolynomial> = StepMeasure { steps: vec![] };
    let one = |i: u8, d: Q| StepMeasure::new(vec![(x(i, n), d)]).unwrap();
    assert!(contraction_identity_check(&one(1, qi(1)), &empty, &one(2, qi(1)), 4).unwrap().is_zero());
    let single = StepMeasure::new(vec![(x(1, 4), q(1, 2)), (x(1, 4), qi(1))]).unwrap();
    assert!(contraction_identity_check(&single, &single, &single, 4).unwrap().is_zero());
    assert!(contraction_identity_check(&one(1, qi(1)), &one(2, qi(1)), &one(3, qi(1)), 5).unwrap().is_zero());
    let two = StepMeasure::new(vec![(x(1, n), qi(1)), (x(2, n), q(1, 2))]).unwrap();
    assert!(contraction_identity_check(&two, &two.reversed(), &one(3, qi(2)), 5).unwrap().is_zero());
    assert!(contraction_identity_check(&two, &two, &two, 6).is_err());
}

#[test]
fn critical_second_term_converges() {
    let e64 = (magnus_term_left(&critical_measure(64).unwrap(), 2).unwrap().norm2() - PI / 2.0).abs();
    let e128 = (magnus_term_left(&critical_measure(128).unwrap(), 2).unwrap().norm2() - PI / 2.0).abs();
    assert!(e64 < 0.05);
    assert!(e128 < e64);
}

#[test]
fn skew_loxodromic_divergence() {
    let phi = StepMeasure::new(vec![(J_TILDE, 0.3), (I_TILDE, PI)]).unwrap();
    let norms: Vec<f64> = (1..=12).map(|k| magnus_term(&phi, k).unwrap().norm2()).collect();
    for k in [5, 6, 7, 8, 9, 10] {
        assert!(norms[k + 1] > norms[k - 1], "k = {k}: {norms:?}");
    }
}

#[test]
fn parsing_and_errors() {
    let m = parse_mat2_measure("# comment\n1,0,0,1;0.5\n0,1,-1,0;2\n").unwrap();
    assert_eq!(m.len(), 2);
    assert!((m.total_variation() - 2.5).abs() < 1e-15);
    assert!(parse_mat2_measure("1,0,0,1;-1").is_err());
    assert!(parse_mat2_measure("1,0,0,1").is_err());
    let p = parse_poly_measure("X1 + 1/2 X2;1/3\nX2;1\n", 4).unwrap();
    assert_eq!(p.len(), 2);
    assert!(parse_poly_measure("1 + X1;1", 4).is_err());
    assert!(magnus_term(&m, 40).is_err());
    assert!(rexp(&StepMeasure::<Mat2> { steps: vec![] }).is_err());
    assert_eq!(weak_compositions(4, 3).len(), 15);
}
