use magnus::free_algebra::{q, LieExpression};
use magnus::lie_min::{self, reference, LpRoute};
use magnus::magnus_core::factorial_q;

#[test]
fn minima_and_certificates() {
    let want = [(2, q(1, 4)), (3, q(1, 18)), (4, q(1, 72)), (5, q(1, 300))];
    for (k, w) in want {
        let p = lie_min::theta_lie(k).unwrap();
        assert_eq!(p.theta_lie(), w, "k = {k}");
        assert!(lie_min::verify_dual(&p).unwrap(), "k = {k}");
        assert!(lie_min::verify_presentation(&p.presentation, k).unwrap().valid);
    }
}

#[test]
fn degree_six_certified() {
    let p = lie_min::theta_lie(6).unwrap();
    assert_eq!(p.theta_lie(), q(37, 43200));
    assert!(lie_min::verify_dual(&p).unwrap());
}

#[test]
fn float_route_agrees_with_exact() {
    for k in 3..=5 {
        let a = lie_min::theta_lie_with(k, LpRoute::Exact).unwrap();
        let b = lie_min::theta_lie_with(k, LpRoute::FloatThenCertify).unwrap();
        assert_eq!(a.objective, b.objective, "k = {k}");
    }
}

#[test]
fn reference_presentations() {
    for (text, k, theta) in [(reference::K3, 3, q(1, 18)), (reference::K5, 5, q(1, 300)), (reference::K6, 6, q(37, 43200))] {
        let e = LieExpression::parse_lines(text).unwrap();
        let r = lie_min::verify_presentation(&e, k).unwrap();
        assert!(r.valid, "k = {k}");
        assert_eq!(r.cost / factorial_q(k), theta, "k = {k}");
    }
    for i in 0..5 {
        let r = lie_min::verify_presentation(&reference::k4_vertex(i), 4).unwrap();
        assert!(r.valid, "vertex {i}");
        assert_eq!(r.cost, q(1, 3));
    }
}

#[test]
fn k4_family_is_affine() {
    let l = [q(1, 5), q(1, 5), q(1, 5), q(1, 5), q(1, 5)];
    let r = lie_min::verify_presentation(&reference::k4_family(l), 4).unwrap();
    assert!(r.valid);
    assert_eq!(r.cost, q(1, 3));
    // weights summing to 1 stay valid but leave the optimal face
    let far = [q(2, 1), q(-1, 1), q(0, 1), q(0, 1), q(0, 1)];
    let r = lie_min::verify_presentation(&reference::k4_family(far), 4).unwrap();
    assert!(r.valid);
    assert_eq!(r.cost, q(2, 3));
    let scaled = [q(2, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1)];
    assert!(!lie_min::verify_presentation(&reference::k4_family(scaled), 4).unwrap().valid);
}

#[test]
fn invalid_presentations_are_rejected() {
    let e = LieExpression::parse_lines("[[1,2],3]:1/6\n").unwrap();
    assert!(!lie_min::verify_presentation(&e, 3).unwrap().valid);
    let e = LieExpression::parse_lines("[1,2]:1/2\n").unwrap();
    assert!(lie_min::verify_presentation(&e, 3).is_err());
    assert!(lie_min::theta_lie(7).is_err());
}

#[test]
fn projection_is_idempotent_on_mu() {
    for k in 2..=5 {
        let mu = magnus::magnus_core::magnus_commutator_direct(k).unwrap();
        assert_eq!(lie_min::first_canonical_projection(&mu, k).unwrap(), mu);
    }
}
