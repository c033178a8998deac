use std::f64::consts::{E, FRAC_PI_2, PI};

use magnus::gl2::*;
use magnus::timeordered::{lexp, StepMeasure};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    a.dist(b) <= tol * (1.0 + b.max_abs())
}

fn log_able(m: &Mat2) -> bool {
    let det = m.det();
    det > 0.0 && m.trace() / (2.0 * det.sqrt()) > -1.0 + 1e-6
}

/// Random disk avoiding (−∞, 0], center in the closed upper half plane.
fn upper_disk(rng: &mut StdRng) -> Disk {
    let arg = rng.gen_range(0.0..0.95 * PI);
    let modulus = rng.gen_range(0.2..3.0);
    let (a, b) = (modulus * arg.cos(), modulus * arg.sin());
    let room = if a >= 0.0 { modulus } else { b };
    Disk::new(a, b, rng.gen_range(0.0..0.98) * room)
}

/// Log-able matrix with its chiral disk in the upper half plane.
fn sample_log_able(rng: &mut StdRng) -> Mat2 {
    Mat2::from_disk(&upper_disk(rng), rng.gen_range(0.0..2.0 * PI))
}

#[test]
fn exp_log_roundtrip_raw_samples() {
    let mut rng = StdRng::seed_from_u64(1);
    let mut n = 0;
    while n < 1000 {
        let m = Mat2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if !log_able(&m) {
            continue;
        }
        let l = log2x2(&m).unwrap();
        assert!(close(&l.exp(), &m, 1e-10), "{m:?}");
        n += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn log_inverts_exp_in_strip(alpha in -2.0f64..2.0, beta in -3.0f64..3.0, gamma in -2.0f64..2.0, delta in -2.0f64..2.0) {
        let x = Mat2::from_parts(alpha, beta, gamma, delta);
        let disc = beta * beta - gamma * gamma - delta * delta;
        prop_assume!(disc < (PI - 0.05).powi(2));
        let a = x.exp();
        prop_assert!(close(&a, &log2x2(&a).unwrap().exp(), 1e-10));
        prop_assert!(close(&log2x2(&a).unwrap(), &x, 1e-8));
    }
}

#[test]
fn norm_against_singular_values() {
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..200 {
        let m = Mat2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let ata = m.transpose() * m;
        let (t, d) = (ata.trace(), ata.det());
        let smax = (0.5 * (t + (t * t - 4.0 * d).max(0.0).sqrt())).sqrt();
        let smin = (0.5 * (t - (t * t - 4.0 * d).max(0.0).sqrt())).max(0.0).sqrt();
        assert!((norm2(&m) - smax).abs() <= 1e-12 * smax.max(1.0));
        assert!((conorm_signed(&m).abs() - smin).abs() <= 1e-6 * smax.max(1.0));
        assert_eq!(conorm_signed(&m) >= 0.0, m.det() >= 0.0);
        let disk = chiral_disk(&m);
        let want = disk.center_re.powi(2) + disk.center_im.powi(2) - disk.radius.powi(2);
        assert!((m.det() - want).abs() < 1e-10);
    }
    assert_eq!(norm2(&Mat2::identity()), 1.0);
    assert_eq!(conorm_signed(&Mat2::identity()), 1.0);
    assert_eq!(norm2(&J_TILDE), 1.0);
    assert_eq!(conorm_signed(&J_TILDE), -1.0);
}

#[test]
fn disks() {
    let a = 0.7f64;
    let d = chiral_disk(&Mat2::rotation(a));
    assert!((d.center_re - a.cos()).abs() < 1e-15 && (d.center_im - a.sin()).abs() < 1e-15 && d.radius == 0.0);
    let k = chiral_disk(&K_TILDE);
    assert_eq!((k.center_re, k.center_im, k.radius), (0.0, 0.0, 1.0));
    let p = principal_disk(&Mat2::rotation(-a));
    assert!(p.center_im > 0.0);
}

#[test]
fn ac_family() {
    assert_eq!(ac(1.0).unwrap(), 1.0);
    assert!((ac(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert!(ac(-1.0).is_err());
    let h = 1e-6;
    for i in 0..40 {
        let x = -0.95 + 0.1 * i as f64;
        if (x - 1.0).abs() < 0.02 {
            continue;
        }
        let fd = (ac(x + h).unwrap() - ac(x - h).unwrap()) / (2.0 * h);
        let rhs = (x * ac(x).unwrap() - 1.0) / (1.0 - x * x);
        assert!((fd - rhs).abs() < 1e-6, "x = {x}");
    }
    for x in [-0.5, 0.3, 0.99999, 1.00001, 2.5] {
        let c = ac(x).unwrap();
        let s = as_fn(x).unwrap();
        assert!((s - ((c * c - 1.0) / (1.0 - x * x)).sqrt()).abs() < 1e-6, "x = {x}");
        assert!((at_fn(x).unwrap() - (c - 1.0) / s).abs() < 1e-9, "x = {x}");
    }
    for x in [1.0 - 5e-5, 1.0 + 5e-5] {
        let lo = ac(x - 1e-4).unwrap();
        let hi = ac(x + 1e-4).unwrap();
        assert!((ac(x).unwrap() - 0.5 * (lo + hi)).abs() < 1e-8);
    }
    assert!((ac_shifted(1e-3).unwrap() - ac(-1.0 + 1e-3).unwrap()).abs() < 1e-9);
}

#[test]
fn log_examples() {
    let a = 2.0;
    assert!(close(&log2x2(&Mat2::rotation(a)).unwrap(), &I_TILDE.scale(a), 1e-14));
    assert!(close(&log2x2(&Mat2::new(E, 0.0, 0.0, 1.0 / E)).unwrap(), &J_TILDE, 1e-14));
    let (c, s) = (0.3f64.cosh(), 0.3f64.sinh());
    assert!(log2x2(&Mat2::new(-c, -s, -s, -c)).is_err());
    assert!(log2x2(&Mat2::new(1.0, 0.0, 0.0, -1.0)).is_err());
}

#[test]
fn log_norms_match_composition() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..200 {
        let m = sample_log_able(&mut rng);
        let l = log2x2(&m).unwrap();
        let d = chiral_disk(&m);
        let (n, c) = log_norms_from_disk(d.center_re, d.center_im, d.radius).unwrap();
        assert!((n - norm2(&l)).abs() < 1e-9);
        assert!((c - conorm_signed(&l)).abs() < 1e-9);
    }
    assert_eq!(log_norms_from_disk(1.0, 0.0, 0.0).unwrap(), (0.0, 0.0));
    let (a, b, r) = (1.2f64, 0.5f64, (1.2f64 * 1.2 + 0.25 - 1.0).sqrt());
    let (n, c) = log_norms_from_disk(a, b, r).unwrap();
    let k = ac(a).unwrap();
    assert!((n - (k * b + k * r)).abs() < 1e-12 && (c - (k * b - k * r)).abs() < 1e-12);
    assert!(log_norms_from_disk(-1.0, 0.0, 0.5).is_err());
}

#[test]
fn w_developments() {
    let p = 0.8f64;
    assert!(close(&w_mat(p, 0.0), &Mat2::new(p.cosh(), p.sinh(), p.sinh(), p.cosh()), 1e-14));
    let (c, s) = (p.cos(), p.sin());
    let want = Mat2::new(c, 2.0 * p * c - s, s, 2.0 * p * s + c);
    assert!(close(&w_mat(p, p), &want, 1e-13));
    let (a, b, th, h) = (1.0, 0.6, 0.7, 1e-5);
    let at = |t: f64| w_mat(a * t, b * t);
    let deriv = (at(th + h) - at(th - h)).scale(0.5 / h);
    let density = Mat2::rotation(b * th) * K_TILDE.scale(a) * Mat2::rotation(-b * th);
    let inv = at(th).inverse().unwrap();
    let left = deriv * inv;
    let right = inv * deriv;
    assert!(left.dist(&density) < 1e-6 || right.dist(&density) < 1e-6);
    let phi = magnus::timeordered::discretize(|t| Mat2::rotation(b * t) * K_TILDE.scale(a) * Mat2::rotation(-b * t), 0.0, th, 4000).unwrap();
    assert!(lexp(&phi).unwrap().dist(&at(th)) < 1e-6);
}

#[test]
fn maximal_disks() {
    let p = 1.3f64;
    let d0 = maximal_disk(p, 0.0);
    assert!((d0.center_re - p.cosh()).abs() < 1e-13 && d0.center_im.abs() < 1e-13 && (d0.radius - p.sinh()).abs() < 1e-13);
    let d1 = maximal_disk(p, FRAC_PI_2);
    assert!((d1.center_re - (p.cos() + p * p.sin())).abs() < 1e-12);
    assert!((d1.center_im.abs() - (p.sin() - p * p.cos()).abs()).abs() < 1e-12);
    assert!((d1.radius - p).abs() < 1e-12);
    for i in 1..=12 {
        let p = 3.0 * i as f64 / 12.5;
        for j in 0..=20 {
            let t = -FRAC_PI_2 + PI * j as f64 / 20.0;
            assert!(maximal_disk_tangency(p, t) < 1e-8, "p = {p}, t = {t}");
            if t.cos().abs() > 1e-9 {
                let want = (p * t.cos()).sinh() / t.cos();
                assert!((maximal_disk(p, t).radius - want).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn magnus_exponent_examples() {
    let p = 2.0;
    assert!((magnus_exponent(&K_TILDE.scale(p).exp()).unwrap() - p).abs() < 1e-9);
    assert!((magnus_exponent(&Mat2::rotation(-2.5)).unwrap() - 2.5).abs() < 1e-12);
    let (z, m) = z_matrix().unwrap();
    assert!((z - 4.4934).abs() < 1e-4);
    assert!((magnus_exponent(&m).unwrap() - 4.493).abs() < 1e-3);
    assert!(magnus_exponent(&Mat2::new(1.0, 0.0, 0.0, -1.0)).is_err());
}

#[test]
fn classification() {
    for p in [0.5, 1.5, 2.8] {
        assert_eq!(classify(&w_mat(p, p)).unwrap(), Class::Parabolic, "p = {p}");
        for t in [0.2, -0.9] {
            assert_eq!(classify(&w_mat(p, p * f64::sin(t))).unwrap(), Class::Hyperbolic);
        }
        for h in [0.3, 0.8] {
            assert_eq!(classify(&e_mat(p, p * h)).unwrap(), Class::Elliptic);
        }
    }
    assert_eq!(classify(&Mat2::identity()).unwrap(), Class::Identity);
    assert_eq!(classify(&Mat2::rotation(1.0).scale(2.0)).unwrap(), Class::Quasicomplex);
    assert_eq!(classify(&Mat2::new(2.0, 0.3, 0.0, 1.0)).unwrap(), Class::Loxodromic);
    assert!(classify(&K_TILDE).is_err());
}

#[test]
fn normal_forms() {
    let (p1, t) = (0.9f64, 0.4f64);
    let a = (Mat2::identity().scale(t.cos()) + I_TILDE.scale(t.sin())).scale(p1).exp();
    let nf = normal_form(&a).unwrap();
    assert!(nf.p2.abs() < 1e-9 && !nf.f_used && (nf.p1 - p1).abs() < 1e-9);
    let p = 1.7;
    let nf = normal_form(&w_mat(p, p * t.sin())).unwrap();
    assert!(nf.p1.abs() < 1e-7 && (nf.p2 - p).abs() < 1e-7);
    assert!(normal_form(&Mat2::identity()).is_err());

    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..100 {
        let p1 = rng.gen_range(0.05..1.4);
        let p2 = rng.gen_range(0.05..1.4);
        let want = NormalForm { p1, p2, t: rng.gen_range(-1.4..1.4f64).rem_euclid(2.0 * PI), beta: rng.gen_range(0.0..2.0 * PI), f_used: true };
        let m = nw_build(&want);
        let got = normal_form(&m).unwrap();
        assert!((got.p1 - want.p1).abs() < 1e-7 && (got.p2 - want.p2).abs() < 1e-7, "{want:?} -> {got:?}");
        let dt = (got.t - want.t).rem_euclid(2.0 * PI);
        assert!(dt.min(2.0 * PI - dt) < 1e-7);
        assert!(got.f().dist(&want.f()) < 1e-7);
        assert!(close(&nw_build(&got), &m, 1e-7));
    }
}

#[test]
fn monotone_and_functorial() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..500 {
        let outer = upper_disk(&mut rng);
        let off = rng.gen_range(0.0..1.0) * outer.radius;
        let ang = rng.gen_range(0.0..2.0 * PI);
        let inner = Disk::new(outer.center_re + off * ang.cos(), (outer.center_im + off * ang.sin()).abs(), rng.gen_range(0.0..1.0) * (outer.radius - off));
        let a1 = Mat2::from_disk(&inner, rng.gen_range(0.0..2.0 * PI));
        let a2 = Mat2::from_disk(&outer, rng.gen_range(0.0..2.0 * PI));
        assert!(principal_disk(&a2).contains_disk(&principal_disk(&a1), 1e-12));
        let (l1, l2) = (log2x2(&a1).unwrap(), log2x2(&a2).unwrap());
        let tol = 1e-12 * (1.0 + norm2(&l2));
        assert!(norm2(&l1) <= norm2(&l2) + tol);
        assert!(conorm_signed(&l1) + tol >= conorm_signed(&l2));
        assert!(principal_disk(&l2).contains_disk(&principal_disk(&l1), 1e-10));
    }
}

#[test]
fn chiral_range_containment() {
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let raw: Vec<(Mat2, f64)> = (0..n)
            .map(|_| (Mat2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), rng.gen_range(0.1..1.0)))
            .collect();
        let tv: f64 = raw.iter().map(|(m, d)| norm2(m) * d).sum();
        let p = rng.gen_range(0.05..0.999) * PI;
        let phi = StepMeasure::new(raw.into_iter().map(|(m, d)| (m.scale(p / tv), d)).collect()).unwrap();
        assert!((phi.total_variation() - p).abs() < 1e-12);
        let mp = magnus_exponent(&lexp(&phi).unwrap()).unwrap();
        assert!(mp <= p + 1e-9, "MP {mp} > p {p}");
    }
}

#[test]
fn critical_terms_against_cauchy_oracle() {
    let terms = critical_terms_cauchy(40, 0.9, 1024);
    for n in 2..=40 {
        let oracle = terms[n].norm2();
        let want = critical_term_norm(n);
        assert!((oracle - want).abs() < 1e-9 * want, "n = {n}: {oracle} vs {want}");
    }
    assert!((critical_term_norm(2) - FRAC_PI_2).abs() < 1e-15);
    let n = 400;
    assert!((critical_term_norm(n) * (n as f64 / (2.0 * PI)).sqrt() - 1.0).abs() < 0.02);
}

#[test]
fn example_fits() {
    let c = 2f64.sqrt() * PI.powf(1.5);
    for (name, exponent, constant) in [
        ("skew-loxodromic", 1.0 / 3.0, Some(4.001)),
        ("skew-loxodromic-ridge", 1.0 / 3.0, Some(4.356)),
        ("skew-elliptic", 1.0 / 3.0, None),
        ("critical", 0.5, Some(c)),
        ("parabolic", 0.5, Some(c)),
        ("hyperbolic", 0.5, Some(c)),
    ] {
        let t = example_asymptotics(name).unwrap();
        assert!((t.exponent - exponent).abs() < 0.02, "{name}: {}", t.exponent);
        if let Some(k) = constant {
            assert!(((t.constant - k) / k).abs() < 0.01, "{name}: {}", t.constant);
        }
        assert!(t.rows.windows(2).all(|w| w[0].gap != w[1].gap));
    }
    assert!(example_asymptotics("nope").is_err());
    assert_eq!(EXAMPLE_NAMES.len(), 6);
}
