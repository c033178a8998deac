//! Scalar generating functions and convergence bounds.

use num_traits::{ToPrimitive, Zero};

use crate::free_algebra::Q;

/// Truncated power series with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSeries {
    pub coeffs: Vec<Q>,
}

impl RationalSeries {
    pub fn new(coeffs: Vec<Q>) -> Self {
        Self { coeffs }
    }
    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![Q::zero(); n + 1] }
    }
    /// Highest stored power.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }
    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().min(o.coeffs.len());
        Self { coeffs: (0..n).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect() }
    }
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.coeffs.len().min(o.coeffs.len());
        let mut c = vec![Q::zero(); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += &self.coeffs[i] * &o.coeffs[j];
            }
        }
        Self { coeffs: c }
    }
    /// `self ∘ inner`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Self {
        let n = self.coeffs.len().min(inner.coeffs.len());
        let mut out = Self::zero(n - 1);
        for c in self.coeffs.iter().take(n).rev() {
            out = out.mul(inner);
            out.coeffs[0] += c;
        }
        out
    }
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |s, c| s * x + c.to_f64().unwrap())
    }
}

use std::f64::consts::PI;

use crate::magnus_core::beta_table;
use crate::numeric::{self, Field};
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;
/// Below this argument size the special functions switch to their Taylor branch.
pub const SERIES_SWITCH: f64 = 1e-2;

/// h·coth(h), even and analytic; 1 at h = 0.
pub fn hcoth(h: f64) -> f64 {
    if h.abs() < SERIES_SWITCH {
        let h2 = h * h;
        1.0 + h2 / 3.0 - h2 * h2 / 45.0 + 2.0 * h2 * h2 * h2 / 945.0
    } else {
        h / h.tanh()
    }
}

/// Denominator of G in the symmetric form G = 1/(h·coth h − m), m = (u+v)/2, h = (u−v)/2.
fn g_den(u: f64, v: f64) -> f64 {
    hcoth(0.5 * (u - v)) - 0.5 * (u + v)
}

/// The generating function G(u,v) = (e^u − e^v)/(u·e^v − v·e^u), continued meromorphically.
pub fn euler_g(u: f64, v: f64) -> Result<f64> {
    let d = g_den(u, v);
    if d.abs() < 1e-300 || !d.is_finite() {
        return Err(Error::Domain(format!("G has a pole at ({u}, {v})")));
    }
    Ok(1.0 / d)
}

/// Sum of the (nonnegative) Taylor series of G at u, v ≥ 0; +∞ outside its convergence domain.
pub fn euler_g_abs(u: f64, v: f64) -> f64 {
    let d = g_den(u.abs(), v.abs());
    if d <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / d
    }
}

/// Complex G(u,v) on a pair of complex arguments (used for Cauchy-integral coefficient extraction).
pub fn euler_g_complex(u: num_complex::Complex64, v: num_complex::Complex64) -> num_complex::Complex64 {
    let d = u - v;
    if d.norm() < 1e-8 {
        // Series in (u−v) around the diagonal value 1/(1−u).
        let w = 0.5 * (u + v);
        let base = num_complex::Complex64::new(1.0, 0.0) / (num_complex::Complex64::new(1.0, 0.0) - w);
        let h2 = 0.25 * d * d;
        return base - base * base * h2 / 3.0;
    }
    (u.exp() - v.exp()) / (u * v.exp() - v * u.exp())
}

/// Θ(x) = x∫₀¹ G(tx,(1−t)x) dt, finite exactly for 0 ≤ x < 2.
pub fn theta_numeric(x: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&x) {
        return Err(Error::Domain(format!("Θ({x}) diverges (finite only on [0, 2))")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let f = |t: f64| 1.0 / (hcoth((2.0 * t - 1.0) * x / 2.0) - x / 2.0);
    Ok(x * numeric::integrate(f, 0.0, 1.0, 1e-10 / x))
}

/// Discriminant 8λ² − 8λ + 1 selecting the branch of g_λ and h(λ).
pub fn lambda_discriminant(lambda: f64) -> f64 {
    8.0 * lambda * lambda - 8.0 * lambda + 1.0
}

const DISC_EPS: f64 = 1e-12;

/// Majorant g_λ of the resolvent generating function: g' = 1 + |1−2λ|g + λ(1−λ)g², g(0) = 0.
pub fn g_lambda(lambda: f64, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("λ = {lambda} outside [0, 1]")));
    }
    if x < 0.0 {
        return Err(Error::Domain("g_λ takes x ≥ 0".into()));
    }
    if x >= h_lambda(lambda) {
        return Err(Error::Domain(format!("x = {x} beyond the singularity of g_λ at {}", h_lambda(lambda))));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let s = (1.0 - 2.0 * lambda).abs();
    let disc = lambda_discriminant(lambda);
    let v = if disc.abs() < DISC_EPS {
        4.0 * x / (4.0 - 2f64.sqrt() * x)
    } else if disc < 0.0 {
        let d = (-disc).sqrt();
        2.0 / (-s + d / (0.5 * x * d).tan())
    } else {
        let d = disc.sqrt();
        2.0 / (-s + d / (0.5 * x * d).tanh())
    };
    Ok(v)
}

/// h(λ): the singularity of g_λ, up to which g_λ is logarithmically convex.
pub fn h_lambda(lambda: f64) -> f64 {
    let s = (1.0 - 2.0 * lambda).abs();
    let disc = lambda_discriminant(lambda);
    if disc.abs() < DISC_EPS {
        2.0 * 2f64.sqrt()
    } else if disc < 0.0 {
        let d = (-disc).sqrt();
        2.0 * d.atan2(s) / d
    } else {
        let d = disc.sqrt();
        if d >= s {
            f64::INFINITY
        } else {
            2.0 * (d / s).atanh() / d
        }
    }
}

/// C₁ = min over λ ∈ [0, 1/2] of h(λ); returns (argmin λ, C₁).
pub fn c1() -> (f64, f64) {
    numeric::golden_min(h_lambda, 0.0, 0.5, 1e-10)
}

/// Majorant of Σ|R^(λ)_n| for the two-exponential product.
pub fn bch_resolvent_bound(lambda: f64, x: f64, y: f64) -> Result<f64> {
    let gx = g_lambda(lambda, x)?;
    let gy = g_lambda(lambda, y)?;
    let q = lambda * (1.0 - lambda) * gx * gy;
    if q >= 1.0 {
        return Err(Error::Domain(format!("resolvent bound diverges: λ(1−λ)g(x)g(y) = {q}")));
    }
    Ok((gx + gy + gx * gy) / (1.0 - q))
}

fn big_g_den(lambda: f64, x: f64) -> f64 {
    g_den((1.0 - lambda).abs() * x, lambda.abs() * x)
}

/// Singularity of G^(λ)(x) = x·G(|1−λ|x, |λ|x) on x > 0.
pub fn big_g_lambda_pole(lambda: f64) -> f64 {
    let mut hi = 1.0;
    while big_g_den(lambda, hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return f64::INFINITY;
        }
    }
    numeric::bisect(|x| big_g_den(lambda, x), 0.0, hi, 1e-15).unwrap_or(hi)
}

/// G^(λ)(x) = x·G(|1−λ|x, |λ|x) for x ≥ 0.
pub fn big_g_lambda(lambda: f64, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain("G^(λ) takes x ≥ 0".into()));
    }
    let d = big_g_den(lambda, x);
    if d <= 0.0 {
        return Err(Error::Domain(format!("G^(λ) diverges at x = {x}")));
    }
    Ok(x / d)
}

/// Inverse of the increasing map G^(λ) on [0, pole).
pub fn big_g_lambda_inv(lambda: f64, y: f64) -> Result<f64> {
    if y < 0.0 {
        return Err(Error::Domain("inverse of G^(λ) takes y ≥ 0".into()));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let pole = big_g_lambda_pole(lambda);
    let hi = if pole.is_finite() { pole } else { 1e6 };
    numeric::bisect(
        |x| {
            let d = big_g_den(lambda, x);
            if d <= 0.0 {
                1.0
            } else {
                x / d - y
            }
        },
        0.0,
        hi,
        1e-14,
    )
}

/// Ĝ^(λ)(x, y) = G^(λ)((G^(λ))⁻¹(x) + y).
pub fn ghat_lambda(lambda: f64, x: f64, y: f64) -> Result<f64> {
    let a = big_g_lambda_inv(lambda, x)?;
    big_g_lambda(lambda, a + y)
}

/// β̃(x) = Σ|β_j|x^j = 2 + x/2 − (x/2)cot(x/2) on [0, 2π).
pub fn beta_tilde(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 + x / 2.0 + x2 / 12.0 + x2 * x2 / 720.0 + x2 * x2 * x2 / 30240.0
    } else {
        2.0 + x / 2.0 - (x / 2.0) / (x / 2.0).tan()
    }
}

/// The even part β̃̃(x) = Σ_{j≥1}|β_{2j}|x^{2j} = 1 − (x/2)cot(x/2).
pub fn beta_even(x: f64) -> f64 {
    if x.abs() < SERIES_SWITCH {
        let x2 = x * x;
        x2 / 12.0 + x2 * x2 / 720.0 + x2 * x2 * x2 / 30240.0
    } else {
        1.0 - (x / 2.0) / (x / 2.0).tan()
    }
}

/// Derivative of β̃̃.
pub fn beta_even_prime(x: f64) -> f64 {
    if x.abs() < SERIES_SWITCH {
        let x2 = x * x;
        x / 6.0 + x * x2 / 180.0 + x * x2 * x2 / 5040.0
    } else {
        let s = (x / 2.0).sin();
        -0.5 / (x / 2.0).tan() + x / (4.0 * s * s)
    }
}

/// β^(e)(x) = Σ_{j≥1}(x/2π)^{2j}.
pub fn beta_e(x: f64) -> f64 {
    x * x / (TWO_PI * TWO_PI - x * x)
}

/// β^(o)(x) = Σ_{j≥1}(x/2π)^{2j+1}.
pub fn beta_o(x: f64) -> f64 {
    x * x * x / (TWO_PI * (TWO_PI * TWO_PI - x * x))
}

fn cot_reg(e: f64) -> f64 {
    // cot e − 1/e
    if e.abs() < SERIES_SWITCH {
        let e2 = e * e;
        -e / 3.0 - e * e2 / 45.0 - 2.0 * e * e2 * e2 / 945.0
    } else {
        1.0 / e.tan() - 1.0 / e
    }
}

fn csc2_reg(e: f64) -> f64 {
    // csc²e − 1/e²
    if e.abs() < SERIES_SWITCH {
        let e2 = e * e;
        1.0 / 3.0 + e2 / 15.0 + 2.0 * e2 * e2 / 189.0
    } else {
        let s = e.sin();
        1.0 / (s * s) - 1.0 / (e * e)
    }
}

/// β̊(x) = β̃̃(x) − 2β^(e)(x), the N ≥ 2 part of the partial-fraction expansion; analytic for |x| < 4π.
pub fn beta_ring(x: f64) -> f64 {
    if x < PI {
        beta_even(x) - 2.0 * beta_e(x)
    } else {
        // With e = x/2 − π the simple poles at x = 2π cancel in closed form.
        let e = x / 2.0 - PI;
        1.0 - (PI + e) * cot_reg(e) + (PI + e) / (TWO_PI + e)
    }
}

/// Derivative of β̊.
pub fn beta_ring_prime(x: f64) -> f64 {
    if x < PI {
        let w = TWO_PI * TWO_PI - x * x;
        beta_even_prime(x) - 2.0 * 2.0 * TWO_PI * TWO_PI * x / (w * w)
    } else {
        let e = x / 2.0 - PI;
        0.5 * (-cot_reg(e) + (PI + e) * csc2_reg(e) + PI / ((TWO_PI + e) * (TWO_PI + e)))
    }
}

fn inv_beta_tilde(y: f64) -> f64 {
    if y >= TWO_PI {
        0.0
    } else {
        1.0 / beta_tilde(y)
    }
}

/// χ(y) = ∫₀^y dt/β̃(t), the time the standard majorant needs to reach y.
pub fn chi(y: f64) -> f64 {
    numeric::integrate(inv_beta_tilde, 0.0, y.min(TWO_PI), 1e-12)
}

/// δ = ∫₀^{2π} dy/β̃(y), the blow-up point of ψ' = β̃(ψ).
pub fn delta_standard() -> f64 {
    chi(TWO_PI)
}

/// Solves `ψ' = β̃(ψ) − forcing` as an exact series through degree n, ψ(0) = 0.
fn forced_psi(n: usize, forcing: &[Q]) -> RationalSeries {
    let b: Vec<Q> = beta_table(n).into_iter().map(|q| if q < Q::zero() { -q } else { q }).collect();
    let mut psi = vec![Q::zero(); n + 1];
    // pw[j][m] = [x^m] ψ^j
    let mut pw = vec![vec![Q::zero(); n + 1]; n + 1];
    pw[0][0] = Q::from_integer(1.into());
    for k in 1..=n {
        let mut c = Q::zero();
        for j in 0..k {
            if !b[j].is_zero() {
                c += &b[j] * &pw[j][k - 1];
            }
        }
        if let Some(fv) = forcing.get(k - 1) {
            c -= fv;
        }
        psi[k] = c / Q::from_integer((k as i64).into());
        for j in 1..=k {
            let mut s = Q::zero();
            for i in 1..=k {
                if !psi[i].is_zero() && !pw[j - 1][k - i].is_zero() {
                    s += &psi[i] * &pw[j - 1][k - i];
                }
            }
            pw[j][k] = s;
        }
    }
    RationalSeries::new(psi)
}

/// The majorant ψ of Θ^Lie: k ψ_k = Σ_{l₁+…+l_s=k−1} |β_s| ψ_{l₁}⋯ψ_{l_s}.
pub fn psi_series(n: usize) -> RationalSeries {
    forced_psi(n, &[])
}

/// Θ^Lie through degree n ≤ 6 from the exact minimal Lie presentations.
pub fn theta_lie_series(n: usize) -> Result<RationalSeries> {
    if n > 6 {
        return Err(Error::Resource("Θ^Lie is available through degree 6".into()));
    }
    let mut c = vec![Q::zero(); n + 1];
    if n >= 1 {
        c[1] = crate::free_algebra::qi(1);
    }
    for (k, ck) in c.iter_mut().enumerate().skip(2) {
        *ck = crate::lie_min::theta_lie(k)?.theta_lie();
    }
    Ok(RationalSeries::new(c))
}

/// Forcing term Δ₆ that pins the first six coefficients of the Method-1 majorant to Θ^Lie.
pub fn delta6() -> Vec<Q> {
    use crate::free_algebra::q;
    vec![Q::zero(), Q::zero(), q(1, 24), q(1, 72), q(53, 8640), q(11, 4320)]
}

fn delta6_f64(x: f64) -> f64 {
    x * x / 24.0 + x.powi(3) / 72.0 + 53.0 * x.powi(4) / 8640.0 + 11.0 * x.powi(5) / 4320.0
}

fn delta6_integral(x: f64) -> f64 {
    x.powi(3) / 72.0 + x.powi(4) / 288.0 + 53.0 * x.powi(5) / 43200.0 + 11.0 * x.powi(6) / 25920.0
}

/// Series of the Method-1 majorant ψ̂' = β̃(ψ̂) − Δ₆.
pub fn psi_hat_series(n: usize) -> RationalSeries {
    forced_psi(n, &delta6())
}

/// Closed-form lower bound δ + L̂ of the Method-1 radius.
pub fn delta_plus_lhat() -> f64 {
    let d = delta_standard();
    let lhat = d - chi(TWO_PI - delta6_integral(d));
    d + lhat
}

/// A first-order IVP whose blow-up point bounds a convergence radius.
pub struct IvpSystem {
    pub name: String,
    pub dim: usize,
    pub init: Vec<f64>,
    pub threshold: f64,
    pub rhs: Box<Field<'static>>,
}

impl IvpSystem {
    pub fn new(name: &str, init: Vec<f64>, rhs: Box<Field<'static>>) -> Self {
        Self { name: name.into(), dim: init.len(), init, threshold: 1e8, rhs }
    }

    /// ψ' = β̃(ψ).
    pub fn standard() -> Self {
        Self::new(
            "standard",
            vec![0.0],
            Box::new(|_x, y| if y[0] < TWO_PI { Some(vec![beta_tilde(y[0])]) } else { None }),
        )
    }

    /// ψ̂' = β̃(ψ̂) − Δ₆(x).
    pub fn method1() -> Self {
        Self::new(
            "method1",
            vec![0.0],
            Box::new(|x, y| if y[0] < TWO_PI { Some(vec![beta_tilde(y[0]) - delta6_f64(x)]) } else { None }),
        )
    }

    /// ψ' = 1 + ψ/2 + q, q' = β̃̃'(ψ)(1 + q) + q.
    pub fn method3() -> Self {
        Self::new(
            "method3",
            vec![0.0, 0.0],
            Box::new(|_x, y| {
                let (p, q) = (y[0], y[1]);
                if p >= TWO_PI {
                    return None;
                }
                Some(vec![1.0 + 0.5 * p + q, beta_even_prime(p) * (1.0 + q) + q])
            }),
        )
    }

    /// State (ψ, ψ^(e), ψ^(o), ψ̊).
    pub fn method4() -> Self {
        Self::new(
            "method4",
            vec![0.0; 4],
            Box::new(|_x, y| {
                let (p, e, o, r) = (y[0], y[1], y[2], y[3]);
                if p >= 2.0 * TWO_PI {
                    return None;
                }
                let dd = 1.0 + 2.0 * e + r;
                let a = p / TWO_PI + o;
                Some(vec![
                    1.0 + 0.5 * p + 2.0 * e + r,
                    2.0 * a * (1.0 + e) * dd / TWO_PI + e,
                    (2.0 * e + e * e + a * a) * dd / TWO_PI + o,
                    beta_ring_prime(p) * dd + r,
                ])
            }),
        )
    }

    /// State (Θ, Θ^(e), Θ^(o), Θ^(ee), Θ^(oo)); polynomial.
    pub fn method5() -> Self {
        let zeta_tail = 8.0 * (PI * PI / 6.0 - 1.0);
        Self::new(
            "method5",
            vec![0.0; 5],
            Box::new(move |_x, y| {
                let (p, e, o, ee, oo) = (y[0], y[1], y[2], y[3], y[4]);
                let dd = 1.0 + 2.0 * e + zeta_tail * ee;
                let a = p / TWO_PI + o;
                let b = p / (2.0 * TWO_PI) + oo;
                Some(vec![
                    dd + 0.5 * p,
                    2.0 * a * (1.0 + e) * dd / TWO_PI + e,
                    (2.0 * e + e * e + a * a) * dd / TWO_PI + o,
                    2.0 * b * (1.0 + ee) * dd / (2.0 * TWO_PI) + ee,
                    (2.0 * ee + ee * ee + b * b) * dd / (2.0 * TWO_PI) + oo,
                ])
            }),
        )
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "standard" | "delta" => Some(Self::standard()),
            "method1" => Some(Self::method1()),
            "method3" => Some(Self::method3()),
            "method4" => Some(Self::method4()),
            "method5" => Some(Self::method5()),
            _ => None,
        }
    }
}

/// Blow-up location with an error estimate from a tolerance-refined rerun.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BlowupResult {
    pub radius: f64,
    pub est_error: f64,
    pub by_threshold: bool,
}

/// Largest x to which the solution continues below the threshold and inside the field's domain.
pub fn blowup_radius(sys: &IvpSystem) -> Result<BlowupResult> {
    blowup_radius_tol(sys, 1e-11)
}

pub fn blowup_radius_tol(sys: &IvpSystem, tol: f64) -> Result<BlowupResult> {
    let a = numeric::escape(sys.rhs.as_ref(), 0.0, &sys.init, sys.threshold, tol, 100.0)?;
    let b = numeric::escape(sys.rhs.as_ref(), 0.0, &sys.init, sys.threshold, tol / 32.0, 100.0)?;
    Ok(BlowupResult { radius: b.x, est_error: (a.x - b.x).abs().max(1e-12), by_threshold: b.by_threshold })
}

/// Right-hand side of the second-order Method-2 majorant ψ'' = f(ψ).
pub fn method2_f(x: f64) -> f64 {
    if x.abs() < SERIES_SWITCH {
        let c = [
            0.5,
            1.0 / 3.0,
            1.0 / 8.0,
            13.0 / 720.0,
            1.0 / 480.0,
            19.0 / 30240.0,
            1.0 / 20160.0,
        ];
        c.iter().rev().fold(0.0, |s, k| s * x + k)
    } else {
        let ct = 1.0 / (x / 2.0).tan();
        2.0 + x / 2.0 + 1.0 / x - 2.0 * ct - 0.75 * x * ct + 0.75 * x * ct * ct
    }
}

/// δ₂ = ∫₀^{2π} du / √(1 + 2∫₀^u f).
pub fn method2_radius() -> Result<f64> {
    // Inner and outer integrals carried together as (F, δ₂)' = (f(u), 1/√(1+2F)).
    let field = |u: f64, y: &[f64]| {
        if u >= TWO_PI {
            None
        } else {
            Some(vec![method2_f(u), 1.0 / (1.0 + 2.0 * y[0]).sqrt()])
        }
    };
    let e = numeric::escape(&field, 0.0, &[0.0, 0.0], f64::INFINITY, 1e-13, 10.0)?;
    Ok(e.y[1])
}

/// Inner integral of the Method-2 radius.
pub fn method2_inner(u: f64) -> f64 {
    numeric::integrate(method2_f, 0.0, u, 1e-12)
}

fn sinc(z: f64) -> f64 {
    if z.abs() < SERIES_SWITCH {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// (sin z − z cos z)/z³.
fn sin_minus_zcos(z: f64) -> f64 {
    if z.abs() < SERIES_SWITCH {
        let z2 = z * z;
        1.0 / 3.0 - z2 / 30.0 + z2 * z2 / 840.0
    } else {
        (z.sin() - z * z.cos()) / (z * z * z)
    }
}

/// sin(p·sin t) evaluated without cancellation near p·sin t = π.
fn sin_p_sin(p: f64, t: f64) -> f64 {
    let a = t.sin();
    let z = p * a;
    if z > PI / 2.0 {
        let c = t.cos();
        ((PI - p) + p * c * c / (1.0 + a)).sin()
    } else {
        z.sin()
    }
}

/// Integrand HH(p,t) of the log-norm estimate, in the factored entire-function form.
pub fn hh(p: f64, t: f64) -> f64 {
    let a = t.sin();
    let b = t.cos();
    let z = p * a;
    let f1 = sin_minus_zcos(z);
    let f2 = (2.0 * (0.5 * b * p).sinh().powi(2) + 2.0 * (0.5 * z).sin().powi(2)) / (p * p);
    let f3 = if z.abs() < SERIES_SWITCH { sinc(z) } else { sin_p_sin(p, t) / z };
    let f4 = (2.0 * (b * p).cosh() * (0.5 * z).sin().powi(2) - 2.0 * (0.5 * b * p).sinh().powi(2)) / (p * p)
        + b * (b * p).sinh() / p * sinc(z);
    p * p * a * f1 * f2 / (f3 * f4)
}

fn h_head(p: f64) -> f64 {
    // p − 2 log(2cosh(p/2) − (2/p)sinh(p/2))
    let inner = if p.abs() < SERIES_SWITCH {
        1.0 + 5.0 * p * p / 24.0
    } else {
        2.0 * (p / 2.0).cosh() - 2.0 / p * (p / 2.0).sinh()
    };
    p - 2.0 * inner.ln()
}

/// H(p) bounding ‖log A‖ when the spectrum-type range of A lies in exp D(0,p); 0 ≤ p < π.
pub fn h_estimate(p: f64) -> Result<f64> {
    Ok(h_estimate_err(p)?.0)
}

/// H(p) together with a quadrature error estimate.
pub fn h_estimate_err(p: f64) -> Result<(f64, f64)> {
    h_estimate_tol(p, 1e-11)
}

/// H(p) with quadrature tolerance `tol`; the error estimate compares against `64·tol`.
pub fn h_estimate_tol(p: f64, tol: f64) -> Result<(f64, f64)> {
    if !(0.0..PI).contains(&p) {
        return Err(Error::Domain(format!("H(p) needs 0 ≤ p < π, got {p}")));
    }
    if p == 0.0 {
        return Ok((0.0, 0.0));
    }
    let f = |t: f64| if t <= 0.0 || t >= PI { 0.0 } else { hh(p, t) };
    let i1 = numeric::integrate_split(f, 0.0, PI, &[PI / 2.0], 64.0 * tol);
    let i2 = numeric::integrate_split(f, 0.0, PI, &[PI / 2.0], tol);
    Ok((h_head(p) + i2, (i1 - i2).abs().max(1e-15)))
}

/// H_π, the constant in H(p) = p√((π+p)/(π−p)) + H_π + o(1).
pub fn h_pi() -> f64 {
    let eps = 2e-2;
    let reg = |t: f64| {
        if t <= 0.0 || t >= PI {
            return 0.0;
        }
        let c = t.cos();
        hh(PI, t) - 2.0 / (c * c)
    };
    let left = numeric::integrate(reg, 0.0, PI / 2.0 - eps, 1e-10);
    let right = numeric::integrate(reg, PI / 2.0 + eps, PI, 1e-10);
    // Inside the window the subtraction loses all digits; the integrand is even about π/2 there,
    // so it is replaced by the quadratic α + βs² through s = eps and s = 2·eps.
    let r1 = 0.5 * (reg(PI / 2.0 - eps) + reg(PI / 2.0 + eps));
    let r2 = 0.5 * (reg(PI / 2.0 - 2.0 * eps) + reg(PI / 2.0 + 2.0 * eps));
    let beta = (r2 - r1) / (3.0 * eps * eps);
    let alpha = r1 - beta * eps * eps;
    let mid = 2.0 * (alpha * eps + beta * eps.powi(3) / 3.0);
    h_head(PI) + left + mid + right
}

/// Bound on the k-th Magnus term: π^{1−k}·2√(e·k)·L^k for L < π.
pub fn magnus_term_bound(k: usize, l: f64) -> Result<f64> {
    if k == 0 || !(0.0..PI).contains(&l) {
        return Err(Error::Domain("term bound needs k ≥ 1 and 0 ≤ L < π".into()));
    }
    let k = k as f64;
    Ok(PI.powf(1.0 - k) * 2.0 * (std::f64::consts::E * k).sqrt() * l.powf(k))
}
