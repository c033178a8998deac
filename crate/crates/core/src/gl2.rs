//! Real 2×2 matrix geometry: operator norms, chiral and principal disks, logarithms,
//! rotating-frame developments, maximal disks, the Magnus exponent, classification
//! and normal forms.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::numeric::{bisect, golden_min, loglog_fit};
use crate::{Error, Result};

/// Real matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }
    pub const fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }
    pub const fn zero() -> Self {
        Mat2::new(0.0, 0.0, 0.0, 0.0)
    }
    /// `α·Id + β·Ĩ + γ·J̃ + δ·K̃`.
    pub fn from_parts(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Mat2::new(alpha + gamma, delta - beta, beta + delta, alpha - gamma)
    }
    /// Coefficients `(α, β, γ, δ)` in the basis Id, Ĩ, J̃, K̃.
    pub fn parts(&self) -> (f64, f64, f64, f64) {
        (
            0.5 * (self.a + self.d),
            0.5 * (self.c - self.b),
            0.5 * (self.a - self.d),
            0.5 * (self.b + self.c),
        )
    }
    /// Rotation by `theta`, i.e. `exp(θĨ)`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }
    /// Matrix with the given chiral disk; `phase` fixes the symmetric traceless direction.
    pub fn from_disk(disk: &Disk, phase: f64) -> Self {
        let (s, c) = phase.sin_cos();
        Mat2::from_parts(disk.center_re, disk.center_im, disk.radius * c, disk.radius * s)
    }
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("matrix entry {t:?}: {e}"))))
            .collect::<Result<_>>()?;
        if v.len() != 4 {
            return Err(Error::Parse(format!("expected 4 entries a,b,c,d, got {}", v.len())));
        }
        let m = Mat2::new(v[0], v[1], v[2], v[3]);
        if !m.is_finite() {
            return Err(Error::Parse("matrix entries must be finite".into()));
        }
        Ok(m)
    }
    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }
    pub fn trace(&self) -> f64 {
        self.a + self.d
    }
    pub fn transpose(&self) -> Self {
        Mat2::new(self.a, self.c, self.b, self.d)
    }
    pub fn scale(&self, s: f64) -> Self {
        Mat2::new(s * self.a, s * self.b, s * self.c, s * self.d)
    }
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det == 0.0 {
            return Err(Error::Domain("singular matrix".into()));
        }
        Ok(Mat2::new(self.d, -self.b, -self.c, self.a).scale(1.0 / det))
    }
    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }
    pub fn dist(&self, o: &Mat2) -> f64 {
        (*self - *o).max_abs()
    }
    pub fn commutator(&self, o: &Mat2) -> Mat2 {
        *self * *o - *o * *self
    }
    /// Operator norm for the Euclidean norm.
    pub fn norm2(&self) -> f64 {
        norm2(self)
    }
    /// Closed-form exponential.
    pub fn exp(&self) -> Mat2 {
        let m = 0.5 * self.trace();
        let n = *self - Mat2::identity().scale(m);
        // n² = q·Id
        let q = -n.det();
        Mat2::identity().scale(ccc(q)).add(n.scale(sss(q))).scale(m.exp())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// `diag(1, −1)`.
pub const J_TILDE: Mat2 = Mat2::new(1.0, 0.0, 0.0, -1.0);
/// Rotation generator `[[0, −1], [1, 0]]`.
pub const I_TILDE: Mat2 = Mat2::new(0.0, -1.0, 1.0, 0.0);
/// `[[0, 1], [1, 0]]`.
pub const K_TILDE: Mat2 = Mat2::new(0.0, 1.0, 1.0, 0.0);
/// Nilpotent `[[0, −1], [0, 0]]`.
pub const P_TILDE: Mat2 = Mat2::new(0.0, -1.0, 0.0, 0.0);

/// `Σ x^k/(2k)!`: cos√(−x), 1 or cosh√x.
pub fn ccc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x / 2.0 + x * x / 24.0 + x * x * x / 720.0 + x * x * x * x / 40320.0
    } else if x > 0.0 {
        x.sqrt().cosh()
    } else {
        (-x).sqrt().cos()
    }
}

/// `Σ x^k/(2k+1)!`: sin√(−x)/√(−x), 1 or sinh√x/√x.
pub fn sss(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x / 6.0 + x * x / 120.0 + x * x * x / 5040.0 + x * x * x * x / 362880.0
    } else if x > 0.0 {
        let r = x.sqrt();
        r.sinh() / r
    } else {
        let r = (-x).sqrt();
        r.sin() / r
    }
}

/// `sinh(p·c)/c`, continuous at `c = 0`.
fn sinhc(p: f64, c: f64) -> f64 {
    p * sss(p * p * c * c)
}

pub fn norm2(m: &Mat2) -> f64 {
    0.5 * ((m.a + m.d).hypot(m.c - m.b) + (m.a - m.d).hypot(m.b + m.c))
}

/// Signed co-norm; its sign is the sign of the determinant.
pub fn conorm_signed(m: &Mat2) -> f64 {
    0.5 * ((m.a + m.d).hypot(m.c - m.b) - (m.a - m.d).hypot(m.b + m.c))
}

/// Closed disk in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Disk {
    pub center_re: f64,
    pub center_im: f64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center_re: f64, center_im: f64, radius: f64) -> Self {
        Disk { center_re, center_im, radius }
    }
    pub fn center(&self) -> Complex64 {
        Complex64::new(self.center_re, self.center_im)
    }
    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        (z - self.center()).norm() <= self.radius + slack
    }
    pub fn contains_disk(&self, o: &Disk, slack: f64) -> bool {
        (o.center() - self.center()).norm() + o.radius <= self.radius + slack
    }
    /// True when the closed disk meets `(−∞, 0]`.
    pub fn meets_negative_axis(&self, slack: f64) -> bool {
        if self.center_re <= 0.0 {
            self.center_im.abs() <= self.radius + slack
        } else {
            self.center().norm() <= self.radius + slack
        }
    }
    /// Boundary point at angle `theta`.
    pub fn point(&self, theta: f64) -> Complex64 {
        self.center() + Complex64::from_polar(self.radius, theta)
    }
}

pub fn chiral_disk(m: &Mat2) -> Disk {
    Disk::new(0.5 * (m.a + m.d), 0.5 * (m.c - m.b), 0.5 * (m.a - m.d).hypot(m.b + m.c))
}

pub fn principal_disk(m: &Mat2) -> Disk {
    let d = chiral_disk(m);
    Disk::new(d.center_re, d.center_im.abs(), d.radius)
}

fn poly(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, k| acc * u + k)
}

const AC_SERIES: [f64; 6] = [1.0, -1.0 / 3.0, 2.0 / 15.0, -2.0 / 35.0, 8.0 / 315.0, -8.0 / 693.0];
const AS_SERIES: [f64; 6] = [
    1.0 / 3.0,
    -8.0 / 45.0,
    436.0 / 4725.0,
    -3352.0 / 70875.0,
    394118.0 / 16372125.0,
    -17705104.0 / 1451165625.0,
];

fn check_ac_domain(x: f64) -> Result<()> {
    if x.is_nan() || x <= -1.0 {
        return Err(Error::Domain(format!("argument {x} must exceed -1")));
    }
    Ok(())
}

/// `arccos(x)/√(1−x²)`, `1`, or `arcosh(x)/√(x²−1)` by the sign of `x − 1`.
pub fn ac(x: f64) -> Result<f64> {
    check_ac_domain(x)?;
    let u = x - 1.0;
    Ok(if u.abs() < 1e-4 {
        poly(&AC_SERIES, u)
    } else if u < 0.0 {
        x.acos() / (1.0 - x * x).sqrt()
    } else {
        x.acosh() / (x * x - 1.0).sqrt()
    })
}

/// `AC(−1 + delta)` evaluated without forming `x`, for `delta > 0` small.
pub fn ac_shifted(delta: f64) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Domain(format!("shift {delta} must be positive")));
    }
    if delta > 0.5 {
        return ac(delta - 1.0);
    }
    let angle = PI - 2.0 * (0.5 * delta).sqrt().asin();
    Ok(angle / (delta * (2.0 - delta)).sqrt())
}

/// `√((AC(x)² − 1)/(1 − x²))`.
pub fn as_fn(x: f64) -> Result<f64> {
    check_ac_domain(x)?;
    let u = x - 1.0;
    if u.abs() < 1e-4 {
        return Ok(3f64.sqrt() * poly(&AS_SERIES, u));
    }
    let a = ac(x)?;
    Ok(((a * a - 1.0) / (1.0 - x * x)).sqrt())
}

/// `AS` at `−1 + delta`.
pub fn as_shifted(delta: f64) -> Result<f64> {
    if delta > 0.5 {
        return as_fn(delta - 1.0);
    }
    let a = ac_shifted(delta)?;
    Ok(((a * a - 1.0) / (delta * (2.0 - delta))).sqrt())
}

/// `(AC(x) − 1)/AS(x)`.
pub fn at_fn(x: f64) -> Result<f64> {
    Ok((ac(x)? - 1.0) / as_fn(x)?)
}

/// Real logarithm of a log-able matrix.
pub fn log2x2(m: &Mat2) -> Result<Mat2> {
    if !m.is_finite() {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let det = m.det();
    if det <= 0.0 {
        return Err(Error::Domain(format!("not log-able: determinant {det} is not positive")));
    }
    let sd = det.sqrt();
    let x = m.trace() / (2.0 * sd);
    if x <= -1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "not log-able: spectrum meets the negative half-line (tr/(2√det) = {x})"
        )));
    }
    let half = 0.5 * m.trace();
    let n = *m - Mat2::identity().scale(half);
    Ok(Mat2::identity().scale(0.5 * det.ln()) + n.scale(ac(x)? / sd))
}

/// Norm and signed co-norm of `log A` from the chiral disk `D̄(a+ib, r)` of `A`.
pub fn log_norms_from_disk(a: f64, b: f64, r: f64) -> Result<(f64, f64)> {
    let disk = Disk::new(a, b, r);
    if r < 0.0 || disk.meets_negative_axis(1e-12) {
        return Err(Error::Domain(format!("disk ({a}, {b}; {r}) meets the closed negative half-line")));
    }
    let dd = a * a + b * b - r * r;
    let sd = dd.sqrt();
    let k = ac(a / sd)? / sd;
    let f_ca = (0.5 * dd.ln()).hypot(b * k);
    let f_rd = r * k;
    Ok((f_ca + f_rd, f_ca - f_rd))
}

/// Time-ordered exponential of the density `exp(wθĨ)·pK̃·exp(−wθĨ)` over `θ ∈ [0, 1]`.
pub fn w_mat(p: f64, w: f64) -> Mat2 {
    let x = p * p - w * w;
    let inner = Mat2::identity().scale(ccc(x)) + (I_TILDE.scale(-w) + K_TILDE.scale(p)).scale(sss(x));
    Mat2::rotation(w) * inner
}

/// Elliptic development `(cos p + sin p·Ĩ)(Id − wĨ + wK̃)`.
pub fn e_mat(p: f64, w: f64) -> Mat2 {
    Mat2::rotation(p) * (Mat2::identity() - I_TILDE.scale(w) + K_TILDE.scale(w))
}

/// Maximal disk of `exp D̄(0, p)` touching the boundary at `exp(p·e^{it})`.
pub fn maximal_disk(p: f64, t: f64) -> Disk {
    chiral_disk(&w_mat(p, p * t.sin()))
}

/// Residual of the tangency of `maximal_disk(p, t)` to the curve `θ ↦ exp(p·e^{iθ})` at `θ = t`:
/// the larger of the distance defect and the cosine between radius and curve tangent.
pub fn maximal_disk_tangency(p: f64, t: f64) -> f64 {
    let disk = maximal_disk(p, t);
    let e = Complex64::from_polar(1.0, t);
    let g = (e * p).exp();
    let rad = g - disk.center();
    let tangent = g * Complex64::i() * e * p;
    let dist = (rad.norm() - disk.radius).abs() / disk.radius.max(1.0);
    let cosang = (rad.conj() * tangent).re.abs() / (rad.norm() * tangent.norm());
    dist.max(cosang)
}

/// Logarithm continued along the disk from its center (a branch on the universal cover).
fn lifted_log(center: Complex64, z: Complex64) -> Complex64 {
    Complex64::new(z.norm().ln(), center.arg() + (z / center).arg())
}

/// Maximum of `|log z|` over a disk avoiding 0.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MagnusExponent {
    pub value: f64,
    /// Boundary angle of the maximizer on the disk.
    pub theta: f64,
    /// Direction `arg log z` of the maximizer.
    pub direction: f64,
}

pub fn magnus_exponent_disk(disk: &Disk) -> Result<MagnusExponent> {
    let c = disk.center();
    if c.norm() <= disk.radius * (1.0 + 1e-12) + 1e-300 {
        return Err(Error::Domain("chiral disk contains 0".into()));
    }
    let r = disk.radius;
    let logz = |th: f64| lifted_log(c, c + Complex64::from_polar(r, th));
    if r <= 1e-14 * c.norm() {
        let l = lifted_log(c, c);
        return Ok(MagnusExponent { value: l.norm(), theta: 0.0, direction: l.im.atan2(l.re) });
    }
    let n = 4096usize;
    let h = 2.0 * PI / n as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for j in 0..n {
        let v = logz(j as f64 * h).norm_sqr();
        if v > best.1 {
            best = (j, v);
        }
    }
    let deriv = |th: f64| {
        let z = c + Complex64::from_polar(r, th);
        let l = lifted_log(c, z);
        (l.conj() * Complex64::i() * Complex64::from_polar(r, th) / z).re
    };
    let lo = (best.0 as f64 - 1.0) * h;
    let hi = (best.0 as f64 + 1.0) * h;
    let theta = if deriv(lo) > 0.0 && deriv(hi) < 0.0 {
        bisect(deriv, lo, hi, 1e-15)?
    } else {
        golden_min(|th| -logz(th).norm_sqr(), lo, hi, 1e-12).0
    };
    let l = logz(theta);
    let value = l.norm().max(best.1.sqrt());
    Ok(MagnusExponent { value, theta: theta.rem_euclid(2.0 * PI), direction: l.im.atan2(l.re).rem_euclid(2.0 * PI) })
}

/// `MP(A)`: supremum of `|log z|` over the chiral disk, with the logarithm continued from the center.
pub fn magnus_exponent(m: &Mat2) -> Result<f64> {
    Ok(magnus_exponent_disk(&chiral_disk(m))?.value)
}

/// Magnus type of a real 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Identity,
    Quasicomplex,
    Elliptic,
    Parabolic,
    Hyperbolic,
    Loxodromic,
}

impl std::fmt::Display for Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Class::Identity => "identity",
            Class::Quasicomplex => "quasicomplex",
            Class::Elliptic => "elliptic",
            Class::Parabolic => "parabolic",
            Class::Hyperbolic => "hyperbolic",
            Class::Loxodromic => "loxodromic",
        };
        f.write_str(s)
    }
}

/// Gap `2·atan((r+|b|)/(a+1)) − r`: negative for hyperbolic, positive for elliptic.
pub fn classify_gap(m: &Mat2) -> f64 {
    let d = chiral_disk(m);
    2.0 * (d.radius + d.center_im.abs()).atan2(d.center_re + 1.0) - d.radius
}

pub fn classify(m: &Mat2) -> Result<Class> {
    let d = chiral_disk(m);
    if d.center().norm() <= d.radius {
        return Err(Error::Domain("chiral disk contains 0".into()));
    }
    if d.radius < 1e-12 {
        if (d.center() - 1.0).norm() < 1e-12 {
            return Ok(Class::Identity);
        }
        return Ok(Class::Quasicomplex);
    }
    if (m.det() - 1.0).abs() > 1e-9 {
        return Ok(Class::Loxodromic);
    }
    let gap = classify_gap(m);
    Ok(if gap.abs() <= 1e-9 {
        Class::Parabolic
    } else if gap < 0.0 {
        Class::Hyperbolic
    } else {
        Class::Elliptic
    })
}

/// `A = NW(p₁, p₂, t, F)` with `F = −sin β·J̃ + cos β·K̃`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormalForm {
    pub p1: f64,
    pub p2: f64,
    pub t: f64,
    pub beta: f64,
    /// False for point disks, where `F` does not enter.
    pub f_used: bool,
}

impl NormalForm {
    pub fn f(&self) -> Mat2 {
        J_TILDE.scale(-self.beta.sin()) + K_TILDE.scale(self.beta.cos())
    }
}

pub fn nw_build(nf: &NormalForm) -> Mat2 {
    let p = nf.p1 + nf.p2;
    let (s, c) = nf.t.sin_cos();
    let sc = sinhc(nf.p2, c);
    let core = Mat2::rotation(p * s) * (Mat2::identity().scale((nf.p2 * c).cosh()) - I_TILDE.scale(sc * s));
    (core + nf.f().scale(sc)).scale((nf.p1 * c).exp())
}

pub fn normal_form(m: &Mat2) -> Result<NormalForm> {
    let disk = chiral_disk(m);
    if disk.radius < 1e-12 && (disk.center() - 1.0).norm() < 1e-12 {
        return Err(Error::Domain("the identity has no normal form".into()));
    }
    let mp = magnus_exponent_disk(&disk)?;
    let p = mp.value;
    if p >= PI {
        return Err(Error::Domain(format!("Magnus exponent {p} is not below π")));
    }
    let t = mp.direction;
    if disk.radius <= 1e-14 * disk.center().norm() {
        return Ok(NormalForm { p1: p, p2: 0.0, t, beta: 0.0, f_used: false });
    }
    let c = t.cos();
    let x = 2.0 * c * disk.radius * (-p * c).exp();
    let p2 = if c.abs() < 1e-12 { disk.radius * (-p * c).exp() } else { -(-x).ln_1p() / (2.0 * c) };
    let p2 = p2.clamp(0.0, p);
    let (_, _, gamma, delta) = m.parts();
    let beta = (-gamma).atan2(delta);
    Ok(NormalForm { p1: p - p2, p2, t, beta, f_used: true })
}

/// One row of an asymptotic table: `gap = π − p`, total variation `p`, and `‖μ‖`.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticRow {
    pub parameter: f64,
    pub gap: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticTable {
    pub name: String,
    pub rows: Vec<AsymptoticRow>,
    /// Fitted `γ` in `value ≈ C·gap^{−γ}`.
    pub exponent: f64,
    pub constant: f64,
    /// Closed-form leading constant where one is known.
    pub expected_exponent: f64,
    pub expected_constant: Option<f64>,
}

pub const EXAMPLE_NAMES: [&str; 6] =
    ["skew-loxodromic", "skew-loxodromic-ridge", "skew-elliptic", "critical", "parabolic", "hyperbolic"];

/// `sin(u/2) − √(cos u)·sinh(u/2)`.
fn lox_aux(u: f64) -> f64 {
    if u.abs() < 0.05 {
        let u2 = u * u;
        u * u2 * (1.0 / 12.0 + u2 * (1.0 / 96.0 + u2 * (311.0 / 161280.0 + u2 * 391.0 / 774144.0)))
    } else {
        (0.5 * u).sin() - u.cos().sqrt() * (0.5 * u).sinh()
    }
}

/// Skew-loxodromic `exp(βĨ)exp(αJ̃)` on the curve `α = u − ε`, `β = π − u`, `u = (π²ε)^{1/3}`.
pub fn skew_loxodromic_norm(eps: f64) -> Result<f64> {
    let u = (PI * PI * eps).cbrt();
    let alpha = u - eps;
    let s = (0.5 * u).sin();
    let ch = u.cos().sqrt();
    let diff = lox_aux(u) + ch * 2.0 * (0.25 * (u + alpha)).cosh() * (0.25 * eps).sinh();
    let sum = s + ch * (0.5 * alpha).sinh();
    let delta = 2.0 * diff * sum;
    Ok(ac_shifted(delta)? * (alpha.sinh() + alpha.cosh() * u.sin()))
}

/// Ridge of the skew-loxodromic family at `x = −1 + delta`; returns `(π − p, ‖μ‖)`.
pub fn skew_loxodromic_ridge(delta: f64) -> Result<(f64, f64)> {
    let x = delta - 1.0;
    let a = ac_shifted(delta)?;
    let s = as_shifted(delta)?;
    let disc = (a * a - 4.0 * x * (1.0 - x * s) * s).sqrt();
    let alpha = ((a + disc) / (2.0 * (1.0 - x * s))).acosh();
    let y = (a - disc) / (2.0 * s);
    // π − arccos(y) = arccos(−y)
    let beta_gap = (-y).acos();
    let beta = PI - beta_gap;
    let value = a * (alpha.sinh() + alpha.cosh() * beta.sin());
    Ok((beta_gap - alpha, value))
}

/// Ridge of the skew-elliptic family `exp(βĨ)exp(αP̃)` at `x = −1 + delta`; returns `(π − p, ‖μ‖)`.
pub fn skew_elliptic_ridge(delta: f64) -> Result<(f64, f64)> {
    let a = ac_shifted(delta)?;
    let s = as_shifted(delta)?;
    let at = (a - 1.0) / s;
    // x + AT = −1 + w
    let w = delta + at;
    let alpha = 2.0 * at / (w * (2.0 - w)).sqrt();
    let beta_gap = 2.0 * (0.5 * w).sqrt().asin();
    let beta = PI - beta_gap;
    let value = a * (beta.sin() + 0.5 * alpha * beta.cos() + 0.5 * alpha);
    Ok((beta_gap - alpha, value))
}

/// `‖log exp(βĨ)exp(αP̃)‖` from the closed form.
pub fn skew_elliptic_norm(alpha: f64, beta: f64) -> Result<f64> {
    let x = beta.cos() - 0.5 * alpha * beta.sin();
    Ok(ac(x)? * (beta.sin() + 0.5 * alpha * beta.cos() + 0.5 * alpha))
}

/// `‖log exp(βĨ)exp(αJ̃)‖` from the closed form.
pub fn skew_loxodromic_closed(alpha: f64, beta: f64) -> Result<f64> {
    Ok(ac(alpha.cosh() * beta.cos())? * (alpha.sinh() + alpha.cosh() * beta.sin()))
}

/// `‖μ_L(Φ|[0,p])‖` for the parabolic development, `p = π − eps`.
pub fn parabolic_norm(eps: f64) -> Result<f64> {
    let p = PI - eps;
    let delta = 2.0 * (0.5 * eps).sin().powi(2) + p * eps.sin();
    Ok(ac_shifted(delta)? * (p.sin() - p * p.cos() + p))
}

/// `‖log W(p, p sin t)‖` with `sin t = p/π`, `p = π − eps`.
pub fn hyperbolic_norm(eps: f64) -> Result<f64> {
    let p = PI - eps;
    let s = p / PI;
    let c = (eps * (2.0 * PI - eps)).sqrt() / PI;
    let eta = PI - p * s;
    let sc = sinhc(p, c);
    let delta = 2.0 * (0.5 * eta).sin().powi(2) - 2.0 * (0.5 * p * c).sinh().powi(2) * eta.cos() + sc * s * eta.sin();
    let other = ((p * c).cosh() * eta.sin() + sc * eta.cos() * s).abs() + sc;
    Ok(ac_shifted(delta)? * other)
}

/// `‖μ_L(tΦ)‖ = π(1/√(1−t²) − 1)(1+t)` for the critical measure, `t = 1 − eps/π`.
pub fn critical_norm(eps: f64) -> f64 {
    let one_minus = eps / PI;
    let t = 1.0 - one_minus;
    PI * (1.0 / (one_minus * (1.0 + t)).sqrt() - 1.0) * (1.0 + t)
}

/// `‖μ_{L[n]}(Φ)‖ = C(2m, m)/4^m·π`, `m = ⌊n/2⌋`, for the critical measure.
pub fn critical_term_norm(n: usize) -> f64 {
    if n < 2 {
        return if n == 1 { 0.0 } else { f64::NAN };
    }
    let m = n / 2;
    let mut v = PI;
    for j in 1..=m {
        v *= (2 * j - 1) as f64 / (2 * j) as f64;
    }
    v
}

fn ccc_c(x: Complex64) -> Complex64 {
    if x.norm() < 1e-4 {
        Complex64::new(1.0, 0.0) + x / 2.0 + x * x / 24.0 + x * x * x / 720.0
    } else {
        x.sqrt().cosh()
    }
}

fn sss_c(x: Complex64) -> Complex64 {
    if x.norm() < 1e-4 {
        Complex64::new(1.0, 0.0) + x / 6.0 + x * x / 120.0 + x * x * x / 5040.0
    } else {
        let r = x.sqrt();
        r.sinh() / r
    }
}

fn ac_c(x: Complex64) -> Complex64 {
    let u = x - 1.0;
    if u.norm() < 1e-4 {
        AC_SERIES.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, k| acc * u + k)
    } else {
        x.acos() / (Complex64::new(1.0, 0.0) - x * x).sqrt()
    }
}

/// Taylor coefficients in `t` of `log W(πt, π)`, i.e. the terms `μ_{L[n]}(Φ)` of the critical
/// measure for `n ≤ nmax`, from a discrete Cauchy integral on `|t| = rho`.
pub fn critical_terms_cauchy(nmax: usize, rho: f64, samples: usize) -> Vec<Mat2> {
    type C4 = [Complex64; 4];
    let logw = |t: Complex64| -> C4 {
        // W(πt, π) = −(CCC(x)Id + SSS(x)(−πĨ + πtK̃)), x = π²(t² − 1)
        let x = (t * t - 1.0) * (PI * PI);
        let cc = ccc_c(x);
        let ss = sss_c(x);
        let pt = t * PI;
        let w = [-cc, -ss * (pt + PI), -ss * (pt - PI), -cc];
        let half = (w[0] + w[3]) * 0.5;
        let k = ac_c(half);
        [(w[0] - half) * k, w[1] * k, w[2] * k, (w[3] - half) * k]
    };
    let vals: Vec<C4> = (0..samples)
        .map(|j| logw(Complex64::from_polar(rho, 2.0 * PI * j as f64 / samples as f64)))
        .collect();
    (0..=nmax)
        .map(|n| {
            let mut acc = [Complex64::new(0.0, 0.0); 4];
            for (j, v) in vals.iter().enumerate() {
                let e = Complex64::from_polar(1.0, -2.0 * PI * (n * j) as f64 / samples as f64);
                for i in 0..4 {
                    acc[i] += v[i] * e;
                }
            }
            let s = 1.0 / (samples as f64 * rho.powi(n as i32));
            Mat2::new(acc[0].re * s, acc[1].re * s, acc[2].re * s, acc[3].re * s)
        })
        .collect()
}

fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn table(name: &str, rows: Vec<AsymptoticRow>, expected_exponent: f64, expected_constant: Option<f64>) -> AsymptoticTable {
    let xs: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let (slope, constant) = loglog_fit(&xs, &ys);
    AsymptoticTable { name: name.into(), rows, exponent: -slope, constant, expected_exponent, expected_constant }
}

/// Blow-up table of `‖μ‖` as the total variation approaches π, with a log-log fit on the tail.
pub fn example_asymptotics(name: &str) -> Result<AsymptoticTable> {
    let eps_rows = |f: &dyn Fn(f64) -> Result<f64>, lo: f64, hi: f64| -> Result<Vec<AsymptoticRow>> {
        geometric_grid(lo, hi, 13)
            .into_iter()
            .map(|e| Ok(AsymptoticRow { parameter: PI - e, gap: e, value: f(e)? }))
            .collect()
    };
    let ridge_rows = |f: &dyn Fn(f64) -> Result<(f64, f64)>, lo: f64, hi: f64| -> Result<Vec<AsymptoticRow>> {
        geometric_grid(lo, hi, 13)
            .into_iter()
            .map(|d| {
                let (gap, value) = f(d)?;
                Ok(AsymptoticRow { parameter: d, gap, value })
            })
            .collect()
    };
    let sqrt2pi32 = 2f64.sqrt() * PI.powf(1.5);
    match name {
        "skew-loxodromic" => Ok(table(
            name,
            eps_rows(&skew_loxodromic_norm, 1e-12, 1e-9)?,
            1.0 / 3.0,
            Some((12.0 * PI.powf(8.0 / 3.0) / (PI * PI + 6.0)).sqrt()),
        )),
        "skew-loxodromic-ridge" => Ok(table(
            name,
            ridge_rows(&skew_loxodromic_ridge, 1e-13, 1e-10)?,
            1.0 / 3.0,
            Some(2.0 * PI * 3f64.powf(-1.0 / 3.0)),
        )),
        "skew-elliptic" => Ok(table(name, ridge_rows(&skew_elliptic_ridge, 1e-13, 1e-10)?, 1.0 / 3.0, None)),
        "critical" => Ok(table(name, eps_rows(&|e| Ok(critical_norm(e)), 1e-10, 1e-7)?, 0.5, Some(sqrt2pi32))),
        "parabolic" => Ok(table(name, eps_rows(&parabolic_norm, 1e-10, 1e-7)?, 0.5, Some(sqrt2pi32))),
        "hyperbolic" => Ok(table(name, eps_rows(&hyperbolic_norm, 1e-10, 1e-7)?, 0.5, Some(sqrt2pi32))),
        _ => Err(Error::Usage(format!("unknown example {name:?}; expected one of {}", EXAMPLE_NAMES.join(", ")))),
    }
}

/// The matrix `diag(−√(1+z²)−z, −√(1+z²)+z)` with `tan z = z`, `z ∈ (π, 3π/2)`.
pub fn z_matrix() -> Result<(f64, Mat2)> {
    let z = bisect(|z: f64| z.sin() - z * z.cos(), PI + 0.1, 1.5 * PI - 1e-9, 1e-15)?;
    let s = (1.0 + z * z).sqrt();
    Ok((z, Mat2::new(-s - z, 0.0, 0.0, -s + z)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn basic_values() {
        assert!((ac(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(ac(1.0).unwrap(), 1.0);
        assert!(ac(-1.0).is_err());
        let (z, m) = z_matrix().unwrap();
        assert!((magnus_exponent(&m).unwrap() - z).abs() < 1e-9);
        assert_eq!(classify(&m).unwrap(), Class::Parabolic);
    }
}
