//! Time-ordered exponentials, Magnus terms and λ-resolvent terms of step measures, generic
//! over the truncated free algebra and real 2×2 matrices.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::free_algebra::{NCPolynomial, Q};
use crate::gl2::Mat2;
use crate::magnus_core::{factorial_q, lambda_weight, mu_coefficients};
use crate::{Error, Result};

/// Scalars of a carrier: durations, λ and combinatorial weights.
pub trait Scalar: Clone + Send + Sync + std::fmt::Debug {
    fn from_q(q: &Q) -> Self;
    fn to_f64(&self) -> f64;
    fn smul(&self, o: &Self) -> Self;
    fn sadd(&self, o: &Self) -> Self;
    fn is_positive_(&self) -> bool;
}

impl Scalar for f64 {
    fn from_q(q: &Q) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn smul(&self, o: &Self) -> Self {
        self * o
    }
    fn sadd(&self, o: &Self) -> Self {
        self + o
    }
    fn is_positive_(&self) -> bool {
        *self > 0.0
    }
}

impl Scalar for Q {
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn smul(&self, o: &Self) -> Self {
        self * o
    }
    fn sadd(&self, o: &Self) -> Self {
        self + o
    }
    fn is_positive_(&self) -> bool {
        self.is_positive()
    }
}

/// Unital algebra with a submultiplicative norm and an exponential.
pub trait Carrier: Clone + Send + Sync {
    type S: Scalar;
    /// Default cap on the order of Magnus terms from the composition expansion.
    const DEFAULT_CAP: usize;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, s: &Self::S) -> Self;
    fn norm(&self) -> f64;
    fn exp(&self) -> Result<Self>;
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Self::S::from_q(&-Q::one())))
    }
}

impl Carrier for Mat2 {
    type S = f64;
    const DEFAULT_CAP: usize = 12;
    fn zero_like(&self) -> Self {
        Mat2::zero()
    }
    fn one_like(&self) -> Self {
        Mat2::identity()
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn scale(&self, s: &f64) -> Self {
        Mat2::scale(self, *s)
    }
    fn norm(&self) -> f64 {
        self.norm2()
    }
    fn exp(&self) -> Result<Self> {
        Ok(Mat2::exp(self))
    }
}

/// Polynomials must carry a truncation degree so that exponentials are finite.
impl Carrier for NCPolynomial {
    type S = Q;
    const DEFAULT_CAP: usize = 8;
    fn zero_like(&self) -> Self {
        NCPolynomial::zero().with_cap(self.cap())
    }
    fn one_like(&self) -> Self {
        NCPolynomial::one().with_cap(self.cap())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        NCPolynomial::mul(self, o)
    }
    fn scale(&self, s: &Q) -> Self {
        NCPolynomial::scale(self, s)
    }
    fn norm(&self) -> f64 {
        Scalar::to_f64(&self.l1_norm())
    }
    fn exp(&self) -> Result<Self> {
        let n = self.cap().ok_or_else(|| Error::Usage("exact carrier needs a truncation degree".into()))?;
        self.truncated_exp(n)
    }
}

#[derive(Clone, Debug)]
pub struct Step<C: Carrier> {
    pub element: C,
    pub duration: C::S,
}

/// Finite concatenation of constant densities, in time order.
#[derive(Clone, Debug)]
pub struct StepMeasure<C: Carrier> {
    pub steps: Vec<Step<C>>,
}

impl<C: Carrier> StepMeasure<C> {
    pub fn new(steps: Vec<(C, C::S)>) -> Result<Self> {
        let steps: Vec<Step<C>> = steps.into_iter().map(|(element, duration)| Step { element, duration }).collect();
        if let Some(s) = steps.iter().find(|s| !s.duration.is_positive_()) {
            return Err(Error::Domain(format!("step duration {:?} is not positive", s.duration)));
        }
        Ok(StepMeasure { steps })
    }
    pub fn len(&self) -> usize {
        self.steps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
    pub fn total_variation(&self) -> f64 {
        self.steps.iter().map(|s| s.duration.to_f64() * s.element.norm()).sum()
    }
    /// `φ₁.φ₂`: `self` first.
    pub fn concat(&self, o: &Self) -> Self {
        let mut steps = self.steps.clone();
        steps.extend(o.steps.iter().cloned());
        StepMeasure { steps }
    }
    /// Time reversal `φ†`.
    pub fn reversed(&self) -> Self {
        StepMeasure { steps: self.steps.iter().rev().cloned().collect() }
    }
    /// Time reversal with negated elements; its time-ordered exponential is the inverse.
    pub fn inverse_path(&self) -> Self {
        let m1 = C::S::from_q(&-Q::one());
        StepMeasure {
            steps: self.steps.iter().rev().map(|s| Step { element: s.element.scale(&m1), duration: s.duration.clone() }).collect(),
        }
    }
    pub fn scaled(&self, t: &C::S) -> Self {
        StepMeasure {
            steps: self.steps.iter().map(|s| Step { element: s.element.scale(t), duration: s.duration.clone() }).collect(),
        }
    }
    /// Splits step `i` into two halves.
    pub fn split_step(&self, i: usize) -> Self {
        let half = C::S::from_q(&Q::new(1.into(), 2.into()));
        let mut steps = Vec::with_capacity(self.steps.len() + 1);
        for (j, s) in self.steps.iter().enumerate() {
            if j == i {
                let d = s.duration.smul(&half);
                steps.push(Step { element: s.element.clone(), duration: d.clone() });
                steps.push(Step { element: s.element.clone(), duration: d });
            } else {
                steps.push(s.clone());
            }
        }
        StepMeasure { steps }
    }
    fn probe(&self) -> Result<&C> {
        self.steps.first().map(|s| &s.element).ok_or_else(|| Error::Usage("empty step measure".into()))
    }
}

fn step_exp<C: Carrier>(s: &Step<C>) -> Result<C> {
    s.element.scale(&s.duration).exp()
}

/// `exp(s₁X₁)···exp(s_mX_m)`: earlier steps on the left.
pub fn rexp<C: Carrier>(phi: &StepMeasure<C>) -> Result<C> {
    let mut acc = phi.probe()?.one_like();
    for s in &phi.steps {
        acc = acc.mul(&step_exp(s)?);
    }
    Ok(acc)
}

/// `exp(s_mX_m)···exp(s₁X₁)`: later steps on the left.
pub fn lexp<C: Carrier>(phi: &StepMeasure<C>) -> Result<C> {
    let mut acc = phi.probe()?.one_like();
    for s in &phi.steps {
        acc = step_exp(s)?.mul(&acc);
    }
    Ok(acc)
}

/// All weak compositions of `k` into `m` parts, in lexicographic order.
pub fn weak_compositions(k: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 1 {
            cur.push(k);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for j in (0..=k).rev() {
            cur.push(j);
            rec(k - j, m - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(k, m, &mut Vec::new(), &mut out);
    out
}

fn binom_f(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Σ_σ c[des σ]·Y_{σ(1)}···Y_{σ(k)}` over all permutations, by a subset dynamic program.
pub fn descent_sum<C: Carrier>(args: &[C], coef: &[C::S]) -> C {
    let k = args.len();
    let zero = args[0].zero_like();
    if k == 1 {
        return args[0].scale(&coef[0]);
    }
    let full = (1usize << k) - 1;
    // dp[mask][last][d]
    let idx = |mask: usize, last: usize| mask * k + last;
    let mut dp: Vec<Vec<Option<C>>> = vec![Vec::new(); (full + 1) * k];
    for (i, a) in args.iter().enumerate() {
        let mut v = vec![None; k];
        v[0] = Some(a.clone());
        dp[idx(1 << i, i)] = v;
    }
    for mask in 1..full {
        for last in 0..k {
            if mask & (1 << last) == 0 {
                continue;
            }
            let cur = std::mem::take(&mut dp[idx(mask, last)]);
            if cur.is_empty() {
                continue;
            }
            for (j, a) in args.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let step = usize::from(last > j);
                let slot = &mut dp[idx(mask | (1 << j), j)];
                if slot.is_empty() {
                    *slot = vec![None; k];
                }
                for (d, p) in cur.iter().enumerate() {
                    if let Some(p) = p {
                        let prod = p.mul(a);
                        let e = &mut slot[d + step];
                        *e = Some(match e.take() {
                            None => prod,
                            Some(q) => q.add(&prod),
                        });
                    }
                }
            }
        }
    }
    let mut out = zero;
    for last in 0..k {
        for (d, p) in dp[idx(full, last)].iter().enumerate() {
            if let Some(p) = p {
                out = out.add(&p.scale(&coef[d]));
            }
        }
    }
    out
}

fn check_budget(k: usize, m: usize, cap: usize) -> Result<()> {
    if k > cap {
        return Err(Error::Resource(format!("order {k} exceeds the cap {cap}")));
    }
    let work = binom_f(k + m - 1, m - 1) * (1u64 << k) as f64 * (k * k) as f64;
    if work > 5e10 {
        return Err(Error::Resource(format!("{m} steps at order {k} exceed the work budget")));
    }
    Ok(())
}

/// Contracts a multilinear form given by descent coefficients against the step measure.
fn contract<C: Carrier>(phi: &StepMeasure<C>, k: usize, coef: &[C::S], cap: usize) -> Result<C> {
    let zero = phi.probe()?.zero_like();
    if k == 0 {
        return Err(Error::Domain("order must be at least 1".into()));
    }
    check_budget(k, phi.len(), cap)?;
    let comps = weak_compositions(k, phi.len());
    let parts: Vec<C> = comps
        .par_iter()
        .map(|js| {
            let mut w = C::S::from_q(&Q::one());
            let mut args = Vec::with_capacity(k);
            for (s, &j) in phi.steps.iter().zip(js) {
                for _ in 0..j {
                    args.push(s.element.clone());
                    w = w.smul(&s.duration);
                }
                w = w.smul(&C::S::from_q(&(Q::one() / factorial_q(j))));
            }
            descent_sum(&args, coef).scale(&w)
        })
        .collect();
    Ok(parts.iter().fold(zero, |acc, p| acc.add(p)))
}

/// `μ_{R[k]}(φ)` by contracting μ_k over weak compositions of `k` into the steps.
pub fn magnus_term<C: Carrier>(phi: &StepMeasure<C>, k: usize) -> Result<C> {
    magnus_term_capped(phi, k, C::DEFAULT_CAP)
}

pub fn magnus_term_capped<C: Carrier>(phi: &StepMeasure<C>, k: usize, cap: usize) -> Result<C> {
    let coef: Vec<C::S> = mu_coefficients(k.max(1)).iter().map(C::S::from_q).collect();
    contract(phi, k, &coef, cap)
}

/// `μ_{L[k]}(φ) = μ_{R[k]}(φ†)`.
pub fn magnus_term_left<C: Carrier>(phi: &StepMeasure<C>, k: usize) -> Result<C> {
    magnus_term(&phi.reversed(), k)
}

/// `R^(λ)_{R[k]}(φ)` by contracting the λ-resolvent polynomial over weak compositions.
pub fn resolvent_term_direct<C: Carrier>(phi: &StepMeasure<C>, lambda: &C::S, k: usize) -> Result<C> {
    let coef: Vec<C::S> = (0..k)
        .map(|d| {
            let w = lambda_weight(k - 1 - d, d);
            let mut acc = C::S::from_q(&Q::zero());
            let mut pw = C::S::from_q(&Q::one());
            for c in &w {
                acc = acc.sadd(&pw.smul(&C::S::from_q(c)));
                pw = pw.smul(lambda);
            }
            acc
        })
        .collect();
    contract(phi, k, &coef, C::DEFAULT_CAP)
}

/// Coefficients `L_0..=L_n` of `lexp(tφ)` as a power series in `t`.
pub fn lexp_series<C: Carrier>(phi: &StepMeasure<C>, n: usize) -> Result<Vec<C>> {
    let one = phi.probe()?.one_like();
    let mut acc = vec![one.zero_like(); n + 1];
    acc[0] = one.clone();
    for s in &phi.steps {
        let x = s.element.scale(&s.duration);
        let mut ex = Vec::with_capacity(n + 1);
        ex.push(one.clone());
        for j in 1..=n {
            let prev: &C = &ex[j - 1];
            ex.push(prev.mul(&x).scale(&C::S::from_q(&Q::new(1.into(), (j as i64).into()))));
        }
        // later steps multiply on the left
        let mut next = vec![one.zero_like(); n + 1];
        for (i, e) in ex.iter().enumerate() {
            for (j, a) in acc.iter().enumerate().take(n + 1 - i) {
                next[i + j] = next[i + j].add(&e.mul(a));
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Run decomposition: a permutation with forced descents splits into decreasing runs, and the
/// simplex integral of decreasing runs factors into terms of `lexp`. Returns `T[k][q]`, the sum
/// over compositions of `k` into `q` parts of `∏ (−1)^{r−1} L_r`.
fn run_table<C: Carrier>(phi: &StepMeasure<C>, n: usize) -> Result<Vec<Vec<C>>> {
    let l = lexp_series(phi, n)?;
    let zero = l[0].zero_like();
    let m1 = C::S::from_q(&-Q::one());
    let signed: Vec<C> = l.iter().enumerate().map(|(r, x)| if r % 2 == 0 { x.scale(&m1) } else { x.clone() }).collect();
    let mut t = vec![vec![zero.clone(); n + 1]; n + 1];
    for k in 1..=n {
        t[k][1] = signed[k].clone();
        for q in 2..=k {
            let mut acc = zero.clone();
            for r in 1..=k - q + 1 {
                acc = acc.add(&signed[r].mul(&t[k - r][q - 1]));
            }
            t[k][q] = acc;
        }
    }
    Ok(t)
}

/// `R^(λ)_{R[k]}(φ)` for `k = 1..=n` from the run decomposition.
pub fn resolvent_terms<C: Carrier>(phi: &StepMeasure<C>, lambda: &C::S, n: usize) -> Result<Vec<C>> {
    let t = run_table(phi, n)?;
    let zero = phi.probe()?.zero_like();
    Ok((1..=n)
        .map(|k| {
            let mut acc = zero.clone();
            let mut pw = C::S::from_q(&Q::one());
            for q in 1..=k {
                acc = acc.add(&t[k][q].scale(&pw));
                pw = pw.smul(lambda);
            }
            acc
        })
        .collect())
}

pub fn resolvent_term<C: Carrier>(phi: &StepMeasure<C>, lambda: &C::S, k: usize) -> Result<C> {
    if k == 0 {
        return Err(Error::Domain("order must be at least 1".into()));
    }
    Ok(resolvent_terms(phi, lambda, k)?.pop().unwrap())
}

/// `μ_{R[k]}(φ)` for `k = 1..=n` from the run decomposition integrated over λ.
pub fn magnus_terms_runs<C: Carrier>(phi: &StepMeasure<C>, n: usize) -> Result<Vec<C>> {
    let t = run_table(phi, n)?;
    let zero = phi.probe()?.zero_like();
    Ok((1..=n)
        .map(|k| {
            (1..=k).fold(zero.clone(), |acc, q| {
                acc.add(&t[k][q].scale(&C::S::from_q(&Q::new(1.into(), (q as i64).into()))))
            })
        })
        .collect())
}

/// Partial Magnus sum with per-term norms.
#[derive(Clone, Debug)]
pub struct PartialSum<C: Carrier> {
    pub sum: C,
    pub norms: Vec<f64>,
    /// Last ratio of consecutive nonzero term norms.
    pub ratio: Option<f64>,
}

pub fn magnus_partial_sum<C: Carrier>(phi: &StepMeasure<C>, kmax: usize) -> Result<PartialSum<C>> {
    let terms = if kmax <= C::DEFAULT_CAP {
        (1..=kmax).map(|k| magnus_term(phi, k)).collect::<Result<Vec<C>>>()?
    } else {
        magnus_terms_runs(phi, kmax)?
    };
    let zero = phi.probe()?.zero_like();
    let sum = terms.iter().fold(zero, |a, t| a.add(t));
    let norms: Vec<f64> = terms.iter().map(|t| t.norm()).collect();
    let nz: Vec<f64> = norms.iter().copied().filter(|v| *v > 0.0).collect();
    let ratio = if nz.len() >= 2 { Some(nz[nz.len() - 1] / nz[nz.len() - 2]) } else { None };
    Ok(PartialSum { sum, norms, ratio })
}

/// `‖(λ + (1−λ)·rexp φ)·Σ_{k≤K} R_k − (rexp φ − 1)‖`.
pub fn resolvent_identity_check<C: Carrier>(phi: &StepMeasure<C>, lambda: &C::S, kmax: usize) -> Result<f64> {
    let a = rexp(phi)?;
    let one = a.one_like();
    let terms = resolvent_terms(phi, lambda, kmax)?;
    let sum = terms.iter().fold(one.zero_like(), |acc, t| acc.add(t));
    let onem = C::S::from_q(&Q::one()).sadd(&lambda.smul(&C::S::from_q(&-Q::one())));
    let factor = one.scale(lambda).add(&a.scale(&onem));
    Ok(factor.mul(&sum).sub(&a.sub(&one)).norm())
}

/// Truncated `μ_R(φ) = Σ_{k≤n} μ_{R[k]}(φ)` for the exact carrier.
pub fn magnus_full_truncated(phi: &StepMeasure<NCPolynomial>, n: usize) -> Result<NCPolynomial> {
    let zero = phi.probe()?.zero_like();
    (1..=n).try_fold(zero, |acc, k| Ok(acc.add(&magnus_term_capped(phi, k, n.max(NCPolynomial::DEFAULT_CAP))?)))
}

/// Residual of `μ_R(φ₁.φ₂.φ₃) = μ_R(φ₁.(μ_R(φ₂) as one unit step).φ₃)` under degree-`n` truncation.
pub fn contraction_identity_check(
    phi1: &StepMeasure<NCPolynomial>,
    phi2: &StepMeasure<NCPolynomial>,
    phi3: &StepMeasure<NCPolynomial>,
    n: usize,
) -> Result<NCPolynomial> {
    if n > 5 {
        return Err(Error::Resource(format!("truncation degree {n} exceeds 5")));
    }
    let cap = |p: &StepMeasure<NCPolynomial>| StepMeasure {
        steps: p.steps.iter().map(|s| Step { element: s.element.clone().with_cap(Some(n)), duration: s.duration.clone() }).collect(),
    };
    let (p1, p2, p3) = (cap(phi1), cap(phi2), cap(phi3));
    let lhs = magnus_full_truncated(&p1.concat(&p2).concat(&p3), n)?;
    let mut mid = p1.clone();
    if !p2.is_empty() {
        let m2 = magnus_full_truncated(&p2, n)?;
        if !m2.is_zero() {
            mid.steps.push(Step { element: m2, duration: Q::one() });
        }
    }
    let rhs = magnus_full_truncated(&mid.concat(&p3), n)?;
    Ok(&lhs - &rhs)
}

/// Residual of `exp(ad Ω)Y = A·Y·A⁻¹` with `Ω` the partial Magnus sum and `A = rexp φ`.
pub fn adjoint_check(phi: &StepMeasure<Mat2>, kmax: usize, y: &Mat2) -> Result<f64> {
    let omega = magnus_partial_sum(phi, kmax)?.sum;
    let a = rexp(phi)?;
    let target = a * *y * a.inverse()?;
    let mut term = *y;
    let mut acc = *y;
    for j in 1..60 {
        term = omega.commutator(&term).scale(1.0 / j as f64);
        acc = acc + term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    Ok(acc.dist(&target))
}

/// Midpoint discretization of a density on `[a, b]` into `n` steps.
pub fn discretize(f: impl Fn(f64) -> Mat2, a: f64, b: f64, n: usize) -> Result<StepMeasure<Mat2>> {
    let h = (b - a) / n as f64;
    StepMeasure::new((0..n).map(|i| (f(a + (i as f64 + 0.5) * h), h)).collect())
}

/// The critical measure `exp(θĨ)K̃exp(−θĨ)dθ` on `[0, π]` in `n` steps.
pub fn critical_measure(n: usize) -> Result<StepMeasure<Mat2>> {
    use crate::gl2::K_TILDE;
    discretize(|th| Mat2::rotation(th) * K_TILDE * Mat2::rotation(-th), 0.0, std::f64::consts::PI, n)
}

/// Parses one step per line: `a,b,c,d;duration`.
pub fn parse_mat2_measure(text: &str) -> Result<StepMeasure<Mat2>> {
    let mut steps = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (m, d) = line.split_once(';').ok_or_else(|| Error::Parse(format!("missing ';' in {line:?}")))?;
        let d: f64 = d.trim().parse().map_err(|e| Error::Parse(format!("duration {d:?}: {e}")))?;
        steps.push((Mat2::parse(m)?, d));
    }
    StepMeasure::new(steps)
}

/// Parses one step per line: `<polynomial>;duration`, truncated at degree `cap`.
pub fn parse_poly_measure(text: &str, cap: usize) -> Result<StepMeasure<NCPolynomial>> {
    let mut steps = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (p, d) = line.rsplit_once(';').ok_or_else(|| Error::Parse(format!("missing ';' in {line:?}")))?;
        let d = crate::free_algebra::parse_rational(d.trim())?;
        let p = NCPolynomial::parse(p.trim())?;
        if !p.constant_term().is_zero() {
            return Err(Error::Domain("step elements must have zero constant term".into()));
        }
        steps.push((p.with_cap(Some(cap)), d));
    }
    StepMeasure::new(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_algebra::q;

    #[test]
    fn compositions_count() {
        assert_eq!(weak_compositions(3, 2).len(), 4);
        assert_eq!(weak_compositions(2, 3).len(), 6);
    }

    #[test]
    fn two_steps_give_bch() {
        let x = NCPolynomial::var(1).with_cap(Some(4));
        let y = NCPolynomial::var(2).with_cap(Some(4));
        let phi = StepMeasure::new(vec![(x, Q::one()), (y, Q::one())]).unwrap();
        let m2 = magnus_term(&phi, 2).unwrap();
        assert_eq!(m2.coeff_of(&[1, 2]), q(1, 2));
        assert_eq!(m2.coeff_of(&[2, 1]), q(-1, 2));
        let runs = magnus_terms_runs(&phi, 4).unwrap();
        for k in 1..=4 {
            assert_eq!(runs[k - 1], magnus_term(&phi, k).unwrap());
        }
    }
}
