//! Magnus commutators, BCH terms, Eulerian and Bernoulli numbers, Goldberg
//! coefficients, the absolute characteristic Θ and the λ-resolvent polynomials.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::bounds::RationalSeries;
use crate::free_algebra::{q, qi, LieExpression, LieTree, NCPolynomial, Word, Q};
use crate::{Error, Result};

/// Default cap on `k` for k!-sized enumerations.
pub const DEFAULT_CAP: usize = 9;

fn check_cap(k: usize, cap: usize) -> Result<()> {
    if k > cap {
        return Err(Error::Resource(format!("k = {k} exceeds the cap {cap}")));
    }
    Ok(())
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

pub fn factorial_q(n: usize) -> Q {
    Q::from_integer(factorial(n))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_table(n: usize) -> Vec<Q> {
    let mut b: Vec<Q> = Vec::with_capacity(n + 1);
    for j in 0..=n {
        if j == 0 {
            b.push(Q::one());
            continue;
        }
        // sum_{k<=j} C(j+1,k) B_k = 0
        let mut s = Q::zero();
        for (k, bk) in b.iter().enumerate() {
            s += Q::from_integer(binomial(j + 1, k)) * bk;
        }
        b.push(-s / Q::from_integer(BigInt::from(j + 1)));
    }
    b
}

pub fn bernoulli(j: usize) -> Q {
    bernoulli_table(j).pop().unwrap()
}

/// `β_j = B_j / j!`.
pub fn beta(j: usize) -> Q {
    bernoulli(j) / factorial_q(j)
}

pub fn beta_table(n: usize) -> Vec<Q> {
    bernoulli_table(n).into_iter().enumerate().map(|(j, b)| b / factorial_q(j)).collect()
}

/// Row `A(n, 0..n)` of the Eulerian triangle.
pub fn eulerian_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 2..=n {
        let mut next = vec![BigInt::zero(); k];
        for m in 0..k {
            let mut v = BigInt::zero();
            if m < row.len() {
                v += BigInt::from(m + 1) * &row[m];
            }
            if m >= 1 && m - 1 < row.len() {
                v += BigInt::from(k - m) * &row[m - 1];
            }
            next[m] = v;
        }
        row = next;
    }
    if n == 0 {
        return vec![];
    }
    row
}

pub fn eulerian(n: usize, m: usize) -> BigInt {
    eulerian_row(n).get(m).cloned().unwrap_or_else(BigInt::zero)
}

/// Coefficients of `G_n(u,v) = Σ_m A(n,m) u^m v^{n-1-m} / n!`, indexed by `m`.
pub fn eulerian_poly(n: usize) -> Vec<Q> {
    let f = factorial_q(n);
    eulerian_row(n).into_iter().map(|a| Q::from_integer(a) / &f).collect()
}

/// Lexicographic successor; false once the last permutation is reached.
pub fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Coefficient `(-1)^d d! (k-1-d)! / k!` of a permutation with `d` descents in μ_k.
pub fn mu_coefficients(k: usize) -> Vec<Q> {
    let kf = factorial_q(k);
    (0..k)
        .map(|d| {
            let c = factorial_q(d) * factorial_q(k - 1 - d) / &kf;
            if d % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect()
}

/// μ_k(X_1,…,X_k) from the descent formula.
pub fn magnus_commutator_direct(k: usize) -> Result<NCPolynomial> {
    magnus_commutator_direct_capped(k, DEFAULT_CAP)
}

pub fn magnus_commutator_direct_capped(k: usize, cap: usize) -> Result<NCPolynomial> {
    check_cap(k, cap)?;
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let coef = mu_coefficients(k);
    let mut perm: Vec<u8> = (1..=k as u8).collect();
    let mut terms = Vec::new();
    loop {
        let w = Word(perm.clone());
        let d = w.des();
        terms.push((w, coef[d].clone()));
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(NCPolynomial::from_terms(terms))
}

/// μ_k evaluated on arbitrary polynomial arguments via the descent formula.
pub fn mu_apply(args: &[NCPolynomial]) -> NCPolynomial {
    let k = args.len();
    if k == 0 {
        return NCPolynomial::zero();
    }
    let coef = mu_coefficients(k);
    let mut perm: Vec<u8> = (0..k as u8).collect();
    let mut out = NCPolynomial::zero();
    loop {
        let d = Word(perm.clone()).des();
        let mut prod = args[perm[0] as usize].clone();
        for &i in &perm[1..] {
            prod = prod.mul(&args[i as usize]);
        }
        out.add_scaled(&prod, &coef[d]);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

/// All set partitions of `items` (blocks keep the input order).
pub fn set_partitions(items: &[u8]) -> Vec<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    let n = items.len();
    if n == 0 {
        out.push(vec![]);
        return out;
    }
    let mut rgs = vec![0usize; n];
    loop {
        let nb = rgs.iter().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); nb];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(items[i]);
        }
        out.push(blocks);
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let m = rgs[..i].iter().max().copied().unwrap();
            if rgs[i] <= m {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// All ordered set partitions of `items`, blocks ascending when `items` is.
pub fn ordered_set_partitions(items: &[u8]) -> Vec<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    for p in set_partitions(items) {
        let mut idx: Vec<u8> = (0..p.len() as u8).collect();
        loop {
            out.push(idx.iter().map(|&i| p[i as usize].clone()).collect());
            if !next_permutation(&mut idx) {
                break;
            }
        }
    }
    out
}

/// μ_k as a Lie expression from the recursion in the first variable:
/// μ_k = Σ over ordered partitions of {2..k} of β_s (ad μ(I_1))…(ad μ(I_s)) X_1.
pub fn magnus_commutator_recursive(k: usize) -> Result<LieExpression> {
    magnus_commutator_recursive_capped(k, DEFAULT_CAP)
}

pub fn magnus_commutator_recursive_capped(k: usize, cap: usize) -> Result<LieExpression> {
    check_cap(k, cap)?;
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let betas = beta_table(k);
    // memo[l] = μ_l on letters 1..=l
    let mut memo: Vec<LieExpression> = vec![LieExpression::new(), LieExpression::leaf(1)];
    for l in 2..=k {
        let rest: Vec<u8> = (2..=l as u8).collect();
        let mut acc = LieExpression::new();
        for part in ordered_set_partitions(&rest) {
            let s = part.len();
            if betas[s].is_zero() {
                continue;
            }
            let mut e = LieExpression::leaf(1);
            for block in part.iter().rev() {
                let sub = relabel_expr(&memo[block.len()], block);
                e = sub.bracket(&e);
            }
            acc.extend(e.scale(&betas[s]));
        }
        memo.push(acc.canonicalize());
    }
    Ok(memo.swap_remove(k))
}

/// Maps letter `i` (1-based) of `e` to `block[i-1]`.
pub fn relabel_expr(e: &LieExpression, block: &[u8]) -> LieExpression {
    let f = |i: u8| block[i as usize - 1];
    LieExpression { terms: e.terms.iter().map(|(c, t)| (c.clone(), t.relabel(&f))).collect() }
}

/// Δ_n(X,Y) = Σ_j μ_n(X^j, Y^{n-j}) / (j!(n-j)!) with X = X1, Y = X2.
pub fn bch_term(n: usize) -> Result<NCPolynomial> {
    bch_term_capped(n, DEFAULT_CAP)
}

pub fn bch_term_capped(n: usize, cap: usize) -> Result<NCPolynomial> {
    let mu = magnus_commutator_direct_capped(n, cap)?;
    let mut out = NCPolynomial::zero();
    for j in 0..=n {
        let sub = mu.relabel(|l| if (l as usize) <= j { 1 } else { 2 });
        out.add_scaled(&sub, &(Q::one() / (factorial_q(j) * factorial_q(n - j))));
    }
    Ok(out)
}

/// Univariate rational polynomial helpers (coefficient vectors, low degree first).
pub mod upoly {
    use super::*;

    pub fn mul(a: &[Q], b: &[Q]) -> Vec<Q> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![Q::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    pub fn pow(a: &[Q], n: usize) -> Vec<Q> {
        let mut out = vec![Q::one()];
        for _ in 0..n {
            out = mul(&out, a);
        }
        out
    }

    pub fn add_into(acc: &mut Vec<Q>, a: &[Q], c: &Q) {
        if acc.len() < a.len() {
            acc.resize(a.len(), Q::zero());
        }
        for (i, x) in a.iter().enumerate() {
            acc[i] += x * c;
        }
    }

    /// ∫_0^1 p(t) dt.
    pub fn integrate01(a: &[Q]) -> Q {
        a.iter().enumerate().fold(Q::zero(), |s, (i, c)| s + c / qi(i as i64 + 1))
    }

    pub fn eval(a: &[Q], x: &Q) -> Q {
        a.iter().rev().fold(Q::zero(), |s, c| s * x + c)
    }
}

/// Splits a word over {X=1, Y=2} into alternating runs.
fn runs(w: &[u8]) -> Vec<(u8, usize)> {
    let mut out: Vec<(u8, usize)> = Vec::new();
    for &l in w {
        match out.last_mut() {
            Some((c, n)) if *c == l => *n += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

/// Coefficient of the word `m` (letters 1 = X, 2 = Y) in log(exp X exp Y).
pub fn goldberg_coefficient(m: &Word) -> Result<Q> {
    if m.is_empty() {
        return Err(Error::Domain("Goldberg coefficient needs a nonempty word".into()));
    }
    if m.0.iter().any(|&l| l != 1 && l != 2) {
        return Err(Error::Domain("Goldberg words use only X and Y".into()));
    }
    let r = runs(&m.0);
    let mut des = 0;
    let mut asc = 0;
    for pair in r.windows(2) {
        if pair[0].0 == 2 {
            des += 1;
        } else {
            asc += 1;
        }
    }
    let t = vec![Q::zero(), Q::one()];
    let tm1 = vec![-Q::one(), Q::one()];
    let mut poly = upoly::mul(&upoly::pow(&tm1, des), &upoly::pow(&t, asc));
    for &(_, k) in &r {
        // G_k(t-1, t)
        let mut g = vec![];
        for (mm, c) in eulerian_poly(k).iter().enumerate() {
            let term = upoly::mul(&upoly::pow(&tm1, mm), &upoly::pow(&t, k - 1 - mm));
            upoly::add_into(&mut g, &term, c);
        }
        poly = upoly::mul(&poly, &g);
    }
    Ok(upoly::integrate01(&poly))
}

/// Θ_k = Σ_m A(k,m) m!(k-1-m)! / k!².
pub fn theta_coefficient(k: usize) -> Q {
    if k == 0 {
        return Q::zero();
    }
    let kf = factorial_q(k);
    let kf2 = &kf * &kf;
    eulerian_row(k)
        .into_iter()
        .enumerate()
        .fold(Q::zero(), |s, (m, a)| s + Q::from_integer(a) * factorial_q(m) * factorial_q(k - 1 - m) / &kf2)
}

/// Θ(x) through degree `n` (constant term 0).
pub fn theta_series(n: usize) -> RationalSeries {
    RationalSeries::new((0..=n).map(theta_coefficient).collect())
}

/// A polynomial in λ with noncommutative coefficients; `coeffs[i]` multiplies λ^i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaPolynomial {
    pub coeffs: Vec<NCPolynomial>,
}

impl LambdaPolynomial {
    pub fn eval(&self, lambda: &Q) -> NCPolynomial {
        let mut out = NCPolynomial::zero();
        let mut p = Q::one();
        for c in &self.coeffs {
            out.add_scaled(c, &p);
            p *= lambda;
        }
        out
    }

    /// ∫_0^1 dλ, coefficientwise.
    pub fn integrate(&self) -> NCPolynomial {
        let mut out = NCPolynomial::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            out.add_scaled(c, &q(1, i as i64 + 1));
        }
        out
    }

    pub fn lambda_degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.coeffs.iter().map(|c| c.to_json()).collect())
    }
}

/// `λ^a (λ-1)^d` as coefficients in λ.
pub fn lambda_weight(a: usize, d: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); a + d + 1];
    for j in 0..=d {
        let c = Q::from_integer(binomial(d, j));
        out[a + j] = if (d - j) % 2 == 1 { -c } else { c };
    }
    out
}

/// R^(λ)(X_1,…,X_k) = Σ_σ λ^{asc σ} (λ-1)^{des σ} X_σ.
pub fn resolvent_poly(k: usize) -> Result<LambdaPolynomial> {
    resolvent_poly_capped(k, DEFAULT_CAP)
}

pub fn resolvent_poly_capped(k: usize, cap: usize) -> Result<LambdaPolynomial> {
    check_cap(k, cap)?;
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let weights: Vec<Vec<Q>> = (0..k).map(|d| lambda_weight(k - 1 - d, d)).collect();
    let mut coeffs = vec![BTreeMap::<Word, Q>::new(); k];
    let mut perm: Vec<u8> = (1..=k as u8).collect();
    loop {
        let w = Word(perm.clone());
        let d = w.des();
        for (i, c) in weights[d].iter().enumerate() {
            if !c.is_zero() {
                coeffs[i].insert(w.clone(), c.clone());
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(LambdaPolynomial { coeffs: coeffs.into_iter().map(NCPolynomial::from_terms).collect() })
}

/// μ on the letters `block` (ascending), as a polynomial.
fn mu_on(block: &[u8], memo: &mut BTreeMap<Vec<u8>, NCPolynomial>) -> NCPolynomial {
    if let Some(p) = memo.get(block) {
        return p.clone();
    }
    let base = magnus_commutator_direct_capped(block.len(), usize::MAX).expect("k >= 1");
    let p = base.relabel(|l| block[l as usize - 1]);
    memo.insert(block.to_vec(), p.clone());
    p
}

/// Checks X_1…X_k = Σ over ordered partitions of (1/s!) ∏ μ(I_j).
pub fn ppod_check(k: usize) -> Result<bool> {
    check_cap(k, 6)?;
    let items: Vec<u8> = (1..=k as u8).collect();
    let mut memo = BTreeMap::new();
    let mut rhs = NCPolynomial::zero();
    for part in ordered_set_partitions(&items) {
        let mut prod = NCPolynomial::one();
        for b in &part {
            prod = prod.mul(&mu_on(b, &mut memo));
        }
        rhs.add_scaled(&prod, &(Q::one() / factorial_q(part.len())));
    }
    Ok(rhs == NCPolynomial::word(&items))
}

/// Both sides of the generalized Schur identity (first form):
/// (1/(n-1)!) Σ_σ μ(X_1, X_σ(2),…,X_σ(n)) = Σ_σ β_{n-1} (ad X_σ(2))…(ad X_σ(n)) X_1.
pub fn gen_schur_sides(n: usize) -> (NCPolynomial, NCPolynomial) {
    let rest: Vec<u8> = (2..=n as u8).collect();
    let mut perm = rest.clone();
    let b = beta(n - 1);
    let mut lhs = NCPolynomial::zero();
    let mut rhs = NCPolynomial::zero();
    loop {
        let mut args = vec![NCPolynomial::var(1)];
        args.extend(perm.iter().map(|&i| NCPolynomial::var(i)));
        lhs = &lhs + &mu_apply(&args);
        let mut e = NCPolynomial::var(1);
        for &i in perm.iter().rev() {
            e = NCPolynomial::var(i).commutator(&e);
        }
        rhs.add_scaled(&e, &b);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    (lhs.scale(&(Q::one() / factorial_q(n - 1))), rhs)
}

/// Second form, last variable fixed; the Bernoulli weight picks up `(-1)^{n-1}`.
pub fn gen_schur_sides_last(n: usize) -> (NCPolynomial, NCPolynomial) {
    let mut perm: Vec<u8> = (1..n as u8).collect();
    let b = if n.is_multiple_of(2) { -beta(n - 1) } else { beta(n - 1) };
    let mut lhs = NCPolynomial::zero();
    let mut rhs = NCPolynomial::zero();
    loop {
        let mut args: Vec<NCPolynomial> = perm.iter().map(|&i| NCPolynomial::var(i)).collect();
        args.push(NCPolynomial::var(n as u8));
        lhs = &lhs + &mu_apply(&args);
        let mut e = NCPolynomial::var(n as u8);
        for &i in perm.iter().rev() {
            e = NCPolynomial::var(i).commutator(&e);
        }
        rhs.add_scaled(&e, &b);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    (lhs.scale(&(Q::one() / factorial_q(n - 1))), rhs)
}

/// Right-hand side of the generalized Magnus recursion. The middle letters
/// `h1+1..k-h2` are grouped into ordered partitions; each grouping contributes
/// μ(X_1..X_{h1}, μ(I_1),…,μ(I_s), X_{k-h2+1}..X_k) weighted by `1/s!`.
pub fn gen_magnus_recursion_rhs(k: usize, h1: usize, h2: usize) -> NCPolynomial {
    let middle: Vec<u8> = ((h1 + 1) as u8..=(k - h2) as u8).collect();
    let mut memo = BTreeMap::new();
    let mut out = NCPolynomial::zero();
    for part in ordered_set_partitions(&middle) {
        let mut args: Vec<NCPolynomial> = (1..=h1 as u8).map(NCPolynomial::var).collect();
        for b in &part {
            args.push(mu_on(b, &mut memo));
        }
        args.extend(((k - h2 + 1) as u8..=k as u8).map(NCPolynomial::var));
        out.add_scaled(&mu_apply(&args), &(Q::one() / factorial_q(part.len())));
    }
    out
}

/// The part of log(exp X_1 ⋯ exp X_k) in which every variable occurs once.
pub fn solomon_part(k: usize) -> Result<NCPolynomial> {
    let mut prod = NCPolynomial::one().with_cap(Some(k));
    for i in 1..=k as u8 {
        prod = prod.mul(&NCPolynomial::var(i).truncated_exp(k)?);
    }
    let l = prod.truncated_log(k)?;
    let letters: Vec<u8> = (1..=k as u8).collect();
    Ok(l.part_with_letters(&letters).with_cap(None))
}

/// Permutations of `1..=n` with `m` descents, by brute force.
pub fn brute_force_descents(n: usize, m: usize) -> usize {
    let mut perm: Vec<u8> = (1..=n as u8).collect();
    let mut count = 0;
    loop {
        if Word(perm.clone()).des() == m {
            count += 1;
        }
        if !next_permutation(&mut perm) {
            return count;
        }
    }
}

/// Sign check helper used by the Bernoulli tests: sgn B_{2j} = (-1)^{j+1}.
pub fn bernoulli_sign_ok(j: usize) -> bool {
    let b = bernoulli(2 * j);
    if j % 2 == 1 {
        b.is_positive()
    } else {
        b.is_negative()
    }
}

/// Expands a Lie expression over letters and checks it against the direct μ_k.
pub fn recursive_matches_direct(k: usize) -> Result<bool> {
    Ok(magnus_commutator_recursive(k)?.expand() == magnus_commutator_direct(k)?)
}

/// Tree `[..[[X_1, X_2], X_3], .., X_k]` (left-normed).
pub fn left_normed(letters: &[u8]) -> LieTree {
    let mut t = LieTree::Leaf(letters[0]);
    for &l in &letters[1..] {
        t = LieTree::node(t, LieTree::Leaf(l));
    }
    t
}
