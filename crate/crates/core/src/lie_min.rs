//! Minimal ℓ¹ presentations of μ_k by multilinear Lie monomials.
//!
//! A multilinear Lie element in `X_1..X_k` is determined by its coefficients
//! on words beginning with `X_1` (left-normed brackets `[..[X_1,X_u1],..]` are
//! dual to those words), so the equality constraints are restricted to those
//! `(k-1)!` rows. Presentations are re-verified on the full expansion.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::free_algebra::{q, LieExpression, LieTree, NCPolynomial, Word, Q};
use crate::lp;
use crate::magnus_core::{factorial, factorial_q, magnus_commutator_direct, next_permutation, ordered_set_partitions};
use crate::{Error, Result};

/// One column of the dictionary.
#[derive(Clone, Debug)]
pub struct LieColumn {
    pub tree: LieTree,
    pub expansion: NCPolynomial,
}

#[derive(Clone, Debug)]
pub struct LieDictionary {
    pub k: usize,
    pub columns: Vec<LieColumn>,
    /// Plane binary trees times leaf labelings, before orientation and merging.
    pub raw_count: u64,
    /// Trees merged into an earlier column with a proportional expansion.
    pub merged: usize,
    pub basis_rank: usize,
}

fn catalan(n: u64) -> u64 {
    let mut c = 1u64;
    for i in 0..n {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// Canonically oriented trees on the given ascending leaf set.
fn canonical_trees(set: &[u8], memo: &mut HashMap<Vec<u8>, Vec<LieTree>>) -> Vec<LieTree> {
    if let Some(v) = memo.get(set) {
        return v.clone();
    }
    let out = if set.len() == 1 {
        vec![LieTree::Leaf(set[0])]
    } else {
        let rest = &set[1..];
        let mut out = Vec::new();
        // left block holds the minimum; choose which of the others join it
        for mask in 0u32..(1u32 << rest.len()) {
            if mask == (1u32 << rest.len()) - 1 {
                continue;
            }
            let mut left = vec![set[0]];
            let mut right = Vec::new();
            for (i, &l) in rest.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    left.push(l);
                } else {
                    right.push(l);
                }
            }
            let lt = canonical_trees(&left, memo);
            let rt = canonical_trees(&right, memo);
            for a in &lt {
                for b in &rt {
                    out.push(LieTree::node(a.clone(), b.clone()));
                }
            }
        }
        out
    };
    memo.insert(set.to_vec(), out.clone());
    out
}

/// Words of length `k` starting with letter 1, in lexicographic order.
pub fn x1_rows(k: usize) -> Vec<Word> {
    let mut perm: Vec<u8> = (2..=k as u8).collect();
    let mut out = Vec::new();
    loop {
        let mut w = vec![1u8];
        w.extend_from_slice(&perm);
        out.push(Word(w));
        if !next_permutation(&mut perm) {
            return out;
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if !(2..=6).contains(&k) {
        return Err(Error::Domain(format!("arity {k} outside 2..=6")));
    }
    Ok(())
}

/// All multilinear Lie monomials in `X_1..X_k`, oriented and merged up to sign.
pub fn enumerate_lie_monomials(k: usize) -> Result<LieDictionary> {
    check_k(k)?;
    let set: Vec<u8> = (1..=k as u8).collect();
    let trees = canonical_trees(&set, &mut HashMap::new());
    let rows = x1_rows(k);
    let mut seen: HashMap<Vec<i8>, usize> = HashMap::new();
    let mut columns = Vec::new();
    let mut merged = 0;
    for t in trees {
        let e = t.expand();
        // full expansions have coefficients ±1, so proportional means equal up to sign
        let mut key: Vec<i8> = rows.iter().map(|w| e.coeff(w).to_i64().unwrap() as i8).collect();
        if let Some(first) = key.iter().find(|&&v| v != 0).copied() {
            if first < 0 {
                key.iter_mut().for_each(|v| *v = -*v);
            }
        }
        if seen.contains_key(&key) {
            merged += 1;
            continue;
        }
        seen.insert(key, columns.len());
        columns.push(LieColumn { tree: t, expansion: e });
    }
    let mat = row_matrix(&columns, &rows);
    let basis_rank = lp::rank(&mat);
    Ok(LieDictionary {
        k,
        columns,
        raw_count: catalan(k as u64 - 1) * factorial(k).to_u64().unwrap(),
        merged,
        basis_rank,
    })
}

fn row_matrix(columns: &[LieColumn], rows: &[Word]) -> Vec<Vec<Q>> {
    rows.iter().map(|w| columns.iter().map(|c| c.expansion.coeff(w)).collect()).collect()
}

/// Minimal presentation with its exact dual certificate.
#[derive(Clone, Debug)]
pub struct MinimalPresentation {
    pub k: usize,
    pub presentation: LieExpression,
    /// Σ|θ| = k!·Θ_k^Lie.
    pub objective: Q,
    /// `y` over the X_1-rows with |Mᵀy|∞ ≤ 1 and bᵀy = objective.
    pub dual_certificate: Vec<Q>,
    pub rows: Vec<Word>,
    pub pivots: usize,
}

impl MinimalPresentation {
    /// Θ_k^Lie = objective / k!.
    pub fn theta_lie(&self) -> Q {
        &self.objective / factorial_q(self.k)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "theta_lie": self.theta_lie().to_string(),
            "objective": self.objective.to_string(),
            "presentation": self.presentation.terms.iter()
                .map(|(c, t)| serde_json::json!({"tree": t.to_string(), "coefficient": c.to_string()}))
                .collect::<Vec<_>>(),
            "dual_certificate": self.rows.iter().zip(&self.dual_certificate)
                .map(|(w, y)| serde_json::json!({"word": w.to_string(), "value": y.to_string()}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Which solver route to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpRoute {
    Exact,
    /// Binary64 simplex for the basis, then exact certification.
    FloatThenCertify,
}

/// Θ_k^Lie by exact simplex for k ≤ 5 and by certified float basis for k = 6.
pub fn theta_lie(k: usize) -> Result<MinimalPresentation> {
    let route = if k <= 5 { LpRoute::Exact } else { LpRoute::FloatThenCertify };
    theta_lie_with(k, route)
}

pub fn theta_lie_with(k: usize, route: LpRoute) -> Result<MinimalPresentation> {
    let dict = enumerate_lie_monomials(k)?;
    let rows = x1_rows(k);
    let mu = magnus_commutator_direct(k)?;
    let m = row_matrix(&dict.columns, &rows);
    let n = dict.columns.len();
    // θ = θ⁺ - θ⁻
    let a: Vec<Vec<Q>> = m
        .iter()
        .map(|r| {
            let mut v = r.clone();
            v.extend(r.iter().map(|x| -x));
            v
        })
        .collect();
    let b: Vec<Q> = rows.iter().map(|w| mu.coeff(w)).collect();
    let c = vec![Q::one(); 2 * n];
    let max_pivots = 200_000;
    let (basis, pivots) = match route {
        LpRoute::Exact => {
            let s = lp::solve(&a, &b, &c, max_pivots)?;
            (s.basis, s.pivots)
        }
        LpRoute::FloatThenCertify => {
            let af: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap()).collect()).collect();
            let bf: Vec<f64> = b.iter().map(|x| x.to_f64().unwrap()).collect();
            let cf = vec![1.0; 2 * n];
            let s = lp::solve(&af, &bf, &cf, max_pivots)?;
            (s.basis, s.pivots)
        }
    };
    let cert = match lp::certify_basis(&a, &b, &c, &basis) {
        Some(c) => c,
        None if route == LpRoute::FloatThenCertify => {
            // float basis not exactly optimal; fall back to the exact route
            return theta_lie_with(k, LpRoute::Exact);
        }
        None => return Err(Error::Internal("exact simplex basis failed certification".into())),
    };
    let mut pres = LieExpression::new();
    for j in 0..n {
        let th = &cert.x[j] - &cert.x[j + n];
        pres.push(th, dict.columns[j].tree.clone());
    }
    let out = MinimalPresentation { k, presentation: pres, objective: cert.objective, dual_certificate: cert.dual, rows, pivots };
    let check = verify_presentation(&out.presentation, k)?;
    if !check.valid {
        return Err(Error::Internal("optimal presentation does not expand to μ_k".into()));
    }
    Ok(out)
}

/// Re-checks a stored dual certificate against the dictionary.
pub fn verify_dual(p: &MinimalPresentation) -> Result<bool> {
    let dict = enumerate_lie_monomials(p.k)?;
    let mu = magnus_commutator_direct(p.k)?;
    let b: Vec<Q> = p.rows.iter().map(|w| mu.coeff(w)).collect();
    let by = b.iter().zip(&p.dual_certificate).fold(Q::zero(), |s, (x, y)| s + x * y);
    if by != p.objective {
        return Ok(false);
    }
    for col in &dict.columns {
        let s = p.rows.iter().zip(&p.dual_certificate).fold(Q::zero(), |s, (w, y)| s + col.expansion.coeff(w) * y);
        if s.abs() > Q::one() {
            return Ok(false);
        }
    }
    Ok(p.presentation.l1_cost() == p.objective)
}

#[derive(Clone, Debug)]
pub struct PresentationReport {
    pub valid: bool,
    pub cost: Q,
    /// μ_k minus the expansion; zero when valid.
    pub gap: NCPolynomial,
}

/// Checks that a combination of arity-k multilinear trees expands to μ_k.
pub fn verify_presentation(e: &LieExpression, k: usize) -> Result<PresentationReport> {
    let letters: Vec<u8> = (1..=k as u8).collect();
    for (_, t) in &e.terms {
        let mut l = t.leaves();
        l.sort_unstable();
        if l != letters {
            return Err(Error::Domain(format!("tree {t} is not multilinear in X1..X{k}")));
        }
    }
    let mu = magnus_commutator_direct(k)?;
    let gap = &mu - &e.expand();
    Ok(PresentationReport { valid: gap.is_zero(), cost: e.l1_cost(), gap })
}

/// π₁ on a multilinear homogeneous polynomial, by peeling off the s ≥ 2
/// symmetric-product parts of each word recursively.
pub fn first_canonical_projection(p: &NCPolynomial, k: usize) -> Result<NCPolynomial> {
    if p.is_zero() {
        return Ok(NCPolynomial::zero());
    }
    if p.homogeneous_degree() != Some(k) || p.terms().keys().any(|w| !w.is_multilinear()) {
        return Err(Error::Domain("first canonical projection needs multilinear degree-k input".into()));
    }
    let mut memo: BTreeMap<Vec<u8>, NCPolynomial> = BTreeMap::new();
    let mut out = NCPolynomial::zero();
    for (w, c) in p.terms() {
        out.add_scaled(&project_word(&w.0, &mut memo), c);
    }
    Ok(out)
}

/// π₁ of a single word with distinct letters.
fn project_word(w: &[u8], memo: &mut BTreeMap<Vec<u8>, NCPolynomial>) -> NCPolynomial {
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let mut out = NCPolynomial::word(w);
    if w.len() > 1 {
        // positions 0..n; ordered partitions with ascending blocks of positions
        let pos: Vec<u8> = (0..w.len() as u8).collect();
        for part in ordered_set_partitions(&pos) {
            if part.len() < 2 {
                continue;
            }
            let mut prod = NCPolynomial::one();
            for b in &part {
                let sub: Vec<u8> = b.iter().map(|&i| w[i as usize]).collect();
                prod = prod.mul(&project_word(&sub, memo));
            }
            out.add_scaled(&prod, &-(Q::one() / factorial_q(part.len())));
        }
    }
    memo.insert(w.to_vec(), out.clone());
    out
}

/// Presentations quoted as reference data, one `tree:coefficient` per line.
pub mod reference {
    use super::*;

    pub const K3: &str = "[[1,2],3]:1/6\n[1,[2,3]]:1/6\n";

    pub const K5: &str = "\
[[1,2],[3,[4,5]]]:4/120
[[[1,2],[3,4]],5]:4/120
[[[1,2],3],[4,5]]:4/120
[1,[[2,3],[4,5]]]:4/120
[[1,[2,[3,5]]],4]:4/120
[[[[1,3],4],5],2]:-4/120
[[1,[[2,3],4]],5]:4/120
[1,[[2,[3,4]],5]]:4/120
[[1,3],[[2,4],5]]:2/120
[[1,4],[[2,5],3]]:2/120
[[[1,4],3],[2,5]]:-2/120
[[1,[2,4]],[3,5]]:2/120
[[[[1,5],4],3],2]:2/120
[[[[1,5],2],3],4]:-2/120
[[[1,2],[3,5]],4]:2/120
[[[1,3],[4,5]],2]:-2/120
";

    pub const K6: &str = "\
[[1,[3,5]],[[2,4],6]]:4/240
[[1,[4,5]],[[2,3],6]]:4/240
[[[1,4],5],[2,[3,6]]]:-4/240
[[1,[2,3]],[[4,5],6]]:4/240
[[[1,2],3],[4,[5,6]]]:4/240
[[1,[2,4]],[[3,5],6]]:4/240
[[1,[2,5]],[[3,4],6]]:4/240
[[1,[3,4]],[[2,5],6]]:4/240
[1,[[2,[3,[4,5]]],6]]:4/240
[1,[[[2,[3,4]],5],6]]:4/240
[1,[[[[2,5],3],4],6]]:-4/240
[[1,3],[[2,[4,5]],6]]:4/240
[[1,[2,[[3,4],5]]],6]:4/240
[[1,[[[2,3],4],5]],6]:4/240
[[1,[[[2,5],4],3]],6]:-4/240
[[1,[[2,3],5]],[4,6]]:4/240
[[1,4],[[2,[3,5]],6]]:4/240
[[1,5],[[2,[3,4]],6]]:4/240
[[1,[[2,4],5]],[3,6]]:4/240
[[1,[[3,4],5]],[2,6]]:4/240
[[[[1,3],[4,5]],6],2]:-2/240
[[[[[1,3],4],5],6],2]:-2/240
[[[[[1,3],6],5],4],2]:2/240
[[[[[1,4],5],6],3],2]:4/240
[[[[[1,2],6],5],4],3]:2/240
[[[[1,2],6],[4,5]],3]:-2/240
[[[[[1,2],4],5],6],3]:-2/240
[[[1,[4,[5,6]]],2],3]:-4/240
[[1,[2,[3,[5,6]]]],4]:2/240
[[[[1,[5,6]],2],3],4]:-2/240
[[[1,[5,6]],[2,3]],4]:-2/240
[[[[[1,2],3],6],5],4]:-4/240
[[1,[2,[3,[4,6]]]],5]:2/240
[[1,[[2,3],[4,6]]],5]:2/240
[[[[1,[4,6]],2],3],5]:-2/240
[[[1,[2,[3,6]]],4],5]:4/240
[[1,2],[[3,[4,6]],5]]:2/240
[[1,2],[3,[[4,5],6]]]:2/240
[[1,2],[[3,4],[5,6]]]:2/240
[[1,2],[[3,[4,5]],6]]:4/240
[[[1,2],[3,4]],[5,6]]:2/240
[[[1,[2,3]],4],[5,6]]:2/240
[[[[1,3],4],2],[5,6]]:-2/240
[[1,[[2,3],4]],[5,6]]:4/240
[[1,3],[[[2,4],5],6]]:2/240
[[1,3],[[[2,6],4],5]]:-2/240
[[1,[2,[3,5]]],[4,6]]:2/240
[[[[1,5],3],2],[4,6]]:-2/240
";

    /// The five-parameter family for k = 4, scaled by 1/12.
    pub fn k4_family(l: [Q; 5]) -> LieExpression {
        let [l1, l2, l3, l4, l5] = l;
        let s = q(1, 12);
        let rows: Vec<(&str, Q)> = vec![
            ("[[[1,4],2],3]", -l1.clone()),
            ("[1,[2,[3,4]]]", &l5 + &l1 + &l2),
            ("[[1,[2,4]],3]", l2.clone()),
            ("[[1,[2,3]],4]", &l1 + &l2 + &l3),
            ("[[1,3],[2,4]]", l3.clone()),
            ("[[1,2],[3,4]]", &l2 + &l3 + &l4),
            ("[[[1,3],4],2]", -l4.clone()),
            ("[1,[[2,3],4]]", &l3 + &l4 + &l5),
            ("[[[1,4],3],2]", -l5.clone()),
            ("[[[1,2],3],4]", &l4 + &l5 + &l1),
        ];
        let mut e = LieExpression::new();
        for (t, c) in rows {
            e.push(c * &s, LieTree::parse(t).expect("static tree"));
        }
        e
    }

    pub fn k4_vertex(i: usize) -> LieExpression {
        let mut l: [Q; 5] = Default::default();
        l[i] = Q::one();
        k4_family(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_algebra::qi;

    #[test]
    fn dictionary_sizes() {
        let d2 = enumerate_lie_monomials(2).unwrap();
        assert_eq!(d2.columns.len(), 1);
        assert_eq!(d2.columns[0].tree.to_string(), "[1,2]");
        let d3 = enumerate_lie_monomials(3).unwrap();
        assert_eq!(d3.columns.len(), 3);
        assert_eq!(d3.raw_count, 12);
        let d4 = enumerate_lie_monomials(4).unwrap();
        assert_eq!(d4.basis_rank, 6);
        assert_eq!(d4.columns.len(), 15);
        assert!(enumerate_lie_monomials(7).is_err());
    }

    #[test]
    fn theta_lie_small() {
        let p3 = theta_lie(3).unwrap();
        assert_eq!(p3.theta_lie(), q(1, 18));
        assert!(verify_dual(&p3).unwrap());
        assert_eq!(theta_lie(2).unwrap().theta_lie(), q(1, 4));
    }

    #[test]
    fn projection_basics() {
        let mu3 = magnus_commutator_direct(3).unwrap();
        assert_eq!(first_canonical_projection(&mu3, 3).unwrap(), mu3);
        let sym = NCPolynomial::parse("X1X2 + X2X1").unwrap();
        assert!(first_canonical_projection(&sym, 2).unwrap().is_zero());
        assert!(first_canonical_projection(&NCPolynomial::word(&[1, 1]), 2).is_err());
        let _ = qi(0);
    }
}
