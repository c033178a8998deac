//! Dense two-phase tableau simplex (Dantzig pricing with a Bland fallback), generic over exact
//! rationals and binary64, plus exact basis certification.

use num_traits::{One, Signed, Zero};

use crate::free_algebra::Q;
use crate::{Error, Result};

pub trait LpNum: Clone + std::fmt::Debug {
    fn lzero() -> Self;
    fn lone() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_zero_(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
    fn lt(&self, o: &Self) -> bool {
        o.sub(self).is_pos()
    }
}

impl LpNum for Q {
    fn lzero() -> Self {
        Zero::zero()
    }
    fn lone() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
}

const FEPS: f64 = 1e-9;

impl LpNum for f64 {
    fn lzero() -> Self {
        0.0
    }
    fn lone() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        *self > FEPS
    }
    fn is_neg(&self) -> bool {
        *self < -FEPS
    }
}

/// Optimal vertex of `min c·x, A x = b, x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub basis: Vec<usize>,
    pub objective: T,
    pub pivots: usize,
}

struct Tableau<T> {
    // rows 0..m constraints, each of width ncols + 1 (last = rhs)
    rows: Vec<Vec<T>>,
    obj: Vec<T>,
    basis: Vec<usize>,
    ncols: usize,
}

impl<T: LpNum> Tableau<T> {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        let inv = T::lone().div(&p);
        for v in self.rows[r].iter_mut() {
            if !v.is_zero_() {
                *v = v.mul(&inv);
            } else {
                *v = T::lzero();
            }
        }
        let prow = self.rows[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero_()).collect();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][col].clone();
            if f.is_zero_() {
                continue;
            }
            for &j in &nz {
                let nv = self.rows[i][j].sub(&f.mul(&prow[j]));
                self.rows[i][j] = nv;
            }
            self.rows[i][col] = T::lzero();
        }
        let f = self.obj[col].clone();
        if !f.is_zero_() {
            for &j in &nz {
                let nv = self.obj[j].sub(&f.mul(&prow[j]));
                self.obj[j] = nv;
            }
            self.obj[col] = T::lzero();
        }
        self.basis[r] = col;
    }

    /// Bland's rule iterations on the current objective row, over allowed columns.
    /// Dantzig's rule while the objective improves; Bland's rule after a run of
    /// degenerate pivots, which rules out cycling.
    fn run(&mut self, allowed: usize, max_pivots: usize, pivots: &mut usize) -> Result<()> {
        let mut stalled = 0usize;
        loop {
            let enter = if stalled < 50 {
                let mut best: Option<usize> = None;
                for j in 0..allowed {
                    if self.obj[j].is_neg() && best.is_none_or(|b| self.obj[j].lt(&self.obj[b])) {
                        best = Some(j);
                    }
                }
                best
            } else {
                (0..allowed).find(|&j| self.obj[j].is_neg())
            };
            let Some(col) = enter else { return Ok(()) };
            let before = self.obj[self.ncols].clone();
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if a.is_pos() {
                    let ratio = self.rows[i][self.ncols].div(a);
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio.lt(&br) || (!br.lt(&ratio) && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else {
                return Err(Error::Internal("linear program is unbounded".into()));
            };
            self.pivot(r, col);
            *pivots += 1;
            if before.lt(&self.obj[self.ncols]) || self.obj[self.ncols].lt(&before) {
                stalled = 0;
            } else {
                stalled += 1;
            }
            if *pivots > max_pivots {
                return Err(Error::Resource("simplex pivot limit reached".into()));
            }
        }
    }
}

/// Two-phase simplex. Rows of `a` with negative right-hand side are flipped.
pub fn solve<T: LpNum>(a: &[Vec<T>], b: &[T], c: &[T], max_pivots: usize) -> Result<LpSolution<T>> {
    let m = a.len();
    let n = c.len();
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_neg();
        let mut r: Vec<T> = a[i].iter().map(|v| if flip { v.neg() } else { v.clone() }).collect();
        r.resize(ncols + 1, T::lzero());
        r[n + i] = T::lone();
        r[ncols] = if flip { b[i].neg() } else { b[i].clone() };
        rows.push(r);
    }
    // phase one objective: sum of artificials, expressed in nonbasic terms
    let mut obj = vec![T::lzero(); ncols + 1];
    for r in &rows {
        for j in 0..n {
            obj[j] = obj[j].sub(&r[j]);
        }
        obj[ncols] = obj[ncols].sub(&r[ncols]);
    }
    let mut t = Tableau { rows, obj, basis: (n..n + m).collect(), ncols };
    let mut pivots = 0;
    t.run(n, max_pivots, &mut pivots)?;
    if t.obj[ncols].is_neg() {
        return Err(Error::Internal("linear program is infeasible".into()));
    }
    // drive zero-level artificials out of the basis
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| !t.rows[r][j].is_zero_()) {
                t.pivot(r, col);
                pivots += 1;
            }
        }
    }
    // phase two objective
    let mut obj = vec![T::lzero(); ncols + 1];
    obj[..n].clone_from_slice(c);
    for r in 0..m {
        let bj = t.basis[r];
        if bj < n && !obj[bj].is_zero_() {
            let f = obj[bj].clone();
            for j in 0..=ncols {
                let nv = obj[j].sub(&f.mul(&t.rows[r][j]));
                obj[j] = nv;
            }
        }
    }
    t.obj = obj;
    t.run(n, max_pivots, &mut pivots)?;
    let mut x = vec![T::lzero(); n];
    for r in 0..m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rows[r][ncols].clone();
        }
    }
    let objective = x.iter().zip(c).fold(T::lzero(), |s, (xi, ci)| s.add(&xi.mul(ci)));
    Ok(LpSolution { x, basis: t.basis, objective, pivots })
}

/// Solves the square system `M z = r` exactly; `None` if singular.
pub fn solve_square(mat: &[Vec<Q>], rhs: &[Q]) -> Option<Vec<Q>> {
    let n = mat.len();
    let mut a: Vec<Vec<Q>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut v = row.clone();
            v.push(r.clone());
            v
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        let inv = Q::one() / &a[col][col];
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        let prow = a[col].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for j in col..=n {
                if !prow[j].is_zero() {
                    row[j] -= &f * &prow[j];
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Exact rank by fraction-free elimination on a copy.
pub fn rank(mat: &[Vec<Q>]) -> usize {
    let mut a: Vec<Vec<Q>> = mat.to_vec();
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let prow = a[r].clone();
        for row in a.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &prow[c];
            for j in c..cols {
                if !prow[j].is_zero() {
                    row[j] -= &f * &prow[j];
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Exact optimality certificate for a basis of `min c·x, A x = b, x ≥ 0`.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub x: Vec<Q>,
    pub dual: Vec<Q>,
    pub objective: Q,
}

/// Re-solves the basis exactly and checks primal and dual feasibility.
pub fn certify_basis(a: &[Vec<Q>], b: &[Q], c: &[Q], basis: &[usize]) -> Option<Certificate> {
    let m = a.len();
    let n = c.len();
    if basis.len() != m || basis.iter().any(|&j| j >= n) {
        return None;
    }
    let bmat: Vec<Vec<Q>> = (0..m).map(|i| basis.iter().map(|&j| a[i][j].clone()).collect()).collect();
    let xb = solve_square(&bmat, b)?;
    if xb.iter().any(|v| v.is_negative()) {
        return None;
    }
    let bt: Vec<Vec<Q>> = (0..m).map(|r| (0..m).map(|i| bmat[i][r].clone()).collect()).collect();
    let cb: Vec<Q> = basis.iter().map(|&j| c[j].clone()).collect();
    let y = solve_square(&bt, &cb)?;
    for j in 0..n {
        let mut s = c[j].clone();
        for i in 0..m {
            if !a[i][j].is_zero() {
                s -= &a[i][j] * &y[i];
            }
        }
        if s.is_negative() {
            return None;
        }
    }
    let mut x = vec![Q::zero(); n];
    for (k, &j) in basis.iter().enumerate() {
        x[j] = xb[k].clone();
    }
    let objective = x.iter().zip(c).fold(Q::zero(), |s, (xi, ci)| s + xi * ci);
    let dual_obj = y.iter().zip(b).fold(Q::zero(), |s, (yi, bi)| s + yi * bi);
    if dual_obj != objective {
        return None;
    }
    Some(Certificate { x, dual: y, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_algebra::{q, qi};

    #[test]
    fn small_lp_exact_and_float() {
        // min x + y, x + 2y = 4, 3x + y = 6 -> x = 8/5, y = 6/5
        let a = vec![vec![qi(1), qi(2)], vec![qi(3), qi(1)]];
        let b = vec![qi(4), qi(6)];
        let c = vec![qi(1), qi(1)];
        let s = solve(&a, &b, &c, 100).unwrap();
        assert_eq!(s.objective, q(14, 5));
        let cert = certify_basis(&a, &b, &c, &s.basis).unwrap();
        assert_eq!(cert.objective, q(14, 5));
        let af = vec![vec![1.0, 2.0], vec![3.0, 1.0]];
        let sf = solve(&af, &[4.0, 6.0], &[1.0, 1.0], 100).unwrap();
        assert!((sf.objective - 2.8).abs() < 1e-12);
    }

    #[test]
    fn l1_split() {
        // min |t| subject to -t = 3, as t = p - m
        let a = vec![vec![qi(-1), qi(1)]];
        let s = solve(&a, &[qi(3)], &[qi(1), qi(1)], 10).unwrap();
        assert_eq!(s.objective, qi(3));
        assert_eq!(s.x, vec![qi(0), qi(3)]);
    }

    #[test]
    fn infeasible_detected() {
        let a = vec![vec![qi(1)], vec![qi(1)]];
        assert!(solve(&a, &[qi(1), qi(2)], &[qi(1)], 10).is_err());
    }

    #[test]
    fn rank_small() {
        let a = vec![vec![qi(1), qi(2)], vec![qi(2), qi(4)]];
        assert_eq!(rank(&a), 1);
    }
}
