//! Free associative algebra over the rationals, ℓ¹ norm, truncated exp/log,
//! the Dynkin map, and multilinear Lie bracketing trees.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// A word in the letters `X_i`. Ordered by length first, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
    /// Strict ascents `w_i < w_{i+1}`.
    pub fn asc(&self) -> usize {
        self.0.windows(2).filter(|w| w[0] < w[1]).count()
    }
    /// Strict descents `w_i > w_{i+1}`.
    pub fn des(&self) -> usize {
        self.0.windows(2).filter(|w| w[0] > w[1]).count()
    }
    /// True when every letter occurs at most once.
    pub fn is_multilinear(&self) -> bool {
        let mut seen = [false; 256];
        for &l in &self.0 {
            if seen[l as usize] {
                return false;
            }
            seen[l as usize] = true;
        }
        true
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "X{l}")?;
        }
        Ok(())
    }
}

/// Finitely supported map from words to nonzero rationals, optionally truncated.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NCPolynomial {
    terms: BTreeMap<Word, Q>,
    cap: Option<usize>,
}

fn min_cap(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl NCPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn one() -> Self {
        Self::constant(Q::one())
    }
    pub fn constant(c: Q) -> Self {
        Self::monomial(Word::empty(), c)
    }
    pub fn var(i: u8) -> Self {
        Self::monomial(Word(vec![i]), Q::one())
    }
    pub fn monomial(w: Word, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }
    pub fn word(letters: &[u8]) -> Self {
        Self::monomial(Word(letters.to_vec()), Q::one())
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    /// Sets the truncation degree, dropping longer words.
    pub fn with_cap(mut self, cap: Option<usize>) -> Self {
        self.cap = cap;
        if let Some(n) = cap {
            self.terms.retain(|w, _| w.len() <= n);
        }
        self
    }

    pub fn terms(&self) -> &BTreeMap<Word, Q> {
        &self.terms
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, w: &Word) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }
    pub fn coeff_of(&self, letters: &[u8]) -> Q {
        self.coeff(&Word(letters.to_vec()))
    }
    pub fn constant_term(&self) -> Q {
        self.coeff(&Word::empty())
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        if let Some(n) = self.cap {
            if w.len() > n {
                return;
            }
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Builds from (word, coefficient) pairs, merging repeats.
    pub fn from_terms<I: IntoIterator<Item = (Word, Q)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (w, c) in it {
            p.add_term(w, c);
        }
        p
    }

    pub fn add_scaled(&mut self, other: &NCPolynomial, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &other.terms {
            self.add_term(w.clone(), x * c);
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self { terms: BTreeMap::new(), cap: self.cap };
        }
        Self {
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
            cap: self.cap,
        }
    }

    /// Largest word length, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(|w| w.len())
    }

    /// `Some(d)` if every word has length `d`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let first = self.terms.keys().next()?.len();
        (self.degree() == Some(first)).then_some(first)
    }

    pub fn homogeneous_part(&self, d: usize) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
            cap: self.cap,
        }
    }

    /// Keeps only words in which no letter repeats.
    pub fn multilinear_part(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.is_multilinear())
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
            cap: self.cap,
        }
    }

    /// Keeps words whose letter multiset is exactly `{1..k}`.
    pub fn part_with_letters(&self, letters: &[u8]) -> Self {
        let mut want: Vec<u8> = letters.to_vec();
        want.sort_unstable();
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| {
                    let mut v = w.0.clone();
                    v.sort_unstable();
                    v == want
                })
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
            cap: self.cap,
        }
    }

    pub fn mul(&self, other: &NCPolynomial) -> NCPolynomial {
        let cap = min_cap(self.cap, other.cap);
        let mut out = NCPolynomial { terms: BTreeMap::new(), cap };
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                if let Some(n) = cap {
                    // words are ordered by length, so the rest are longer
                    if w1.len() + w2.len() > n {
                        break;
                    }
                }
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> NCPolynomial {
        let mut acc = NCPolynomial::one().with_cap(self.cap);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn commutator(&self, other: &NCPolynomial) -> NCPolynomial {
        &self.mul(other) - &other.mul(self)
    }

    /// Applies a letter substitution `X_i -> X_{f(i)}`.
    pub fn relabel(&self, f: impl Fn(u8) -> u8) -> NCPolynomial {
        NCPolynomial::from_terms(
            self.terms.iter().map(|(w, c)| (Word(w.0.iter().map(|&l| f(l)).collect()), c.clone())),
        )
        .with_cap(self.cap)
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> Q {
        self.terms.values().fold(Q::zero(), |a, c| a + c.abs())
    }

    /// exp(p) truncated at degree `n`; `p` must have zero constant term.
    pub fn truncated_exp(&self, n: usize) -> Result<NCPolynomial, Error> {
        if !self.constant_term().is_zero() {
            return Err(Error::Domain("exp needs a zero constant term".into()));
        }
        let p = self.clone().with_cap(Some(n));
        let mut out = NCPolynomial::one().with_cap(Some(n));
        let mut pw = NCPolynomial::one().with_cap(Some(n));
        let mut fact = Q::one();
        for j in 1..=n {
            pw = pw.mul(&p);
            if pw.is_zero() {
                break;
            }
            fact *= qi(j as i64);
            out.add_scaled(&pw, &(Q::one() / &fact));
        }
        Ok(out)
    }

    /// log(p) truncated at degree `n`; `p` must have constant term 1.
    pub fn truncated_log(&self, n: usize) -> Result<NCPolynomial, Error> {
        if self.constant_term() != Q::one() {
            return Err(Error::Domain("log needs constant term 1".into()));
        }
        let x = &self.clone().with_cap(Some(n)) - &NCPolynomial::one();
        let mut out = NCPolynomial::zero().with_cap(Some(n));
        let mut pw = NCPolynomial::one().with_cap(Some(n));
        for j in 1..=n {
            pw = pw.mul(&x);
            if pw.is_zero() {
                break;
            }
            let sign = if j % 2 == 1 { 1 } else { -1 };
            out.add_scaled(&pw, &q(sign, j as i64));
        }
        Ok(out)
    }

    /// Right-nested bracketing `w1..wk -> [w1,[w2,..[w_{k-1},w_k]..]]`.
    /// On a Lie element of degree `k` this multiplies by `k`.
    pub fn dsw_map(&self) -> Result<NCPolynomial, Error> {
        if self.is_zero() {
            return Ok(NCPolynomial::zero());
        }
        let k = self
            .homogeneous_degree()
            .ok_or_else(|| Error::Domain("dsw map needs a homogeneous polynomial".into()))?;
        if k == 0 {
            return Err(Error::Domain("dsw map needs degree at least 1".into()));
        }
        let mut out = NCPolynomial::zero();
        for (w, c) in &self.terms {
            out.add_scaled(&right_nested(&w.0), c);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (w, c) in &self.terms {
            m.insert(w.to_string(), serde_json::Value::String(c.to_string()));
        }
        serde_json::Value::Object(m)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<NCPolynomial, Error> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
        let mut p = NCPolynomial::zero();
        for (k, val) in obj {
            let s = val.as_str().ok_or_else(|| Error::Parse("coefficients must be strings".into()))?;
            let w = parse_word(k)?;
            p.add_term(w, parse_rational(s)?);
        }
        Ok(p)
    }

    /// Parses the textual grammar: `X1..Xn`, aliases `X`/`Y`, `*`, `^`, `p/q`, `[a,b]`, parentheses.
    pub fn parse(s: &str) -> Result<NCPolynomial, Error> {
        let mut p = Parser { s: s.as_bytes(), i: 0 };
        let r = p.expr()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(Error::Parse(format!("unexpected input at offset {}", p.i)));
        }
        Ok(r)
    }
}

fn right_nested(w: &[u8]) -> NCPolynomial {
    match w.len() {
        0 => NCPolynomial::one(),
        1 => NCPolynomial::var(w[0]),
        _ => {
            let rest = right_nested(&w[1..]);
            NCPolynomial::var(w[0]).commutator(&rest)
        }
    }
}

impl fmt::Display for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            if w.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{a}*{w}")?;
            }
        }
        Ok(())
    }
}

impl Add for &NCPolynomial {
    type Output = NCPolynomial;
    fn add(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone().with_cap(min_cap(self.cap, rhs.cap));
        out.add_scaled(rhs, &Q::one());
        out
    }
}

impl Sub for &NCPolynomial {
    type Output = NCPolynomial;
    fn sub(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone().with_cap(min_cap(self.cap, rhs.cap));
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

impl Mul for &NCPolynomial {
    type Output = NCPolynomial;
    fn mul(self, rhs: &NCPolynomial) -> NCPolynomial {
        NCPolynomial::mul(self, rhs)
    }
}

impl Neg for &NCPolynomial {
    type Output = NCPolynomial;
    fn neg(self) -> NCPolynomial {
        self.scale(&-Q::one())
    }
}

pub fn parse_rational(s: &str) -> Result<Q, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            if let Some((ip, fp)) = s.split_once('.') {
                // finite decimal literal
                let digits = format!("{ip}{fp}");
                let n: BigInt = digits.parse().map_err(|_| bad())?;
                let d = num_traits::pow(BigInt::from(10), fp.len());
                return Ok(Q::new(n, d));
            }
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

/// Parses `X1X2X1`, `XYX` or `1` (empty word).
pub fn parse_word(s: &str) -> Result<Word, Error> {
    let s = s.trim();
    if s == "1" || s.is_empty() {
        return Ok(Word::empty());
    }
    let p = NCPolynomial::parse(s)?;
    if p.len() == 1 {
        let (w, c) = p.terms.iter().next().unwrap();
        if c.is_one() {
            return Ok(w.clone());
        }
    }
    Err(Error::Parse(format!("`{s}` is not a single word")))
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {}", self.i))
    }
    fn expr(&mut self) -> Result<NCPolynomial, Error> {
        let mut acc = NCPolynomial::zero();
        let mut sign = Q::one();
        if let Some(c) = self.peek() {
            if c == b'-' || c == b'+' {
                self.i += 1;
                if c == b'-' {
                    sign = -Q::one();
                }
            }
        }
        loop {
            let t = self.term()?;
            acc.add_scaled(&t, &sign);
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    sign = Q::one();
                }
                Some(b'-') => {
                    self.i += 1;
                    sign = -Q::one();
                }
                _ => return Ok(acc),
            }
        }
    }
    fn term(&mut self) -> Result<NCPolynomial, Error> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Some(c) if c == b'X' || c == b'Y' || c == b'(' || c == b'[' || c.is_ascii_digit() => {
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                _ => return Ok(acc),
            }
        }
    }
    fn factor(&mut self) -> Result<NCPolynomial, Error> {
        let a = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            let n = self.uint()?;
            return Ok(a.pow(n as u32));
        }
        Ok(a)
    }
    fn uint(&mut self) -> Result<u64, Error> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.s[start..self.i]).unwrap().parse().map_err(|_| self.err("integer overflow"))
    }
    fn atom(&mut self) -> Result<NCPolynomial, Error> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(b'[') => {
                self.i += 1;
                let a = self.expr()?;
                if self.peek() != Some(b',') {
                    return Err(self.err("expected `,`"));
                }
                self.i += 1;
                let b = self.expr()?;
                if self.peek() != Some(b']') {
                    return Err(self.err("expected `]`"));
                }
                self.i += 1;
                Ok(a.commutator(&b))
            }
            Some(b'X') => {
                self.i += 1;
                if self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    let n = self.uint()?;
                    if n > 255 {
                        return Err(self.err("variable index too large"));
                    }
                    Ok(NCPolynomial::var(n as u8))
                } else {
                    Ok(NCPolynomial::var(1))
                }
            }
            Some(b'Y') => {
                self.i += 1;
                Ok(NCPolynomial::var(2))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                let mut r = Q::from_integer(BigInt::from(n));
                if self.peek() == Some(b'/') {
                    self.i += 1;
                    let d = self.uint()?;
                    if d == 0 {
                        return Err(self.err("zero denominator"));
                    }
                    r /= Q::from_integer(BigInt::from(d));
                }
                Ok(NCPolynomial::constant(r))
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

/// Binary bracketing tree over variable indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LieTree {
    Leaf(u8),
    Node(Box<LieTree>, Box<LieTree>),
}

impl LieTree {
    pub fn leaf(i: u8) -> Self {
        LieTree::Leaf(i)
    }
    pub fn node(a: LieTree, b: LieTree) -> Self {
        LieTree::Node(Box::new(a), Box::new(b))
    }

    pub fn leaves(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.collect_leaves(&mut v);
        v
    }
    fn collect_leaves(&self, v: &mut Vec<u8>) {
        match self {
            LieTree::Leaf(i) => v.push(*i),
            LieTree::Node(a, b) => {
                a.collect_leaves(v);
                b.collect_leaves(v);
            }
        }
    }
    pub fn degree(&self) -> usize {
        match self {
            LieTree::Leaf(_) => 1,
            LieTree::Node(a, b) => a.degree() + b.degree(),
        }
    }
    pub fn min_leaf(&self) -> u8 {
        match self {
            LieTree::Leaf(i) => *i,
            LieTree::Node(a, b) => a.min_leaf().min(b.min_leaf()),
        }
    }
    pub fn is_multilinear(&self) -> bool {
        Word(self.leaves()).is_multilinear()
    }

    /// Orients every node so the child holding the smaller leaf set is on the left.
    /// Returns the accumulated sign. Leaf sets of a multilinear tree are disjoint,
    /// so the lexicographic comparison of sorted sets reduces to their minima.
    pub fn canonical(&self) -> (i32, LieTree) {
        match self {
            LieTree::Leaf(i) => (1, LieTree::Leaf(*i)),
            LieTree::Node(a, b) => {
                let (sa, ca) = a.canonical();
                let (sb, cb) = b.canonical();
                let s = sa * sb;
                if ca.min_leaf() <= cb.min_leaf() {
                    (s, LieTree::node(ca, cb))
                } else {
                    (-s, LieTree::node(cb, ca))
                }
            }
        }
    }

    pub fn expand(&self) -> NCPolynomial {
        match self {
            LieTree::Leaf(i) => NCPolynomial::var(*i),
            LieTree::Node(a, b) => a.expand().commutator(&b.expand()),
        }
    }

    pub fn relabel(&self, f: &impl Fn(u8) -> u8) -> LieTree {
        match self {
            LieTree::Leaf(i) => LieTree::Leaf(f(*i)),
            LieTree::Node(a, b) => LieTree::node(a.relabel(f), b.relabel(f)),
        }
    }

    /// Parses `[[1,2],[3,4]]`; leaves may be written `3` or `X3`.
    pub fn parse(s: &str) -> Result<LieTree, Error> {
        let b = s.as_bytes();
        let mut i = 0;
        let t = Self::parse_at(b, &mut i)?;
        while i < b.len() && b[i].is_ascii_whitespace() {
            i += 1;
        }
        if i != b.len() {
            return Err(Error::Parse(format!("trailing input in tree `{s}`")));
        }
        Ok(t)
    }

    fn parse_at(b: &[u8], i: &mut usize) -> Result<LieTree, Error> {
        while *i < b.len() && b[*i].is_ascii_whitespace() {
            *i += 1;
        }
        let bad = |m: &str| Error::Parse(format!("tree: {m}"));
        match b.get(*i) {
            Some(b'[') => {
                *i += 1;
                let l = Self::parse_at(b, i)?;
                while *i < b.len() && b[*i].is_ascii_whitespace() {
                    *i += 1;
                }
                if b.get(*i) != Some(&b',') {
                    return Err(bad("expected `,`"));
                }
                *i += 1;
                let r = Self::parse_at(b, i)?;
                while *i < b.len() && b[*i].is_ascii_whitespace() {
                    *i += 1;
                }
                if b.get(*i) != Some(&b']') {
                    return Err(bad("expected `]`"));
                }
                *i += 1;
                Ok(LieTree::node(l, r))
            }
            Some(_) => {
                if b[*i] == b'X' {
                    *i += 1;
                }
                let start = *i;
                while *i < b.len() && b[*i].is_ascii_digit() {
                    *i += 1;
                }
                if start == *i {
                    return Err(bad("expected a leaf index"));
                }
                let n: u32 = std::str::from_utf8(&b[start..*i]).unwrap().parse().map_err(|_| bad("bad index"))?;
                if n > 255 {
                    return Err(bad("leaf index too large"));
                }
                Ok(LieTree::Leaf(n as u8))
            }
            None => Err(bad("unexpected end")),
        }
    }
}

impl fmt::Display for LieTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieTree::Leaf(i) => write!(f, "{i}"),
            LieTree::Node(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// Rational combination of bracketing trees.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LieExpression {
    pub terms: Vec<(Q, LieTree)>,
}

impl LieExpression {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn leaf(i: u8) -> Self {
        Self { terms: vec![(Q::one(), LieTree::Leaf(i))] }
    }
    pub fn push(&mut self, c: Q, t: LieTree) {
        if !c.is_zero() {
            self.terms.push((c, t));
        }
    }

    /// Canonical orientation on every tree, then merge equal trees.
    pub fn canonicalize(&self) -> LieExpression {
        let mut m: BTreeMap<LieTree, Q> = BTreeMap::new();
        for (c, t) in &self.terms {
            let (s, ct) = t.canonical();
            *m.entry(ct).or_insert_with(Q::zero) += c * qi(s as i64);
        }
        LieExpression { terms: m.into_iter().filter(|(_, c)| !c.is_zero()).map(|(t, c)| (c, t)).collect() }
    }

    pub fn scale(&self, c: &Q) -> LieExpression {
        LieExpression { terms: self.terms.iter().map(|(x, t)| (x * c, t.clone())).collect() }
    }

    /// Bilinear bracket `[self, other]` on trees.
    pub fn bracket(&self, other: &LieExpression) -> LieExpression {
        let mut out = LieExpression::new();
        for (c1, t1) in &self.terms {
            for (c2, t2) in &other.terms {
                out.push(c1 * c2, LieTree::node(t1.clone(), t2.clone()));
            }
        }
        out
    }

    pub fn extend(&mut self, other: LieExpression) {
        self.terms.extend(other.terms);
    }

    pub fn expand(&self) -> NCPolynomial {
        let mut out = NCPolynomial::zero();
        for (c, t) in &self.terms {
            out.add_scaled(&t.expand(), c);
        }
        out
    }

    pub fn l1_cost(&self) -> Q {
        self.terms.iter().fold(Q::zero(), |a, (c, _)| a + c.abs())
    }

    /// One `tree:p/q` pair per line; blank lines and `#` comments skipped.
    pub fn parse_lines(s: &str) -> Result<LieExpression, Error> {
        let mut out = LieExpression::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (t, c) = line
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `tree:coefficient` in `{line}`")))?;
            out.push(parse_rational(c)?, LieTree::parse(t)?);
        }
        Ok(out)
    }
}

impl fmt::Display for LieExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, t)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let a = c.abs();
            if a.is_one() {
                write!(f, "{t}")?;
            } else {
                write!(f, "{a}*{t}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u8) -> NCPolynomial {
        NCPolynomial::var(i)
    }

    #[test]
    fn basis_product() {
        let p = &x(1) * &x(2);
        assert_eq!(p.coeff_of(&[1, 2]), qi(1));
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn distributivity() {
        let s = &x(1) + &x(2);
        let sq = &s * &s;
        assert_eq!(sq.len(), 4);
        for w in [[1, 1], [1, 2], [2, 1], [2, 2]] {
            assert_eq!(sq.coeff_of(&w), qi(1));
        }
    }

    #[test]
    fn commutator_and_jacobi() {
        let c = x(1).commutator(&x(2));
        assert_eq!(c, NCPolynomial::parse("X1X2 - X2X1").unwrap());
        let p = NCPolynomial::parse("X1 + 1/2 X2X3").unwrap();
        assert!(p.commutator(&p).is_zero());
        let j = &(&x(1).commutator(&x(2)).commutator(&x(3)) + &x(2).commutator(&x(3)).commutator(&x(1)))
            + &x(3).commutator(&x(1)).commutator(&x(2));
        assert!(j.is_zero());
    }

    #[test]
    fn exp_and_log() {
        let e = x(1).truncated_exp(3).unwrap();
        assert_eq!(e, NCPolynomial::parse("1 + X + 1/2 X^2 + 1/6 X^3").unwrap().with_cap(Some(3)));
        let l = x(1).truncated_exp(4).unwrap().truncated_log(4).unwrap();
        assert_eq!(l.terms(), x(1).terms());
        let xy = x(1).truncated_exp(2).unwrap().mul(&x(2).truncated_exp(2).unwrap());
        let l = xy.truncated_log(2).unwrap();
        assert_eq!(l.homogeneous_part(2).terms(), NCPolynomial::parse("1/2 XY - 1/2 YX").unwrap().terms());
        assert!(x(1).truncated_log(2).is_err());
        assert!(NCPolynomial::one().truncated_exp(2).is_err());
    }

    #[test]
    fn l1() {
        assert_eq!(NCPolynomial::parse("1/2 X1X2 - 1/2 X2X1").unwrap().l1_norm(), qi(1));
        assert_eq!(NCPolynomial::zero().l1_norm(), qi(0));
    }

    #[test]
    fn dsw_basics() {
        assert_eq!(NCPolynomial::word(&[1, 2]).dsw_map().unwrap(), x(1).commutator(&x(2)));
        let mu2 = NCPolynomial::parse("1/2[X1,X2]").unwrap();
        assert_eq!(mu2.dsw_map().unwrap(), mu2.scale(&qi(2)));
        assert!(NCPolynomial::parse("X1 + X1X2").unwrap().dsw_map().is_err());
    }

    #[test]
    fn parse_and_json_roundtrip() {
        let p = NCPolynomial::parse("3/4 X1X2^2 - [X1,X3] + 2").unwrap();
        let j = p.to_json();
        assert_eq!(NCPolynomial::from_json(&j).unwrap(), p);
        assert_eq!(p.coeff_of(&[1, 2, 2]), q(3, 4));
        assert_eq!(p.constant_term(), qi(2));
        assert!(NCPolynomial::parse("X1 +").is_err());
    }

    #[test]
    fn tree_canonical_orientation() {
        let t = LieTree::parse("[2,[1,3]]").unwrap();
        let (s, c) = t.canonical();
        assert_eq!(s, -1);
        assert_eq!(c.to_string(), "[[1,3],2]");
        assert_eq!(t.expand(), c.expand().scale(&qi(-1)));
    }

    #[test]
    fn lie_lines() {
        let e = LieExpression::parse_lines("[[1,2],3]:1/6\n# c\n[1,[2,3]]:1/6\n").unwrap();
        assert_eq!(e.terms.len(), 2);
        assert_eq!(e.l1_cost(), q(1, 3));
    }
}
