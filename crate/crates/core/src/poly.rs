//! Sparse multivariate polynomials over the rationals with dense exponent vectors.

use std::collections::BTreeMap;
use std::fmt::Write;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::rational::{self, Rational};

pub type Exponent = Vec<u32>;

/// Polynomial in `nvars` variables. Zero coefficients are never stored, so
/// structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rational::one())
    }

    /// The coordinate `x_{i+1}` (0-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(e, Rational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, Rational)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length must equal nvars");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&d| d == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Leading term in lexicographic order (x1 > x2 > ...).
    pub fn leading(&self) -> Option<(&Exponent, &Rational)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, mut k: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `i` (0-based).
    pub fn diff(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * Rational::from_integer(e[i].into()));
        }
        out
    }

    /// Exact value at `x`. Works over the integers with the common
    /// denominators of `x` and of the coefficients and reduces once.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        debug_assert_eq!(x.len(), self.nvars);
        if self.terms.is_empty() {
            return Rational::zero();
        }
        let d = x.iter().fold(BigInt::one(), |acc, xi| acc.lcm(xi.denom()));
        let l = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums: Vec<BigInt> = x.iter().map(|xi| xi.numer() * (&d / xi.denom())).collect();
        let deg = self.total_degree();
        // powers[i][k] = nums_i^k, dpow[k] = d^k
        let mut max_deg = vec![0u32; self.nvars];
        for e in self.terms.keys() {
            for (m, &k) in max_deg.iter_mut().zip(e) {
                *m = (*m).max(k);
            }
        }
        let table = |base: &BigInt, top: u32| {
            let mut row = Vec::with_capacity(top as usize + 1);
            row.push(BigInt::one());
            for k in 1..=top as usize {
                let next = &row[k - 1] * base;
                row.push(next);
            }
            row
        };
        let powers: Vec<Vec<BigInt>> = nums
            .iter()
            .zip(&max_deg)
            .map(|(b, &m)| table(b, m))
            .collect();
        let dpow = table(&d, deg);
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.numer() * (&l / c.denom());
            for (row, &k) in powers.iter().zip(e) {
                if k > 0 {
                    t *= &row[k as usize];
                }
            }
            let te: u32 = e.iter().sum();
            if te < deg {
                t *= &dpow[(deg - te) as usize];
            }
            acc += t;
        }
        Rational::new(acc, l * &dpow[deg as usize])
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = rational::to_f64(c);
                for (xi, &d) in x.iter().zip(e) {
                    t *= xi.powi(d as i32);
                }
                t
            })
            .sum()
    }

    /// Exact quotient `self / d` when `d` divides `self`, using lex-order
    /// division: if `d | self` every remainder stays divisible, so a leading
    /// term that `LT(d)` does not divide proves non-divisibility.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (de, dc) = d.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((re, rc)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&de).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exponent = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            let qc = rc / &dc;
            let mono = Poly::from_terms(self.nvars, [(qe, qc)]);
            rem = rem.sub(&mono.mul(d));
            quot = quot.add(&mono);
        }
        Some(quot)
    }

    /// Substitutes polynomials for every variable.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars);
        let nv = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Poly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(nv, c.clone());
            for (s, &d) in subs.iter().zip(e) {
                if d > 0 {
                    t = t.mul(&s.pow(d));
                }
            }
            out = out.add(&t);
        }
        out
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > 0)
                .map(|(i, &d)| {
                    if d == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{}", names[i], d)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(s, "{}", abs).unwrap();
            } else if abs.is_one() {
                s.push_str(&mono.join("*"));
            } else {
                write!(s, "{}*{}", abs, mono.join("*")).unwrap();
            }
        }
        s
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}
