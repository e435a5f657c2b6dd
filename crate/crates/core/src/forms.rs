//! Differential forms with rational-function coefficients.
//!
//! Coefficients are stored on strictly increasing index tuples in the usual
//! expansion `Σ c_I dx^I`. Pointwise evaluation uses the averaged convention
//! `α∧β = ½(α⊗β − β⊗α)`: a p-form evaluated on p vectors carries a `1/p!`
//! weight in front of the determinant. With this convention the
//! antisymmetric part of `∇ω` is exactly `dω`.

use std::collections::BTreeMap;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::linalg::{RatMatrix, Vector};
use crate::rational::Rational;

pub type Indices = Vec<usize>;

#[derive(Clone, Debug)]
pub struct PForm {
    n: usize,
    p: usize,
    coeffs: BTreeMap<Indices, Expr>,
}

impl PForm {
    pub fn zero(n: usize, p: usize) -> Self {
        assert!(p <= n, "degree exceeds dimension");
        PForm {
            n,
            p,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn function(f: Expr) -> Self {
        let n = f.nvars();
        let mut out = PForm::zero(n, 0);
        out.insert(vec![], f);
        out
    }

    /// `dx^{i+1}` (0-based index).
    pub fn dx(n: usize, i: usize) -> Self {
        PForm::one_form(vec![(i, Expr::one(n))], n)
    }

    /// `Σ f_j dx^j` from (0-based index, coefficient) pairs.
    pub fn one_form(terms: impl IntoIterator<Item = (usize, Expr)>, n: usize) -> Self {
        let mut out = PForm::zero(n, 1);
        for (i, c) in terms {
            assert!(i < n, "index out of range");
            let cur = out.coeff(&[i]);
            out.insert(vec![i], &cur + &c);
        }
        out
    }

    pub fn from_components(components: &[Expr]) -> Self {
        let n = components.len();
        PForm::one_form(components.iter().cloned().enumerate(), n)
    }

    /// Builds a form from (increasing 0-based tuple, coefficient) pairs.
    pub fn from_terms(
        n: usize,
        p: usize,
        terms: impl IntoIterator<Item = (Indices, Expr)>,
    ) -> Result<Self> {
        let mut out = PForm::zero(n, p);
        for (idx, c) in terms {
            if idx.len() != p || idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&i| i >= n)
            {
                return Err(Error::Invalid(format!(
                    "bad index tuple {idx:?} for a {p}-form in dimension {n}"
                )));
            }
            let cur = out.coeff(&idx);
            out.insert(idx, &cur + &c);
        }
        Ok(out)
    }

    fn insert(&mut self, idx: Indices, c: Expr) {
        if c.is_zero() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, c);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn coeff(&self, idx: &[usize]) -> Expr {
        self.coeffs
            .get(idx)
            .cloned()
            .unwrap_or_else(|| Expr::zero(self.n))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Indices, &Expr)> {
        self.coeffs.iter()
    }

    /// Components `f_j` of a 1-form.
    pub fn components(&self) -> Vec<Expr> {
        assert_eq!(self.p, 1, "components are defined for 1-forms");
        (0..self.n).map(|i| self.coeff(&[i])).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &PForm) -> Result<PForm> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (idx, c) in &other.coeffs {
            let cur = out.coeff(idx);
            out.insert(idx.clone(), &cur + c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PForm) -> Result<PForm> {
        self.add(&other.scale(&Expr::int(self.n, -1)))
    }

    pub fn scale(&self, f: &Expr) -> PForm {
        let mut out = PForm::zero(self.n, self.p);
        for (idx, c) in &self.coeffs {
            out.insert(idx.clone(), c * f);
        }
        out
    }

    fn check_same(&self, other: &PForm) -> Result<()> {
        if self.n != other.n || self.p != other.p {
            return Err(Error::DimensionMismatch(format!(
                "({}, {})-form vs ({}, {})-form",
                self.n, self.p, other.n, other.p
            )));
        }
        Ok(())
    }

    /// Coefficientwise symbolic equality.
    pub fn equal(&self, other: &PForm) -> bool {
        self.n == other.n
            && self.p == other.p
            && self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    pub fn wedge(&self, other: &PForm) -> Result<PForm> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "wedge of forms on R^{} and R^{}",
                self.n, other.n
            )));
        }
        let p = self.p + other.p;
        if p > self.n {
            // no nonzero forms of this degree; report the top degree zero form
            return Ok(PForm::zero(self.n, self.n));
        }
        let mut acc: BTreeMap<Indices, Expr> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if let Some((idx, sign)) = merge_sorted(i, j) {
                    let mut t = a * b;
                    if sign < 0 {
                        t = -t;
                    }
                    let e = acc.entry(idx).or_insert_with(|| Expr::zero(self.n));
                    *e = &*e + &t;
                }
            }
        }
        let mut out = PForm::zero(self.n, p);
        for (idx, c) in acc {
            out.insert(idx, c);
        }
        Ok(out)
    }

    /// `k`-fold wedge power, `α^0 = 1`.
    pub fn wedge_pow(&self, k: usize) -> PForm {
        let mut acc = PForm::function(Expr::one(self.n));
        for _ in 0..k {
            acc = acc.wedge(self).expect("same dimension");
            if acc.is_zero() {
                return PForm::zero(self.n, (self.p * k).min(self.n));
            }
        }
        acc
    }

    /// Exterior derivative.
    pub fn d(&self) -> PForm {
        if self.p >= self.n {
            return PForm::zero(self.n, self.n);
        }
        let mut acc: BTreeMap<Indices, Expr> = BTreeMap::new();
        for (idx, c) in &self.coeffs {
            for i in 0..self.n {
                if idx.contains(&i) {
                    continue;
                }
                let dc = c.diff(i);
                if dc.is_zero() {
                    continue;
                }
                let before = idx.iter().filter(|&&j| j < i).count();
                let mut new_idx = idx.clone();
                new_idx.insert(before, i);
                let t = if before % 2 == 0 { dc } else { -dc };
                let e = acc.entry(new_idx).or_insert_with(|| Expr::zero(self.n));
                *e = &*e + &t;
            }
        }
        let mut out = PForm::zero(self.n, self.p + 1);
        for (idx, c) in acc {
            out.insert(idx, c);
        }
        out
    }

    pub fn eval(&self, x: &[Rational]) -> Result<AltTensor> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} in R^{}",
                x.len(),
                self.n
            )));
        }
        let mut values = BTreeMap::new();
        for (idx, c) in &self.coeffs {
            let v = c.eval(x)?;
            if !v.is_zero() {
                values.insert(idx.clone(), v);
            }
        }
        Ok(AltTensor {
            n: self.n,
            p: self.p,
            values,
        })
    }

    pub fn to_wire(&self, names: &[String]) -> Vec<FormTerm> {
        self.coeffs
            .iter()
            .map(|(idx, c)| FormTerm {
                indices: idx.iter().map(|i| i + 1).collect(),
                coeff: c.display_with(names),
            })
            .collect()
    }

    pub fn from_wire(n: usize, p: usize, terms: &[FormTerm], names: &[String]) -> Result<PForm> {
        let parsed = terms
            .iter()
            .map(|t| {
                if t.indices.contains(&0) {
                    return Err(Error::Invalid("form indices are 1-based".into()));
                }
                Ok((
                    t.indices.iter().map(|i| i - 1).collect(),
                    parse_expr(&t.coeff, names)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        PForm::from_terms(n, p, parsed)
    }
}

/// Sorts the concatenation of two increasing tuples; `None` if they share
/// an index, otherwise the permutation sign.
fn merge_sorted(a: &[usize], b: &[usize]) -> Option<(Indices, i32)> {
    let mut inversions = 0usize;
    for &x in a {
        for &y in b {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    let mut idx: Indices = a.iter().chain(b).copied().collect();
    idx.sort_unstable();
    Some((idx, if inversions.is_multiple_of(2) { 1 } else { -1 }))
}

/// A form evaluated at a point: an alternating multilinear map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AltTensor {
    pub n: usize,
    pub p: usize,
    values: BTreeMap<Indices, Rational>,
}

impl AltTensor {
    pub fn value(&self, idx: &[usize]) -> Rational {
        self.values.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Multilinear evaluation `(1/p!) Σ_I c_I det[v_a(I_b)]`.
    pub fn apply(&self, vectors: &[Vector]) -> Rational {
        assert_eq!(vectors.len(), self.p, "wrong number of arguments");
        let mut acc = Rational::zero();
        for (idx, c) in &self.values {
            let m = RatMatrix::from_rows(
                &vectors
                    .iter()
                    .map(|v| idx.iter().map(|&i| v[i].clone()).collect())
                    .collect::<Vec<_>>(),
            );
            let d = if self.p == 0 {
                crate::rational::one()
            } else {
                m.det()
            };
            acc += c * d;
        }
        acc / Rational::from_integer(factorial(self.p).into())
    }

    /// Unweighted determinant evaluation (the `Σ c_I det` convention).
    pub fn apply_det(&self, vectors: &[Vector]) -> Rational {
        self.apply(vectors) * Rational::from_integer(factorial(self.p).into())
    }

    /// A 1-form at a point as a covector.
    pub fn covector(&self) -> Vector {
        assert_eq!(self.p, 1);
        (0..self.n).map(|i| self.value(&[i])).collect()
    }

    /// A 2-form at a point as the antisymmetric matrix `M_ij = α(e_i, e_j)`.
    pub fn bilinear_matrix(&self) -> RatMatrix {
        assert_eq!(self.p, 2);
        let half = crate::rational::frac(1, 2);
        let mut m = RatMatrix::zeros(self.n, self.n);
        for (idx, c) in &self.values {
            let v = c * &half;
            m[(idx[0], idx[1])] = v.clone();
            m[(idx[1], idx[0])] = -v;
        }
        m
    }

    /// Value of a 0-form.
    pub fn scalar(&self) -> Rational {
        assert_eq!(self.p, 0);
        self.value(&[])
    }
}

pub fn factorial(p: usize) -> u64 {
    (1..=p as u64).product()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormTerm {
    pub indices: Vec<usize>,
    pub coeff: String,
}

/// `df` for a function `f`.
pub fn exterior_derivative_of(f: &Expr) -> PForm {
    PForm::from_components(&f.gradient())
}

/// Wedge of a list of 1-forms (empty list gives the constant 1).
pub fn wedge_all(forms: &[PForm], n: usize) -> PForm {
    forms.iter().fold(PForm::function(Expr::one(n)), |acc, f| {
        acc.wedge(f).expect("same dimension")
    })
}
