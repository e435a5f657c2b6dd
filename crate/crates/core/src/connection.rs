//! Torsion-free affine connections given by Christoffel symbols, Hessians
//! `H(u) = ∇du`, and the symmetrization `Sω = ∇ω − dω`.
//!
//! Sign convention: `∇(dx^k) = Γ^k_ij dx^i ⊗ dx^j`, so
//! `H(u)_ij = ∂_i∂_j u + Γ^k_ij ∂_k u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::forms::PForm;
use crate::linalg::{self, RatMatrix, Vector};
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct Connection {
    n: usize,
    gamma: Vec<Expr>,
}

impl Connection {
    pub fn flat(n: usize) -> Self {
        Connection {
            n,
            gamma: vec![Expr::zero(n); n * n * n],
        }
    }

    /// Builds a connection from `(k, i, j, Γ^k_ij)` entries (0-based),
    /// symmetrizing in `i, j`. A pair given twice with different values is
    /// a conflict.
    pub fn from_entries(
        n: usize,
        entries: impl IntoIterator<Item = (usize, usize, usize, Expr)>,
    ) -> Result<Self> {
        let mut set: Vec<Option<Expr>> = vec![None; n * n * n];
        for (k, i, j, c) in entries {
            if k >= n || i >= n || j >= n {
                return Err(Error::Invalid(format!(
                    "Christoffel index ({},{},{}) out of range",
                    k + 1,
                    i + 1,
                    j + 1
                )));
            }
            for (a, b) in [(i, j), (j, i)] {
                let slot = &mut set[(k * n + a) * n + b];
                match slot {
                    Some(prev) if !prev.equal(&c) => {
                        return Err(Error::ConnectionConflict {
                            k: k + 1,
                            i: i + 1,
                            j: j + 1,
                        })
                    }
                    _ => *slot = Some(c.clone()),
                }
            }
        }
        Ok(Connection {
            n,
            gamma: set
                .into_iter()
                .map(|g| g.unwrap_or_else(|| Expr::zero(n)))
                .collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Γ^k_ij` (0-based).
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Expr {
        &self.gamma[(k * self.n + i) * self.n + j]
    }

    pub fn is_flat(&self) -> bool {
        self.gamma.iter().all(Expr::is_zero)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::DimensionMismatch(format!(
                "connection on R^{} applied in R^{n}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn to_wire(&self, names: &[String]) -> Vec<ChristoffelEntry> {
        let mut out = Vec::new();
        for k in 0..self.n {
            for i in 0..self.n {
                for j in i..self.n {
                    let g = self.gamma(k, i, j);
                    if !g.is_zero() {
                        out.push(ChristoffelEntry {
                            k: k + 1,
                            i: i + 1,
                            j: j + 1,
                            coeff: g.display_with(names),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn from_wire(n: usize, entries: &[ChristoffelEntry], names: &[String]) -> Result<Self> {
        let parsed = entries
            .iter()
            .map(|e| {
                if e.k == 0 || e.i == 0 || e.j == 0 {
                    return Err(Error::Invalid("Christoffel indices are 1-based".into()));
                }
                Ok((e.k - 1, e.i - 1, e.j - 1, parse_expr(&e.coeff, names)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Connection::from_entries(n, parsed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChristoffelEntry {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub coeff: String,
}

/// Symmetric quadratic form with rational-function entries.
#[derive(Clone, Debug)]
pub struct SymForm {
    n: usize,
    entries: Vec<Expr>,
}

impl SymForm {
    pub fn zero(n: usize) -> Self {
        SymForm {
            n,
            entries: vec![Expr::zero(n); n * n],
        }
    }

    /// From a full matrix; fails unless it is exactly symmetric.
    pub fn from_matrix(n: usize, entries: Vec<Expr>) -> Result<Self> {
        assert_eq!(entries.len(), n * n);
        let m = SymForm { n, entries };
        for i in 0..n {
            for j in 0..i {
                if !m.get(i, j).equal(m.get(j, i)) {
                    return Err(Error::Asymmetric);
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i * self.n + j]
    }

    fn set_sym(&mut self, i: usize, j: usize, v: Expr) {
        self.entries[i * self.n + j] = v.clone();
        self.entries[j * self.n + i] = v;
    }

    pub fn add(&self, other: &SymForm) -> SymForm {
        SymForm {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymForm) -> SymForm {
        SymForm {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, f: &Expr) -> SymForm {
        SymForm {
            n: self.n,
            entries: self.entries.iter().map(|a| a * f).collect(),
        }
    }

    pub fn equal(&self, other: &SymForm) -> bool {
        self.n == other.n
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.equal(b))
    }

    pub fn eval(&self, x: &[Rational]) -> Result<RatMatrix> {
        let mut m = RatMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..=i {
                let v = self.get(i, j).eval(x)?;
                m[(j, i)] = v.clone();
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn to_strings(&self, names: &[String]) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).display_with(names))
                    .collect()
            })
            .collect()
    }
}

/// Symmetric product `α∘β = ½(α⊗β + β⊗α)` of two 1-forms.
pub fn sym_product(alpha: &PForm, beta: &PForm) -> SymForm {
    let n = alpha.dim();
    let a = alpha.components();
    let b = beta.components();
    let half = rational::frac(1, 2);
    let mut out = SymForm::zero(n);
    for i in 0..n {
        for j in 0..=i {
            out.set_sym(i, j, (&a[i] * &b[j] + &a[j] * &b[i]).scale(&half));
        }
    }
    out
}

/// `α⊗α` as a quadratic form, i.e. `(α)²`.
pub fn square(alpha: &PForm) -> SymForm {
    sym_product(alpha, alpha)
}

pub fn hessian(u: &Expr, conn: &Connection) -> Result<SymForm> {
    let n = u.nvars();
    conn.check_dim(n)?;
    let grad = u.gradient();
    let mut h = SymForm::zero(n);
    for i in 0..n {
        let gi = &grad[i];
        for j in 0..=i {
            let mut v = gi.diff(j);
            for (k, gk) in grad.iter().enumerate() {
                let g = conn.gamma(k, i, j);
                if !g.is_zero() && !gk.is_zero() {
                    v = &v + &(g * gk);
                }
            }
            h.set_sym(i, j, v);
        }
    }
    Ok(h)
}

/// Raw covariant derivative of a 1-form as the full (non-symmetric) matrix
/// `(∇ω)_ij = ∂_i f_j + f_k Γ^k_ij` for `ω = f_j dx^j`.
pub fn covariant_derivative(omega: &PForm, conn: &Connection) -> Result<Vec<Vec<Expr>>> {
    let n = omega.dim();
    conn.check_dim(n)?;
    let f = omega.components();
    let out = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut v = f[j].diff(i);
                    for (k, fk) in f.iter().enumerate() {
                        let g = conn.gamma(k, i, j);
                        if !g.is_zero() && !fk.is_zero() {
                            v = &v + &(fk * g);
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    Ok(out)
}

/// `Sω_ik = ½(∂_i f_k + ∂_k f_i) + f_j Γ^j_ik`.
pub fn s_omega(omega: &PForm, conn: &Connection) -> Result<SymForm> {
    let n = omega.dim();
    conn.check_dim(n)?;
    let f = omega.components();
    let half = rational::frac(1, 2);
    let mut s = SymForm::zero(n);
    for i in 0..n {
        for k in 0..=i {
            let mut v = (&f[k].diff(i) + &f[i].diff(k)).scale(&half);
            for (j, fj) in f.iter().enumerate() {
                let g = conn.gamma(j, i, k);
                if !g.is_zero() && !fj.is_zero() {
                    v = &v + &(fj * g);
                }
            }
            s.set_sym(i, k, v);
        }
    }
    Ok(s)
}

pub fn is_strictly_convex_at(u: &Expr, conn: &Connection, x: &[Rational]) -> Result<bool> {
    let h = hessian(u, conn)?.eval(x)?;
    linalg::is_pd(&h)
}

/// `[Q(x)(w_a, w_b)]` over a basis of `W`, evaluated at `x`.
pub fn restrict_form(q: &SymForm, x: &[Rational], basis: &[Vector]) -> Result<RatMatrix> {
    Ok(q.eval(x)?.restrict(basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::default_names;
    use crate::rational::{frac, int};

    fn e(s: &str) -> Expr {
        parse_expr(s, &default_names(3)).unwrap()
    }

    fn origin() -> Vec<Rational> {
        vec![int(0); 3]
    }

    #[test]
    fn flat_hessians() {
        let h = hessian(&e("x2^2/2"), &Connection::flat(3))
            .unwrap()
            .eval(&origin())
            .unwrap();
        assert_eq!(
            h,
            RatMatrix::from_i64(&[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]])
        );
        let h = hessian(&e("x1 + x2*x3 - x2^2/2"), &Connection::flat(3))
            .unwrap()
            .eval(&origin())
            .unwrap();
        assert_eq!(
            h,
            RatMatrix::from_i64(&[&[0, 0, 0], &[0, -1, 1], &[0, 1, 0]])
        );
    }

    #[test]
    fn hessian_of_coordinate_is_christoffel() {
        let conn = Connection::from_entries(3, [(0, 1, 1, Expr::int(3, 1))]).unwrap();
        let h = hessian(&e("x1"), &conn)
            .unwrap()
            .eval(&[int(3), int(-2), frac(1, 7)])
            .unwrap();
        assert_eq!(
            h,
            RatMatrix::from_i64(&[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]])
        );
    }

    #[test]
    fn convexity_at_point() {
        let flat = Connection::flat(3);
        assert!(is_strictly_convex_at(&e("(x1^2 + x2^2 + x3^2)/2"), &flat, &origin()).unwrap());
        assert!(!is_strictly_convex_at(&e("x1"), &flat, &origin()).unwrap());
        let delta =
            Connection::from_entries(3, (0..3).map(|i| (0, i, i, Expr::int(3, 1)))).unwrap();
        assert!(is_strictly_convex_at(&e("x1"), &delta, &origin()).unwrap());
    }

    #[test]
    fn s_omega_of_contact_form() {
        let w = PForm::one_form([(0, e("1")), (1, e("x3"))], 3);
        let s = s_omega(&w, &Connection::flat(3))
            .unwrap()
            .eval(&origin())
            .unwrap();
        let mut expect = RatMatrix::zeros(3, 3);
        expect[(1, 2)] = frac(1, 2);
        expect[(2, 1)] = frac(1, 2);
        assert_eq!(s, expect);
        let q = restrict_form(
            &s_omega(&w, &Connection::flat(3)).unwrap(),
            &origin(),
            &[vec![int(0), int(1), int(1)]],
        );
        assert_eq!(q.unwrap(), RatMatrix::from_i64(&[&[1]]));
    }

    #[test]
    fn s_omega_with_negative_christoffels() {
        let conn = Connection::from_entries(
            3,
            [
                (0, 1, 1, Expr::int(3, -1)),
                (0, 2, 2, Expr::int(3, -1)),
                (0, 1, 2, Expr::constant(3, frac(-1, 2))),
            ],
        )
        .unwrap();
        let w = PForm::one_form([(0, e("1")), (1, e("x3"))], 3);
        let s = s_omega(&w, &conn).unwrap().eval(&origin()).unwrap();
        assert_eq!(
            s,
            RatMatrix::from_i64(&[&[0, 0, 0], &[0, -1, 0], &[0, 0, -1]])
        );
    }

    #[test]
    fn s_omega_of_exact_form_is_hessian() {
        let u = e("x1^3*x2 - x3^2*x1 + x2");
        let du = crate::forms::exterior_derivative_of(&u);
        let conn =
            Connection::from_entries(3, [(1, 0, 2, e("x1")), (2, 2, 2, Expr::int(3, 2))]).unwrap();
        assert!(s_omega(&du, &conn)
            .unwrap()
            .equal(&hessian(&u, &conn).unwrap()));
    }

    #[test]
    fn conflicting_entries_are_rejected() {
        let err =
            Connection::from_entries(3, [(0, 1, 2, Expr::int(3, 1)), (0, 2, 1, Expr::int(3, 2))]);
        assert_eq!(
            err.unwrap_err(),
            Error::ConnectionConflict { k: 1, i: 3, j: 2 }
        );
        assert!(Connection::from_entries(
            3,
            [(0, 1, 2, Expr::int(3, 1)), (0, 2, 1, Expr::int(3, 1))]
        )
        .is_ok());
    }

    #[test]
    fn wire_round_trip() {
        let names = default_names(3);
        let conn = Connection::from_entries(3, [(0, 1, 2, e("x1/2"))]).unwrap();
        let wire = conn.to_wire(&names);
        assert_eq!(wire.len(), 1);
        let back = Connection::from_wire(3, &wire, &names).unwrap();
        assert!(back.gamma(0, 2, 1).equal(&e("x1/2")));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            hessian(&e("x1"), &Connection::flat(2)),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
