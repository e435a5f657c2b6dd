//! Dense exact linear algebra over the rationals: row reduction, null
//! spaces, determinants and definiteness tests by principal minors.

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub type Vector = Vec<Rational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = rational::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vector]) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned());
        }
        RatMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Matrix whose columns are the given vectors (`dim` rows).
    pub fn from_columns(dim: usize, cols: &[Vector]) -> Self {
        let mut m = RatMatrix::zeros(dim, cols.len());
        for (j, v) in cols.iter().enumerate() {
            for i in 0..dim {
                m[(i, j)] = v[i].clone();
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        RatMatrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&v| rational::int(v)).collect())
                .collect::<Vec<_>>(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a * &other[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vector {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Rational::zero(), |acc, j| acc + &self[(i, j)] * &v[j]))
            .collect()
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn neg(&self) -> RatMatrix {
        self.scale(&rational::int(-1))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..=i).all(|j| self[(i, j)] == -self[(j, i)].clone()))
    }

    /// Congruence `Bᵀ M B` where the columns of `B` are `basis`.
    pub fn restrict(&self, basis: &[Vector]) -> RatMatrix {
        let b = RatMatrix::from_columns(self.rows, basis);
        b.transpose().mul(self).mul(&b)
    }

    /// Bilinear value `uᵀ M v`.
    pub fn bilinear(&self, u: &[Rational], v: &[Rational]) -> Rational {
        let mv = self.mul_vec(v);
        u.iter()
            .zip(&mv)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                m[(r, j)] *= &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let d = &f * &m[(r, j)];
                        m[(i, j)] -= d;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{v : M v = 0}`, one vector per free column, with a 1 in
    /// that column.
    pub fn nullspace(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = rational::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let d = &f * &m[(c, j)];
                    m[(i, j)] -= d;
                }
            }
        }
        det
    }

    pub fn submatrix(&self, idx: &[usize]) -> RatMatrix {
        let mut m = RatMatrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn leading_minors(&self) -> Vec<Rational> {
        (1..=self.rows)
            .map(|k| self.submatrix(&(0..k).collect::<Vec<_>>()).det())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

/// Sylvester's criterion: every leading principal minor strictly positive.
/// The empty matrix is positive definite.
pub fn is_pd(m: &RatMatrix) -> Result<bool> {
    if !m.is_symmetric() {
        return Err(Error::Asymmetric);
    }
    Ok(first_nonpositive_minor(m).is_none())
}

/// Index (1-based order) and value of the first leading minor that is not
/// positive, if any.
pub fn first_nonpositive_minor(m: &RatMatrix) -> Option<(usize, Rational)> {
    // Elimination without pivoting: while the leading minors stay positive,
    // the k-th minor is the product of the first k pivots.
    let n = m.rows();
    let mut a = m.clone();
    let mut minor = rational::one();
    for c in 0..n {
        let piv = a[(c, c)].clone();
        minor *= &piv;
        if !minor.is_positive() {
            return Some((c + 1, minor));
        }
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = &a[(i, c)] / &piv;
            for j in c..n {
                let d = &f * &a[(c, j)];
                a[(i, j)] -= d;
            }
        }
    }
    None
}

/// Positive semidefinite: every principal minor (not only leading) is
/// nonnegative.
pub fn is_psd(m: &RatMatrix) -> Result<bool> {
    if !m.is_symmetric() {
        return Err(Error::Asymmetric);
    }
    let n = m.rows();
    assert!(n < 24, "principal-minor enumeration is for small matrices");
    for mask in 1u32..(1u32 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if m.submatrix(&idx).det().is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_nsd(m: &RatMatrix) -> Result<bool> {
    is_psd(&m.neg())
}

pub fn is_nd(m: &RatMatrix) -> Result<bool> {
    is_pd(&m.neg())
}

/// Rank of a list of vectors.
pub fn span_rank(vectors: &[Vector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    RatMatrix::from_rows(vectors).rank()
}

/// Canonical reduced row echelon basis of the span, used to compare
/// subspaces for equality.
pub fn canonical_basis(vectors: &[Vector]) -> Vec<Vector> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (r, piv) = RatMatrix::from_rows(vectors).rref();
    (0..piv.len()).map(|i| r.row(i)).collect()
}

pub fn same_span(a: &[Vector], b: &[Vector]) -> bool {
    canonical_basis(a) == canonical_basis(b)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn sylvester_examples() {
        assert!(is_pd(&RatMatrix::from_i64(&[&[2, 1], &[1, 1]])).unwrap());
        assert!(!is_pd(&RatMatrix::from_i64(&[&[1, 2], &[2, 1]])).unwrap());
        assert!(!is_pd(&RatMatrix::from_i64(&[&[0, 0], &[0, 1]])).unwrap());
        assert!(is_pd(&RatMatrix::zeros(0, 0)).unwrap());
        assert_eq!(
            is_pd(&RatMatrix::from_i64(&[&[1, 2], &[0, 1]])),
            Err(Error::Asymmetric)
        );
    }

    #[test]
    fn semidefinite_needs_all_principal_minors() {
        // leading minors 0, 0 but the (2,2) entry is negative
        let m = RatMatrix::from_i64(&[&[0, 0], &[0, -1]]);
        assert!(!is_psd(&m).unwrap());
        assert!(is_nsd(&m).unwrap());
        assert!(is_psd(&RatMatrix::from_i64(&[&[1, 1], &[1, 1]])).unwrap());
    }

    #[test]
    fn nullspace_of_covector() {
        let m = RatMatrix::from_i64(&[&[1, 5, 0]]);
        let ns = m.nullspace();
        assert_eq!(
            ns,
            vec![vec![int(-5), int(1), int(0)], vec![int(0), int(0), int(1)]]
        );
    }

    #[test]
    fn determinant_and_rank() {
        let m = RatMatrix::from_i64(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]]);
        assert_eq!(m.det(), int(0));
        assert_eq!(m.rank(), 2);
        let h = RatMatrix::from_rows(&[vec![frac(1, 2), int(1)], vec![int(1), int(4)]]);
        assert_eq!(h.det(), int(1));
    }

    #[test]
    fn restriction_is_congruence() {
        // Q(v) = v2 v3
        let mut q = RatMatrix::zeros(3, 3);
        q[(1, 2)] = frac(1, 2);
        q[(2, 1)] = frac(1, 2);
        let w = vec![vec![int(0), int(1), int(1)]];
        assert_eq!(q.restrict(&w), RatMatrix::from_i64(&[&[1]]));
        let w = vec![vec![int(0), int(1), int(-1)]];
        assert_eq!(q.restrict(&w), RatMatrix::from_i64(&[&[-1]]));
        assert_eq!(q.restrict(&[]).rows(), 0);
    }

    #[test]
    fn spans_compare_canonically() {
        let a = vec![vec![int(1), int(1), int(0)], vec![int(0), int(1), int(0)]];
        let b = vec![vec![int(1), int(0), int(0)], vec![int(2), int(3), int(0)]];
        assert!(same_span(&a, &b));
        assert!(!same_span(&a, &[vec![int(0), int(0), int(1)]]));
    }
}
