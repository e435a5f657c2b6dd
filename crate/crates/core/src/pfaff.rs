//! Pfaff class of a 1-form and the pointwise linear algebra around it: the
//! kernel hyperplane `K_x`, the Cauchy characteristic space `A_x`, the skew
//! pairing induced by `dω` on `K_x/A_x`, Legendrian planes, and the search
//! for Legendrian planes on which `Sω` is positive definite.

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connection::{s_omega, Connection};
use crate::error::{Error, Result};
use crate::forms::PForm;
use crate::linalg::{self, dot, RatMatrix, Vector};
use crate::rational::{self, RatStr, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PfaffClass {
    pub n: usize,
    /// Largest `k` with `ω∧(dω)^{k-1} ≠ 0` at the query point.
    pub k: usize,
    /// `ω∧(dω)^k` vanishes identically.
    pub identically_degenerate: bool,
    pub warning: Option<String>,
}

impl PfaffClass {
    pub fn pfaff_rank(&self) -> usize {
        self.k - 1
    }

    pub fn is_contact(&self) -> bool {
        self.n == 2 * self.k - 1
    }
}

/// A linear subspace of `T_xM`, recorded with its base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub base: Vector,
    pub basis: Vec<Vector>,
}

impl Subspace {
    /// Fails if the basis vectors are dependent or of the wrong length.
    pub fn new(base: Vector, basis: Vec<Vector>) -> Result<Self> {
        if basis.iter().any(|v| v.len() != base.len()) {
            return Err(Error::DimensionMismatch(
                "basis vector length differs from the point".into(),
            ));
        }
        if linalg::span_rank(&basis) != basis.len() {
            return Err(Error::Invalid(
                "subspace basis is linearly dependent".into(),
            ));
        }
        Ok(Subspace { base, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut vs = self.basis.clone();
        vs.push(v.to_vec());
        linalg::span_rank(&vs) == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn same_span(&self, other: &Subspace) -> bool {
        self.base == other.base && linalg::same_span(&self.basis, &other.basis)
    }

    pub fn to_wire(&self) -> SubspaceWire {
        SubspaceWire {
            base: rational::wrap_vec(&self.base),
            basis: self.basis.iter().map(|v| rational::wrap_vec(v)).collect(),
        }
    }

    pub fn from_wire(w: &SubspaceWire) -> Result<Self> {
        Subspace::new(
            rational::unwrap_vec(&w.base),
            w.basis.iter().map(|v| rational::unwrap_vec(v)).collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceWire {
    pub base: Vec<RatStr>,
    pub basis: Vec<Vec<RatStr>>,
}

/// Matrix of `B_ω(v + A, w + A) = dω(v, w)` on representatives of a
/// complement of `A_x` in `K_x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewForm {
    pub basis: Vec<Vector>,
    pub matrix: RatMatrix,
}

/// The pointwise data every operation below needs.
struct PointData {
    n: usize,
    covector: Vector,
    /// `dω` at the point, `M_ij = dω(e_i, e_j)`.
    dw: RatMatrix,
    kernel: Vec<Vector>,
    cauchy: Vec<Vector>,
}

impl PointData {
    fn new(omega: &PForm, x: &[Rational]) -> Result<Self> {
        check_one_form(omega)?;
        let n = omega.dim();
        let covector = omega.eval(x)?.covector();
        if covector.iter().all(Zero::is_zero) {
            return Err(Error::FormVanishes);
        }
        let dw = omega.d().eval(x)?.bilinear_matrix();
        let kernel = RatMatrix::from_rows(std::slice::from_ref(&covector)).nullspace();
        let gram = dw.restrict(&kernel);
        let cauchy = gram
            .nullspace()
            .into_iter()
            .map(|c| combine(&kernel, &c, n))
            .collect();
        Ok(PointData {
            n,
            covector,
            dw,
            kernel,
            cauchy,
        })
    }

    fn k(&self) -> usize {
        (self.kernel.len() - self.cauchy.len()) / 2 + 1
    }

    /// Vectors of the kernel basis that complete `A_x` to a basis of `K_x`.
    fn complement(&self) -> Vec<Vector> {
        let mut acc = self.cauchy.clone();
        let mut out = Vec::new();
        for v in &self.kernel {
            acc.push(v.clone());
            if linalg::span_rank(&acc) == acc.len() {
                out.push(v.clone());
            } else {
                acc.pop();
            }
        }
        out
    }

    fn pairing(&self, u: &[Rational], v: &[Rational]) -> Rational {
        self.dw.bilinear(u, v)
    }
}

fn check_one_form(omega: &PForm) -> Result<()> {
    if omega.degree() != 1 {
        return Err(Error::Invalid(format!(
            "expected a 1-form, got degree {}",
            omega.degree()
        )));
    }
    Ok(())
}

fn combine(basis: &[Vector], coeffs: &[Rational], n: usize) -> Vector {
    let mut out = vec![Rational::zero(); n];
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, bi) in out.iter_mut().zip(b) {
            *o += c * bi;
        }
    }
    out
}

/// `ω∧(dω)^j` for `j = 0, 1, ...` until the degree exceeds `n`.
pub fn rank_forms(omega: &PForm) -> Vec<PForm> {
    let n = omega.dim();
    let dw = omega.d();
    let mut out = vec![omega.clone()];
    let mut power = PForm::function(crate::expr::Expr::one(n));
    for j in 1.. {
        if 2 * j + 1 > n {
            break;
        }
        power = power.wedge(&dw).expect("same dimension");
        out.push(omega.wedge(&power).expect("same dimension"));
    }
    out
}

pub fn pfaff_class(omega: &PForm, x: &[Rational]) -> Result<PfaffClass> {
    check_one_form(omega)?;
    let n = omega.dim();
    if omega.eval(x)?.is_zero() {
        return Err(Error::FormVanishes);
    }
    let forms = rank_forms(omega);
    let mut k = forms.len();
    for (j, f) in forms.iter().enumerate() {
        if f.eval(x)?.is_zero() {
            k = j;
            break;
        }
    }
    let identically_degenerate = forms.get(k).map(PForm::is_zero).unwrap_or(true);
    let warning = (!identically_degenerate).then(|| {
        format!("ω∧(dω)^{k} does not vanish identically: the Pfaff class is not constant near the point")
    });
    Ok(PfaffClass {
        n,
        k,
        identically_degenerate,
        warning,
    })
}

pub fn kernel_at(omega: &PForm, x: &[Rational]) -> Result<Subspace> {
    let pd = PointData::new(omega, x)?;
    Subspace::new(x.to_vec(), pd.kernel)
}

pub fn cauchy_at(omega: &PForm, x: &[Rational]) -> Result<Subspace> {
    let pd = PointData::new(omega, x)?;
    Subspace::new(x.to_vec(), pd.cauchy)
}

/// Pfaff class `k` from the pointwise rank of `dω` on `K_x`.
pub fn class_at(omega: &PForm, x: &[Rational]) -> Result<usize> {
    Ok(PointData::new(omega, x)?.k())
}

pub fn bform_at(omega: &PForm, x: &[Rational]) -> Result<SkewForm> {
    let pd = PointData::new(omega, x)?;
    if pd.k() == 1 {
        return Err(Error::EmptyPairing);
    }
    let basis = pd.complement();
    let matrix = pd.dw.restrict(&basis);
    Ok(SkewForm { basis, matrix })
}

/// Skew Gram–Schmidt over the rationals: returns `(e, f)` with
/// `B(e_i, f_j) = δ_ij` and `B(e_i, e_j) = B(f_i, f_j) = 0`.
fn symplectic_basis(pd: &PointData) -> Result<(Vec<Vector>, Vec<Vector>)> {
    let mut rest = pd.complement();
    let mut es = Vec::new();
    let mut fs = Vec::new();
    while !rest.is_empty() {
        let u = rest.remove(0);
        let Some(pos) = rest.iter().position(|v| !pd.pairing(&u, v).is_zero()) else {
            return Err(Error::Invalid(
                "skew pairing is degenerate on the chosen complement".into(),
            ));
        };
        let v = rest.remove(pos);
        let buv = pd.pairing(&u, &v);
        let f: Vector = v.iter().map(|c| c / &buv).collect();
        for w in rest.iter_mut() {
            let bwf = pd.pairing(w, &f);
            let bwe = pd.pairing(w, &u);
            for ((wi, ei), fi) in w.iter_mut().zip(&u).zip(&f) {
                *wi += &bwe * fi - &bwf * ei;
            }
        }
        es.push(u);
        fs.push(f);
    }
    Ok((es, fs))
}

pub fn is_legendrian(omega: &PForm, x: &[Rational], w: &Subspace) -> Result<bool> {
    if w.base.as_slice() != x {
        return Err(Error::BaseMismatch);
    }
    let pd = PointData::new(omega, x)?;
    if w.ambient_dim() != pd.n || w.dim() != pd.n - pd.k() {
        return Ok(false);
    }
    if w.basis.iter().any(|v| !dot(&pd.covector, v).is_zero()) {
        return Ok(false);
    }
    for (a, u) in w.basis.iter().enumerate() {
        for v in &w.basis[a + 1..] {
            if !pd.pairing(u, v).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Legendrian plane that is the graph of the symmetric `(k−1)×(k−1)`
/// matrix `s` over the base Lagrangian `span{e_i}`, extended by `A_x`.
pub fn sample_legendrian(omega: &PForm, x: &[Rational], s: &RatMatrix) -> Result<Subspace> {
    let pd = PointData::new(omega, x)?;
    sample_with(&pd, x, s)
}

fn sample_with(pd: &PointData, x: &[Rational], s: &RatMatrix) -> Result<Subspace> {
    let (es, fs) = symplectic_basis(pd)?;
    let m = es.len();
    if s.rows() != m || s.cols() != m {
        return Err(Error::DimensionMismatch(format!(
            "expected a {m}x{m} matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    if !s.is_symmetric() {
        return Err(Error::Asymmetric);
    }
    let mut basis: Vec<Vector> = (0..m)
        .map(|i| {
            let mut w = es[i].clone();
            for (j, f) in fs.iter().enumerate() {
                let sij = &s[(i, j)];
                if !sij.is_zero() {
                    for (wi, fi) in w.iter_mut().zip(f) {
                        *wi += sij * fi;
                    }
                }
            }
            w
        })
        .collect();
    basis.extend(pd.cauchy.iter().cloned());
    Subspace::new(x.to_vec(), basis)
}

/// Outcome of the search for a `∇`-positive Legendrian plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LegSearch {
    Found {
        plane: Subspace,
        parameter: RatMatrix,
        restricted: RatMatrix,
        samples_tried: usize,
    },
    /// A sufficient criterion certifies that no positive plane exists at x.
    Empty { reason: String },
    /// The budget ran out without a hit.
    Inconclusive { samples_tried: usize },
}

pub fn find_positive_legendrian(
    omega: &PForm,
    x: &[Rational],
    conn: &Connection,
    budget: usize,
    seed: u64,
) -> Result<LegSearch> {
    let pd = PointData::new(omega, x)?;
    let s = s_omega(omega, conn)?.eval(x)?;
    let k = pd.k();

    if !pd.cauchy.is_empty() && !linalg::is_pd(&s.restrict(&pd.cauchy))? {
        return Ok(LegSearch::Empty {
            reason: "Sω is not positive definite on the Cauchy characteristic space A_x".into(),
        });
    }
    let w_dim = pd.n - k;
    if w_dim > 0 && linalg::is_nsd(&s.restrict(&pd.kernel))? {
        return Ok(LegSearch::Empty {
            reason: "Sω is negative semidefinite on K_x".into(),
        });
    }

    let m = k - 1;
    let try_param = |param: RatMatrix, tried: usize| -> Result<Option<LegSearch>> {
        let plane = sample_with(&pd, x, &param)?;
        let restricted = s.restrict(&plane.basis);
        Ok(linalg::is_pd(&restricted)?.then_some(LegSearch::Found {
            plane,
            parameter: param,
            restricted,
            samples_tried: tried,
        }))
    };

    if m == 0 {
        // Leg_x is the single plane K_x = A_x
        return Ok(match try_param(RatMatrix::zeros(0, 0), 1)? {
            Some(hit) => hit,
            None => LegSearch::Empty {
                reason: "the only Legendrian plane K_x is not Sω-positive".into(),
            },
        });
    }

    let slots = m * (m + 1) / 2;
    let to_matrix = |vals: &[Rational]| {
        let mut mat = RatMatrix::zeros(m, m);
        let mut it = vals.iter();
        for i in 0..m {
            for j in i..m {
                let v = it.next().unwrap().clone();
                mat[(i, j)] = v.clone();
                mat[(j, i)] = v;
            }
        }
        mat
    };

    let mut tried = 0;
    let grid: Vec<i64> = vec![-2, -1, 0, 1, 2];
    let mut digits = vec![0usize; slots];
    let grid_size = grid.len().checked_pow(slots as u32).unwrap_or(usize::MAX);
    for _ in 0..grid_size {
        if tried >= budget {
            return Ok(LegSearch::Inconclusive {
                samples_tried: tried,
            });
        }
        tried += 1;
        let vals: Vec<Rational> = digits.iter().map(|&d| rational::int(grid[d])).collect();
        if let Some(hit) = try_param(to_matrix(&vals), tried)? {
            return Ok(hit);
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < grid.len() {
                break;
            }
            *d = 0;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while tried < budget {
        tried += 1;
        let vals: Vec<Rational> = (0..slots)
            .map(|_| rational::frac(rng.gen_range(-8..=8), rng.gen_range(1..=4)))
            .collect();
        if let Some(hit) = try_param(to_matrix(&vals), tried)? {
            return Ok(hit);
        }
    }
    Ok(LegSearch::Inconclusive {
        samples_tried: tried,
    })
}
