use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConvexRep, Report};
use crate::connection::{hessian, Connection, SymForm};
use crate::expr::Expr;
use crate::forms::{exterior_derivative_of, wedge_all, PForm};
use crate::linalg::{self, RatMatrix, Vector};
use crate::rational::{self, RatStr, Rational};

/// How many rational points to test in each candidate ball, and the seed
/// that makes the choice of points reproducible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 200,
            seed: 0,
        }
    }
}

const MAX_HALVINGS: i32 = 24;
const GRID: i64 = 1024;

/// Pointwise conditions: every `a_i > 0` and every `H(u^i)` positive
/// definite. Returns a description of the first failure.
fn pointwise(a: &[Expr], hessians: &[SymForm], q: &[Rational]) -> Option<(String, Option<String>)> {
    for (i, ai) in a.iter().enumerate() {
        match ai.eval(q) {
            Ok(v) if v.is_positive() => {}
            Ok(v) => {
                return Some((
                    format!("a_{} is not positive", i + 1),
                    Some(rational::to_string(&v)),
                ))
            }
            Err(e) => return Some((format!("a_{}: {e}", i + 1), None)),
        }
    }
    for (i, h) in hessians.iter().enumerate() {
        let m = match h.eval(q) {
            Ok(m) => m,
            Err(e) => return Some((format!("H(u^{}): {e}", i + 1), None)),
        };
        if let Some((size, minor)) = linalg::first_nonpositive_minor(&m) {
            return Some((
                format!(
                    "H(u^{}) has a nonpositive leading minor of size {size}",
                    i + 1
                ),
                Some(rational::to_string(&minor)),
            ));
        }
    }
    None
}

fn random_offset(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    loop {
        let v: Vector = (0..n)
            .map(|_| rational::frac(rng.gen_range(-GRID..=GRID), GRID))
            .collect();
        if linalg::dot(&v, &v) <= rational::one() {
            return v;
        }
    }
}

/// Exact checks of `ω = Σ a_i du^i` at `x`, followed by a sampled search
/// for a ball around `x` on which positivity and convexity persist.
pub fn verify_representation(
    omega: &PForm,
    rep: &ConvexRep,
    conn: &Connection,
    x: &[Rational],
    opts: &VerifyOptions,
) -> Report {
    let mut r = Report::new();
    let n = omega.dim();
    let k = rep.k();
    let shapes_ok = omega.degree() == 1
        && x.len() == n
        && conn.dim() == n
        && k > 0
        && rep.a.len() == k
        && rep
            .u
            .iter()
            .chain(&rep.a)
            .chain(&rep.leaves)
            .all(|e| e.nvars() == n);
    if !shapes_ok {
        r.fail(
            "dimensions",
            Some(x),
            "form, connection, point and representation must share the ambient dimension",
            None,
        );
        return r;
    }
    r.pass("dimensions");

    let residual = omega.sub(&rep.form()).expect("same shape");
    match residual.terms().next() {
        None => r.pass("identity"),
        Some((idx, c)) => r.fail(
            "identity",
            None,
            format!("ω − Σ a_i du^i has a nonzero dx{} coefficient", idx[0] + 1),
            Some(c.to_string()),
        ),
    }

    let mut a_ok = true;
    for (i, ai) in rep.a.iter().enumerate() {
        match ai.eval(x) {
            Ok(v) if v.is_positive() => {}
            Ok(v) => {
                a_ok = false;
                r.fail(
                    "a_positive",
                    Some(x),
                    format!("a_{} is not positive at the base point", i + 1),
                    Some(rational::to_string(&v)),
                );
                break;
            }
            Err(e) => {
                a_ok = false;
                r.fail("a_positive", Some(x), format!("a_{}: {e}", i + 1), None);
                break;
            }
        }
    }
    if a_ok {
        r.pass("a_positive");
    }

    let hessians = match rep
        .u
        .iter()
        .map(|u| hessian(u, conn))
        .collect::<crate::error::Result<Vec<_>>>()
    {
        Ok(h) => h,
        Err(e) => {
            r.fail("convex", Some(x), e.to_string(), None);
            return r;
        }
    };
    match pointwise(&[], &hessians, x) {
        None => r.pass("convex"),
        Some((detail, value)) => r.fail("convex", Some(x), detail, value),
    }

    leaf_constancy(&mut r, rep, n);
    submersion(&mut r, rep, x);

    if opts.samples > 0
        && r.check("a_positive").is_some_and(|c| c.passed)
        && r.check("convex").is_some_and(|c| c.passed)
    {
        sampled_ball(&mut r, rep, &hessians, x, opts);
    }
    r
}

/// Each `du^i` lies in the span of the leaf differentials: with
/// `Y = dy¹∧⋯∧dy^m ≠ 0`, this is `du^i ∧ Y ≡ 0`.
fn leaf_constancy(r: &mut Report, rep: &ConvexRep, n: usize) {
    const NAME: &str = "leaf_constancy";
    if rep.leaves.is_empty() {
        r.fail(NAME, None, "no leaf functions recorded", None);
        return;
    }
    let dys: Vec<PForm> = rep.leaves.iter().map(exterior_derivative_of).collect();
    let y = wedge_all(&dys, n);
    if y.is_zero() {
        r.fail(NAME, None, "leaf differentials are dependent", None);
        return;
    }
    for (i, u) in rep.u.iter().enumerate() {
        let w = exterior_derivative_of(u).wedge(&y).expect("same dimension");
        if !w.is_zero() {
            r.fail(
                NAME,
                None,
                format!("du^{} is not in the span of the leaf differentials", i + 1),
                None,
            );
            return;
        }
    }
    r.pass(NAME);
}

/// `(u¹, …, u^k, a_2/a_1, …, a_k/a_1)` has rank `2k − 1` at `x`. The
/// ratio rows come from the quotient rule, evaluated at `x`.
fn submersion(r: &mut Report, rep: &ConvexRep, x: &[Rational]) {
    const NAME: &str = "submersion";
    let k = rep.k();
    let rows = || -> crate::error::Result<Vec<Vector>> {
        let grad = |e: &Expr| {
            e.gradient()
                .iter()
                .map(|g| g.eval(x))
                .collect::<crate::error::Result<Vector>>()
        };
        let mut rows = rep
            .u
            .iter()
            .map(grad)
            .collect::<crate::error::Result<Vec<_>>>()?;
        let a1 = rep.a[0].eval(x)?;
        if a1.is_zero() {
            return Err(crate::error::Error::Pole);
        }
        let da1 = grad(&rep.a[0])?;
        for aj in &rep.a[1..] {
            let v = aj.eval(x)?;
            let daj = grad(aj)?;
            rows.push(
                daj.iter()
                    .zip(&da1)
                    .map(|(dj, d1)| (dj * &a1 - &v * d1) / (&a1 * &a1))
                    .collect(),
            );
        }
        Ok(rows)
    };
    match rows() {
        Ok(rows) => {
            let rank = RatMatrix::from_rows(&rows).rank();
            if rank == 2 * k - 1 {
                r.pass(NAME);
            } else {
                r.fail(
                    NAME,
                    Some(x),
                    format!("rank {rank}, expected {}", 2 * k - 1),
                    None,
                );
            }
        }
        Err(e) => r.fail(NAME, Some(x), e.to_string(), None),
    }
}

/// Halves the radius, starting from 1, until every sampled point of the
/// ball passes the pointwise checks.
fn sampled_ball(
    r: &mut Report,
    rep: &ConvexRep,
    hessians: &[SymForm],
    x: &[Rational],
    opts: &VerifyOptions,
) {
    const NAME: &str = "sampled_ball";
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut last_failure = None;
    for h in 0..=MAX_HALVINGS {
        let radius = rational::pow2(-h);
        let failure = (0..opts.samples).find_map(|_| {
            let v = random_offset(&mut rng, x.len());
            let q: Vector = x.iter().zip(&v).map(|(xi, vi)| xi + &radius * vi).collect();
            pointwise(&rep.a, hessians, &q).map(|f| (q, f))
        });
        match failure {
            None => {
                r.pass(NAME);
                r.sampled_radius = Some(RatStr(radius));
                return;
            }
            Some(f) => last_failure = Some(f),
        }
    }
    let (q, (detail, value)) = last_failure.expect("at least one radius tried");
    r.fail(
        NAME,
        Some(&q),
        format!("no certified radius down to 2^-{MAX_HALVINGS}: {detail}"),
        value,
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::Certificate;
    use crate::expr::parse_expr;
    use crate::poly::default_names;
    use crate::rational::int;

    fn e(s: &str) -> Expr {
        parse_expr(s, &default_names(3)).unwrap()
    }

    fn o() -> Vec<Rational> {
        vec![int(0); 3]
    }

    fn contact() -> PForm {
        PForm::one_form([(0, e("1")), (1, e("x3"))], 3)
    }

    fn cert() -> Certificate {
        Certificate {
            c: int(1),
            m: int(1),
            b: int(1),
            epsilon: int(1),
            sampled_radius: None,
        }
    }

    fn rep(u: [&str; 2], a: [&str; 2], leaves: [&str; 2]) -> ConvexRep {
        ConvexRep {
            base: o(),
            u: u.iter().map(|s| e(s)).collect(),
            a: a.iter().map(|s| e(s)).collect(),
            leaves: leaves.iter().map(|s| e(s)).collect(),
            certificate: cert(),
        }
    }

    #[test]
    fn nonconvex_u_is_flagged() {
        let r = verify_representation(
            &contact(),
            &rep(["x1", "x2"], ["1", "x3"], ["x1", "x2"]),
            &Connection::flat(3),
            &o(),
            &VerifyOptions::default(),
        );
        assert!(r.check("identity").unwrap().passed);
        assert!(!r.check("convex").unwrap().passed);
        assert!(!r.check("a_positive").unwrap().passed);
        assert!(r.check("sampled_ball").is_none());
        assert!(!r.passed);
    }

    #[test]
    fn nonpositive_a_is_flagged() {
        let w = PForm::one_form([(0, e("1")), (1, e("x2"))], 3);
        let r = verify_representation(
            &w,
            &rep(["x1", "x2"], ["1", "x2"], ["x1", "x2"]),
            &Connection::flat(3),
            &o(),
            &VerifyOptions::default(),
        );
        let c = r.check("a_positive").unwrap();
        assert!(!c.passed);
        assert_eq!(c.witness.as_ref().unwrap().value.as_deref(), Some("0"));
    }

    #[test]
    fn leaf_constancy_detects_foreign_direction() {
        let r = verify_representation(
            &contact(),
            &rep(["x1", "x2"], ["1", "x3"], ["x1", "x3"]),
            &Connection::flat(3),
            &o(),
            &VerifyOptions {
                samples: 0,
                seed: 0,
            },
        );
        assert!(!r.check("leaf_constancy").unwrap().passed);
    }

    #[test]
    fn convex_k1_ball() {
        // ω = d(x1^2 + x2^2 + x3^2) with a = 1 - x1: the ball must shrink below radius 1
        let u = e("x1^2 + x2^2 + x3^2 + x1");
        let a = e("1 - 2*x1");
        let w = exterior_derivative_of(&u).scale(&a);
        let rep = ConvexRep {
            base: o(),
            u: vec![u.clone()],
            a: vec![a],
            leaves: vec![u],
            certificate: cert(),
        };
        let opts = VerifyOptions {
            samples: 50,
            seed: 7,
        };
        let r = verify_representation(&w, &rep, &Connection::flat(3), &o(), &opts);
        assert!(r.passed, "{r:?}");
        let radius = r.sampled_radius.clone().unwrap().0;
        assert!(radius <= rational::frac(1, 2));
        let again = verify_representation(&w, &rep, &Connection::flat(3), &o(), &opts);
        assert_eq!(r, again);
    }
}
