//! The convexification steps. Each step rewrites the chart so that the
//! identity `ω = a(dy¹ + Σ p_i dy^i)` keeps holding for the same `ω`;
//! positive factors accumulate in `a` instead of being divided out.

use num::Zero;

use super::verify::{verify_representation, VerifyOptions};
use super::{
    leaf_tangent, orient_chart, validate_seed_chart, Certificate, ConvexRep, Report, SeedChart,
};
use crate::connection::{hessian, s_omega, Connection};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::forms::PForm;
use crate::linalg::{self, RatMatrix, Vector};
use crate::rational::{self, Rational};

/// Largest exponent tried when searching for a power-of-two constant.
const MAX_DOUBLINGS: i32 = 64;

fn step_err(step: &str, reason: impl Into<String>) -> Error {
    Error::StepFailed {
        step: step.into(),
        reason: reason.into(),
    }
}

/// First `2^e`, `e = 0, 1, …` (or `e = 0, −1, …` when `descending`) for
/// which `ok` holds.
fn search_pow2(
    descending: bool,
    mut ok: impl FnMut(&Rational) -> Result<bool>,
) -> Result<Option<Rational>> {
    for e in 0..=MAX_DOUBLINGS {
        let c = rational::pow2(if descending { -e } else { e });
        if ok(&c)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

fn hessian_at(u: &Expr, conn: &Connection, x: &[Rational]) -> Result<RatMatrix> {
    hessian(u, conn)?.eval(x)
}

fn gradient_at(u: &Expr, x: &[Rational]) -> Result<Vector> {
    u.gradient().iter().map(|g| g.eval(x)).collect()
}

fn outer(g: &[Rational]) -> RatMatrix {
    let n = g.len();
    let mut m = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = &g[i] * &g[j];
        }
    }
    m
}

fn covector_kernel(g: &[Rational]) -> Vec<Vector> {
    RatMatrix::from_rows(&[g.to_vec()]).nullspace()
}

fn pd(m: &RatMatrix) -> Result<bool> {
    linalg::is_pd(m)
}

/// Makes `H(y¹)` positive definite on `ker dy¹|_x`:
/// `ȳ¹ = y¹ + ½c Σ_{i≥2} (y^i)²`, `p̄_i = p_i − c y^i`, with `c` the
/// smallest power of two that works. Requires `H(y¹)` positive definite
/// on the leaf tangent at `x`.
pub fn absorb_quadratic(
    chart: &SeedChart,
    conn: &Connection,
    x: &[Rational],
) -> Result<(SeedChart, Rational)> {
    const STEP: &str = "absorb_quadratic";
    let h1 = hessian_at(&chart.y[0], conn, x)?;
    let leaf = leaf_tangent(chart, x)?;
    if !pd(&h1.restrict(&leaf.basis))? {
        return Err(Error::HypothesisViolated {
            step: STEP.into(),
            reason: "H(y¹), equivalently Sω, is not positive definite on the leaf tangent".into(),
        });
    }
    let kernel = covector_kernel(&gradient_at(&chart.y[0], x)?);
    let n = chart.dim();
    let mut extra = RatMatrix::zeros(n, n);
    for y in &chart.y[1..] {
        extra = extra.add(&outer(&gradient_at(y, x)?));
    }
    let c = search_pow2(false, |c| pd(&h1.add(&extra.scale(c)).restrict(&kernel)))?.ok_or_else(
        || {
            step_err(
                STEP,
                "no power of two makes H(y¹) + cΣ(dy^i)² definite on ker dy¹",
            )
        },
    )?;

    let half_c = &c / rational::int(2);
    let mut y1 = chart.y[0].clone();
    for y in &chart.y[1..] {
        y1 = &y1 + &(y * y).scale(&half_c);
    }
    let mut y = vec![y1];
    y.extend(chart.y[1..].iter().cloned());
    let p = chart
        .p
        .iter()
        .zip(&chart.y[1..])
        .map(|(p, y)| p - &y.scale(&c))
        .collect();
    Ok((SeedChart::new(chart.a.clone(), y, p)?, c))
}

/// Replaces `y¹` by `φ(y¹)` with `φ(t) = t + ½ m t²`, so that
/// `ȳ¹` is strictly convex at `x`; `p̄_i = φ'(y¹) p_i` and the factor
/// `1/φ'(y¹)` moves into `a`.
pub fn apply_phi(
    chart: &SeedChart,
    conn: &Connection,
    x: &[Rational],
) -> Result<(SeedChart, Rational)> {
    const STEP: &str = "apply_phi";
    let h1 = hessian_at(&chart.y[0], conn, x)?;
    let g = gradient_at(&chart.y[0], x)?;
    if !pd(&h1.restrict(&covector_kernel(&g)))? {
        return Err(step_err(STEP, "H(y¹) is not positive definite on ker dy¹"));
    }
    let gg = outer(&g);
    let m = search_pow2(false, |m| pd(&h1.add(&gg.scale(m))))?
        .ok_or_else(|| step_err(STEP, "no power of two makes φ(y¹) strictly convex"))?;

    let n = chart.dim();
    let y1 = &chart.y[0];
    let dphi = &Expr::one(n) + &y1.scale(&m);
    let phi = y1 + &(y1 * y1).scale(&(&m / rational::int(2)));
    let mut y = vec![phi];
    y.extend(chart.y[1..].iter().cloned());
    let p = chart.p.iter().map(|p| p * &dphi).collect();
    Ok((SeedChart::new(&chart.a / &dphi, y, p)?, m))
}

/// Makes every `y^j` strictly convex at `x` by `y^j ↦ y^j + b y¹`;
/// the factor `1 − bΣp_j` moves into `a` and divides the `p_j`.
pub fn apply_b(
    chart: &SeedChart,
    conn: &Connection,
    x: &[Rational],
) -> Result<(SeedChart, Rational)> {
    const STEP: &str = "apply_b";
    let h1 = hessian_at(&chart.y[0], conn, x)?;
    if !pd(&h1)? {
        return Err(step_err(
            STEP,
            "y¹ is not strictly convex at the base point",
        ));
    }
    let hs = chart.y[1..]
        .iter()
        .map(|y| hessian_at(y, conn, x))
        .collect::<Result<Vec<_>>>()?;
    let b = search_pow2(false, |b| {
        for h in &hs {
            if !pd(&h.add(&h1.scale(b)))? {
                return Ok(false);
            }
        }
        Ok(true)
    })?
    .ok_or_else(|| step_err(STEP, "no power of two makes every H(y^j) + bH(y¹) definite"))?;

    let n = chart.dim();
    if chart.k() == 1 {
        return Ok((chart.clone(), b));
    }
    let psum = chart.p.iter().fold(Expr::zero(n), |acc, p| &acc + p);
    let factor = &Expr::one(n) - &psum.scale(&b);
    let mut y = vec![chart.y[0].clone()];
    y.extend(chart.y[1..].iter().map(|yj| yj + &chart.y[0].scale(&b)));
    let p = chart.p.iter().map(|p| p / &factor).collect();
    Ok((SeedChart::new(&chart.a * &factor, y, p)?, b))
}

/// Final step: `u¹ = y¹ − εΣ_{j≥2} y^j`, `u^j = y^j`, `a_1 = a`,
/// `a_j = a(ε + p_j)`, with `ε` the largest power of ½ keeping `u¹`
/// strictly convex at `x`.
pub fn apply_epsilon(
    chart: &SeedChart,
    conn: &Connection,
    x: &[Rational],
) -> Result<(Vec<Expr>, Vec<Expr>, Rational)> {
    const STEP: &str = "apply_epsilon";
    let hs = chart
        .y
        .iter()
        .map(|y| hessian_at(y, conn, x))
        .collect::<Result<Vec<_>>>()?;
    for (j, h) in hs.iter().enumerate() {
        if !pd(h)? {
            return Err(step_err(
                STEP,
                format!("y^{} is not strictly convex at the base point", j + 1),
            ));
        }
    }
    for (j, p) in chart.p.iter().enumerate() {
        if !p.eval(x)?.is_zero() {
            return Err(step_err(
                STEP,
                format!("p_{} does not vanish at the base point", j + 2),
            ));
        }
    }
    let n = chart.dim();
    let rest_sum = hs[1..]
        .iter()
        .fold(RatMatrix::zeros(n, n), |acc, h| acc.add(h));
    let eps = search_pow2(true, |e| pd(&hs[0].add(&rest_sum.scale(e).neg())))?
        .ok_or_else(|| step_err(STEP, "no power of one half keeps u¹ strictly convex"))?;

    let ysum = chart.y[1..].iter().fold(Expr::zero(n), |acc, y| &acc + y);
    let mut u = vec![&chart.y[0] - &ysum.scale(&eps)];
    u.extend(chart.y[1..].iter().cloned());
    let eps_e = Expr::constant(n, eps.clone());
    let mut a = vec![chart.a.clone()];
    a.extend(chart.p.iter().map(|p| &chart.a * &(&eps_e + p)));
    Ok((u, a, eps))
}

#[derive(Clone, Debug)]
pub struct Convexified {
    pub rep: ConvexRep,
    pub report: Report,
}

/// Runs orient → absorb_quadratic → apply_phi → apply_b → apply_epsilon on
/// a seed chart whose leaf tangent at `x` is `Sω`-positive, then verifies
/// the result.
pub fn convexify(
    omega: &PForm,
    conn: &Connection,
    chart: &SeedChart,
    x: &[Rational],
    opts: &VerifyOptions,
) -> Result<Convexified> {
    let oriented = orient_chart(chart, x)?;
    let report = validate_seed_chart(omega, &oriented, x);
    if !report.passed {
        return Err(step_err(
            "validate_seed_chart",
            format!("failing checks {:?}", report.failed_checks()),
        ));
    }
    let leaf = leaf_tangent(&oriented, x)?;
    let s = s_omega(omega, conn)?.eval(x)?.restrict(&leaf.basis);
    if let Some((k, minor)) = linalg::first_nonpositive_minor(&s) {
        return Err(Error::HypothesisViolated {
            step: "precondition".into(),
            reason: format!(
                "Sω is not positive definite on the leaf tangent (leading minor {k} = {minor})"
            ),
        });
    }

    let (chart1, c) = absorb_quadratic(&oriented, conn, x)?;
    let (chart2, m) = apply_phi(&chart1, conn, x)?;
    let (chart3, b) = apply_b(&chart2, conn, x)?;
    let (u, a, epsilon) = apply_epsilon(&chart3, conn, x)?;

    let mut rep = ConvexRep {
        base: x.to_vec(),
        u,
        a,
        leaves: chart.y.clone(),
        certificate: Certificate {
            c,
            m,
            b,
            epsilon,
            sampled_radius: None,
        },
    };
    let report = verify_representation(omega, &rep, conn, x, opts);
    rep.certificate.sampled_radius = report.sampled_radius.as_ref().map(|r| r.0.clone());
    Ok(Convexified { rep, report })
}
