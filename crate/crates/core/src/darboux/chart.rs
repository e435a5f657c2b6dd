use num::{Signed, Zero};

use super::{Report, SeedChart};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::forms::PForm;
use crate::linalg::{RatMatrix, Vector};
use crate::pfaff::Subspace;
use crate::rational::{self, Rational};

/// Jacobian of `functions` at `x`, one row per function.
pub fn jacobian_at(functions: &[Expr], x: &[Rational]) -> Result<RatMatrix> {
    let rows = functions
        .iter()
        .map(|f| {
            f.gradient()
                .iter()
                .map(|g| g.eval(x))
                .collect::<Result<Vector>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Ok(RatMatrix::zeros(0, x.len()));
    }
    Ok(RatMatrix::from_rows(&rows))
}

pub fn check_submersion(functions: &[Expr], x: &[Rational], expected_rank: usize) -> Result<bool> {
    Ok(jacobian_at(functions, x)?.rank() == expected_rank)
}

/// Kernel of the Jacobian at `x`.
pub fn submersion_kernel(functions: &[Expr], x: &[Rational]) -> Result<Subspace> {
    let j = jacobian_at(functions, x)?;
    Subspace::new(x.to_vec(), j.nullspace())
}

/// Tangent at `x` to the leaf through `x`: the common kernel of the `dy^i`.
pub fn leaf_tangent(chart: &SeedChart, x: &[Rational]) -> Result<Subspace> {
    submersion_kernel(&chart.y, x)
}

fn eval_or_pole(e: &Expr, x: &[Rational]) -> std::result::Result<Rational, String> {
    e.eval(x).map_err(|err| err.to_string())
}

pub fn validate_seed_chart(omega: &PForm, chart: &SeedChart, x: &[Rational]) -> Report {
    let mut r = Report::new();
    let n = omega.dim();
    if chart.dim() != n || x.len() != n || omega.degree() != 1 {
        r.fail(
            "dimensions",
            Some(x),
            "chart, form and point must share the ambient dimension",
            None,
        );
        return r;
    }
    r.pass("dimensions");

    for (name, fs) in [("y_vanish", &chart.y), ("p_vanish", &chart.p)] {
        let bad = fs
            .iter()
            .enumerate()
            .find_map(|(i, f)| match eval_or_pole(f, x) {
                Ok(v) if v.is_zero() => None,
                Ok(v) => Some((i, rational::to_string(&v))),
                Err(e) => Some((i, e)),
            });
        match bad {
            None => r.pass(name),
            Some((i, v)) => {
                let label = if name == "y_vanish" {
                    format!("y^{}", i + 1)
                } else {
                    format!("p_{}", i + 2)
                };
                r.fail(
                    name,
                    Some(x),
                    format!("{label} does not vanish at the base point"),
                    Some(v),
                );
            }
        }
    }

    match eval_or_pole(&chart.a, x) {
        Ok(v) if v.is_positive() => r.pass("a_positive"),
        Ok(v) => r.fail(
            "a_positive",
            Some(x),
            "a is not positive at the base point",
            Some(rational::to_string(&v)),
        ),
        Err(e) => r.fail("a_positive", Some(x), e, None),
    }

    let residual = omega.sub(&chart.form()).expect("same shape");
    match residual.terms().next() {
        None => r.pass("identity"),
        Some((idx, c)) => r.fail(
            "identity",
            None,
            format!(
                "ω − a(dy¹ + Σ p_i dy^i) has a nonzero dx{} coefficient",
                idx[0] + 1
            ),
            Some(c.to_string()),
        ),
    }

    let k = chart.k();
    match jacobian_at(&chart.functions(), x) {
        Ok(j) => {
            let rank = j.rank();
            if rank == 2 * k - 1 {
                r.pass("rank");
            } else {
                r.fail(
                    "rank",
                    Some(x),
                    format!("Jacobian of (y, p) has rank {rank}, expected {}", 2 * k - 1),
                    None,
                );
            }
        }
        Err(e) => r.fail("rank", Some(x), e.to_string(), None),
    }
    r
}

/// Flips the signs of `a` and every `y^i` when `a(x) < 0`; leaves are
/// unchanged.
pub fn orient_chart(chart: &SeedChart, x: &[Rational]) -> Result<SeedChart> {
    let ax = chart.a.eval(x)?;
    if ax.is_zero() {
        return Err(Error::Invalid("a vanishes at the base point".into()));
    }
    if ax.is_positive() {
        return Ok(chart.clone());
    }
    Ok(SeedChart {
        a: -&chart.a,
        y: chart.y.iter().map(|y| -y).collect(),
        p: chart.p.clone(),
    })
}

/// `ω̄ = a⁻¹ω` together with the chart rewritten with `a ≡ 1`.
pub fn normalize_chart(
    omega: &PForm,
    chart: &SeedChart,
    x: &[Rational],
) -> Result<(PForm, SeedChart)> {
    let oriented = orient_chart(chart, x)?;
    let bar = omega.scale(&oriented.a.recip());
    let n = chart.dim();
    Ok((
        bar,
        SeedChart {
            a: Expr::one(n),
            ..oriented
        },
    ))
}

/// New chart whose leaf through `x` has tangent equal to the graph of `s0`
/// over the old leaf directions, from the generating function
/// `S(y) = ½ Σ s0_ij y^i y^j` (indices over `y², …, y^k`):
///
///   ỹ¹ = y¹ + S + Σ (p_i − ∂_iS) y^i,   ỹ^i = p_i − ∂_iS,   p̃_i = −y^i.
pub fn chart_from_generating_function(
    omega: &PForm,
    chart: &SeedChart,
    x: &[Rational],
    s0: &RatMatrix,
) -> Result<SeedChart> {
    let report = validate_seed_chart(omega, chart, x);
    if !report.passed {
        return Err(Error::Invalid(format!(
            "invalid input chart: failing {:?}",
            report.failed_checks()
        )));
    }
    let m = chart.k() - 1;
    if s0.rows() != m || s0.cols() != m {
        return Err(Error::DimensionMismatch(format!("S0 must be {m}x{m}")));
    }
    if !s0.is_symmetric() {
        return Err(Error::Asymmetric);
    }
    let n = chart.dim();
    let ys = &chart.y[1..];
    // ∂_i S = Σ_j s0_ij y^j
    let grad: Vec<Expr> = (0..m)
        .map(|i| {
            (0..m).fold(Expr::zero(n), |acc, j| {
                if s0[(i, j)].is_zero() {
                    acc
                } else {
                    &acc + &ys[j].scale(&s0[(i, j)])
                }
            })
        })
        .collect();
    let half = rational::frac(1, 2);
    let s = (0..m).fold(Expr::zero(n), |acc, i| {
        &acc + &(&grad[i] * &ys[i]).scale(&half)
    });
    let new_y_rest: Vec<Expr> = (0..m).map(|i| &chart.p[i] - &grad[i]).collect();
    let mut y1 = &chart.y[0] + &s;
    for i in 0..m {
        y1 = &y1 + &(&new_y_rest[i] * &ys[i]);
    }
    let mut y = vec![y1];
    y.extend(new_y_rest);
    let p = ys.iter().map(|y| -y).collect();
    SeedChart::new(chart.a.clone(), y, p)
}
