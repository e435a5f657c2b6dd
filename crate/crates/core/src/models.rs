//! The standard models `ω = dx1 + x3 dx2 + x5 dx4 + ⋯` and the normal-form
//! constant of `ω∧(dω)^{k−1}`.

use crate::darboux::SeedChart;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::forms::{exterior_derivative_of, factorial, wedge_all, PForm};
use crate::rational::{self, Rational};

/// Standard model of class `2k − 1` on `n ≥ 2k − 1` variables, with its chart
/// `y¹ = x1`, `y^i = x_{2i−2}`, `p_i = x_{2i−1}`, `a = 1`. Variables past
/// `2k − 1` are Cauchy directions.
pub fn standard_model(n: usize, k: usize) -> Result<(PForm, SeedChart)> {
    if k == 0 || n < 2 * k - 1 {
        return Err(Error::Invalid(format!(
            "no standard model of class k = {k} on {n} variables"
        )));
    }
    let mut y = vec![Expr::var(n, 0)];
    let mut p = Vec::new();
    for i in 2..=k {
        y.push(Expr::var(n, 2 * i - 3));
        p.push(Expr::var(n, 2 * i - 2));
    }
    let chart = SeedChart::new(Expr::one(n), y, p)?;
    Ok((chart.form(), chart))
}

/// `λ_k`: the value of `ω∧(dω)^{k−1}` on the frame
/// `(∂/∂y¹, …, ∂/∂y^k, ∂/∂p₂, …, ∂/∂p_k)` of the standard model, with
/// `p`-forms evaluated as `(1/p!)·det`.
pub fn normal_form_constant(k: usize) -> Result<Rational> {
    let n = 2 * k - 1;
    let (omega, chart) = standard_model(n, k)?;
    let top = omega.wedge(&omega.d().wedge_pow(k - 1))?;
    let o = vec![rational::zero(); n];
    // the chart functions are a permutation of the coordinates, so the
    // frame dual to their differentials is given by their gradients
    let vectors = chart
        .functions()
        .iter()
        .map(|f| {
            f.gradient()
                .iter()
                .map(|g| g.eval(&o))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(top.eval(&o)?.apply(&vectors))
}

/// Factor turning an averaged-convention constant into the determinant one.
pub fn convention_factor(k: usize) -> Rational {
    Rational::from_integer(factorial(2 * k - 1).into())
}

/// `(−1)^{k(k−1)/2}(k−1)!`, the constant in the determinant convention.
pub fn determinant_constant(k: usize) -> Rational {
    let sign = if (k * (k - 1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    };
    Rational::from_integer((factorial(k - 1) as i64 * sign).into())
}

/// `a^k dy¹∧⋯∧dy^k∧dp₂∧⋯∧dp_k` for a chart.
pub fn chart_volume(chart: &SeedChart) -> PForm {
    let n = chart.dim();
    let ds: Vec<PForm> = chart
        .functions()
        .iter()
        .map(exterior_derivative_of)
        .collect();
    wedge_all(&ds, n).scale(&chart.a.pow(chart.k() as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pfaff::pfaff_class;
    use crate::rational::frac;

    #[test]
    fn constants() {
        assert_eq!(normal_form_constant(1).unwrap(), rational::one());
        assert_eq!(normal_form_constant(2).unwrap(), frac(-1, 6));
        assert_eq!(normal_form_constant(3).unwrap(), frac(-1, 60));
        for k in 1..=3 {
            assert_eq!(
                normal_form_constant(k).unwrap() * convention_factor(k),
                determinant_constant(k)
            );
        }
    }

    #[test]
    fn models_have_their_class() {
        for (n, k) in [(3, 1), (3, 2), (4, 2), (5, 3), (7, 3)] {
            let (w, chart) = standard_model(n, k).unwrap();
            let class = pfaff_class(&w, &vec![rational::zero(); n]).unwrap();
            assert_eq!(class.k, k);
            let top = w.wedge(&w.d().wedge_pow(k - 1)).unwrap();
            let c = normal_form_constant(k).unwrap() * convention_factor(k);
            assert!(top.equal(&chart_volume(&chart).scale(&Expr::constant(n, c))));
        }
        assert!(standard_model(2, 2).is_err());
    }
}
