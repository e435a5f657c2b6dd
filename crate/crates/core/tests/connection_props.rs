mod common;

use common::*;
use darboux_core::connection::{
    covariant_derivative, hessian, s_omega, square, sym_product, Connection, SymForm,
};
use darboux_core::expr::Expr;
use darboux_core::forms::{exterior_derivative_of, PForm};
use darboux_core::rational::{frac, int, Rational};
use proptest::prelude::*;

fn polynomial_phi() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rational(), 4)
}

/// `φ(t) = Σ c_i t^i` composed with `y`, and its first two derivatives.
fn phi_parts(c: &[Rational], y: &Expr) -> (Expr, Expr, Expr) {
    let n = y.nvars();
    let mut phi = Expr::zero(n);
    let mut d1 = Expr::zero(n);
    let mut d2 = Expr::zero(n);
    for (i, ci) in c.iter().enumerate() {
        let i = i as u32;
        phi = &phi + &y.pow(i).scale(ci);
        if i >= 1 {
            d1 = &d1 + &y.pow(i - 1).scale(&(ci * int(i as i64)));
        }
        if i >= 2 {
            d2 = &d2 + &y.pow(i - 2).scale(&(ci * int((i * (i - 1)) as i64)));
        }
    }
    (phi, d1, d2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn covariant_leibniz(f in poly_expr(3, 3, 2), eta in one_form(3, 2, 2), conn in constant_connection(3)) {
        let lhs = covariant_derivative(&eta.scale(&f), &conn).unwrap();
        let nabla = covariant_derivative(&eta, &conn).unwrap();
        let df = f.gradient();
        let e = eta.components();
        for i in 0..3 {
            for j in 0..3 {
                let rhs = &(&df[i] * &e[j]) + &(&f * &nabla[i][j]);
                prop_assert!(lhs[i][j].equal(&rhs));
            }
        }
        let s_lhs = s_omega(&eta.scale(&f), &conn).unwrap();
        let s_rhs = sym_product(&exterior_derivative_of(&f), &eta).add(&s_omega(&eta, &conn).unwrap().scale(&f));
        prop_assert!(s_lhs.equal(&s_rhs));
    }

    #[test]
    fn s_omega_of_built_forms(
        us in prop::collection::vec(poly_expr(3, 3, 3), 2),
        as_ in prop::collection::vec(poly_expr(3, 2, 2), 2),
        conn in constant_connection(3),
    ) {
        let w = us.iter().zip(&as_).fold(PForm::zero(3, 1), |acc, (u, a)| {
            acc.add(&exterior_derivative_of(u).scale(a)).unwrap()
        });
        let mut expected = SymForm::zero(3);
        for (u, a) in us.iter().zip(&as_) {
            expected = expected
                .add(&sym_product(&exterior_derivative_of(a), &exterior_derivative_of(u)))
                .add(&hessian(u, &conn).unwrap().scale(a));
        }
        prop_assert!(s_omega(&w, &conn).unwrap().equal(&expected));
    }

    #[test]
    fn hessian_of_composition(y in poly_expr(3, 3, 2), c in polynomial_phi(), conn in constant_connection(3)) {
        let (phi, d1, d2) = phi_parts(&c, &y);
        let lhs = hessian(&phi, &conn).unwrap();
        let rhs = hessian(&y, &conn).unwrap().scale(&d1).add(&square(&exterior_derivative_of(&y)).scale(&d2));
        prop_assert!(lhs.equal(&rhs));
    }

    #[test]
    fn flat_hessian_matches_finite_differences(u in poly_expr(3, 5, 4), x in point(3)) {
        let exact = hessian(&u, &Connection::flat(3)).unwrap().eval(&x).unwrap();
        let xf = to_f64(&x);
        let f = |dx: &[(usize, f64)]| {
            let mut p = xf.clone();
            for &(i, d) in dx {
                p[i] += d;
            }
            u.eval_f64(&p)
        };
        let second = |i: usize, j: usize, h: f64| {
            (f(&[(i, h), (j, h)]) - f(&[(i, h), (j, -h)]) - f(&[(i, -h), (j, h)]) + f(&[(i, -h), (j, -h)]))
                / (4.0 * h * h)
        };
        // One Richardson step removes the h² term; degree ≤ 4 leaves no h⁴ term.
        let h = 1e-3;
        for i in 0..3 {
            for j in 0..3 {
                let fd = (4.0 * second(i, j, h / 2.0) - second(i, j, h)) / 3.0;
                let e = darboux_core::rational::to_f64(&exact[(i, j)]);
                prop_assert!((fd - e).abs() <= 1e-6 * e.abs().max(1.0), "entry ({i},{j}): {fd} vs {e}");
            }
        }
    }
}

#[test]
fn conflicting_entries_rejected() {
    let e = Connection::from_entries(
        2,
        [
            (0, 0, 1, Expr::int(2, 1)),
            (0, 1, 0, Expr::constant(2, frac(1, 2))),
        ],
    );
    assert!(e.is_err());
}
