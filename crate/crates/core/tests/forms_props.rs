mod common;

use common::*;
use darboux_core::connection::covariant_derivative;
use darboux_core::expr::Expr;
use darboux_core::forms::{exterior_derivative_of, PForm};
use darboux_core::rational::{frac, Rational};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn d_of_product(f in poly_expr(4, 3, 2), alpha in one_form(4, 2, 2)) {
        let lhs = alpha.scale(&f).d();
        let rhs = exterior_derivative_of(&f).wedge(&alpha).unwrap().add(&alpha.d().scale(&f)).unwrap();
        prop_assert!(lhs.equal(&rhs));
    }

    #[test]
    fn d_squared_vanishes(alpha in one_form(4, 3, 3)) {
        prop_assert!(alpha.d().d().is_zero());
    }

    #[test]
    fn scaling_law(f in unit_near_origin(5), w in one_form(5, 2, 1), r in 1usize..=3) {
        let fw = w.scale(&f);
        let lhs = fw.wedge(&fw.d().wedge_pow(r - 1)).unwrap();
        let rhs = w.wedge(&w.d().wedge_pow(r - 1)).unwrap().scale(&f.pow(r as u32));
        prop_assert!(lhs.equal(&rhs));
    }

    #[test]
    fn antisymmetric_part_of_covariant_derivative(
        w in one_form(3, 3, 2),
        conn in constant_connection(3),
        x in point(3),
    ) {
        let nabla = covariant_derivative(&w, &conn).unwrap();
        let dw = w.d().eval(&x).unwrap().bilinear_matrix();
        let half = frac(1, 2);
        for i in 0..3 {
            for j in 0..3 {
                let anti: Rational = (nabla[i][j].eval(&x).unwrap() - nabla[j][i].eval(&x).unwrap()) * &half;
                prop_assert_eq!(&anti, &dw[(i, j)]);
            }
        }
    }
}

#[test]
fn wire_roundtrip() {
    let names = darboux_core::poly::default_names(3);
    let w = PForm::one_form([(0, Expr::one(3)), (1, Expr::var(3, 2))], 3).d();
    let back = PForm::from_wire(3, 2, &w.to_wire(&names), &names).unwrap();
    assert!(back.equal(&w));
}
