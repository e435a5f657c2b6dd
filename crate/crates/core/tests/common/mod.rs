#![allow(dead_code)]

use darboux_core::connection::Connection;
use darboux_core::darboux::SeedChart;
use darboux_core::expr::Expr;
use darboux_core::forms::PForm;
use darboux_core::poly::Poly;
use darboux_core::rational::{frac, Rational};
use proptest::prelude::*;

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(p, q)| frac(p, q))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("nonzero", |r| *r != frac(0, 1))
}

/// Polynomial with at most `terms` terms of total degree at most `deg`.
pub fn poly(n: usize, terms: usize, deg: u32) -> impl Strategy<Value = Poly> {
    let monomial = prop::collection::vec(0..n, 0..=deg as usize).prop_map(move |vars| {
        let mut e = vec![0u32; n];
        for v in vars {
            e[v] += 1;
        }
        e
    });
    prop::collection::vec((monomial, small_rational()), 0..=terms)
        .prop_map(move |ts| Poly::from_terms(n, ts))
}

pub fn poly_expr(n: usize, terms: usize, deg: u32) -> impl Strategy<Value = Expr> {
    poly(n, terms, deg).prop_map(Expr::poly)
}

/// Rational function whose denominator is `1 + (something vanishing at 0)`
/// or a polynomial, never identically zero.
pub fn rational_expr(n: usize) -> impl Strategy<Value = Expr> {
    (poly(n, 3, 2), poly(n, 2, 1)).prop_map(move |(num, den)| {
        let den = den.add(&Poly::one(n));
        if den.is_zero() {
            Expr::poly(num)
        } else {
            Expr::from_parts(num, den)
        }
    })
}

/// Polynomial nonvanishing near the origin: `c + (higher terms)` with `c ≠ 0`.
pub fn unit_near_origin(n: usize) -> impl Strategy<Value = Expr> {
    (nonzero_rational(), poly(n, 2, 2)).prop_map(move |(c, p)| {
        let constant_part = p
            .terms()
            .find(|(e, _)| e.iter().all(|&d| d == 0))
            .map(|(_, c)| c.clone());
        let p = match constant_part {
            Some(c0) => p.sub(&Poly::constant(n, c0)),
            None => p,
        };
        Expr::poly(p.add(&Poly::constant(n, c)))
    })
}

pub fn one_form(n: usize, terms: usize, deg: u32) -> impl Strategy<Value = PForm> {
    prop::collection::vec(poly_expr(n, terms, deg), n).prop_map(|cs| PForm::from_components(&cs))
}

pub fn point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rational(), n)
}

pub fn to_f64(x: &[Rational]) -> Vec<f64> {
    x.iter().map(darboux_core::rational::to_f64).collect()
}

/// A chart `ω = dy¹ + p₂dy²` on three variables obtained from the standard
/// model by composing with a polynomial change of coordinates that fixes 0
/// and is the identity to first order.
pub fn random_chart3() -> impl Strategy<Value = SeedChart> {
    prop::collection::vec(poly(3, 3, 2), 3).prop_map(|qs| {
        let n = 3;
        let coords: Vec<Expr> = (0..n)
            .map(|i| {
                let q = quadratic_part(&qs[i]);
                Expr::poly(Poly::var(n, i).add(&q))
            })
            .collect();
        SeedChart::new(
            Expr::one(n),
            vec![coords[0].clone(), coords[1].clone()],
            vec![coords[2].clone()],
        )
        .expect("valid chart")
    })
}

fn quadratic_part(p: &Poly) -> Poly {
    Poly::from_terms(
        p.nvars(),
        p.terms()
            .filter(|(e, _)| e.iter().sum::<u32>() == 2)
            .map(|(e, c)| (e.clone(), c.clone())),
    )
}

/// Float evaluator for the expression grammar, independent of the library
/// parser.
pub struct FloatEval<'a> {
    s: &'a [u8],
    i: usize,
    x: &'a [f64],
}

impl<'a> FloatEval<'a> {
    pub fn eval(text: &'a str, x: &'a [f64]) -> f64 {
        let mut p = FloatEval {
            s: text.as_bytes(),
            i: 0,
            x,
        };
        let v = p.expr();
        assert_eq!(p.i, p.s.len(), "trailing input in {text}");
        v
    }

    fn skip(&mut self) {
        while self.i < self.s.len() && self.s[self.i] == b' ' {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> f64 {
        let mut v = self.term();
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let t = self.term();
            v = if c == b'+' { v + t } else { v - t };
        }
        v
    }

    fn term(&mut self) -> f64 {
        let mut v = self.factor();
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.i += 1;
            let f = self.factor();
            v = if c == b'*' { v * f } else { v / f };
        }
        v
    }

    fn factor(&mut self) -> f64 {
        if self.peek() == Some(b'-') {
            self.i += 1;
            return -self.factor();
        }
        let b = self.base();
        if self.peek() == Some(b'^') {
            self.i += 1;
            let e = self.integer();
            return b.powi(e as i32);
        }
        b
    }

    fn integer(&mut self) -> u64 {
        self.skip();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i])
            .unwrap()
            .parse()
            .unwrap()
    }

    fn base(&mut self) -> f64 {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.expr();
                assert_eq!(self.peek(), Some(b')'));
                self.i += 1;
                v
            }
            Some(b'x') => {
                self.i += 1;
                let k = self.integer() as usize;
                self.x[k - 1]
            }
            _ => self.integer() as f64,
        }
    }
}

/// Random expression text over `x1..xn` in the documented grammar.
pub fn expr_text(n: usize) -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0u32..=9).prop_map(|c| c.to_string()),
        (1..=n).prop_map(|i| format!("x{i}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/(({b})^2 + 1)")),
            (inner.clone(), 0u32..=3).prop_map(|(a, e)| format!("({a})^{e}")),
            inner.prop_map(|a| format!("-({a})")),
        ]
    })
}

/// Torsion-free connection with a few constant Christoffel symbols.
pub fn constant_connection(n: usize) -> impl Strategy<Value = Connection> {
    prop::collection::vec(((0..n), (0..n), (0..n), small_rational()), 0..6).prop_map(move |es| {
        let mut seen = std::collections::BTreeSet::new();
        let entries: Vec<_> = es
            .into_iter()
            .map(|(k, i, j, c)| (k, i.min(j), i.max(j), c))
            .filter(|(k, i, j, _)| seen.insert((*k, *i, *j)))
            .map(|(k, i, j, c)| (k, i, j, Expr::constant(n, c)))
            .collect();
        Connection::from_entries(n, entries).unwrap()
    })
}
