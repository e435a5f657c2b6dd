//! Rational functions over the rationals: `num / den` with lazily reduced
//! representatives. Equality is decided by cross-multiplication.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Expr {
    /// Builds `num / den`. Panics on a zero denominator; callers that take
    /// user input go through `try_div`.
    pub fn from_parts(num: Poly, den: Poly) -> Expr {
        assert!(!den.is_zero(), "zero denominator");
        Expr::reduce(num, den)
    }

    pub fn poly(p: Poly) -> Expr {
        let n = p.nvars();
        Expr {
            num: p,
            den: Poly::one(n),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Expr {
        Expr::poly(Poly::constant(nvars, c))
    }

    pub fn int(nvars: usize, c: i64) -> Expr {
        Expr::constant(nvars, rational::int(c))
    }

    pub fn zero(nvars: usize) -> Expr {
        Expr::poly(Poly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Expr {
        Expr::poly(Poly::one(nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Expr {
        Expr::poly(Poly::var(nvars, i))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.as_constant().is_some()
    }

    /// `Some(c)` when the expression is the constant `c`.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.num.is_zero() {
            return Some(Rational::zero());
        }
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    /// Cheap normalization: constant denominators are folded into the
    /// numerator, exact polynomial quotients are taken, and the leading
    /// coefficient of the denominator is made 1.
    fn reduce(num: Poly, den: Poly) -> Expr {
        let nv = num.nvars();
        if num.is_zero() {
            return Expr::zero(nv);
        }
        if let Some(c) = den.as_constant() {
            return Expr {
                num: num.scale(&c.recip()),
                den: Poly::one(nv),
            };
        }
        if let Some(q) = num.div_exact(&den) {
            return Expr::poly(q);
        }
        let lc = den.leading().map(|(_, c)| c.clone()).unwrap();
        if lc.is_one() {
            Expr { num, den }
        } else {
            let inv = lc.recip();
            Expr {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn equal(&self, other: &Expr) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn try_div(&self, other: &Expr) -> Result<Expr> {
        if other.is_zero() {
            return Err(Error::ZeroDenominator { pos: 0 });
        }
        Ok(self.div_unchecked(other))
    }

    fn div_unchecked(&self, other: &Expr) -> Expr {
        let num = self.num.mul(&other.den);
        let den = self.den.mul(&other.num);
        Expr::reduce(num, den)
    }

    pub fn recip(&self) -> Expr {
        assert!(!self.is_zero(), "reciprocal of zero");
        Expr::reduce(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: u32) -> Expr {
        Expr {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        Expr::reduce(self.num.scale(c), self.den.clone())
    }

    /// Partial derivative with respect to variable `i` (0-based), by the
    /// quotient rule.
    pub fn diff(&self, i: usize) -> Expr {
        if self.den.as_constant().is_some() {
            return Expr::reduce(self.num.diff(i), self.den.clone());
        }
        let dn = self.num.diff(i);
        let dd = self.den.diff(i);
        if dd.is_zero() {
            return Expr::reduce(dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Expr::reduce(num, self.den.mul(&self.den))
    }

    pub fn gradient(&self) -> Vec<Expr> {
        (0..self.nvars()).map(|i| self.diff(i)).collect()
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, expression has {} variables",
                x.len(),
                self.nvars()
            )));
        }
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::Pole);
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    /// Substitutes a rational function for every variable.
    pub fn compose(&self, subs: &[Expr]) -> Expr {
        assert_eq!(subs.len(), self.nvars());
        let nv = subs.first().map(Expr::nvars).unwrap_or(0);
        let sub_poly = |p: &Poly| {
            let mut acc = Expr::zero(nv);
            for (e, c) in p.terms() {
                let mut t = Expr::constant(nv, c.clone());
                for (s, &d) in subs.iter().zip(e) {
                    if d > 0 {
                        t = &t * &s.pow(d);
                    }
                }
                acc = &acc + &t;
            }
            acc
        };
        &sub_poly(&self.num) / &sub_poly(&self.den)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let n = self.num.display_with(names);
        if self.den.as_constant().is_some() {
            return n;
        }
        let d = self.den.display_with(names);
        let wrap_n = if self.num.num_terms() > 1 {
            format!("({n})")
        } else {
            n
        };
        format!("{wrap_n}/({d})")
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.display_with(&crate::poly::default_names(self.nvars())))
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.equal(other)
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Expr::reduce(self.num.add(&rhs.num), self.den.clone());
        }
        // one denominator a multiple of the other
        if let Some(q) = self.den.div_exact(&rhs.den) {
            return Expr::reduce(self.num.add(&rhs.num.mul(&q)), self.den.clone());
        }
        if let Some(q) = rhs.den.div_exact(&self.den) {
            return Expr::reduce(self.num.mul(&q).add(&rhs.num), rhs.den.clone());
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        Expr::reduce(num, self.den.mul(&rhs.den))
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero(self.nvars());
        }
        // cross-cancel before multiplying out
        let (mut n1, mut d1) = (self.num.clone(), self.den.clone());
        let (mut n2, mut d2) = (rhs.num.clone(), rhs.den.clone());
        if d1.as_constant().is_none() {
            if let Some(q) = n2.div_exact(&d1) {
                n2 = q;
                d1 = Poly::one(d1.nvars());
            }
        }
        if d2.as_constant().is_none() {
            if let Some(q) = n1.div_exact(&d2) {
                n1 = q;
                d2 = Poly::one(d2.nvars());
            }
        }
        Expr::reduce(n1.mul(&n2), d1.mul(&d2))
    }
}

impl<'a> Div<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        assert!(!rhs.is_zero(), "division by zero expression");
        self.div_unchecked(rhs)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Expr> for &'a Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

pub fn sum<'a>(nvars: usize, items: impl IntoIterator<Item = &'a Expr>) -> Expr {
    items.into_iter().fold(Expr::zero(nvars), |acc, e| &acc + e)
}

// ---------------------------------------------------------------------------
// Parser
//
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | base ("^" nonneg-int)?
//   base   := rational | ident | "(" expr ")"
//   rational := int ("/" posint)?

/// Parses `text` over the variables `vars` (position in `vars` = index).
pub fn parse_expr(text: &str, vars: &[String]) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn n(&self) -> usize {
        self.vars.len()
    }

    fn err(&self, msg: String) -> Error {
        Error::Syntax { pos: self.pos, msg }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let rhs = self.factor()?;
                    if rhs.is_zero() {
                        return Err(Error::ZeroDenominator { pos: at });
                    }
                    acc = &acc / &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self
                .digits()
                .ok_or_else(|| self.err("expected exponent".into()))?;
            let k: u32 = k
                .parse()
                .map_err(|_| self.err("exponent too large".into()))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Expr::var(self.n(), i)),
                    None => Err(Error::UnknownIdentifier { pos: start, name }),
                }
            }
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
            None => Err(self.err("unexpected end of input".into())),
        }
    }

    fn rational(&mut self) -> Result<Expr> {
        let num = self.digits().unwrap();
        let num: num::BigInt = num.parse().unwrap();
        // `int "/" posint` binds as one literal
        let save = self.pos;
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b'/') {
            let slash = self.pos;
            self.pos += 1;
            self.skip_ws();
            if let Some(d) = self.digits() {
                let d: num::BigInt = d.parse().unwrap();
                if d.is_zero() {
                    return Err(Error::ZeroDenominator { pos: slash });
                }
                return Ok(Expr::constant(self.n(), Rational::new(num, d)));
            }
        }
        self.pos = save;
        Ok(Expr::constant(self.n(), Rational::from_integer(num)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::default_names;
    use crate::rational::{frac, int};

    fn v3() -> Vec<String> {
        default_names(3)
    }

    fn p(s: &str) -> Expr {
        parse_expr(s, &v3()).unwrap()
    }

    #[test]
    fn parses_sum_of_monomials() {
        let e = p("x1 + x3*x2");
        let expect = Poly::var(3, 0).add(&Poly::var(3, 1).mul(&Poly::var(3, 2)));
        assert!(e.is_polynomial());
        assert_eq!(e.num(), &expect);
    }

    #[test]
    fn parses_reciprocal() {
        let e = p("1/(1 - x2)");
        assert!(e.num().as_constant().is_some());
        assert!(e.equal(&Expr::from_parts(
            Poly::one(3),
            Poly::one(3).sub(&Poly::var(3, 1))
        )));
    }

    #[test]
    fn parses_rational_literals_inside_terms() {
        // any cross-equal representative of (2 x1^2 - 3 x2) / 4
        let e = p("x1^2/2 - 3/4*x2");
        let oracle = Expr::from_parts(
            Poly::from_terms(3, [(vec![2, 0, 0], int(2)), (vec![0, 1, 0], int(-3))]),
            Poly::constant(3, int(4)),
        );
        assert!(e.equal(&oracle));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert!(p("-x1^2").equal(&-p("x1*x1")));
        assert!(p("2*-x1").equal(&p("-2*x1")));
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            parse_expr("x1 + y", &v3()),
            Err(Error::UnknownIdentifier {
                pos: 5,
                name: "y".into()
            })
        );
        assert_eq!(
            parse_expr("x1 + 1/0", &v3()),
            Err(Error::ZeroDenominator { pos: 6 })
        );
        assert!(matches!(
            parse_expr("x1 +", &v3()),
            Err(Error::Syntax { pos: 4, .. })
        ));
        assert!(matches!(
            parse_expr("(x1", &v3()),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_expr("x1 x2", &v3()),
            Err(Error::Syntax { pos: 3, .. })
        ));
        assert!(matches!(
            parse_expr("x1/(x2-x2)", &v3()),
            Err(Error::ZeroDenominator { pos: 3 })
        ));
    }

    #[test]
    fn derivatives() {
        assert!(p("x1*x3").diff(2).equal(&p("x1")));
        assert!(p("1/(1-x2)").diff(1).equal(&p("1/(1-x2)^2")));
        assert!(p("x1").diff(1).is_zero());
    }

    #[test]
    fn evaluation() {
        assert_eq!(
            p("x1 + x3*x2").eval(&[int(0), int(0), int(5)]).unwrap(),
            int(0)
        );
        assert_eq!(
            p("1/(1-x2)").eval(&[int(0), int(1), int(0)]),
            Err(Error::Pole)
        );
        assert_eq!(
            p("x1^2/2 - 3*x2/4")
                .eval(&[int(2), int(4), int(0)])
                .unwrap(),
            int(-1)
        );
        assert_eq!(
            p("x1/3").eval(&[int(1), int(0), int(0)]).unwrap(),
            frac(1, 3)
        );
    }

    #[test]
    fn equality_by_cross_multiplication() {
        assert!(p("(x2^2 - 1)/(x2 - 1)").equal(&p("x2 + 1")));
        assert!(!p("x1").equal(&p("x2")));
        assert!(p("x1/(2*x2)").equal(&p("(3*x1)/(6*x2)")));
        let raw = Expr {
            num: Poly::var(3, 0).mul(&Poly::var(3, 1)),
            den: Poly::var(3, 1).scale(&int(2)),
        };
        assert!(raw.equal(&p("x1/2")));
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "x1 + x3*x2",
            "1/(1 - x2)",
            "x1^2/2 - 3/4*x2",
            "(x1 - 2*x3)/(x2^2 + 1)",
            "-5",
        ] {
            let e = p(s);
            let back = p(&e.to_string());
            assert!(e.equal(&back), "{s} -> {e}");
        }
    }

    #[test]
    fn composition() {
        let f = p("x1^2 + x2");
        let g = f.compose(&[p("x2 + 1"), p("1/x3"), p("x1")]);
        assert!(g.equal(&p("(x2+1)^2 + 1/x3")));
    }
}
