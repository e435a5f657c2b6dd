//! Exact rationals and the `"p/q"` string encoding used on the wire.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Renders `p/q`, or just `p` for integers.
pub fn to_string(r: &Rational) -> String {
    r.to_string()
}

/// Accepts `p`, `-p` or `p/q` with `q > 0`.
pub fn parse(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Invalid(format!("not a rational: `{text}`"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::ZeroDenominator { pos: 0 });
            }
            if d.is_negative() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn pow2(e: i32) -> Rational {
    let two = int(2);
    if e >= 0 {
        num::pow(two, e as usize)
    } else {
        num::pow(two, (-e) as usize).recip()
    }
}

pub mod serde_rational {
    //! Serde helpers: rationals travel as strings, integers are also accepted.
    use super::*;
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(r))
    }

    struct RatVisitor;

    impl Visitor<'_> for RatVisitor {
        type Value = Rational;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a rational string \"p/q\" or an integer")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
            parse(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
            Ok(int(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
            Ok(Rational::from_integer(BigInt::from(v)))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        d.deserialize_any(RatVisitor)
    }
}

/// Newtype so vectors and matrices of rationals can derive serde.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct RatStr(#[serde(with = "serde_rational")] pub Rational);

pub fn wrap_vec(v: &[Rational]) -> Vec<RatStr> {
    v.iter().cloned().map(RatStr).collect()
}

pub fn unwrap_vec(v: &[RatStr]) -> Vec<Rational> {
    v.iter().map(|r| r.0.clone()).collect()
}
