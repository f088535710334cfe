//! Exact fractions in lowest terms.
//!
//! Every ratio the engine reports goes through [`Rational`]. Values are kept
//! reduced with a positive denominator, so structural equality is numeric
//! equality and ordering is exact cross-multiplication.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Panics if `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Lossy; only for display and trend reporting.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::invalid(format!("not a rational: {s:?}"));
        let s = s.trim();
        if let Some((int, frac)) = s.split_once('.') {
            // Finite decimal: "0.01" is 1/100.
            let digits = format!("{int}{frac}");
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let num: BigInt = digits.parse().map_err(|_| bad())?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(Rational::new(num, den));
        }
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(num, den))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

impl From<(i64, i64)> for Rational {
    fn from((n, d): (i64, i64)) -> Self {
        Rational::new(n, d)
    }
}

/// JSON integers when they fit in an `i64`, decimal strings otherwise.
fn serialize_bigint<S: SerializeStruct>(
    st: &mut S,
    key: &'static str,
    v: &BigInt,
) -> Result<(), S::Error> {
    match v.to_i64() {
        Some(small) => st.serialize_field(key, &small),
        None => st.serialize_field(key, &v.to_string()),
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Rational", 2)?;
        serialize_bigint(&mut st, "num", self.numer())?;
        serialize_bigint(&mut st, "den", self.denom())?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WireInt {
    Small(i64),
    Big(String),
}

impl WireInt {
    fn into_bigint<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            WireInt::Small(v) => Ok(BigInt::from(v)),
            WireInt::Big(s) => s
                .parse()
                .map_err(|_| E::custom(format!("bad integer {s:?}"))),
        }
    }
}

#[derive(Deserialize)]
struct WireRational {
    num: WireInt,
    den: WireInt,
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let w = WireRational::deserialize(deserializer)?;
        let den = w.den.into_bigint()?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(w.num.into_bigint()?, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_normalizes_sign() {
        let r = Rational::new(8, -10);
        assert_eq!(r.to_string(), "-4/5");
        assert_eq!(Rational::new(15, 30), Rational::new(1, 2));
    }

    #[test]
    fn ordering_is_exact() {
        assert!(Rational::new(13, 14) > Rational::new(17, 23));
        assert!(Rational::new(11, 19) < Rational::new(4, 5));
    }

    #[test]
    fn json_round_trip() {
        let big = Rational::new(BigInt::from(10).pow(30), 7);
        for r in [Rational::new(-4, 5), big] {
            let text = serde_json::to_string(&r).unwrap();
            assert_eq!(serde_json::from_str::<Rational>(&text).unwrap(), r);
        }
        assert_eq!(
            serde_json::to_string(&Rational::new(17, 23)).unwrap(),
            r#"{"num":17,"den":23}"#
        );
    }

    #[test]
    fn parses_decimals() {
        assert_eq!("0.01".parse::<Rational>().unwrap(), Rational::new(1, 100));
        assert_eq!("-1.5".parse::<Rational>().unwrap(), Rational::new(-3, 2));
        assert!("1.".parse::<Rational>().is_err());
        assert!("1.x".parse::<Rational>().is_err());
    }

    #[test]
    fn parses_canonical_form() {
        assert_eq!("27/35".parse::<Rational>().unwrap(), Rational::new(27, 35));
        assert_eq!("3".parse::<Rational>().unwrap(), Rational::from_integer(3));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn serializes_num_den() {
        let json = serde_json::to_string(&Rational::new(2, 11)).unwrap();
        assert_eq!(json, r#"{"num":2,"den":11}"#);
    }
}
