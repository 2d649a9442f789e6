//! Scalar fields: exact rationals and double-precision reals.
//!
//! Every structure in the crate is generic over [`Scalar`]. The rational path
//! is exact and is the only one allowed to make rank or equality decisions;
//! the float path compares with [`FLOAT_TOL`].

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Absolute tolerance used by `f64` when testing for zero.
pub const FLOAT_TOL: f64 = 1e-12;

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    /// Exact zero on the rational path, `|x| <= FLOAT_TOL` on the float path.
    fn is_zero(&self) -> bool;

    /// Bitwise zero; used to skip work, never to make decisions.
    fn is_exact_zero(&self) -> bool;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Parses a literal such as `3/2` (both paths) or `0.25` (float only).
    fn parse_literal(s: &str) -> Result<Self, Error>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn parse_literal(s: &str) -> Result<Self, Error> {
        match s.parse::<Rational>() {
            Ok(r) => Ok(r.to_f64()),
            Err(_) => s.trim().parse::<f64>().map_err(|_| Error::InvalidRational(s.to_string())),
        }
    }
}

/// Arbitrary-precision rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn factorial(n: usize) -> Self {
        let mut acc = BigInt::one();
        for k in 2..=n {
            acc *= BigInt::from(k);
        }
        Rational(BigRational::from_integer(acc))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn from_i64(n: i64) -> Self {
        Rational::integer(n)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn is_exact_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn parse_literal(s: &str) -> Result<Self, Error> {
        s.parse()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);
forward_binop!(Div, div, /);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl<'a> AddAssign<&'a Rational> for Rational {
    fn add_assign(&mut self, rhs: &'a Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"3/2"`, `"-1"`, `"+7"`. Decimals are rejected: they select the
/// float path instead.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidRational(s.to_string());
        let t = s.trim();
        let parse_int = |p: &str| -> Result<BigInt, Error> {
            let p = p.trim();
            let p = p.strip_prefix('+').unwrap_or(p);
            if p.is_empty() || !p.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            p.parse::<BigInt>().map_err(|_| bad())
        };
        match t.split_once('/') {
            Some((n, d)) => {
                let n = parse_int(n)?;
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Rational(BigRational::new(n, d)))
            }
            None => Ok(Rational(BigRational::from_integer(parse_int(t)?))),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Rational::integer(n)),
        }
    }
}

/// Parses a comma-separated coordinate list. Returns `Ok(None)` when any
/// entry is a decimal, so the caller can fall back to the float path.
pub fn parse_rational_list(s: &str) -> Result<Option<Vec<Rational>>, Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.iter().any(|p| looks_decimal(p)) {
        return Ok(None);
    }
    parts.iter().map(|p| p.parse()).collect::<Result<_, _>>().map(Some)
}

pub fn parse_float_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(str::trim)
        .map(|p| {
            if let Ok(r) = p.parse::<Rational>() {
                Ok(r.to_f64())
            } else {
                p.parse::<f64>().map_err(|_| Error::InvalidRational(p.to_string()))
            }
        })
        .collect()
}

pub fn looks_decimal(p: &str) -> bool {
    p.contains('.') || p.contains('e') || p.contains('E')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_bit_exact() {
        assert_eq!("3/2".parse::<Rational>().unwrap(), Rational::new(3, 2));
        assert_eq!("-1".parse::<Rational>().unwrap(), Rational::integer(-1));
        assert_eq!("6/-4".parse::<Rational>().unwrap(), Rational::new(-3, 2));
        assert_eq!(" +7 ".parse::<Rational>().unwrap(), Rational::integer(7));
        assert!("1.5".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert!("a/b".parse::<Rational>().is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["0", "-5", "7/3", "-22/7"] {
            let r: Rational = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
    }

    #[test]
    fn list_selects_path() {
        assert_eq!(
            parse_rational_list("1, -1/2,0").unwrap().unwrap(),
            vec![Rational::one(), Rational::new(-1, 2), Rational::zero()]
        );
        assert!(parse_rational_list("0,3.14").unwrap().is_none());
        assert_eq!(parse_float_list("1/2,3.5").unwrap(), vec![0.5, 3.5]);
    }

    #[test]
    fn factorial_values() {
        assert_eq!(Rational::factorial(0), Rational::one());
        assert_eq!(Rational::factorial(5), Rational::integer(120));
    }

    #[test]
    fn serde_accepts_int_and_string() {
        let v: Vec<Rational> = serde_json::from_str(r#"["1/3", 2, "-4"]"#).unwrap();
        assert_eq!(v, vec![Rational::new(1, 3), Rational::integer(2), Rational::integer(-4)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1/3","2","-4"]"#);
    }
}
