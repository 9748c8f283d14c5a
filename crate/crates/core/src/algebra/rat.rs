//! Rational numbers and the small combinatorial helpers every recursion needs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn factorial_rat(n: u32) -> Rat {
    Rat::from_integer(factorial(n))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `(2k+1)!!` for `k >= -1`, with `(-1)!! = 1`.
pub fn odd_double_factorial(k: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut m = 2 * k + 1;
    while m > 1 {
        acc *= BigInt::from(m);
        m -= 2;
    }
    acc
}

/// Wire form of a rational: decimal integer strings, never floats.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatJson {
    pub num: String,
    pub den: String,
}

impl From<&Rat> for RatJson {
    fn from(r: &Rat) -> Self {
        RatJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl TryFrom<RatJson> for Rat {
    type Error = crate::Error;

    fn try_from(j: RatJson) -> Result<Self, Self::Error> {
        let num: BigInt = j
            .num
            .parse()
            .map_err(|_| crate::Error::Parse(format!("bad numerator {:?}", j.num)))?;
        let den: BigInt = j
            .den
            .parse()
            .map_err(|_| crate::Error::Parse(format!("bad denominator {:?}", j.den)))?;
        if den.is_zero() {
            return Err(crate::Error::Parse("zero denominator".into()));
        }
        Ok(Rat::new(num, den))
    }
}

pub fn serialize_rat<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    RatJson::from(r).serialize(s)
}

pub fn deserialize_rat<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
    let j = RatJson::deserialize(d)?;
    Rat::try_from(j).map_err(serde::de::Error::custom)
}

/// `a/b` with sign, `a` when the denominator is one.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn fmt_rat_abs(r: &Rat) -> String {
    fmt_rat(&r.abs())
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat, crate::Error> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    Rat::try_from(RatJson {
        num: n.to_string(),
        den: d.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorials() {
        assert_eq!(odd_double_factorial(-1), BigInt::from(1));
        assert_eq!(odd_double_factorial(0), BigInt::from(1));
        assert_eq!(odd_double_factorial(1), BigInt::from(3));
        assert_eq!(odd_double_factorial(3), BigInt::from(105));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::from(0));
        assert_eq!(binomial(9, 9), BigInt::from(1));
    }

    #[test]
    fn rat_json_is_reduced() {
        let r = rat(6, -8);
        let j = RatJson::from(&r);
        assert_eq!(j.num, "-3");
        assert_eq!(j.den, "4");
        assert_eq!(Rat::try_from(j).unwrap(), r);
        assert_eq!(parse_rat("10/4").unwrap(), rat(5, 2));
        assert!(parse_rat("1/0").is_err());
    }
}
