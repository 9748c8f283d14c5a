//! The coefficient ring Q[pi^2].

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rat::{fmt_rat, fmt_rat_abs, Rat, RatJson};
use crate::Error;

/// An element `sum_j c_j * pi^(2j)` of Q[pi^2]. Trailing zeros are trimmed, so
/// structural equality is ring equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiScalar {
    coeffs: Vec<Rat>,
}

impl PiScalar {
    pub fn zero() -> Self {
        PiScalar { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::monomial(r, 0)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_integer(n.into()))
    }

    /// `c * pi^(2j)`.
    pub fn monomial(c: Rat, j: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); j + 1];
        coeffs[j] = c;
        PiScalar { coeffs }
    }

    /// `pi^2`.
    pub fn pi2() -> Self {
        Self::monomial(Rat::one(), 1)
    }

    /// `(-4 pi^2)`, the value of `L^2` at `L = 2 pi i`.
    pub fn two_pi_i_squared() -> Self {
        Self::monomial(Rat::from_integer((-4).into()), 1)
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut s = PiScalar { coeffs };
        s.trim();
        s
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `pi^(2j)`.
    pub fn coeff(&self, j: usize) -> Rat {
        self.coeffs.get(j).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Indices `j` with a nonzero `pi^(2j)` coefficient.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, _)| j)
    }

    /// `Some(j)` when the scalar is a single nonzero term `c * pi^(2j)`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.support();
        let first = it.next()?;
        if it.next().is_some() {
            None
        } else {
            Some(first)
        }
    }

    /// The rational part, if the scalar has no `pi` at all.
    pub fn as_rat(&self) -> Option<Rat> {
        match self.coeffs.len() {
            0 => Some(Rat::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Value with `pi^2` set to zero.
    pub fn pi_free_part(&self) -> Rat {
        self.coeff(0)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        PiScalar {
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Approximate decimal value. Display helper only; never used in a check.
    pub fn approx_f64(&self) -> f64 {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| rat_to_f64(c) * pi2.powi(j as i32))
            .sum()
    }

    /// Human form, e.g. `1/8`, `(9/64)·π^2`, `(1/2 + 3·π^2)`.
    pub fn to_human(&self) -> String {
        let terms: Vec<(bool, String)> = self
            .support()
            .map(|j| {
                let c = &self.coeffs[j];
                let neg = c.is_negative();
                let body = if j == 0 {
                    fmt_rat_abs(c)
                } else {
                    let mag = fmt_rat_abs(c);
                    let pi = pi_factor(j);
                    if c.abs().is_one() {
                        pi
                    } else if c.is_integer() {
                        format!("{mag}·{pi}")
                    } else {
                        format!("({mag})·{pi}")
                    }
                };
                (neg, body)
            })
            .collect();
        join_signed(&terms)
    }

    /// Human form of a coefficient that multiplies further factors, e.g.
    /// `(3/256)` or `2·π^2` or `(1 + π^2)`. Returns `None` for a unit.
    pub(crate) fn to_human_factor(&self) -> Option<(bool, String)> {
        if let Some(j) = self.homogeneous_degree() {
            let c = &self.coeffs[j];
            let neg = c.is_negative();
            let mag = c.abs();
            let pi = (j > 0).then(|| pi_factor(j));
            let body = match (mag.is_one(), mag.is_integer(), pi) {
                (true, _, None) => return Some((neg, String::new())),
                (true, _, Some(p)) => p,
                (false, true, None) => fmt_rat(&mag),
                (false, true, Some(p)) => format!("{}·{p}", fmt_rat(&mag)),
                (false, false, None) => format!("({})", fmt_rat(&mag)),
                (false, false, Some(p)) => format!("({})·{p}", fmt_rat(&mag)),
            };
            Some((neg, body))
        } else if self.is_zero() {
            None
        } else {
            Some((false, format!("({})", self.to_human())))
        }
    }
}

fn pi_factor(j: usize) -> String {
    format!("π^{}", 2 * j)
}

pub(crate) fn join_signed(terms: &[(bool, String)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (neg, body)) in terms.iter().enumerate() {
        match (i, neg) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(body);
    }
    out
}

pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_human())
    }
}

impl From<Rat> for PiScalar {
    fn from(r: Rat) -> Self {
        Self::from_rat(r)
    }
}

impl<'a> Add<&'a PiScalar> for &'a PiScalar {
    type Output = PiScalar;
    fn add(self, rhs: &PiScalar) -> PiScalar {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|j| self.coeff(j) + rhs.coeff(j)).collect();
        PiScalar::from_coeffs(coeffs)
    }
}

impl<'a> Sub<&'a PiScalar> for &'a PiScalar {
    type Output = PiScalar;
    fn sub(self, rhs: &PiScalar) -> PiScalar {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|j| self.coeff(j) - rhs.coeff(j)).collect();
        PiScalar::from_coeffs(coeffs)
    }
}

impl<'a> Mul<&'a PiScalar> for &'a PiScalar {
    type Output = PiScalar;
    fn mul(self, rhs: &PiScalar) -> PiScalar {
        if self.is_zero() || rhs.is_zero() {
            return PiScalar::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        PiScalar::from_coeffs(coeffs)
    }
}

impl Neg for &PiScalar {
    type Output = PiScalar;
    fn neg(self) -> PiScalar {
        PiScalar {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for PiScalar {
    type Output = PiScalar;
    fn neg(self) -> PiScalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<PiScalar> for PiScalar {
            type Output = PiScalar;
            fn $m(self, rhs: PiScalar) -> PiScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a PiScalar> for PiScalar {
            type Output = PiScalar;
            fn $m(self, rhs: &'a PiScalar) -> PiScalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&PiScalar> for PiScalar {
    fn add_assign(&mut self, rhs: &PiScalar) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rat::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.trim();
    }
}

impl SubAssign<&PiScalar> for PiScalar {
    fn sub_assign(&mut self, rhs: &PiScalar) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rat::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self.trim();
    }
}

/// One term of the canonical JSON form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiTermJson {
    pub pi_power: u32,
    pub num: String,
    pub den: String,
}

impl PiScalar {
    pub fn to_json_terms(&self) -> Vec<PiTermJson> {
        self.support()
            .map(|j| {
                let r = RatJson::from(&self.coeffs[j]);
                PiTermJson {
                    pi_power: 2 * j as u32,
                    num: r.num,
                    den: r.den,
                }
            })
            .collect()
    }

    pub fn from_json_terms(terms: Vec<PiTermJson>) -> Result<Self, Error> {
        let mut out = PiScalar::zero();
        for t in terms {
            if t.pi_power % 2 != 0 {
                return Err(Error::Parse(format!("odd pi power {}", t.pi_power)));
            }
            let c = Rat::try_from(RatJson {
                num: t.num,
                den: t.den,
            })?;
            out += &PiScalar::monomial(c, (t.pi_power / 2) as usize);
        }
        Ok(out)
    }
}

impl Serialize for PiScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json_terms().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<PiTermJson>::deserialize(d)?;
        PiScalar::from_json_terms(terms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::rat;

    #[test]
    fn canonical_zero() {
        let a = PiScalar::from_coeffs(vec![rat(1, 2), rat(0, 1)]);
        assert_eq!(a, PiScalar::from_rat(rat(1, 2)));
        assert_eq!(&a - &a, PiScalar::zero());
        assert!(PiScalar::monomial(rat(0, 1), 3).is_zero());
    }

    #[test]
    fn products() {
        let c = PiScalar::from_rat(rat(1, 8));
        assert_eq!(&c * &c, PiScalar::from_rat(rat(1, 64)));
        let p = PiScalar::from_coeffs(vec![rat(1, 1), rat(1, 1)]);
        assert_eq!(
            &p * &p,
            PiScalar::from_coeffs(vec![rat(1, 1), rat(2, 1), rat(1, 1)])
        );
    }

    #[test]
    fn human_form() {
        assert_eq!(PiScalar::from_rat(rat(1, 8)).to_human(), "1/8");
        assert_eq!(PiScalar::monomial(rat(9, 64), 1).to_human(), "(9/64)·π^2");
        assert_eq!(PiScalar::monomial(rat(2, 1), 1).to_human(), "2·π^2");
        assert_eq!(PiScalar::zero().to_human(), "0");
        let mixed = PiScalar::from_coeffs(vec![rat(-1, 2), rat(0, 1), rat(3, 1)]);
        assert_eq!(mixed.to_human(), "-1/2 + 3·π^4");
    }

    #[test]
    fn json_sorted_by_power() {
        let s = PiScalar::from_coeffs(vec![rat(1, 3), rat(0, 1), rat(-5, 7)]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(
            j,
            r#"[{"pi_power":0,"num":"1","den":"3"},{"pi_power":4,"num":"-5","den":"7"}]"#
        );
        let back: PiScalar = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
