//! Truncated one-variable Laurent series over Q[pi^2].

use std::fmt;

use num_traits::{One, Zero};

use super::pi::PiScalar;
use super::rat::{factorial, Rat};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// `Σ_{e=low}^{order-1} c_e z^e + O(z^order)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    low: i32,
    coeffs: Vec<PiScalar>,
    order: i32,
}

impl LaurentSeries {
    /// Coefficients for exponents `low, low+1, ...`, known below `order`.
    pub fn new(low: i32, coeffs: Vec<PiScalar>, order: i32) -> Self {
        let mut s = LaurentSeries { low, coeffs, order };
        s.normalize();
        s
    }

    pub fn zero(order: i32) -> Self {
        LaurentSeries {
            low: order,
            coeffs: Vec::new(),
            order,
        }
    }

    /// `c z^e`, known to `order`.
    pub fn monomial(c: PiScalar, e: i32, order: i32) -> Self {
        Self::new(e, vec![c], order)
    }

    /// Builds a series from a coefficient function on `[low, order)`.
    pub fn from_fn(low: i32, order: i32, f: impl Fn(i32) -> PiScalar) -> Self {
        Self::new(low, (low..order).map(f).collect(), order)
    }

    fn normalize(&mut self) {
        let keep = (self.order as i64 - self.low as i64).max(0) as usize;
        self.coeffs.truncate(keep);
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        self.coeffs.drain(..lead);
        self.low += lead as i32;
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.low = self.order;
        }
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// Lowest exponent with a nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<i32> {
        (!self.coeffs.is_empty()).then_some(self.low)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `z^e`; an error past the truncation order.
    pub fn coeff(&self, e: i32) -> Result<PiScalar> {
        if e >= self.order {
            return Err(Error::TruncationInsufficient(format!(
                "coefficient of z^{e} requested, series known below z^{}",
                self.order
            )));
        }
        Ok(self.coeff_unchecked(e))
    }

    fn coeff_unchecked(&self, e: i32) -> PiScalar {
        if e < self.low {
            return PiScalar::zero();
        }
        self.coeffs
            .get((e - self.low) as usize)
            .cloned()
            .unwrap_or_default()
    }

    /// Nonzero `(exponent, coefficient)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i32, &PiScalar)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.low + i as i32, c))
    }

    pub fn truncate(&self, order: i32) -> Self {
        Self::new(self.low, self.coeffs.clone(), order.min(self.order))
    }

    /// One past the highest stored exponent; `i32::MIN` when nothing is stored,
    /// since an empty exact series keeps `low` at its (possibly huge) order.
    fn top(&self) -> i32 {
        if self.coeffs.is_empty() {
            return i32::MIN;
        }
        self.low.saturating_add(self.coeffs.len() as i32)
    }

    pub fn add(&self, o: &LaurentSeries) -> Self {
        let order = self.order.min(o.order);
        let hi = self.top().max(o.top()).min(order);
        let low = self.low.min(o.low).min(hi);
        let coeffs = (low..hi)
            .map(|e| &self.coeff_unchecked(e) + &o.coeff_unchecked(e))
            .collect();
        Self::new(low, coeffs, order)
    }

    pub fn neg(&self) -> Self {
        Self::new(
            self.low,
            self.coeffs.iter().map(|c| -c).collect(),
            self.order,
        )
    }

    pub fn sub(&self, o: &LaurentSeries) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &PiScalar) -> Self {
        Self::new(
            self.low,
            self.coeffs.iter().map(|c| c * s).collect(),
            self.order,
        )
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self::new(
            self.low + k,
            self.coeffs.clone(),
            self.order.saturating_add(k),
        )
    }

    pub fn mul(&self, o: &LaurentSeries) -> Self {
        if self.is_zero() || o.is_zero() {
            let order = match (self.is_zero(), o.is_zero()) {
                (true, true) => self.order.saturating_add(o.order),
                (true, false) => self.order.saturating_add(o.low),
                _ => self.low.saturating_add(o.order),
            };
            return Self::zero(order);
        }
        let order = (self.low.saturating_add(o.order)).min(o.low.saturating_add(self.order));
        let low = self.low + o.low;
        let len = ((order as i64 - low as i64).max(0) as usize)
            .min(self.coeffs.len() + o.coeffs.len() - 1);
        let mut coeffs = vec![PiScalar::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= coeffs.len() {
                    break;
                }
                if !b.is_zero() {
                    coeffs[k] += &(a * b);
                }
            }
        }
        Self::new(low, coeffs, order)
    }

    /// Multiplicative inverse. The leading coefficient must be a nonzero
    /// rational, the units of Q[pi^2].
    pub fn inverse(&self) -> Result<Self> {
        if self.is_exact() {
            return Err(Error::Domain(
                "truncate an exact series before inverting".into(),
            ));
        }
        let Some(low) = self.valuation() else {
            return Err(Error::Domain(
                "inverse of a series that vanishes to truncation".into(),
            ));
        };
        let lead = self.coeffs[0]
            .as_rat()
            .filter(|r| !r.is_zero())
            .ok_or_else(|| Error::Domain("leading coefficient is not a unit of Q[pi^2]".into()))?;
        let inv_lead = PiScalar::from_rat(Rat::one() / lead);
        let n = (self.order - low) as usize;
        let mut d: Vec<PiScalar> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                d.push(inv_lead.clone());
                continue;
            }
            let mut acc = PiScalar::zero();
            for i in 1..=k {
                let c = &self.coeffs.get(i).cloned().unwrap_or_default();
                if !c.is_zero() {
                    acc += &(c * &d[k - i]);
                }
            }
            d.push(-(&acc * &inv_lead));
        }
        Ok(Self::new(-low, d, -low + n as i32))
    }

    /// `f(-z)`.
    pub fn reflect(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if (self.low + i as i32) % 2 == 0 {
                    c.clone()
                } else {
                    -c
                }
            })
            .collect();
        Self::new(self.low, coeffs, self.order)
    }

    /// Part with negative exponents. Needs every negative coefficient known.
    pub fn principal_part(&self) -> Result<Self> {
        self.principal_filtered(|_| true)
    }

    /// Odd-exponent terms of the principal part.
    pub fn principal_part_odd(&self) -> Result<Self> {
        self.principal_filtered(|e| e % 2 != 0)
    }

    /// Even-exponent terms of the principal part.
    pub fn principal_part_even(&self) -> Result<Self> {
        self.principal_filtered(|e| e % 2 == 0)
    }

    fn principal_filtered(&self, keep: impl Fn(i32) -> bool) -> Result<Self> {
        if self.order < 0 {
            return Err(Error::TruncationInsufficient(format!(
                "principal part needs coefficients through z^-1, series known below z^{}",
                self.order
            )));
        }
        let low = self.low.min(0);
        Ok(Self::from_fn(low, 0, |e| {
            if keep(e) {
                self.coeff_unchecked(e)
            } else {
                PiScalar::zero()
            }
        })
        .with_order(i32::MAX))
    }

    /// Marks the series as exact through `order` (used for finite sums).
    fn with_order(mut self, order: i32) -> Self {
        self.order = order;
        if self.coeffs.is_empty() {
            self.low = order;
        }
        self
    }

    /// Exact finite Laurent polynomial.
    pub fn polynomial(low: i32, coeffs: Vec<PiScalar>) -> Self {
        let order = low + coeffs.len() as i32;
        Self::new(low, coeffs, order).with_order(i32::MAX)
    }

    pub fn is_exact(&self) -> bool {
        self.order == i32::MAX
    }

    pub fn residue(&self) -> Result<PiScalar> {
        self.coeff(-1)
    }

    /// Antiderivative with zero constant term; fails on a nonzero residue.
    pub fn antiderivative(&self) -> Result<Self> {
        if !self.coeff_unchecked(-1).is_zero() {
            return Err(Error::Domain(
                "antiderivative of a series with nonzero residue".into(),
            ));
        }
        if self.is_zero() {
            return Ok(Self::zero(self.order.saturating_add(1)));
        }
        let order = if self.is_exact() {
            i32::MAX
        } else {
            self.order + 1
        };
        let hi = if self.is_exact() {
            self.low + self.coeffs.len() as i32 + 1
        } else {
            order
        };
        let s = Self::from_fn(self.low + 1, hi, |e| {
            if e == 0 {
                return PiScalar::zero();
            }
            self.coeff_unchecked(e - 1)
                .scale(&Rat::new(One::one(), e.into()))
        });
        Ok(if self.is_exact() {
            s.with_order(i32::MAX)
        } else {
            s
        })
    }

    pub fn parity(&self) -> Option<Parity> {
        let mut exps = self.iter().map(|(e, _)| e.rem_euclid(2));
        let Some(first) = exps.next() else {
            return Some(Parity::Even);
        };
        if exps.all(|p| p == first) {
            Some(if first == 0 {
                Parity::Even
            } else {
                Parity::Odd
            })
        } else {
            None
        }
    }

    /// Errors unless the series has the declared parity under `z -> -z`.
    pub fn assert_parity(&self, p: Parity) -> Result<()> {
        match (self.parity(), p) {
            (_, _) if self.is_zero() => Ok(()),
            (Some(a), b) if a == b => Ok(()),
            _ => Err(Error::Domain(format!("series is not {p:?}"))),
        }
    }

    /// `cos(2 pi z)`, known below `z^order`.
    pub fn cos_2pi(order: i32) -> Self {
        Self::from_fn(0, order.max(0), |e| {
            if e % 2 != 0 {
                return PiScalar::zero();
            }
            let m = e / 2;
            let sign = if m % 2 == 0 { 1 } else { -1 };
            let c = Rat::new((sign * (1i64 << (2 * m))).into(), factorial(e as u32));
            PiScalar::monomial(c, m as usize)
        })
    }

    /// `sin(2 pi z) / (2 pi)`, known below `z^order`.
    pub fn sin_2pi_over_2pi(order: i32) -> Self {
        Self::from_fn(0, order.max(0), |e| {
            if e % 2 == 0 {
                return PiScalar::zero();
            }
            let m = (e - 1) / 2;
            let sign = if m % 2 == 0 { 1 } else { -1 };
            let c = Rat::new((sign * (1i64 << (2 * m))).into(), factorial(e as u32));
            PiScalar::monomial(c, m as usize)
        })
    }

    /// Human form, highest known exponents omitted into `O(z^order)`.
    pub fn to_human(&self) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (e, c) in self.iter() {
            let mono = match e {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{e}"),
            };
            if mono.is_empty() {
                for j in c.support() {
                    let s = PiScalar::monomial(c.coeff(j), j).to_human();
                    match s.strip_prefix('-') {
                        Some(r) => parts.push((true, r.to_string())),
                        None => parts.push((false, s)),
                    }
                }
                continue;
            }
            let (neg, f) = c.to_human_factor().expect("nonzero");
            parts.push((
                neg,
                if f.is_empty() {
                    mono
                } else {
                    format!("{f}·{mono}")
                },
            ));
        }
        let mut s = super::pi::join_signed(&parts);
        if !self.is_exact() {
            s.push_str(&format!(" + O(z^{})", self.order));
        }
        s
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_human())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::rat;

    fn r(n: i64, d: i64) -> PiScalar {
        PiScalar::from_rat(rat(n, d))
    }

    #[test]
    fn exact_sum_with_empty_operand() {
        let a = LaurentSeries::polynomial(-3, vec![r(1, 2)]);
        let empty = LaurentSeries::polynomial(0, vec![]);
        assert_eq!(a.add(&empty), a);
        assert_eq!(empty.add(&a), a);
    }

    #[test]
    fn principal_parts() {
        let s = LaurentSeries::polynomial(-2, vec![r(1, 1), r(1, 1), r(1, 1), r(1, 1)]);
        assert_eq!(
            s.principal_part_odd().unwrap(),
            LaurentSeries::polynomial(-1, vec![r(1, 1)])
        );
        assert_eq!(
            s.principal_part_even().unwrap(),
            LaurentSeries::polynomial(-2, vec![r(1, 1)])
        );
        let pos = LaurentSeries::polynomial(0, vec![r(1, 1), r(2, 1)]);
        assert!(pos.principal_part().unwrap().is_zero());
    }

    #[test]
    fn secant_principal_part() {
        // [1/(z^3 cos 2 pi z)]^- = z^-3 + 2 pi^2 z^-1
        let sec = LaurentSeries::cos_2pi(6).inverse().unwrap();
        let s = sec.shift(-3);
        let pp = s.principal_part_odd().unwrap();
        let want = LaurentSeries::polynomial(
            -3,
            vec![r(1, 1), PiScalar::zero(), PiScalar::monomial(rat(2, 1), 1)],
        );
        assert_eq!(pp, want);
    }

    #[test]
    fn inverse_round_trip() {
        let c = LaurentSeries::sin_2pi_over_2pi(12);
        let inv = c.inverse().unwrap();
        assert_eq!(inv.valuation(), Some(-1));
        let one = c.mul(&inv);
        assert_eq!(one.coeff(0).unwrap(), PiScalar::one());
        for e in 1..one.order() {
            assert!(one.coeff(e).unwrap().is_zero());
        }
    }

    #[test]
    fn truncation_is_enforced() {
        let c = LaurentSeries::cos_2pi(4);
        assert!(c.coeff(4).is_err());
        assert!(c.shift(-6).principal_part().is_err());
    }

    #[test]
    fn antiderivative_and_residue() {
        let s = LaurentSeries::polynomial(-2, vec![r(1, 1), PiScalar::zero(), r(3, 1)]);
        let a = s.antiderivative().unwrap();
        assert_eq!(
            a,
            LaurentSeries::polynomial(-1, vec![r(-1, 1), PiScalar::zero(), r(3, 1)])
        );
        let bad = LaurentSeries::polynomial(-1, vec![r(1, 1)]);
        assert_eq!(bad.residue().unwrap(), r(1, 1));
        assert!(bad.antiderivative().is_err());
    }
}
