//! Truncated formal power series in `hbar` and `t_0, t_1, ...`.
//!
//! A series carries a [`Bounds`] region. Every monomial inside the region has
//! its exact coefficient; nothing outside the region is stored. Operations
//! shrink the region to what they can still guarantee.
//!
//! Products keep the region of the factors. That is exact in `hbar` when no
//! factor has negative `hbar` powers. Callers working with `hbar^-1` terms widen
//! the `hbar` cap by the largest possible negative contribution before
//! multiplying, then restrict.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::pi::PiScalar;
use super::rat::Rat;
use super::Coeff;
use crate::{Error, Result};

/// Completeness region: `hbar` power at most `max_hbar`, total t-degree at
/// most `max_degree`, every t-index at most `max_index`. Negative degree or
/// index caps denote the empty region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub max_hbar: i32,
    pub max_degree: i32,
    pub max_index: i32,
}

impl Bounds {
    pub fn new(max_hbar: i32, max_degree: i32, max_index: i32) -> Self {
        Bounds {
            max_hbar,
            max_degree,
            max_index,
        }
    }

    pub fn contains(&self, m: &Mono) -> bool {
        m.hbar <= self.max_hbar
            && m.degree() as i64 <= self.max_degree as i64
            && m.max_index()
                .is_none_or(|k| k as i64 <= self.max_index as i64)
    }

    /// Intersection of two regions.
    pub fn meet(&self, o: &Bounds) -> Bounds {
        Bounds {
            max_hbar: self.max_hbar.min(o.max_hbar),
            max_degree: self.max_degree.min(o.max_degree),
            max_index: self.max_index.min(o.max_index),
        }
    }

    /// True when every monomial of `o` lies in `self`.
    pub fn covers(&self, o: &Bounds) -> bool {
        self.max_hbar >= o.max_hbar
            && self.max_degree >= o.max_degree
            && self.max_index >= o.max_index
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hbar<={}, deg<={}, index<={}",
            self.max_hbar, self.max_degree, self.max_index
        )
    }
}

/// `hbar^hbar · ∏ t_k^{t[k]}`, trailing zero exponents trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mono {
    pub hbar: i32,
    pub t: Vec<u32>,
}

impl Mono {
    pub fn new(hbar: i32, mut t: Vec<u32>) -> Self {
        while t.last() == Some(&0) {
            t.pop();
        }
        Mono { hbar, t }
    }

    pub fn one() -> Self {
        Mono::new(0, Vec::new())
    }

    /// Monomial from a multiset of indices.
    pub fn from_indices(hbar: i32, ks: &[u32]) -> Self {
        let mut t = Vec::new();
        for &k in ks {
            let k = k as usize;
            if t.len() <= k {
                t.resize(k + 1, 0);
            }
            t[k] += 1;
        }
        Mono::new(hbar, t)
    }

    pub fn degree(&self) -> u32 {
        self.t.iter().sum()
    }

    pub fn max_index(&self) -> Option<u32> {
        (!self.t.is_empty()).then(|| self.t.len() as u32 - 1)
    }

    pub fn exp(&self, k: usize) -> u32 {
        self.t.get(k).copied().unwrap_or(0)
    }

    /// Sum of the indices with multiplicity.
    pub fn index_sum(&self) -> u32 {
        self.t.iter().enumerate().map(|(k, e)| k as u32 * e).sum()
    }

    /// Indices as a sorted multiset.
    pub fn indices(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (k, &e) in self.t.iter().enumerate() {
            out.extend(std::iter::repeat_n(k as u32, e as usize));
        }
        out
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let n = self.t.len().max(o.t.len());
        let t = (0..n).map(|k| self.exp(k) + o.exp(k)).collect();
        Mono::new(self.hbar + o.hbar, t)
    }

    pub fn with_t(&self, k: usize, e: u32) -> Mono {
        let mut t = self.t.clone();
        if t.len() <= k {
            t.resize(k + 1, 0);
        }
        t[k] = e;
        Mono::new(self.hbar, t)
    }

    pub fn to_human(&self) -> String {
        let mut parts: Vec<String> = self
            .t
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(k, e)| {
                if *e == 1 {
                    format!("t{k}")
                } else {
                    format!("t{k}^{e}")
                }
            })
            .collect();
        match self.hbar {
            0 => {}
            1 => parts.push("hbar".into()),
            h => parts.push(format!("hbar^{h}")),
        }
        parts.join("·")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<C: Coeff> {
    bounds: Bounds,
    terms: BTreeMap<Mono, C>,
}

impl<C: Coeff> TruncSeries<C> {
    pub fn zero(bounds: Bounds) -> Self {
        TruncSeries {
            bounds,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(bounds: Bounds) -> Self {
        let mut s = Self::zero(bounds);
        s.add_term(Mono::one(), C::one_elem());
        s
    }

    pub fn from_terms(bounds: Bounds, terms: impl IntoIterator<Item = (Mono, C)>) -> Self {
        let mut s = Self::zero(bounds);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn terms(&self) -> &BTreeMap<Mono, C> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient in the region vanishes.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·m`; monomials outside the region are dropped.
    pub fn add_term(&mut self, m: Mono, c: C) {
        if c.is_nil() || !self.bounds.contains(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().plus(&c);
                if s.is_nil() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Coefficient of `m`, which must lie in the region.
    pub fn coeff(&self, m: &Mono) -> Result<C> {
        if !self.bounds.contains(m) {
            return Err(Error::TruncationInsufficient(format!(
                "monomial {} lies outside {}",
                m.to_human(),
                self.bounds
            )));
        }
        Ok(self.terms.get(m).cloned().unwrap_or_else(C::zero_elem))
    }

    /// Restricts to a sub-region.
    pub fn restrict(&self, b: &Bounds) -> Self {
        let bounds = self.bounds.meet(b);
        Self::from_terms(
            bounds,
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.restrict(&o.bounds);
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_same(|c| c.negated())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, r: &Rat) -> Self {
        self.map_same(|c| c.scaled(r))
    }

    pub fn scale_c(&self, s: &C) -> Self {
        self.map_same(|c| c.times(s))
    }

    fn map_same(&self, f: impl Fn(&C) -> C) -> Self {
        Self::from_terms(
            self.bounds,
            self.terms.iter().map(|(m, c)| (m.clone(), f(c))),
        )
    }

    /// Coefficientwise map into another ring.
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TruncSeries<D> {
        TruncSeries::from_terms(
            self.bounds,
            self.terms.iter().map(|(m, c)| (m.clone(), f(c))),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.bounds.meet(&o.bounds));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.mul(mb);
                if out.bounds.contains(&m) {
                    out.add_term(m, ca.times(cb));
                }
            }
        }
        out
    }

    /// Multiplies by `hbar^k`.
    pub fn mul_hbar(&self, k: i32) -> Self {
        let mut b = self.bounds;
        b.max_hbar += k;
        Self::from_terms(
            b,
            self.terms
                .iter()
                .map(|(m, c)| (Mono::new(m.hbar + k, m.t.clone()), c.clone())),
        )
    }

    /// Multiplies by `t_k`.
    pub fn mul_t(&self, k: usize) -> Self {
        Self::from_terms(
            self.bounds,
            self.terms
                .iter()
                .map(|(m, c)| (m.with_t(k, m.exp(k) + 1), c.clone())),
        )
    }

    /// `∂/∂t_k`. The result is exact one degree lower.
    pub fn derivative(&self, k: usize) -> Self {
        let mut b = self.bounds;
        b.max_degree -= 1;
        let mut out = Self::zero(b);
        if k as i64 > self.bounds.max_index as i64 {
            // t_k lies outside the region: nothing about its derivative is known.
            out.bounds.max_degree = -1;
            return out;
        }
        for (m, c) in &self.terms {
            let e = m.exp(k);
            if e == 0 {
                continue;
            }
            out.add_term(m.with_t(k, e - 1), c.scaled(&Rat::from_integer(e.into())));
        }
        out
    }

    /// Part of t-degree zero.
    fn degree_zero_part(&self) -> Vec<(&Mono, &C)> {
        self.terms.iter().filter(|(m, _)| m.t.is_empty()).collect()
    }

    /// Degree-zero terms are only nilpotent when they carry `hbar^{>=1}`.
    fn nilpotent(&self) -> bool {
        self.degree_zero_part().iter().all(|(m, _)| m.hbar >= 1)
    }

    /// `exp(s)`; t-degree-zero terms of `s` must carry a positive `hbar` power.
    pub fn exp(&self) -> Result<Self> {
        if !self.nilpotent() {
            return Err(Error::Domain(
                "exp needs the t-degree-zero part to carry positive hbar powers".into(),
            ));
        }
        let mut out = Self::one(self.bounds);
        let mut power = Self::one(self.bounds);
        let mut fact = Rat::one();
        let mut k = 0i64;
        loop {
            power = power.mul(self);
            if power.is_zero() {
                return Ok(out);
            }
            k += 1;
            fact *= Rat::from_integer(k.into());
            out = out.add(&power.scale(&(Rat::one() / &fact)));
        }
    }

    /// `log(s)`; the t-degree-zero part of `s` must be 1 plus positive `hbar` powers.
    pub fn log(&self) -> Result<Self> {
        let x = self.sub(&Self::one(self.bounds));
        if !x.nilpotent() {
            return Err(Error::Domain(
                "log needs the t-degree-zero part to be 1 up to positive hbar powers".into(),
            ));
        }
        let mut out = Self::zero(self.bounds);
        let mut power = Self::one(self.bounds);
        let mut k = 0i64;
        loop {
            power = power.mul(&x);
            if power.is_zero() {
                return Ok(out);
            }
            k += 1;
            let c = Rat::new(if k % 2 == 1 { 1.into() } else { (-1).into() }, k.into());
            out = out.add(&power.scale(&c));
        }
    }

    /// Nonzero terms sorted for display: by `hbar`, then degree, then `t_0` first.
    pub fn sorted_terms(&self) -> Vec<(&Mono, &C)> {
        let mut v: Vec<(&Mono, &C)> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            a.hbar
                .cmp(&b.hbar)
                .then(a.degree().cmp(&b.degree()))
                .then_with(|| {
                    let ia = a.indices();
                    let ib = b.indices();
                    ia.cmp(&ib)
                })
        });
        v
    }

    /// One line per term, e.g. `t0^3/6·hbar^-1` or `3/128·t1·hbar`.
    pub fn to_lines(&self) -> Vec<String> {
        self.sorted_terms()
            .into_iter()
            .map(|(m, c)| fmt_term(m, c))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| {
                serde_json::json!({
                    "hbar": m.hbar,
                    "t": m.t,
                    "coeff": c.to_pi(),
                })
            })
            .collect();
        serde_json::json!({ "bounds": self.bounds, "terms": terms })
    }
}

#[derive(Deserialize)]
struct TermJson {
    hbar: i32,
    t: Vec<u32>,
    coeff: PiScalar,
}

#[derive(Deserialize)]
struct SeriesJson {
    bounds: Bounds,
    terms: Vec<TermJson>,
}

impl TruncSeries<PiScalar> {
    /// Inverse of [`TruncSeries::to_json`].
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let s: SeriesJson = serde_json::from_value(v.clone())?;
        Ok(Self::from_terms(
            s.bounds,
            s.terms
                .into_iter()
                .map(|t| (Mono::new(t.hbar, t.t), t.coeff)),
        ))
    }
}

fn fmt_term<C: Coeff>(m: &Mono, c: &C) -> String {
    let tpart = Mono::new(0, m.t.clone()).to_human();
    let hpart = Mono::new(m.hbar, Vec::new()).to_human();
    let pi = c.to_pi();
    let body = match pi.as_rat() {
        Some(r) if r.numer().magnitude().is_one() && !tpart.is_empty() => {
            let sign = if r < Rat::from_integer(0.into()) {
                "-"
            } else {
                ""
            };
            if r.denom().is_one() {
                format!("{sign}{tpart}")
            } else {
                format!("{sign}{tpart}/{}", r.denom())
            }
        }
        Some(r) => {
            let s = super::rat::fmt_rat(&r);
            if tpart.is_empty() {
                s
            } else {
                format!("{s}·{tpart}")
            }
        }
        None => {
            let s = format!("({})", pi.to_human());
            if tpart.is_empty() {
                s
            } else {
                format!("{s}·{tpart}")
            }
        }
    };
    if hpart.is_empty() {
        body
    } else {
        format!("{body}·{hpart}")
    }
}

impl<C: Coeff> fmt::Display for TruncSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines = self.to_lines();
        if lines.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&lines.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::rat;

    fn t0() -> Mono {
        Mono::from_indices(0, &[0])
    }

    #[test]
    fn exp_of_t0() {
        let b = Bounds::new(0, 3, 0);
        let s = TruncSeries::from_terms(b, [(t0(), rat(1, 1))]);
        let e = s.exp().unwrap();
        for (k, want) in [
            (0, rat(1, 1)),
            (1, rat(1, 1)),
            (2, rat(1, 2)),
            (3, rat(1, 6)),
        ] {
            let m = Mono::from_indices(0, &vec![0; k]);
            assert_eq!(e.coeff(&m).unwrap(), want);
        }
        assert!(e.coeff(&Mono::from_indices(0, &[0, 0, 0, 0])).is_err());
    }

    #[test]
    fn bgw_second_derivative() {
        // d^2/dt0^2 of -(1/8) log(1 - t0) = (1/8)(1 - t0)^-2
        let b = Bounds::new(0, 6, 0);
        let one_minus = TruncSeries::from_terms(b, [(Mono::one(), rat(1, 1)), (t0(), rat(-1, 1))]);
        let f = one_minus.log().unwrap().scale(&rat(-1, 8));
        let u = f.derivative(0).derivative(0);
        assert_eq!(u.bounds().max_degree, 4);
        for k in 0..=4u32 {
            let m = Mono::from_indices(0, &vec![0; k as usize]);
            assert_eq!(u.coeff(&m).unwrap(), rat(k as i64 + 1, 8));
        }
    }

    #[test]
    fn term_format() {
        let m = Mono::from_indices(-1, &[0, 0, 0]);
        assert_eq!(fmt_term(&m, &rat(1, 6)), "t0^3/6·hbar^-1");
        assert_eq!(fmt_term(&Mono::from_indices(0, &[1]), &rat(1, 24)), "t1/24");
        assert_eq!(
            fmt_term(&Mono::from_indices(1, &[1]), &rat(3, 128)),
            "3/128·t1·hbar"
        );
        assert_eq!(fmt_term(&Mono::one(), &rat(1, 1)), "1");
    }

    #[test]
    fn empty_region_is_one() {
        let b = Bounds::new(0, 0, 0);
        let s = TruncSeries::<Rat>::zero(b);
        assert_eq!(s.exp().unwrap().to_lines(), vec!["1".to_string()]);
    }
}
