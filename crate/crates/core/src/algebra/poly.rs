//! Multivariate polynomials over Q[pi^2].
//!
//! [`Poly`] stores actual exponents. [`EvenPoly`] is a polynomial in the
//! squares `L_i^2` (its keys are halved exponents). [`OddPoly`] is a [`Poly`]
//! whose every exponent is odd.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::pi::{join_signed, PiScalar};
use super::rat::{factorial, Rat};
use crate::{Error, Result};

/// Sparse polynomial in `arity` variables with exponent-vector keys.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    arity: usize,
    terms: BTreeMap<Vec<u32>, PiScalar>,
}

impl Poly {
    pub fn zero(arity: usize) -> Self {
        Poly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: PiScalar) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(vec![0; arity], c);
        p
    }

    pub fn monomial(exps: Vec<u32>, c: PiScalar) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// The variable `x_i` itself.
    pub fn var(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        Self::monomial(e, PiScalar::one())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, PiScalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> PiScalar {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: PiScalar) {
        assert_eq!(exps.len(), self.arity, "exponent vector of wrong arity");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn add_assign(&mut self, o: &Poly) {
        assert_eq!(self.arity, o.arity, "arity mismatch in addition");
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, s: &PiScalar) -> Poly {
        self.map_coeffs(|c| c * s)
    }

    pub fn scale_rat(&self, r: &Rat) -> Poly {
        self.map_coeffs(|c| c.scale(r))
    }

    fn map_coeffs(&self, f: impl Fn(&PiScalar) -> PiScalar) -> Poly {
        let mut out = Poly::zero(self.arity);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Product in the same variables.
    pub fn mul(&self, o: &Poly) -> Poly {
        assert_eq!(self.arity, o.arity, "arity mismatch in product");
        let mut out = Poly::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Product on disjoint variable blocks: the result has the variables of
    /// `self` followed by those of `o`.
    pub fn mul_disjoint(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.arity + o.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let mut e = ea.clone();
                e.extend_from_slice(eb);
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Moves old variable `i` to position `perm[i]`.
    pub fn reorder(&self, perm: &[usize]) -> Poly {
        assert_eq!(perm.len(), self.arity);
        let mut out = Poly::zero(self.arity);
        for (e, c) in &self.terms {
            let mut ne = vec![0; self.arity];
            for (i, &x) in e.iter().enumerate() {
                ne[perm[i]] = x;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.arity);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            out.add_term(ne, c.scale(&Rat::from_integer(e[i].into())));
        }
        out
    }

    /// `∫_0^{x_i} p dx_i`, with the upper limit renamed back to `x_i`.
    pub fn antiderivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.arity);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[i] += 1;
            let inv = Rat::new(One::one(), ne[i].into());
            out.add_term(ne, c.scale(&inv));
        }
        out
    }

    /// Exact division by `x_i`; fails if some term has no `x_i` factor.
    pub fn div_by_var(&self, i: usize) -> Result<Poly> {
        let mut out = Poly::zero(self.arity);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                return Err(Error::NotDivisible(format!(
                    "term {e:?} has no factor of variable {i}"
                )));
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Substitutes `x_i := value`, removing the variable.
    pub fn substitute(&self, i: usize, value: &PiScalar) -> Poly {
        assert!(i < self.arity, "substitution index out of range");
        let mut out = Poly::zero(self.arity - 1);
        let mut powers: Vec<PiScalar> = vec![PiScalar::one()];
        for (e, c) in &self.terms {
            while powers.len() <= e[i] as usize {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let mut ne = e.clone();
            let k = ne.remove(i);
            out.add_term(ne, c * &powers[k as usize]);
        }
        out
    }

    /// Inserts a fresh variable (absent from every term) at position `i`.
    pub fn insert_var(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.arity + 1);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne.insert(i, 0);
            out.add_term(ne, c.clone());
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    /// Homogeneous part of top total degree.
    pub fn top_part(&self) -> Poly {
        let Some(d) = self.total_degree() else {
            return self.clone();
        };
        let mut out = Poly::zero(self.arity);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == d {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    /// Invariance under all permutations, certified on adjacent transpositions.
    pub fn is_symmetric(&self) -> bool {
        (0..self.arity.saturating_sub(1)).all(|i| {
            self.terms.iter().all(|(e, c)| {
                let mut s = e.clone();
                s.swap(i, i + 1);
                self.terms.get(&s) == Some(c)
            })
        })
    }

    /// Scalar value at a point.
    pub fn evaluate(&self, point: &[PiScalar]) -> PiScalar {
        assert_eq!(point.len(), self.arity);
        let mut p = self.clone();
        for v in point.iter().rev() {
            p = p.substitute(p.arity - 1, v);
        }
        p.coeff(&[])
    }

    /// Requires every exponent to be even and halves them.
    pub fn to_even(&self) -> Result<EvenPoly> {
        let mut out = Poly::zero(self.arity);
        for (e, c) in &self.terms {
            if e.iter().any(|x| x % 2 != 0) {
                return Err(Error::Domain(format!("odd exponent in {e:?}")));
            }
            out.add_term(e.iter().map(|x| x / 2).collect(), c.clone());
        }
        Ok(EvenPoly(out))
    }

    /// Checks that the exponents in the listed slots are odd.
    pub fn check_odd_slots(&self, slots: &[usize]) -> Result<()> {
        for e in self.terms.keys() {
            if slots.iter().any(|&s| e[s] % 2 == 0) {
                return Err(Error::NonOddExponent(format!("{e:?} in slots {slots:?}")));
            }
        }
        Ok(())
    }

    /// Human form with the given variable names, grouping full symmetric
    /// orbits that share a coefficient.
    pub fn to_human_with(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.arity);
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let mut pieces: Vec<(bool, String)> = Vec::new();
        for e in keys {
            if seen.contains(e) {
                continue;
            }
            let c = &self.terms[e];
            let orbit = orbit_of(e);
            let grouped = orbit.len() > 1 && orbit.iter().all(|o| self.terms.get(o) == Some(c));
            let members: Vec<Vec<u32>> = if grouped { orbit } else { vec![e.clone()] };
            for m in &members {
                seen.insert(m.clone());
            }
            let monos: Vec<String> = members.iter().map(|m| fmt_mono(m, names)).collect();
            if monos[0].is_empty() {
                // Constant term: one signed piece per pi power.
                for j in c.support() {
                    let single = PiScalar::monomial(c.coeff(j), j);
                    let s = single.to_human();
                    match s.strip_prefix('-') {
                        Some(rest) => pieces.push((true, rest.to_string())),
                        None => pieces.push((false, s)),
                    }
                }
                continue;
            }
            let mono = if monos.len() > 1 {
                format!("({})", monos.join("+"))
            } else {
                monos[0].clone()
            };
            let (neg, factor) = c.to_human_factor().expect("nonzero coefficient");
            let body = if factor.is_empty() {
                mono
            } else {
                format!("{factor}·{mono}")
            };
            pieces.push((neg, body));
        }
        join_signed(&pieces)
    }
}

/// All distinct permutations of an exponent vector, in descending order.
fn orbit_of(e: &[u32]) -> Vec<Vec<u32>> {
    let mut v = e.to_vec();
    v.sort_unstable();
    let mut out = Vec::new();
    loop {
        out.push(v.clone());
        if !next_permutation(&mut v) {
            break;
        }
    }
    out.sort_by(|a, b| b.cmp(a));
    out
}

fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn fmt_mono(e: &[u32], names: &[String]) -> String {
    e.iter()
        .zip(names)
        .filter(|(x, _)| **x > 0)
        .map(|(x, n)| {
            if *x == 1 {
                n.clone()
            } else {
                format!("{n}^{x}")
            }
        })
        .collect::<Vec<_>>()
        .join("·")
}

/// `∫_0^L x^m (L-x)^n dx = m! n! / (m+n+1)! · L^(m+n+1)`; returns the factor.
pub fn beta_convolution(m: u32, n: u32) -> Rat {
    Rat::new(factorial(m) * factorial(n), factorial(m + n + 1))
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exps: Vec<u32>,
    coeff: PiScalar,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    arity: usize,
    terms: Vec<TermJson>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exps: e.clone(),
                    coeff: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        let mut p = Poly::zero(j.arity);
        for t in j.terms {
            if t.exps.len() != j.arity {
                return Err(serde::de::Error::custom("exponent vector of wrong arity"));
            }
            p.add_term(t.exps, t.coeff);
        }
        Ok(p)
    }
}

/// Polynomial in `L_1^2, ..., L_n^2`. Keys are the halved exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvenPoly(Poly);

impl EvenPoly {
    pub fn zero(arity: usize) -> Self {
        EvenPoly(Poly::zero(arity))
    }

    pub fn constant(arity: usize, c: PiScalar) -> Self {
        EvenPoly(Poly::constant(arity, c))
    }

    /// Wraps a polynomial already written in the squared variables.
    pub fn from_squares(p: Poly) -> Self {
        EvenPoly(p)
    }

    /// The underlying polynomial in `u_i = L_i^2`.
    pub fn squares(&self) -> &Poly {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Coefficient of `∏ L_i^(2 alpha_i)`.
    pub fn coeff(&self, alpha: &[u32]) -> PiScalar {
        self.0.coeff(alpha)
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, PiScalar> {
        &self.0.terms
    }

    /// Same polynomial with actual exponents.
    pub fn to_poly(&self) -> Poly {
        let mut out = Poly::zero(self.0.arity);
        for (e, c) in &self.0.terms {
            out.add_term(e.iter().map(|x| 2 * x).collect(), c.clone());
        }
        out
    }

    pub fn add(&self, o: &EvenPoly) -> EvenPoly {
        EvenPoly(self.0.add(&o.0))
    }

    pub fn sub(&self, o: &EvenPoly) -> EvenPoly {
        EvenPoly(self.0.sub(&o.0))
    }

    pub fn mul(&self, o: &EvenPoly) -> EvenPoly {
        EvenPoly(self.0.mul(&o.0))
    }

    pub fn mul_disjoint(&self, o: &EvenPoly) -> EvenPoly {
        EvenPoly(self.0.mul_disjoint(&o.0))
    }

    pub fn scale(&self, s: &PiScalar) -> EvenPoly {
        EvenPoly(self.0.scale(s))
    }

    pub fn scale_rat(&self, r: &Rat) -> EvenPoly {
        EvenPoly(self.0.scale_rat(r))
    }

    pub fn reorder(&self, perm: &[usize]) -> EvenPoly {
        EvenPoly(self.0.reorder(perm))
    }

    /// Sets `L_i^2 := value` and drops variable `i`.
    pub fn substitute_l2(&self, i: usize, value: &PiScalar) -> EvenPoly {
        EvenPoly(self.0.substitute(i, value))
    }

    /// Degree in the squared variables.
    pub fn degree(&self) -> Option<u32> {
        self.0.total_degree()
    }

    pub fn top_part(&self) -> EvenPoly {
        EvenPoly(self.0.top_part())
    }

    pub fn is_symmetric(&self) -> bool {
        self.0.is_symmetric()
    }

    /// Writes `∂p/∂L_i = L_i · q` and returns `q`, a polynomial in the squares.
    pub fn dlog_quotient(&self, i: usize) -> EvenPoly {
        // d/dL (L^(2a)) = 2a L^(2a-1) = L · 2a (L^2)^(a-1)
        let d = self.0.derivative(i);
        EvenPoly(d.scale_rat(&Rat::from_integer(2.into())))
    }

    /// Human form in the variables `L1, ..., Ln`.
    pub fn to_human(&self) -> String {
        let names: Vec<String> = (1..=self.arity()).map(|i| format!("L{i}")).collect();
        self.to_poly().to_human_with(&names)
    }

    /// The pi-power of every coefficient, if each is a single pi power.
    pub fn pi_grading_ok(&self, total: u32) -> bool {
        self.0.terms.iter().all(|(e, c)| {
            let d: u32 = e.iter().sum();
            d <= total && c.homogeneous_degree() == Some((total - d) as usize)
        })
    }
}

impl fmt::Display for EvenPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_human())
    }
}

/// Polynomial whose every exponent is odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Poly", into = "Poly")]
pub struct OddPoly(Poly);

impl OddPoly {
    pub fn new(p: Poly) -> Result<Self> {
        let slots: Vec<usize> = (0..p.arity).collect();
        p.check_odd_slots(&slots)?;
        Ok(OddPoly(p))
    }

    pub fn poly(&self) -> &Poly {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    /// Coefficient of `t^e` in a univariate odd polynomial.
    pub fn coeff1(&self, e: u32) -> PiScalar {
        self.0.coeff(&[e])
    }

    pub fn degree(&self) -> Option<u32> {
        self.0.total_degree()
    }
}

impl TryFrom<Poly> for OddPoly {
    type Error = Error;
    fn try_from(p: Poly) -> Result<Self> {
        OddPoly::new(p)
    }
}

impl From<OddPoly> for Poly {
    fn from(p: OddPoly) -> Poly {
        p.0
    }
}
