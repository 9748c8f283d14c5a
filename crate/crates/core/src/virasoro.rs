//! Intersection numbers from the Virasoro recursions, the Virasoro operators
//! on truncated series, and assembly of the BGW and KW tau functions.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parking_lot::Mutex;
use serde::Serialize;

use crate::algebra::rat::{binomial, factorial, odd_double_factorial, serialize_rat, Rat};
use crate::algebra::{Bounds, Coeff, EvenPoly, Mono, TruncSeries};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Model {
    /// `⟨Θ ∏ τ⟩`, the BGW side.
    Theta,
    /// `⟨∏ τ⟩`, the KW side.
    KW,
}

impl Model {
    pub fn tag(self) -> &'static str {
        match self {
            Model::Theta => "theta",
            Model::KW => "kw",
        }
    }

    /// Genus forced by the dimension constraint, if any.
    pub fn genus(self, ks: &[u32]) -> Option<u32> {
        let n = ks.len() as i64;
        let s: i64 = ks.iter().map(|&k| k as i64).sum();
        let g = match self {
            Model::Theta => s + 1,
            Model::KW => {
                let num = s - n + 3;
                if num < 0 || num % 3 != 0 {
                    return None;
                }
                num / 3
            }
        };
        (n >= 1 && 2 * g - 2 + n > 0).then_some(g as u32)
    }

    /// `hbar` power attached to the bracket in the free energy.
    pub fn hbar_power(self, ks: &[u32]) -> Option<i32> {
        self.genus(ks).map(|g| g as i32 - 1)
    }
}

/// One intersection number with its derived genus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub kind: Model,
    pub ks: Vec<u32>,
    pub g: Option<u32>,
    pub n: usize,
    #[serde(serialize_with = "serialize_rat")]
    pub value: Rat,
}

impl Bracket {
    pub fn compute(kind: Model, ks: &[u32]) -> Bracket {
        let mut ks = ks.to_vec();
        ks.sort_unstable();
        let value = bracket(kind, &ks);
        Bracket {
            kind,
            g: kind.genus(&ks),
            n: ks.len(),
            ks,
            value,
        }
    }
}

type Memo = Mutex<HashMap<(Model, Vec<u32>), Rat>>;

fn memo() -> &'static Memo {
    static M: OnceLock<Memo> = OnceLock::new();
    M.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `⟨Θ ∏ τ_k⟩`.
pub fn theta_bracket(ks: &[u32]) -> Rat {
    bracket(Model::Theta, ks)
}

/// `⟨∏ τ_k⟩`.
pub fn kw_bracket(ks: &[u32]) -> Rat {
    bracket(Model::KW, ks)
}

pub fn bracket(model: Model, ks: &[u32]) -> Rat {
    let mut key = ks.to_vec();
    key.sort_unstable();
    if model.genus(&key).is_none() {
        return Rat::zero();
    }
    if let Some(v) = memo().lock().get(&(model, key.clone())) {
        return v.clone();
    }
    let first = key.len() - 1;
    let v = bracket_with(model, &key, first);
    memo().lock().entry((model, key)).or_insert(v).clone()
}

fn dfact(k: i64) -> Rat {
    Rat::from_integer(odd_double_factorial(k))
}

/// One step of the recursion with `ks[first]` playing the role of `k_1`.
/// Sub-brackets use the memoized maximal-index choice.
pub fn bracket_with(model: Model, ks: &[u32], first: usize) -> Rat {
    if model.genus(ks).is_none() {
        return Rat::zero();
    }
    let k1 = ks[first] as i64;
    let mut rest: Vec<u32> = ks.to_vec();
    rest.remove(first);

    // Initial values.
    match model {
        Model::Theta if k1 == 0 && rest.is_empty() => return Rat::new(1.into(), 8.into()),
        Model::KW if ks == [0, 0, 0] => return Rat::one(),
        Model::KW if ks == [1] => return Rat::new(1.into(), 24.into()),
        _ => {}
    }

    // Theta: index k1+kj, double factorial (2k1+2kj+1)!!; KW: one lower.
    let shift: i64 = match model {
        Model::Theta => 0,
        Model::KW => -1,
    };
    let mut acc = Rat::zero();
    for j in 0..rest.len() {
        let kj = rest[j] as i64;
        let idx = k1 + kj + shift;
        if idx < 0 {
            continue;
        }
        let mut sub = rest.clone();
        sub[j] = idx as u32;
        let c = dfact(k1 + kj + shift) / dfact(kj - 1);
        acc += c * bracket(model, &sub);
    }

    // i + j = k1 - 1 (Theta) or k1 - 2 (KW)
    let top = k1 - 1 + shift;
    let half = Rat::new(1.into(), 2.into());
    for i in 0..=top.max(-1) {
        let j = top - i;
        let w = dfact(i) * dfact(j) * &half;
        let mut joined = rest.clone();
        joined.push(i as u32);
        joined.push(j as u32);
        let mut inner = bracket(model, &joined);
        for (left, right, mult) in splits(&rest) {
            let mut a = left.clone();
            a.push(i as u32);
            let mut b = right.clone();
            b.push(j as u32);
            let pa = bracket(model, &a);
            if pa.is_zero() {
                continue;
            }
            inner += Rat::from_integer(mult) * pa * bracket(model, &b);
        }
        acc += w * inner;
    }
    acc / dfact(k1)
}

/// All ways to split a sorted multiset into two labeled parts, grouped by
/// the resulting multisets, with the number of labeled splits in each group.
pub fn splits(ks: &[u32]) -> Vec<(Vec<u32>, Vec<u32>, BigInt)> {
    let mut groups: Vec<(u32, u32)> = Vec::new();
    for &k in ks {
        match groups.last_mut() {
            Some((v, c)) if *v == k => *c += 1,
            _ => groups.push((k, 1)),
        }
    }
    let mut out = Vec::new();
    let mut choice = vec![0u32; groups.len()];
    loop {
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut mult = BigInt::one();
        for (gi, &(v, c)) in groups.iter().enumerate() {
            let a = choice[gi];
            left.extend(std::iter::repeat_n(v, a as usize));
            right.extend(std::iter::repeat_n(v, (c - a) as usize));
            mult *= binomial(c, a);
        }
        out.push((left, right, mult));
        // odometer
        let mut p = 0;
        loop {
            if p == groups.len() {
                return out;
            }
            if choice[p] < groups[p].1 {
                choice[p] += 1;
                break;
            }
            choice[p] = 0;
            p += 1;
        }
    }
}

/// Reads intersection numbers off a top-degree volume:
/// the bracket is `∏ 2^{a_i} a_i!` times the coefficient of `∏ L_i^{2 a_i}`.
pub fn coeff_dictionary(v: &EvenPoly) -> Result<BTreeMap<Vec<u32>, Rat>> {
    let mut out = BTreeMap::new();
    for (alpha, c) in v.terms() {
        let r = c
            .as_rat()
            .ok_or_else(|| Error::Domain("top-degree coefficient carries pi".into()))?;
        let mut key = alpha.clone();
        key.sort_unstable();
        let w: BigInt = alpha
            .iter()
            .map(|&a| (BigInt::one() << a) * factorial(a))
            .product();
        out.insert(key, r * Rat::from_integer(w));
    }
    Ok(out)
}

/// Sorted multisets of size `n` from `0..=kmax` with the given sum.
pub fn multisets_with_sum(n: usize, sum: u32, kmax: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, sum: u32, lo: u32, kmax: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            if sum == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut k = lo;
        while k <= kmax && k * n as u32 <= sum {
            cur.push(k);
            go(n - 1, sum - k, k, kmax, cur, out);
            cur.pop();
            k += 1;
        }
    }
    let mut out = Vec::new();
    go(n, sum, 0, kmax, &mut Vec::new(), &mut out);
    out
}

/// Every monomial of t-degree `1..=max_degree` with indices `<= max_index`.
fn all_t_monomials(max_degree: u32, max_index: u32) -> Vec<Vec<u32>> {
    fn go(d: u32, lo: u32, kmax: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if d == 0 {
            return;
        }
        for k in lo..=kmax {
            cur.push(k);
            go(d - 1, k, kmax, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(max_degree, 0, max_index, &mut Vec::new(), &mut out);
    out
}

/// Extra `hbar` headroom a product needs when the model has `hbar^-1` terms.
pub fn hbar_headroom(model: Model, max_degree: i32) -> i32 {
    match model {
        Model::Theta => 0,
        Model::KW => max_degree.max(0) / 3,
    }
}

/// `log Z = Σ hbar^{g-1} ⟨∏ τ_k⟩ ∏ t_k / ∏ mult!` over the region.
pub fn free_energy(model: Model, bounds: Bounds) -> TruncSeries<Rat> {
    let mut f = TruncSeries::zero(bounds);
    if bounds.max_degree < 1 || bounds.max_index < 0 {
        return f;
    }
    for ks in all_t_monomials(bounds.max_degree as u32, bounds.max_index as u32) {
        let Some(e) = model.hbar_power(&ks) else {
            continue;
        };
        if e > bounds.max_hbar {
            continue;
        }
        let v = bracket(model, &ks);
        if v.is_zero() {
            continue;
        }
        let m = Mono::from_indices(e, &ks);
        let sym: BigInt = m.t.iter().map(|&c| factorial(c)).product();
        f.add_term(m, v / Rat::from_integer(sym));
    }
    f
}

/// `Z = exp(log Z)`, exact on `bounds`.
pub fn assemble_tau(model: Model, bounds: Bounds) -> Result<TruncSeries<Rat>> {
    let mut wide = bounds;
    wide.max_hbar += hbar_headroom(model, bounds.max_degree);
    Ok(free_energy(model, wide).exp()?.restrict(&bounds))
}

/// A Virasoro operator: `L_m` (BGW form) or `L'_m` (KW form).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VirasoroOp {
    pub m: i32,
    pub model: Model,
}

impl VirasoroOp {
    pub fn new(model: Model, m: i32) -> Result<Self> {
        let min = match model {
            Model::Theta => 0,
            Model::KW => -1,
        };
        if m < min {
            return Err(Error::Domain(format!(
                "m = {m} below the range of the {} operators",
                model.tag()
            )));
        }
        Ok(VirasoroOp { m, model })
    }

    /// `L Z`, exact on the returned region.
    pub fn apply<C: Coeff>(&self, z: &TruncSeries<C>) -> TruncSeries<C> {
        let m = self.m;
        let (lead_idx, lead_df) = match self.model {
            Model::Theta => (m, m),
            Model::KW => (m + 1, m + 1),
        };
        let lead = z
            .derivative(lead_idx as usize)
            .scale(&(dfact(lead_df as i64) * Rat::new((-1).into(), 2.into())));
        let hat = apply_lhat(m, z).scale(&Rat::new(1.into(), 2.into()));
        lead.add(&hat)
    }
}

/// `L̂_m Z` with
/// `L̂_m = hbar/2 Σ_{i+j=m-1} (2i+1)!!(2j+1)!! ∂_i∂_j + Σ_i (2i+2m+1)!!/(2i-1)!! t_i ∂_{i+m}
///        + δ_{m,0}/8 + δ_{m,-1} t_0^2/(2 hbar)`.
pub fn apply_lhat<C: Coeff>(m: i32, z: &TruncSeries<C>) -> TruncSeries<C> {
    let b = z.bounds();
    let kmax = b.max_index;
    // Output index cap: every t_i with i + m beyond the region is dropped.
    let idx_cap = kmax - m.max(0);
    let mut out_bounds = b;
    out_bounds.max_index = idx_cap;
    out_bounds.max_degree = b.max_degree - if m >= 1 { 2 } else { 1 };
    if m == -1 {
        out_bounds.max_hbar = b.max_hbar - 1;
    }
    let mut out = TruncSeries::zero(out_bounds);

    if m >= 1 {
        let half = Rat::new(1.into(), 2.into());
        for i in 0..m {
            let j = m - 1 - i;
            let w = dfact(i as i64) * dfact(j as i64) * &half;
            let d = z.derivative(i as usize).derivative(j as usize).mul_hbar(1);
            out = out.add(&d.scale(&w));
        }
    }
    for i in 0..=idx_cap.max(-1) {
        if i + m < 0 {
            continue;
        }
        let w = dfact((i + m) as i64) / dfact(i as i64 - 1);
        let d = z.derivative((i + m) as usize).mul_t(i as usize);
        out = out.add(&d.scale(&w));
    }
    if m == 0 {
        out = out.add(&z.scale(&Rat::new(1.into(), 8.into())));
    }
    if m == -1 {
        let t0sq = z.mul_t(0).mul_t(0).mul_hbar(-1);
        out = out.add(&t0sq.scale(&Rat::new(1.into(), 2.into())));
    }
    out.restrict(&out_bounds)
}

/// Commutator `[L_a, L_b] Z - (a - b) L_{a+b} Z` on the common region.
pub fn commutator_defect<C: Coeff>(
    model: Model,
    a: i32,
    b: i32,
    z: &TruncSeries<C>,
) -> Result<TruncSeries<C>> {
    let la = VirasoroOp::new(model, a)?;
    let lb = VirasoroOp::new(model, b)?;
    let lab = VirasoroOp::new(model, a + b)?;
    let lhs = la.apply(&lb.apply(z)).sub(&lb.apply(&la.apply(z)));
    let rhs = lab.apply(z).scale(&Rat::from_integer(BigInt::from(a - b)));
    Ok(lhs.sub(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::rat;

    #[test]
    fn theta_values() {
        assert_eq!(theta_bracket(&[0]), rat(1, 8));
        assert_eq!(theta_bracket(&[1]), rat(3, 128));
        assert_eq!(theta_bracket(&[2]), rat(15, 1024));
        assert_eq!(theta_bracket(&[1, 1]), rat(63, 512));
        assert_eq!(theta_bracket(&[0, 0]), rat(1, 8));
        assert_eq!(theta_bracket(&[0, 1]), rat(9, 128));
        assert_eq!(theta_bracket(&[0, 0, 0, 0]), rat(6, 8));
        assert!(theta_bracket(&[]).is_zero());
    }

    #[test]
    fn kw_values() {
        assert_eq!(kw_bracket(&[0, 0, 0]), rat(1, 1));
        assert_eq!(kw_bracket(&[1]), rat(1, 24));
        assert_eq!(kw_bracket(&[0, 0, 0, 1]), rat(1, 1));
        assert_eq!(kw_bracket(&[4]), rat(1, 1152));
        assert_eq!(kw_bracket(&[1, 1]), rat(1, 24));
        assert_eq!(kw_bracket(&[0, 2]), rat(1, 24));
        assert!(kw_bracket(&[0, 0]).is_zero());
    }

    #[test]
    fn choice_of_k1_is_irrelevant() {
        for model in [Model::Theta, Model::KW] {
            for n in 1..=4 {
                for s in 0..=4 {
                    for ks in multisets_with_sum(n, s, 4) {
                        let want = bracket(model, &ks);
                        for first in 0..ks.len() {
                            assert_eq!(bracket_with(model, &ks, first), want, "{model:?} {ks:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn split_multiplicities() {
        let s = splits(&[0, 0, 1]);
        let total: BigInt = s.iter().map(|x| x.2.clone()).sum();
        assert_eq!(total, BigInt::from(8));
        assert_eq!(s.len(), 6);
    }

    #[test]
    fn bgw_low_genus_free_energy() {
        let f = free_energy(Model::Theta, Bounds::new(2, 3, 2));
        let get = |h, ks: &[u32]| f.coeff(&Mono::from_indices(h, ks)).unwrap();
        assert_eq!(get(0, &[0]), rat(1, 8));
        assert_eq!(get(0, &[0, 0]), rat(1, 16));
        assert_eq!(get(0, &[0, 0, 0]), rat(1, 24));
        assert_eq!(get(1, &[1]), rat(3, 128));
        assert_eq!(get(1, &[0, 1]), rat(9, 128));
        assert_eq!(get(2, &[2]), rat(15, 1024));
        assert_eq!(get(2, &[1, 1]), rat(63, 1024));
    }

    #[test]
    fn virasoro_negative_control() {
        let one = TruncSeries::<Rat>::one(Bounds::new(0, 2, 2));
        let l0 = VirasoroOp::new(Model::Theta, 0).unwrap().apply(&one);
        assert_eq!(l0.coeff(&Mono::one()).unwrap(), rat(1, 16));
        assert_eq!(apply_lhat(0, &one).coeff(&Mono::one()).unwrap(), rat(1, 8));
    }
}
