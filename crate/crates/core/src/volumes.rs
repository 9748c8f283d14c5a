//! The super (Theta) and Mirzakhani (WP) volume recursions, their top-degree
//! versions, evaluation identities at `L = 2 pi i` and normalizations.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::algebra::poly::beta_convolution;
use crate::algebra::rat::{binomial, Rat};
use crate::algebra::{EvenPoly, PiScalar, Poly};
use crate::kernels::{int_d, int_dm, int_r, int_rm};
use crate::{check_stable, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flavor {
    Theta,
    WP,
    ThetaTop,
    WPTop,
}

impl Flavor {
    pub fn tag(self) -> &'static str {
        match self {
            Flavor::Theta => "theta",
            Flavor::WP => "wp",
            Flavor::ThetaTop => "theta-top",
            Flavor::WPTop => "wp-top",
        }
    }

    fn is_wp(self) -> bool {
        matches!(self, Flavor::WP | Flavor::WPTop)
    }

    fn is_top(self) -> bool {
        matches!(self, Flavor::ThetaTop | Flavor::WPTop)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VolKey {
    pub flavor: Flavor,
    pub g: u32,
    pub n: u32,
}

impl fmt::Display for VolKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}_{}", self.flavor.tag(), self.g, self.n)
    }
}

/// Memo table for volumes, optionally mirrored to one JSON file per key.
pub struct VolCache {
    mem: Mutex<HashMap<VolKey, EvenPoly>>,
    dir: Option<PathBuf>,
}

/// Environment variable naming the default on-disk cache directory.
pub const CACHE_ENV: &str = "SUPERVOL_CACHE_DIR";

impl VolCache {
    pub fn in_memory() -> Self {
        VolCache {
            mem: Mutex::new(HashMap::new()),
            dir: None,
        }
    }

    /// Cache backed by `dir`, created if absent.
    pub fn with_dir(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(VolCache {
            mem: Mutex::new(HashMap::new()),
            dir: Some(dir),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn file_for(&self, key: &VolKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// Number of entries held in memory.
    pub fn len(&self) -> usize {
        self.mem.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.mem.lock().is_empty()
    }

    /// Removes every cached file and in-memory entry; returns files removed.
    pub fn clear(&self) -> Result<usize> {
        self.mem.lock().clear();
        let mut removed = 0;
        if let Some(d) = &self.dir {
            for entry in std::fs::read_dir(d)? {
                let p = entry?.path();
                if p.extension().is_some_and(|e| e == "json") {
                    std::fs::remove_file(p)?;
                    removed += 1;
                }
            }
        }
        Ok(removed)
    }

    /// Keys present on disk.
    pub fn disk_keys(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        if let Some(d) = &self.dir {
            for entry in std::fs::read_dir(d)? {
                let p = entry?.path();
                if p.extension().is_some_and(|e| e == "json") {
                    if let Some(s) = p.file_stem() {
                        out.push(s.to_string_lossy().into_owned());
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn lookup(&self, key: &VolKey) -> Result<Option<EvenPoly>> {
        if let Some(v) = self.mem.lock().get(key) {
            return Ok(Some(v.clone()));
        }
        let Some(path) = self.file_for(key) else {
            return Ok(None);
        };
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path)?;
        let v: EvenPoly = serde_json::from_str(&text)?;
        if v.arity() != key.n as usize || !v.is_symmetric() {
            return Err(Error::Parse(format!(
                "cached {} is malformed",
                path.display()
            )));
        }
        Ok(Some(self.insert(*key, v)))
    }

    /// First writer wins; returns the stored value.
    fn insert(&self, key: VolKey, v: EvenPoly) -> EvenPoly {
        self.mem.lock().entry(key).or_insert(v).clone()
    }

    fn persist(&self, key: &VolKey, v: &EvenPoly) -> Result<()> {
        let Some(path) = self.file_for(key) else {
            return Ok(());
        };
        let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
        std::fs::write(&tmp, serde_json::to_string(v)?)?;
        std::fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Volume for any flavor; `n = 0` is not a recursion entry point.
    pub fn get(&self, key: VolKey) -> Result<EvenPoly> {
        check_stable(key.g, key.n)?;
        if key.n == 0 {
            return Err(Error::Domain(
                "n = 0 volumes come from the evaluation at 2 pi i, not the recursion".into(),
            ));
        }
        if let Some(v) = self.lookup(&key)? {
            return Ok(v);
        }
        let v = self.compute(key)?;
        if !v.is_symmetric() {
            return Err(Error::Domain(format!("{key} is not symmetric")));
        }
        let v = self.insert(key, v);
        self.persist(&key, &v)?;
        Ok(v)
    }

    pub fn vol_theta(&self, g: u32, n: u32) -> Result<EvenPoly> {
        self.get(VolKey {
            flavor: Flavor::Theta,
            g,
            n,
        })
    }

    pub fn vol_wp(&self, g: u32, n: u32) -> Result<EvenPoly> {
        self.get(VolKey {
            flavor: Flavor::WP,
            g,
            n,
        })
    }

    pub fn vol_theta_top(&self, g: u32, n: u32) -> Result<EvenPoly> {
        self.get(VolKey {
            flavor: Flavor::ThetaTop,
            g,
            n,
        })
    }

    pub fn vol_wp_top(&self, g: u32, n: u32) -> Result<EvenPoly> {
        self.get(VolKey {
            flavor: Flavor::WPTop,
            g,
            n,
        })
    }

    /// `V_{g',n'}` of the same flavor, or `None` when unstable or `n' = 0`.
    fn sub(&self, flavor: Flavor, g: u32, n: u32) -> Result<Option<EvenPoly>> {
        if 2 * g + n <= 2 || n == 0 {
            return Ok(None);
        }
        self.get(VolKey { flavor, g, n }).map(Some)
    }

    fn compute(&self, key: VolKey) -> Result<EvenPoly> {
        let VolKey { flavor, g, n } = key;
        let arity = n as usize;
        if let Some(b) = base_case(flavor, g, n) {
            return Ok(b);
        }
        if g == 0 && !flavor.is_wp() {
            return Ok(EvenPoly::zero(arity));
        }

        // P(x, y, L_K) with K = variables 2..n.
        let k = arity - 1;
        let mut p = Poly::zero(k + 2);
        if g >= 1 {
            if let Some(v) = self.sub(flavor, g - 1, n + 1)? {
                p.add_assign(&v.to_poly());
            }
        }
        for g1 in 0..=g {
            let g2 = g - g1;
            for mask in 0u32..(1 << k) {
                let i_set: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).collect();
                let j_set: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 0).collect();
                let (ni, nj) = (i_set.len() as u32 + 1, j_set.len() as u32 + 1);
                if 2 * g1 + ni <= 2 || 2 * g2 + nj <= 2 {
                    continue;
                }
                let Some(a) = self.sub(flavor, g1, ni)? else {
                    continue;
                };
                let Some(b) = self.sub(flavor, g2, nj)? else {
                    continue;
                };
                // (x, L_I, y, L_J) -> (x, y, L_K)
                let prod = a.to_poly().mul_disjoint(&b.to_poly());
                let mut perm = Vec::with_capacity(k + 2);
                perm.push(0);
                perm.extend(i_set.iter().map(|&i| i + 2));
                perm.push(1);
                perm.extend(j_set.iter().map(|&j| j + 2));
                p.add_assign(&prod.reorder(&perm));
            }
        }
        let xy_p = shift_exps(&p, &[0, 1]);

        let half = Rat::new(BigInt::one(), BigInt::from(2));
        // Right side, variables (L1, L_K).
        let mut rhs = match flavor {
            Flavor::Theta => int_d(&xy_p)?,
            Flavor::WP => int_dm(&xy_p)?,
            Flavor::ThetaTop => top_d(&xy_p, false),
            Flavor::WPTop => top_d(&xy_p, true),
        }
        .scale_rat(&half);

        if n >= 2 {
            for j in 0..k {
                let Some(v) = self.sub(flavor, g, n - 1)? else {
                    continue;
                };
                let xv = shift_exps(&v.to_poly(), &[0]);
                let r = match flavor {
                    Flavor::Theta => int_r(&xv)?,
                    Flavor::WP => int_rm(&xv)?,
                    Flavor::ThetaTop => top_r(&xv, false),
                    Flavor::WPTop => top_r(&xv, true),
                };
                // (L1, Lj, L_{K\j}) -> (L1, L_K)
                let mut perm = vec![0, j + 1];
                perm.extend((0..k).filter(|&i| i != j).map(|i| i + 1));
                rhs.add_assign(&r.reorder(&perm));
            }
        }

        if flavor.is_wp() {
            rhs = rhs.antiderivative(0);
        }
        let v = rhs.div_by_var(0).map_err(|e| {
            Error::NotDivisible(format!("{key}: right side not divisible by L1 ({e})"))
        })?;
        let v = v.to_even()?;
        Ok(if flavor.is_top() { v.top_part() } else { v })
    }
}

fn base_case(flavor: Flavor, g: u32, n: u32) -> Option<EvenPoly> {
    let r = |a: i64, b: i64| Rat::new(a.into(), b.into());
    match (flavor, g, n) {
        (Flavor::Theta | Flavor::ThetaTop, 1, 1) => {
            Some(EvenPoly::constant(1, PiScalar::from_rat(r(1, 8))))
        }
        (Flavor::WP | Flavor::WPTop, 0, 3) => Some(EvenPoly::constant(3, PiScalar::one())),
        (Flavor::WP, 1, 1) => {
            let mut p = Poly::zero(1);
            p.add_term(vec![1], PiScalar::from_rat(r(1, 48)));
            p.add_term(vec![0], PiScalar::monomial(r(1, 12), 1));
            Some(EvenPoly::from_squares(p))
        }
        (Flavor::WPTop, 1, 1) => Some(EvenPoly::from_squares(Poly::monomial(
            vec![1],
            PiScalar::from_rat(r(1, 48)),
        ))),
        _ => None,
    }
}

/// Multiplies by the listed variables once each.
fn shift_exps(p: &Poly, slots: &[usize]) -> Poly {
    let mut out = Poly::zero(p.arity());
    for (e, c) in p.terms() {
        let mut ne = e.clone();
        for &s in slots {
            ne[s] += 1;
        }
        out.add_term(ne, c.clone());
    }
    out
}

/// Top-degree D step: `x^m y^n -> ∫_0^{L1} x^m (L1-x)^n dx`, or for the
/// Mirzakhani form its derivative-level analogue `∫∫_{x+y<=L1} x^m y^n`.
fn top_d(p: &Poly, wp: bool) -> Poly {
    let mut out = Poly::zero(p.arity() - 1);
    for (e, c) in p.terms() {
        let (m, n) = (e[0], e[1]);
        let mut factor = beta_convolution(m, n);
        let mut deg = m + n + 1;
        if wp {
            deg += 1;
            factor /= Rat::from_integer(deg.into());
        }
        let mut ne = vec![deg];
        ne.extend_from_slice(&e[2..]);
        out.add_term(ne, c.scale(&factor));
    }
    out
}

/// Top-degree R step: `f(x) -> ½ f(L1+Lj) + ½ f(L1-Lj)`, with `f` replaced by
/// its antiderivative `G(c) = ∫_0^c f` in the Mirzakhani form.
fn top_r(p: &Poly, wp: bool) -> Poly {
    let p = if wp { p.antiderivative(0) } else { p.clone() };
    let mut out = Poly::zero(p.arity() + 1);
    for (e, c) in p.terms() {
        let d = e[0];
        for r in (0..=d).step_by(2) {
            let mut ne = vec![d - r, r];
            ne.extend_from_slice(&e[1..]);
            out.add_term(ne, c.scale(&Rat::from_integer(binomial(d, r))));
        }
    }
    out
}

static GLOBAL: OnceLock<VolCache> = OnceLock::new();

/// Process-wide in-memory cache used by the free functions below.
pub fn global_cache() -> &'static VolCache {
    GLOBAL.get_or_init(VolCache::in_memory)
}

pub fn vol_theta(g: u32, n: u32) -> Result<EvenPoly> {
    global_cache().vol_theta(g, n)
}

pub fn vol_wp(g: u32, n: u32) -> Result<EvenPoly> {
    global_cache().vol_wp(g, n)
}

pub fn vol_theta_top(g: u32, n: u32) -> Result<EvenPoly> {
    global_cache().vol_theta_top(g, n)
}

pub fn vol_wp_top(g: u32, n: u32) -> Result<EvenPoly> {
    global_cache().vol_wp_top(g, n)
}

/// `V^Θ_{g,0} = V^Θ_{g,1}(2 pi i) / (2g-2)` for `g >= 2`.
pub fn vol_theta_n0(cache: &VolCache, g: u32) -> Result<PiScalar> {
    if g < 2 {
        return Err(Error::Unstable { g, n: 0 });
    }
    let v = cache
        .vol_theta(g, 1)?
        .substitute_l2(0, &PiScalar::two_pi_i_squared());
    Ok(v.coeff(&[])
        .scale(&Rat::new(BigInt::one(), BigInt::from(2 * g - 2))))
}

/// `V^WP_{g,0} = Q(-4 pi^2) / (2g-2)` where `∂V_{g,1}/∂L = L·Q(L^2)`.
pub fn vol_wp_n0(cache: &VolCache, g: u32) -> Result<PiScalar> {
    if g < 2 {
        return Err(Error::Unstable { g, n: 0 });
    }
    let q = cache
        .vol_wp(g, 1)?
        .dlog_quotient(0)
        .substitute_l2(0, &PiScalar::two_pi_i_squared());
    Ok(q.coeff(&[])
        .scale(&Rat::new(BigInt::one(), BigInt::from(2 * g - 2))))
}

/// A named polynomial identity `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Identity {
    pub name: String,
    pub lhs: EvenPoly,
    pub rhs: EvenPoly,
}

impl Identity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `(V^Θ_{g,n+1}(L, 2 pi i), (2g-2+n) V^Θ_{g,n}(L))`. For `n = 0` the right
/// side uses the defined value `V^Θ_{g,0}`.
pub fn dilaton_eval_theta(cache: &VolCache, g: u32, n: u32) -> Result<Identity> {
    check_stable(g, n + 1)?;
    check_stable(g, n)?;
    let big = cache.vol_theta(g, n + 1)?;
    let lhs = big.substitute_l2(n as usize, &PiScalar::two_pi_i_squared());
    let small = if n == 0 {
        EvenPoly::constant(0, vol_theta_n0(cache, g)?)
    } else {
        cache.vol_theta(g, n)?
    };
    let rhs = small.scale_rat(&Rat::from_integer(BigInt::from(2 * g + n) - 2));
    Ok(Identity {
        name: format!("theta dilaton g={g} n={n}"),
        lhs,
        rhs,
    })
}

/// Both Mirzakhani evaluation identities at `L_{n+1} = 2 pi i`:
/// the string form `V_{g,n+1}(L, 2 pi i) = Σ_k ∫_0^{L_k} L_k V_{g,n} dL_k`
/// and the dilaton form `Q(L, -4 pi^2) = (2g-2+n) V_{g,n}(L)` where
/// `∂V_{g,n+1}/∂L_{n+1} = L_{n+1} Q`.
pub fn string_dilaton_wp(cache: &VolCache, g: u32, n: u32) -> Result<[Identity; 2]> {
    if n == 0 {
        return Err(Error::Domain("the string identity needs n >= 1".into()));
    }
    check_stable(g, n)?;
    let big = cache.vol_wp(g, n + 1)?;
    let small = cache.vol_wp(g, n)?;
    let at = PiScalar::two_pi_i_squared();
    let last = n as usize;

    let lhs1 = big.substitute_l2(last, &at);
    let sp = small.to_poly();
    let mut rhs1 = Poly::zero(n as usize);
    for k in 0..n as usize {
        rhs1.add_assign(&shift_exps(&sp, &[k]).antiderivative(k));
    }
    let rhs1 = rhs1.to_even()?;

    let lhs2 = big.dlog_quotient(last).substitute_l2(last, &at);
    let rhs2 = small.scale_rat(&Rat::from_integer(BigInt::from(2 * g + n) - 2));
    Ok([
        Identity {
            name: format!("wp string g={g} n={n}"),
            lhs: lhs1,
            rhs: rhs1,
        },
        Identity {
            name: format!("wp dilaton g={g} n={n}"),
            lhs: lhs2,
            rhs: rhs2,
        },
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuperNorm {
    /// `(-1)^n 2^{1-g-n} V^Θ`
    VhatWP,
    /// `(-1)^n 2^{1-g} V^Θ`
    VSW,
}

pub fn normalize_super(cache: &VolCache, g: u32, n: u32, norm: SuperNorm) -> Result<EvenPoly> {
    let v = cache.vol_theta(g, n)?;
    let sign: i64 = if n.is_multiple_of(2) { 1 } else { -1 };
    let two_exp: i64 = match norm {
        SuperNorm::VhatWP => 1 - g as i64 - n as i64,
        SuperNorm::VSW => 1 - g as i64,
    };
    let pow = BigInt::one() << two_exp.unsigned_abs();
    let factor = if two_exp >= 0 {
        Rat::from_integer(pow * sign)
    } else {
        Rat::new(BigInt::from(sign), pow)
    };
    Ok(v.scale_rat(&factor))
}

/// `Σ_i L_i^{2k}` in `n` variables.
pub fn power_sum(n: u32, k: u32) -> EvenPoly {
    let mut p = Poly::zero(n as usize);
    for i in 0..n as usize {
        let mut e = vec![0; n as usize];
        e[i] = k;
        p.add_term(e, PiScalar::one());
    }
    EvenPoly::from_squares(p)
}

/// `Σ_{i<j} L_i^2 L_j^2`.
pub fn pair_sum(n: u32) -> EvenPoly {
    let s = power_sum(n, 1);
    s.mul(&s)
        .sub(&power_sum(n, 2))
        .scale_rat(&Rat::new(1.into(), 2.into()))
}

fn pi_c(num: i64, den: i64, j: usize) -> PiScalar {
    PiScalar::monomial(Rat::new(num.into(), den.into()), j)
}

/// Known closed forms of `V^Θ_{g,n}` for `g <= 3`.
pub fn theta_closed_form(g: u32, n: u32) -> Option<EvenPoly> {
    let nn = n as i64;
    let fact = |m: i64| Rat::from_integer(crate::algebra::rat::factorial(m as u32));
    let k = |c: PiScalar| EvenPoly::constant(n as usize, c);
    match g {
        1 => Some(k(PiScalar::from_rat(
            fact(nn - 1) / Rat::from_integer(8.into()),
        ))),
        2 => {
            let inner = k(pi_c(nn + 2, 1, 1))
                .add(&power_sum(n, 1).scale_rat(&Rat::new(1.into(), 4.into())));
            Some(inner.scale_rat(&(fact(nn + 1) * Rat::new(3.into(), 128.into()))))
        }
        3 => {
            let inner = k(pi_c(16 * (nn + 4) * (42 * nn + 185), 1, 2))
                .add(&power_sum(n, 1).scale(&pi_c(336 * (nn + 4), 1, 1)))
                .add(&power_sum(n, 2).scale_rat(&Rat::from_integer(25.into())))
                .add(&pair_sum(n).scale_rat(&Rat::from_integer(84.into())));
            Some(inner.scale_rat(&(fact(nn + 3) / Rat::from_integer((BigInt::one() << 16) * 5))))
        }
        _ => None,
    }
}

/// Known low Mirzakhani volumes.
pub fn wp_closed_form(g: u32, n: u32) -> Option<EvenPoly> {
    let s = power_sum(n, 1);
    let k = |c: PiScalar| EvenPoly::constant(n as usize, c);
    match (g, n) {
        (0, 3) => Some(k(PiScalar::one())),
        (1, 1) => Some(
            k(pi_c(4, 1, 1))
                .add(&s)
                .scale_rat(&Rat::new(1.into(), 48.into())),
        ),
        (0, 4) => Some(
            k(pi_c(4, 1, 1))
                .add(&s)
                .scale_rat(&Rat::new(1.into(), 2.into())),
        ),
        (1, 2) => Some(
            k(pi_c(4, 1, 1))
                .add(&s)
                .mul(&k(pi_c(12, 1, 1)).add(&s))
                .scale_rat(&Rat::new(1.into(), 192.into())),
        ),
        _ => None,
    }
}

/// All stable `(g, n)` with `n >= 1` and `2g - 2 + n <= euler`.
pub fn keys_upto(euler: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for g in 0..=euler.div_ceil(2) {
        for n in 1..=euler + 2 {
            if 2 * g + n > 2 && 2 * g + n <= euler + 2 {
                out.push((g, n));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::rat;

    fn pi(n: i64, d: i64, j: usize) -> PiScalar {
        PiScalar::monomial(rat(n, d), j)
    }

    #[test]
    fn theta_low_genus() {
        let c = VolCache::in_memory();
        assert_eq!(
            c.vol_theta(1, 1).unwrap(),
            EvenPoly::constant(1, pi(1, 8, 0))
        );
        assert_eq!(
            c.vol_theta(1, 3).unwrap(),
            EvenPoly::constant(3, pi(1, 4, 0))
        );
        let mut p = Poly::zero(1);
        p.add_term(vec![1], pi(3, 256, 0));
        p.add_term(vec![0], pi(9, 64, 1));
        assert_eq!(c.vol_theta(2, 1).unwrap(), EvenPoly::from_squares(p));
        assert!(c.vol_theta(0, 3).unwrap().is_zero());
        assert!(c.vol_theta(0, 2).is_err());
    }

    #[test]
    fn wp_low_genus() {
        let c = VolCache::in_memory();
        let mut p = Poly::zero(4);
        for i in 0..4 {
            let mut e = vec![0; 4];
            e[i] = 1;
            p.add_term(e, pi(1, 2, 0));
        }
        p.add_term(vec![0; 4], pi(2, 1, 1));
        assert_eq!(c.vol_wp(0, 4).unwrap(), EvenPoly::from_squares(p));
    }

    #[test]
    fn closed_forms() {
        let c = VolCache::in_memory();
        for (g, n) in keys_upto(6) {
            if let Some(f) = theta_closed_form(g, n) {
                assert_eq!(c.vol_theta(g, n).unwrap(), f, "theta ({g},{n})");
            }
        }
        for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2)] {
            assert_eq!(c.vol_wp(g, n).unwrap(), wp_closed_form(g, n).unwrap());
        }
    }

    #[test]
    fn tops_agree() {
        let c = VolCache::in_memory();
        for (g, n) in keys_upto(4) {
            assert_eq!(
                c.vol_theta(g, n).unwrap().top_part(),
                c.vol_theta_top(g, n).unwrap()
            );
            assert_eq!(
                c.vol_wp(g, n).unwrap().top_part(),
                c.vol_wp_top(g, n).unwrap()
            );
        }
    }

    #[test]
    fn dilaton_n0() {
        let c = VolCache::in_memory();
        assert_eq!(vol_theta_n0(&c, 2).unwrap(), pi(3, 64, 1));
        assert!(dilaton_eval_theta(&c, 2, 0).unwrap().holds());
        assert!(dilaton_eval_theta(&c, 1, 1).unwrap().holds());
        assert!(string_dilaton_wp(&c, 0, 0).is_err());
    }

    #[test]
    fn normalizations() {
        let c = VolCache::in_memory();
        let vhat = normalize_super(&c, 1, 1, SuperNorm::VhatWP).unwrap();
        assert_eq!(vhat, EvenPoly::constant(1, pi(-1, 16, 0)));
        let vsw = normalize_super(&c, 1, 1, SuperNorm::VSW).unwrap();
        assert_eq!(vsw, EvenPoly::constant(1, pi(-1, 8, 0)));
    }

    #[test]
    fn disk_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cold = VolCache::with_dir(dir.path()).unwrap();
        let a = cold.vol_wp(1, 2).unwrap();
        assert!(cold.disk_keys().unwrap().contains(&"wp_1_2".to_string()));
        let warm = VolCache::with_dir(dir.path()).unwrap();
        assert_eq!(warm.vol_wp(1, 2).unwrap(), a);
        assert!(warm.clear().unwrap() > 0);
    }
}
