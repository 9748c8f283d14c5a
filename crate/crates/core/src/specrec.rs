//! Topological recursion on curves `x = z^2/2` with one branch point at the
//! origin, worked out by exact Laurent coefficient extraction.
//!
//! A correlator `ω_{g,n}` is stored through its coefficient function
//! `W(z_1..z_n) = Σ_β c_β ∏ z_i^{-(2β_i+2)}`, so `ω = W dz_1…dz_n`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::algebra::rat::{factorial, odd_double_factorial, Rat};
use crate::algebra::{Bounds, EvenPoly, LaurentSeries, Mono, PiScalar, TruncSeries};
use crate::verify::Report;
use crate::{check_stable, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    /// `y = cos(2 pi z)/z`.
    Theta,
    /// `y = sin(2 pi z)/(2 pi)`.
    Sine,
    /// `y = z`.
    Airy,
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCurve {
    pub name: String,
    pub kind: CurveKind,
    custom_y: Option<LaurentSeries>,
}

impl SpectralCurve {
    pub fn theta() -> Self {
        Self::builtin("theta", CurveKind::Theta)
    }

    pub fn sine() -> Self {
        Self::builtin("sine", CurveKind::Sine)
    }

    pub fn airy() -> Self {
        Self::builtin("airy", CurveKind::Airy)
    }

    fn builtin(name: &str, kind: CurveKind) -> Self {
        SpectralCurve {
            name: name.into(),
            kind,
            custom_y: None,
        }
    }

    /// A curve given by an explicit series for `y`. The name keys the memo
    /// tables, so distinct series need distinct names.
    pub fn custom(name: impl Into<String>, y: LaurentSeries) -> Result<Self> {
        if y.valuation().is_some_and(|v| v < -1) {
            return Err(Error::Domain("y may have at most a simple pole".into()));
        }
        let c = SpectralCurve {
            name: name.into(),
            kind: CurveKind::Custom,
            custom_y: Some(y),
        };
        c.odd_denominator(8)?;
        Ok(c)
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "theta" => Ok(Self::theta()),
            "sine" => Ok(Self::sine()),
            "airy" => Ok(Self::airy()),
            _ => Err(Error::Parse(format!(
                "unknown curve '{name}' (theta|sine|airy)"
            ))),
        }
    }

    /// `y(z)`, known below `z^order`.
    pub fn y_series(&self, order: i32) -> LaurentSeries {
        match self.kind {
            CurveKind::Theta => LaurentSeries::cos_2pi(order + 1).shift(-1),
            CurveKind::Sine => LaurentSeries::sin_2pi_over_2pi(order),
            CurveKind::Airy => LaurentSeries::polynomial(1, vec![PiScalar::one()]).truncate(order),
            CurveKind::Custom => self
                .custom_y
                .as_ref()
                .expect("custom series")
                .truncate(order),
        }
    }

    /// `z (y(z) - y(-z))` from `y` known below `z^order`.
    fn odd_denominator(&self, order: i32) -> Result<LaurentSeries> {
        let y = self.y_series(order);
        let d = y.sub(&y.reflect()).shift(1);
        if d.is_zero() {
            return Err(Error::DegenerateCurve(format!(
                "{}: y(z) - y(-z) vanishes to the available order",
                self.name
            )));
        }
        Ok(d)
    }

    /// Per-variable pole bound of `ω_{g,n}` where one is known.
    pub fn pole_bound(&self, g: u32, n: u32) -> Option<u32> {
        match self.kind {
            CurveKind::Theta => Some(2 * g),
            CurveKind::Sine | CurveKind::Airy => Some(6 * g + 2 * n - 4),
            CurveKind::Custom => None,
        }
    }
}

fn kappa_memo() -> &'static Mutex<HashMap<String, LaurentSeries>> {
    static M: OnceLock<Mutex<HashMap<String, LaurentSeries>>> = OnceLock::new();
    M.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `κ(z) = 1/(z (y(z) - y(-z)))`, known below `z^order`.
pub fn recursion_prefactor(curve: &SpectralCurve, order: i32) -> Result<LaurentSeries> {
    if let Some(k) = kappa_memo().lock().get(&curve.name) {
        if k.order() >= order {
            return Ok(k.clone());
        }
    }
    let probe = curve.odd_denominator(order.max(0) + 8)?;
    let v = probe.valuation().expect("nonzero");
    // Inverting a series of valuation v known below z^o gives one known below z^{o-2v}.
    let y_order = order + 2 * v + 1;
    let d = curve.odd_denominator(y_order)?;
    let d = if d.is_exact() {
        d.truncate(order + 2 * v)
    } else {
        d
    };
    let k = d.inverse()?;
    if k.order() < order {
        return Err(Error::TruncationInsufficient(format!(
            "{}: prefactor known below z^{}, need z^{order}",
            curve.name,
            k.order()
        )));
    }
    kappa_memo().lock().insert(curve.name.clone(), k.clone());
    Ok(k)
}

/// `ω_{g,n}` as `Σ_β c_β ∏ dz_i / z_i^{2β_i+2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrForm {
    pub g: u32,
    pub n: u32,
    pub terms: BTreeMap<Vec<u32>, PiScalar>,
}

#[derive(Serialize)]
struct CorrTermJson {
    pole_orders: Vec<u32>,
    coeff: serde_json::Value,
}

impl CorrForm {
    pub fn zero(g: u32, n: u32) -> Self {
        CorrForm {
            g,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, beta: Vec<u32>, c: PiScalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(beta).or_insert_with(PiScalar::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn coeff(&self, beta: &[u32]) -> PiScalar {
        self.terms.get(beta).cloned().unwrap_or_else(PiScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest pole order in any variable.
    pub fn max_pole(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|b| b.iter().map(|&x| 2 * x + 2))
            .max()
            .unwrap_or(0)
    }

    /// Largest pole order in the first variable.
    pub fn max_pole_first(&self) -> u32 {
        self.terms.keys().map(|b| 2 * b[0] + 2).max().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|(b, c)| {
            let mut s = b.clone();
            (0..s.len().saturating_sub(1)).all(|i| {
                s.swap(i, i + 1);
                let ok = self.coeff(&s) == *c;
                s.swap(i, i + 1);
                ok
            })
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<CorrTermJson> = self
            .terms
            .iter()
            .map(|(b, c)| CorrTermJson {
                pole_orders: b.iter().map(|&x| 2 * x + 2).collect(),
                coeff: serde_json::to_value(c).expect("serializable"),
            })
            .collect();
        serde_json::json!({ "g": self.g, "n": self.n, "terms": terms })
    }

    pub fn to_human(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (b, c)) in self.terms.iter().rev().enumerate() {
            let vars: Vec<String> = b
                .iter()
                .enumerate()
                .map(|(k, &x)| format!("dz{}/z{}^{}", k + 1, k + 1, 2 * x + 2))
                .collect();
            let (neg, body) = c.to_human_factor().expect("nonzero");
            let sep = match (i, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            out.push_str(sep);
            if !body.is_empty() {
                out.push_str(&body);
                out.push('·');
            }
            out.push_str(&vars.join("·"));
        }
        out
    }
}

impl fmt::Display for CorrForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_human())
    }
}

/// `c ∏ L_i^{2α_i} ↦ c ∏ (2α_i+1)! dz_i / z_i^{2α_i+2}`.
pub fn laplace_bridge(g: u32, v: &EvenPoly) -> CorrForm {
    let mut out = CorrForm::zero(g, v.arity() as u32);
    for (alpha, c) in v.terms() {
        let w: BigInt = alpha.iter().map(|&a| factorial(2 * a + 1)).product();
        out.add_term(alpha.clone(), c.scale(&Rat::from_integer(w)));
    }
    out
}

/// Finite sum `Σ c z^e ∏ z_K^{k}` during one recursion step: key `(k, e)`.
type Mixed = BTreeMap<(Vec<i32>, i32), PiScalar>;

fn mixed_add(acc: &mut Mixed, key: (Vec<i32>, i32), c: PiScalar) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(key).or_insert_with(PiScalar::zero);
    *e += &c;
}

fn mixed_mul(a: &Mixed, b: &Mixed) -> Mixed {
    let mut out = Mixed::new();
    for ((ka, ea), ca) in a {
        for ((kb, eb), cb) in b {
            let k: Vec<i32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            mixed_add(&mut out, (k, ea + eb), ca * cb);
        }
    }
    out
}

/// Pole order in `z` (0 when there is none).
fn z_pole(m: &Mixed) -> i32 {
    m.keys().map(|(_, e)| -e).max().unwrap_or(0).max(0)
}

/// `W(±z, z_S)` inside a step with `m` outer variables; `W` is even in each slot.
fn embed(w: &CorrForm, slots: &[usize], m: usize) -> Mixed {
    let mut out = Mixed::new();
    for (b, c) in &w.terms {
        let mut k = vec![0i32; m];
        for (i, &s) in slots.iter().enumerate() {
            k[s] = -(2 * b[i + 1] as i32 + 2);
        }
        mixed_add(&mut out, (k, -(2 * b[0] as i32 + 2)), c.clone());
    }
    out
}

/// `W_{0,2}(s z, z_j) = Σ_{i<terms} (i+1) (s z)^i z_j^{-(i+2)}` for `|z| < |z_j|`.
fn cauchy_expansion(sign: i32, slot: usize, m: usize, terms: i32) -> Mixed {
    let mut out = Mixed::new();
    for i in 0..terms.max(0) {
        let mut k = vec![0i32; m];
        k[slot] = -(i + 2);
        let s = if sign < 0 && i % 2 == 1 { -1 } else { 1 };
        mixed_add(&mut out, (k, i), PiScalar::from_int(((i + 1) * s) as i64));
    }
    out
}

enum Factor {
    Cauchy(usize),
    Form(CorrForm, Vec<usize>),
}

type CorrMemo = Mutex<HashMap<(String, u32, u32), CorrForm>>;

fn corr_memo() -> &'static CorrMemo {
    static M: OnceLock<CorrMemo> = OnceLock::new();
    M.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `ω_{g,n}` on the curve.
pub fn tr_correlator(curve: &SpectralCurve, g: u32, n: u32) -> Result<CorrForm> {
    check_stable(g, n)?;
    if n == 0 {
        return Err(Error::Domain("ω_{g,0} is a number; use tr_omega_g0".into()));
    }
    let key = (curve.name.clone(), g, n);
    if let Some(w) = corr_memo().lock().get(&key) {
        return Ok(w.clone());
    }
    let w = tr_step(curve, g, n)?;
    corr_memo().lock().entry(key).or_insert(w.clone());
    Ok(w)
}

fn tr_step(curve: &SpectralCurve, g: u32, n: u32) -> Result<CorrForm> {
    let m = (n - 1) as usize;
    let kval = recursion_prefactor(curve, 1)?.valuation().unwrap_or(0);
    let mut f = Mixed::new();

    // ω_{g-1,n+1}(z, -z, z_K)
    if g >= 1 {
        if g == 1 && n == 1 {
            // ω_{0,2}(z, -z) → 1/(4 z^2)
            mixed_add(
                &mut f,
                (vec![], -2),
                PiScalar::from_rat(Rat::new(1.into(), 4.into())),
            );
        } else {
            let w = tr_correlator(curve, g - 1, n + 1)?;
            for (b, c) in &w.terms {
                let k: Vec<i32> = b[2..].iter().map(|&x| -(2 * x as i32 + 2)).collect();
                let e = -(2 * b[0] as i32 + 2) - (2 * b[1] as i32 + 2);
                mixed_add(&mut f, (k, e), c.clone());
            }
        }
    }

    // Σ over ordered splits of the genus and of K, unstable (0,1) excluded.
    let factor = |gi: u32, part: &[usize]| -> Result<Option<Factor>> {
        match (gi, part.len()) {
            (0, 0) => Ok(None),
            (0, 1) => Ok(Some(Factor::Cauchy(part[0]))),
            _ => Ok(Some(Factor::Form(
                tr_correlator(curve, gi, part.len() as u32 + 1)?,
                part.to_vec(),
            ))),
        }
    };
    for mask in 0u32..(1 << m) {
        let left: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let right: Vec<usize> = (0..m).filter(|i| mask & (1 << i) == 0).collect();
        for g1 in 0..=g {
            if (g1, left.len()) == (0, 0) || (g - g1, right.len()) == (0, 0) {
                continue;
            }
            let (Some(a), Some(b)) = (factor(g1, &left)?, factor(g - g1, &right)?) else {
                continue;
            };
            let ea = match &a {
                Factor::Form(w, s) => Some(embed(w, s, m)),
                Factor::Cauchy(_) => None,
            };
            let eb = match &b {
                Factor::Form(w, s) => Some(embed(w, s, m)),
                Factor::Cauchy(_) => None,
            };
            // Expansions stop once the neglected tail is regular after multiplying by κ.
            let pa = ea.as_ref().map_or(0, z_pole);
            let pb = eb.as_ref().map_or(0, z_pole);
            let ma = ea.unwrap_or_else(|| match a {
                Factor::Cauchy(j) => cauchy_expansion(1, j, m, pb - kval),
                Factor::Form(..) => unreachable!(),
            });
            let mb = eb.unwrap_or_else(|| match b {
                Factor::Cauchy(j) => cauchy_expansion(-1, j, m, pa - kval),
                Factor::Form(..) => unreachable!(),
            });
            for (k, c) in mixed_mul(&ma, &mb) {
                mixed_add(&mut f, k, c);
            }
        }
    }

    // Principal part of κ F in z.
    let pf = z_pole(&f);
    let kappa = recursion_prefactor(curve, pf.max(1))?;
    let mut out = CorrForm::zero(g, n);
    let mut odd = false;
    for ((k, e), c) in &f {
        if c.is_zero() {
            continue;
        }
        for ek in kval..(-e) {
            let kc = kappa.coeff(ek)?;
            if kc.is_zero() {
                continue;
            }
            let total = ek + e;
            let prod = c * &kc;
            if total % 2 != 0 {
                odd = true;
                continue;
            }
            let mut beta = Vec::with_capacity(n as usize);
            beta.push(((-total - 2) / 2) as u32);
            for &x in k {
                if x > -2 || x % 2 != 0 {
                    return Err(Error::NonOddExponent(format!(
                        "({g},{n}) produced z_j^{x} in an outer slot"
                    )));
                }
                beta.push(((-x - 2) / 2) as u32);
            }
            out.add_term(beta, prod);
        }
    }
    if odd {
        // Odd contributions must cancel among themselves.
        let mut residual: BTreeMap<(Vec<i32>, i32), PiScalar> = BTreeMap::new();
        for ((k, e), c) in &f {
            for ek in kval..(-e) {
                let total = ek + e;
                if total % 2 != 0 {
                    mixed_add(&mut residual, (k.clone(), total), c * &kappa.coeff(ek)?);
                }
            }
        }
        if residual.values().any(|c| !c.is_zero()) {
            return Err(Error::NonOddExponent(format!(
                "({g},{n}) has an odd principal part on curve {}",
                curve.name
            )));
        }
    }
    if let Some(bound) = curve.pole_bound(g, n) {
        if out.max_pole() > bound {
            return Err(Error::Domain(format!(
                "({g},{n}) on {} has pole order {} above the bound {bound}",
                curve.name,
                out.max_pole()
            )));
        }
    }
    Ok(out)
}

/// `Φ = -∫ y dx = -∫ y z dz` with zero constant term, known below `z^order`.
pub fn dilaton_potential(curve: &SpectralCurve, order: i32) -> Result<LaurentSeries> {
    let yz = curve.y_series(order).shift(1);
    let yz = if yz.is_exact() {
        yz
    } else {
        yz.truncate(order - 1)
    };
    Ok(yz.antiderivative()?.neg())
}

/// `Res_{z=0} Φ(z) ω_{g,n+1}(z, z_K)` as a form in the remaining variables.
pub fn dilaton_residue(curve: &SpectralCurve, g: u32, n: u32) -> Result<CorrForm> {
    let w = tr_correlator(curve, g, n + 1)?;
    let phi = dilaton_potential(curve, w.max_pole_first() as i32 + 1)?;
    let mut out = CorrForm::zero(g, n);
    for (b, c) in &w.terms {
        let p = phi.coeff(2 * b[0] as i32 + 1)?;
        out.add_term(b[1..].to_vec(), c * &p);
    }
    Ok(out)
}

/// `ω_{g,0} = Res Φ ω_{g,1} / (2 - 2g)` for `g >= 2`.
pub fn tr_omega_g0(curve: &SpectralCurve, g: u32) -> Result<PiScalar> {
    check_stable(g, 0)?;
    let r = dilaton_residue(curve, g, 0)?;
    let c = r.coeff(&[]);
    Ok(c.scale(&Rat::new(1.into(), (2 - 2 * g as i64).into())))
}

/// `Res Φ ω_{g,n+1} = (2 - 2g - n) ω_{g,n}` coefficientwise.
pub fn tr_dilaton_check(curve: &SpectralCurve, g: u32, n: u32) -> Result<Report> {
    let start = Instant::now();
    let mut report = Report::new(format!("dilaton/{}/{g}_{n}", curve.name));
    let lhs = dilaton_residue(curve, g, n)?;
    let factor = Rat::from_integer(BigInt::from(2 - 2 * g as i64 - n as i64));
    let w = tr_correlator(curve, g, n)?;
    let mut keys: Vec<&Vec<u32>> = lhs.terms.keys().chain(w.terms.keys()).collect();
    keys.sort();
    keys.dedup();
    for b in keys {
        report.checked += 1;
        let l = lhs.coeff(b);
        let r = w.coeff(b).scale(&factor);
        if l != r {
            report.fail(format!("{b:?}: {} vs {}", l.to_human(), r.to_human()));
        }
    }
    report.finish(start);
    Ok(report)
}

/// `log Z^S = Σ hbar^{g-1}/n! ω_{g,n}|_{dz/z^{2β+2} ↦ t_β/(2β+1)!!}` with the
/// `n = 0` terms from the dilaton equation.
pub fn tr_free_energy(curve: &SpectralCurve, bounds: Bounds) -> Result<TruncSeries<PiScalar>> {
    let mut f = TruncSeries::zero(bounds);
    if bounds.max_hbar < -1 {
        return Ok(f);
    }
    let gmax = (bounds.max_hbar + 1) as u32;
    for g in 0..=gmax {
        if g >= 2 {
            f.add_term(Mono::new(g as i32 - 1, vec![]), tr_omega_g0(curve, g)?);
        }
        for n in 1..=bounds.max_degree.max(0) as u32 {
            if 2 * g + n <= 2 {
                continue;
            }
            let w = tr_correlator(curve, g, n)?;
            let nfact = Rat::from_integer(factorial(n));
            for (b, c) in &w.terms {
                let dfs: BigInt = b.iter().map(|&x| odd_double_factorial(x as i64)).product();
                let mono = Mono::from_indices(g as i32 - 1, b);
                f.add_term(mono, c.scale(&(Rat::from_integer(dfs) * &nfact).recip()));
            }
        }
    }
    Ok(f)
}

/// `Z^S = exp(log Z^S)` on `bounds`.
pub fn tr_partition(curve: &SpectralCurve, bounds: Bounds) -> Result<TruncSeries<PiScalar>> {
    let mut wide = bounds;
    if !tr_correlator(curve, 0, 3)?.is_zero() {
        wide.max_hbar += bounds.max_degree.max(0) / 3;
    }
    Ok(tr_free_energy(curve, wide)?.exp()?.restrict(&bounds))
}
