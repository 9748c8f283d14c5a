//! KdV checks, initial conditions, shifts of times and the kappa-decorated
//! partition functions built directly from volumes.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::One;

use crate::algebra::rat::{binomial, factorial, Rat};
use crate::algebra::{Bounds, Coeff, Mono, PiScalar, Poly, TruncSeries};
use crate::verify::Report;
use crate::virasoro::{assemble_tau, free_energy, Model};
use crate::volumes::{vol_theta_n0, vol_wp_n0, VolCache};
use crate::{Error, Result};

/// `p_j(s_1, …, s_j)` defined by `1 - exp(-Σ s_i z^i) = Σ p_j z^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PPoly {
    pub j: usize,
    /// Polynomial in `s_1..s_j` (variable `i` is `s_{i+1}`).
    pub value: Poly,
}

impl PPoly {
    /// Evaluates at `s`; missing trailing entries are zero.
    pub fn eval(&self, s: &[PiScalar]) -> PiScalar {
        let point: Vec<PiScalar> = (0..self.j)
            .map(|i| s.get(i).cloned().unwrap_or_else(PiScalar::zero))
            .collect();
        self.value.evaluate(&point)
    }
}

/// All `p_1..p_jmax` via `k e_k = -Σ_{i=1}^k i s_i e_{k-i}`, `p_k = -e_k`.
pub fn p_polys(jmax: usize) -> Vec<PPoly> {
    let arity = jmax;
    let mut e: Vec<Poly> = vec![Poly::constant(arity, PiScalar::one())];
    for k in 1..=jmax {
        let mut acc = Poly::zero(arity);
        for i in 1..=k {
            let term = Poly::var(arity, i - 1).mul(&e[k - i]);
            acc.add_assign(&term.scale_rat(&Rat::from_integer(BigInt::from(i))));
        }
        e.push(acc.scale_rat(&Rat::new(BigInt::from(-1), BigInt::from(k))));
    }
    (1..=jmax)
        .map(|j| {
            let mut value = Poly::zero(j);
            for (exps, c) in e[j].terms() {
                value.add_term(exps[..j].to_vec(), -c);
            }
            PPoly { j, value }
        })
        .collect()
}

pub fn p_poly(j: usize) -> PPoly {
    if j == 0 {
        return PPoly {
            j: 0,
            value: Poly::zero(0),
        };
    }
    p_polys(j).pop().expect("nonempty")
}

/// `U = hbar ∂_0^2 log Z`.
pub fn u_field(z: &TruncSeries<Rat>) -> Result<TruncSeries<Rat>> {
    Ok(z.log()?.derivative(0).derivative(0).mul_hbar(1))
}

fn nonempty<C: Coeff>(s: TruncSeries<C>, what: &str) -> Result<TruncSeries<C>> {
    if s.bounds().max_degree < 0 || s.bounds().max_index < 0 {
        return Err(Error::TruncationInsufficient(format!(
            "{what}: nothing survives the truncation"
        )));
    }
    Ok(s)
}

/// `U_{t_1} - U U_{t_0} - (hbar/12) U_{t_0 t_0 t_0}` on the surviving region.
pub fn kdv_residual(z: &TruncSeries<Rat>) -> Result<TruncSeries<Rat>> {
    if z.bounds().max_index < 1 {
        return Err(Error::TruncationInsufficient(
            "KdV needs t_1 in the region".into(),
        ));
    }
    let u = u_field(z)?;
    let u0 = u.derivative(0);
    let r = u.derivative(1).sub(&u.mul(&u0)).sub(
        &u0.derivative(0)
            .derivative(0)
            .mul_hbar(1)
            .scale(&Rat::new(1.into(), 12.into())),
    );
    nonempty(r, "KdV residual")
}

/// Restriction of a series to monomials in `t_0` alone.
fn t0_slice(s: &TruncSeries<Rat>) -> TruncSeries<Rat> {
    let mut b = s.bounds();
    b.max_index = b.max_index.min(0);
    s.restrict(&b)
}

/// `U(t_0, 0, …) - hbar/(8 (1 - t_0)^2)`.
pub fn bgw_initial(z: &TruncSeries<Rat>) -> Result<TruncSeries<Rat>> {
    let u = t0_slice(&u_field(z)?);
    let mut expected = TruncSeries::zero(u.bounds());
    for k in 0..=u.bounds().max_degree.max(-1) {
        expected.add_term(
            Mono::new(1, vec![k as u32]),
            Rat::new(BigInt::from(k + 1), BigInt::from(8)),
        );
    }
    nonempty(u.sub(&expected), "BGW initial condition")
}

/// `U(t_0, 0, …) - t_0`.
pub fn kw_initial(z: &TruncSeries<Rat>) -> Result<TruncSeries<Rat>> {
    let u = t0_slice(&u_field(z)?);
    let mut expected = TruncSeries::zero(u.bounds());
    expected.add_term(Mono::new(0, vec![1]), Rat::one());
    nonempty(u.sub(&expected), "KW initial condition")
}

/// Shifts `t_k ← t_k + σ_k`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ShiftVector {
    pub shifts: BTreeMap<usize, PiScalar>,
}

impl ShiftVector {
    pub fn new(shifts: impl IntoIterator<Item = (usize, PiScalar)>) -> Self {
        ShiftVector {
            shifts: shifts.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.shifts.is_empty()
    }

    /// `σ_k = p_k(s, 0, …)` for `1 <= k <= kmax`.
    pub fn theta_kappa(s: &PiScalar, kmax: usize) -> Self {
        let ps = p_polys(kmax);
        Self::new((1..=kmax).map(|k| (k, ps[k - 1].eval(std::slice::from_ref(s)))))
    }

    /// `σ_j = p_{j-1}(s, 0, …)` for `2 <= j <= kmax`.
    pub fn wp_kappa(s: &PiScalar, kmax: usize) -> Self {
        let ps = p_polys(kmax.saturating_sub(1));
        Self::new((2..=kmax).map(|j| (j, ps[j - 2].eval(std::slice::from_ref(s)))))
    }
}

/// Weighted homogeneity `Σ (k - a) = b · (hbar exponent)` of a tau function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grading {
    pub a: u32,
    pub b: u32,
}

impl Grading {
    pub const THETA: Grading = Grading { a: 0, b: 1 };
    pub const KW: Grading = Grading { a: 1, b: 3 };

    pub fn of(model: Model) -> Grading {
        match model {
            Model::Theta => Grading::THETA,
            Model::KW => Grading::KW,
        }
    }

    /// Source region whose shift determines every coefficient of `target`.
    /// Shifted indices exceed `a`, so each absorbed `t` lowers the weight budget.
    pub fn source_bounds(&self, target: Bounds) -> Bounds {
        let extra = (self.b as i32 * target.max_hbar.max(0)
            + self.a as i32 * target.max_degree.max(0))
        .max(0);
        Bounds::new(
            target.max_hbar,
            target.max_degree + extra,
            target.max_index.max(self.a as i32 + extra),
        )
    }
}

/// Taylor recentering `Z(t + σ)` restricted to `target`.
///
/// With a grading the result is exact on `target` provided `z` covers the
/// source region. Without one the region of `z` is kept and coefficients are
/// exact modulo terms of joint order (t-degree plus shift order) above it.
pub fn translate<C: Coeff>(
    z: &TruncSeries<C>,
    sv: &ShiftVector,
    grading: Option<Grading>,
    target: Bounds,
) -> Result<TruncSeries<PiScalar>> {
    let target = match grading {
        Some(gr) => {
            if let Some((&k, _)) = sv.shifts.iter().find(|(&k, _)| k as u32 <= gr.a) {
                return Err(Error::Domain(format!(
                    "shift at t_{k} breaks the grading (only t_k with k > {} may move)",
                    gr.a
                )));
            }
            let need = gr.source_bounds(target);
            if !z.bounds().covers(&need) {
                return Err(Error::TruncationInsufficient(format!(
                    "shifting to {target} needs the source on {need}, have {}",
                    z.bounds()
                )));
            }
            target
        }
        None => z.bounds().meet(&target),
    };
    let mut out = TruncSeries::<PiScalar>::zero(target);
    let mut pow_cache: BTreeMap<(usize, u32), PiScalar> = BTreeMap::new();
    let mut pw = |k: usize, e: u32, s: &PiScalar| -> PiScalar {
        pow_cache.entry((k, e)).or_insert_with(|| s.pow(e)).clone()
    };
    for (m, c) in z.terms() {
        let moving: Vec<(usize, u32, &PiScalar)> = sv
            .shifts
            .iter()
            .filter(|&(&k, _s)| m.exp(k) > 0)
            .map(|(&k, s)| (k, m.exp(k), s))
            .collect();
        // odometer over the kept exponents r_k in 0..=e_k
        let mut keep: Vec<u32> = moving.iter().map(|x| x.1).collect();
        loop {
            let mut mono = m.clone();
            let mut coeff = c.to_pi();
            for (i, &(k, e, s)) in moving.iter().enumerate() {
                mono = mono.with_t(k, keep[i]);
                coeff =
                    coeff.scale(&Rat::from_integer(binomial(e, keep[i]))) * pw(k, e - keep[i], s);
            }
            if target.contains(&mono) {
                out.add_term(mono, coeff);
            }
            let mut p = 0;
            while p < keep.len() && keep[p] == 0 {
                keep[p] = moving[p].1;
                p += 1;
            }
            if p == keep.len() {
                break;
            }
            keep[p] -= 1;
        }
    }
    Ok(out)
}

fn theta_volume_full(cache: &VolCache, g: u32, n: u32) -> Result<crate::EvenPoly> {
    cache.vol_theta(g, n)
}

fn wp_volume_full(cache: &VolCache, g: u32, n: u32) -> Result<crate::EvenPoly> {
    cache.vol_wp(g, n)
}

/// `Σ hbar^{g-1}/n! V_{g,n}|_{L^{2k} = 2^k k! t_k}`, `n = 0` terms included.
fn kappa_free_energy(
    cache: &VolCache,
    bounds: Bounds,
    gmin: u32,
    vol: fn(&VolCache, u32, u32) -> Result<crate::EvenPoly>,
    n0: fn(&VolCache, u32) -> Result<PiScalar>,
) -> Result<TruncSeries<PiScalar>> {
    let mut f = TruncSeries::zero(bounds);
    if bounds.max_hbar < -1 {
        return Ok(f);
    }
    let gmax = (bounds.max_hbar + 1) as u32;
    for g in gmin..=gmax {
        if g >= 2 {
            f.add_term(Mono::new(g as i32 - 1, vec![]), n0(cache, g)?);
        }
        for n in 1..=bounds.max_degree.max(0) as u32 {
            if 2 * g + n <= 2 {
                continue;
            }
            let v = vol(cache, g, n)?;
            let nfact = Rat::from_integer(factorial(n));
            for (alpha, c) in v.terms() {
                let w: BigInt = alpha
                    .iter()
                    .map(|&a| (BigInt::one() << a) * factorial(a))
                    .product();
                let m = Mono::from_indices(g as i32 - 1, alpha);
                f.add_term(m, c.scale(&(Rat::from_integer(w) / &nfact)));
            }
        }
    }
    Ok(f)
}

/// `log Z^Θ_κ` from full super volumes.
pub fn kappa_free_energy_theta(cache: &VolCache, bounds: Bounds) -> Result<TruncSeries<PiScalar>> {
    kappa_free_energy(cache, bounds, 1, theta_volume_full, vol_theta_n0)
}

/// `log Z^WP_κ` from full Mirzakhani volumes.
pub fn kappa_free_energy_wp(cache: &VolCache, bounds: Bounds) -> Result<TruncSeries<PiScalar>> {
    kappa_free_energy(cache, bounds, 0, wp_volume_full, vol_wp_n0)
}

/// `Z^Θ_κ = exp(log Z^Θ_κ)`.
pub fn kappa_partition_theta(cache: &VolCache, bounds: Bounds) -> Result<TruncSeries<PiScalar>> {
    kappa_free_energy_theta(cache, bounds)?.exp()
}

/// `Z^WP_κ`; computed with `hbar` headroom for the genus-zero terms.
pub fn kappa_partition_wp(cache: &VolCache, bounds: Bounds) -> Result<TruncSeries<PiScalar>> {
    let mut wide = bounds;
    wide.max_hbar += crate::virasoro::hbar_headroom(Model::KW, bounds.max_degree);
    Ok(kappa_free_energy_wp(cache, wide)?.exp()?.restrict(&bounds))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TranslationFlavor {
    Theta,
    WP,
}

fn compare(
    name: &str,
    lhs: &TruncSeries<PiScalar>,
    rhs: &TruncSeries<PiScalar>,
    report: &mut Report,
) {
    let region = lhs.bounds().meet(&rhs.bounds());
    let mut monos: Vec<&Mono> = lhs.terms().keys().chain(rhs.terms().keys()).collect();
    monos.sort();
    monos.dedup();
    for m in monos {
        if !region.contains(m) {
            continue;
        }
        report.checked += 1;
        let a = lhs.terms().get(m).cloned().unwrap_or_else(PiScalar::zero);
        let b = rhs.terms().get(m).cloned().unwrap_or_else(PiScalar::zero);
        if a != b {
            report.fail(format!(
                "{name} {}: {} vs {}",
                m.to_human(),
                a.to_human(),
                b.to_human()
            ));
        }
    }
}

/// Volume-built kappa partition against the shifted tau function at `s = 2 pi^2`.
pub fn verify_translation(
    cache: &VolCache,
    flavor: TranslationFlavor,
    bounds: Bounds,
) -> Result<Report> {
    let start = Instant::now();
    let s = PiScalar::pi2().scale(&Rat::from_integer(2.into()));
    let (model, name) = match flavor {
        TranslationFlavor::Theta => (Model::Theta, "translation/theta"),
        TranslationFlavor::WP => (Model::KW, "translation/wp"),
    };
    let grading = Grading::of(model);
    let src = grading.source_bounds(bounds);
    let kmax = src.max_index.max(0) as usize;
    let sv = match flavor {
        TranslationFlavor::Theta => ShiftVector::theta_kappa(&s, kmax),
        TranslationFlavor::WP => ShiftVector::wp_kappa(&s, kmax),
    };
    let mut report = Report::new(name);

    let f_src = free_energy(model, src);
    let shifted = translate(&f_src, &sv, Some(grading), bounds)?;
    let lhs = match flavor {
        TranslationFlavor::Theta => kappa_free_energy_theta(cache, bounds)?,
        TranslationFlavor::WP => kappa_free_energy_wp(cache, bounds)?,
    };
    compare("log", &lhs, &shifted, &mut report);

    if flavor == TranslationFlavor::Theta {
        let z_src = assemble_tau(model, src)?;
        let z_shifted = translate(&z_src, &sv, Some(grading), bounds)?;
        let z_kappa = kappa_partition_theta(cache, bounds)?;
        compare("Z", &z_kappa, &z_shifted, &mut report);
    }
    report.finish(start);
    Ok(report)
}

/// Top-degree kappa partition with no shift equals the tau function itself.
pub fn verify_unshifted(cache: &VolCache, model: Model, bounds: Bounds) -> Result<Report> {
    let start = Instant::now();
    let mut report = Report::new(match model {
        Model::Theta => "translation/theta-unshifted",
        Model::KW => "translation/wp-unshifted",
    });
    let gmin = match model {
        Model::Theta => 1,
        Model::KW => 0,
    };
    let vol: fn(&VolCache, u32, u32) -> Result<crate::EvenPoly> = match model {
        Model::Theta => |c, g, n| c.vol_theta_top(g, n),
        Model::KW => |c, g, n| c.vol_wp_top(g, n),
    };
    let zero_n0: fn(&VolCache, u32) -> Result<PiScalar> = |_, _| Ok(PiScalar::zero());
    let lhs = kappa_free_energy(cache, bounds, gmin, vol, zero_n0)?;
    let rhs = translate(
        &free_energy(model, bounds),
        &ShiftVector::default(),
        None,
        bounds,
    )?;
    compare("log", &lhs, &rhs, &mut report);
    report.finish(start);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::rat;

    fn pi2(c: Rat) -> PiScalar {
        PiScalar::monomial(c, 1)
    }

    #[test]
    fn p_low() {
        let p1 = p_poly(1);
        assert_eq!(p1.value, Poly::var(1, 0));
        let p2 = p_poly(2);
        let want =
            Poly::var(2, 1).sub(&Poly::var(2, 0).mul(&Poly::var(2, 0)).scale_rat(&rat(1, 2)));
        assert_eq!(p2.value, want);
    }

    #[test]
    fn p_single_variable_slice() {
        let s = PiScalar::from_rat(rat(3, 2));
        for (j, p) in p_polys(7).iter().enumerate() {
            let j = j as u32 + 1;
            let sign = if j % 2 == 1 { 1 } else { -1 };
            let want = s
                .pow(j)
                .scale(&(Rat::from_integer(sign.into()) / Rat::from_integer(factorial(j))));
            assert_eq!(p.eval(std::slice::from_ref(&s)), want);
        }
    }

    #[test]
    fn p_identity_to_order_8() {
        // 1 - exp(-S) expanded directly as Σ_k -(-S)^k / k!, with z as the last variable.
        let order = 8usize;
        let arity = order + 1;
        let zvar = order;
        let mut s = Poly::zero(arity);
        for i in 1..=order {
            let mut e = vec![0u32; arity];
            e[i - 1] = 1;
            e[zvar] = i as u32;
            s.add_term(e, PiScalar::one());
        }
        let trunc = |p: Poly| {
            let mut q = Poly::zero(arity);
            for (e, c) in p.terms() {
                if e[zvar] as usize <= order {
                    q.add_term(e.clone(), c.clone());
                }
            }
            q
        };
        let mut exp_neg = Poly::constant(arity, PiScalar::one());
        let mut power = Poly::constant(arity, PiScalar::one());
        for k in 1..=order {
            power = trunc(power.mul(&s.neg()));
            exp_neg = exp_neg
                .add(&power.scale_rat(&(Rat::one() / Rat::from_integer(factorial(k as u32)))));
        }
        let mut total = exp_neg;
        for p in p_polys(order) {
            let mut lifted = Poly::zero(arity);
            for (e, c) in p.value.terms() {
                let mut ne = e.clone();
                ne.resize(arity, 0);
                ne[zvar] = p.j as u32;
                lifted.add_term(ne, c.clone());
            }
            total = total.add(&lifted);
        }
        assert_eq!(total, Poly::constant(arity, PiScalar::one()));
    }

    #[test]
    fn zero_shift_is_identity() {
        let z = assemble_tau(Model::Theta, Bounds::new(2, 3, 2)).unwrap();
        let t = translate(&z, &ShiftVector::default(), None, z.bounds()).unwrap();
        assert_eq!(t, z.map(|c| PiScalar::from_rat(c.clone())));
    }

    #[test]
    fn exponential_shift() {
        // exp(t_1) with t_1 ← t_1 + s: coefficient of t_1^r is (1/r!) Σ_{j <= N-r} s^j/j!.
        let n = 6;
        let b = Bounds::new(0, n, 1);
        let mut e = TruncSeries::<Rat>::zero(b);
        for r in 0..=n as u32 {
            e.add_term(
                Mono::new(0, vec![0, r]),
                Rat::one() / Rat::from_integer(factorial(r)),
            );
        }
        let s = PiScalar::from_rat(rat(1, 3));
        let out = translate(&e, &ShiftVector::new([(1, s.clone())]), None, b).unwrap();
        for r in 0..=n as u32 {
            let mut partial = PiScalar::zero();
            for j in 0..=(n as u32 - r) {
                partial = partial
                    + s.pow(j)
                        .scale(&(Rat::one() / Rat::from_integer(factorial(j))));
            }
            let want = partial.scale(&(Rat::one() / Rat::from_integer(factorial(r))));
            assert_eq!(out.coeff(&Mono::new(0, vec![0, r])).unwrap(), want);
        }
    }

    #[test]
    fn graded_translation_reports_shortfall() {
        let z = free_energy(Model::Theta, Bounds::new(1, 2, 2));
        let sv = ShiftVector::new([(1, PiScalar::one())]);
        let err = translate(&z, &sv, Some(Grading::THETA), Bounds::new(1, 2, 2)).unwrap_err();
        assert!(matches!(err, Error::TruncationInsufficient(_)));
        let bad = ShiftVector::new([(0, PiScalar::one())]);
        assert!(matches!(
            translate(&z, &bad, Some(Grading::THETA), Bounds::new(0, 0, 0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn kappa_examples() {
        let cache = VolCache::in_memory();
        let f = kappa_free_energy_theta(&cache, Bounds::new(1, 1, 2)).unwrap();
        assert_eq!(
            f.coeff(&Mono::from_indices(0, &[0])).unwrap(),
            PiScalar::from_rat(rat(1, 8))
        );
        assert_eq!(
            f.coeff(&Mono::from_indices(1, &[1])).unwrap(),
            PiScalar::from_rat(rat(3, 128))
        );
        assert_eq!(
            f.coeff(&Mono::from_indices(1, &[0])).unwrap(),
            pi2(rat(9, 64))
        );
        let w = kappa_free_energy_wp(&cache, Bounds::new(-1, 3, 0)).unwrap();
        assert_eq!(
            w.coeff(&Mono::from_indices(-1, &[0, 0, 0])).unwrap(),
            PiScalar::from_rat(rat(1, 6))
        );
    }

    #[test]
    fn kdv_and_initial_values() {
        let zt = assemble_tau(Model::Theta, Bounds::new(3, 7, 3)).unwrap();
        assert!(kdv_residual(&zt).unwrap().is_zero());
        assert!(bgw_initial(&zt).unwrap().is_zero());
        let zk = assemble_tau(Model::KW, Bounds::new(2, 7, 3)).unwrap();
        assert!(kdv_residual(&zk).unwrap().is_zero());
        assert!(kw_initial(&zk).unwrap().is_zero());
    }

    #[test]
    fn kdv_negative_controls() {
        let b = Bounds::new(1, 6, 1);
        let mut x = TruncSeries::<Rat>::zero(b);
        x.add_term(Mono::new(0, vec![3]), Rat::one());
        assert!(!kdv_residual(&x.exp().unwrap()).unwrap().is_zero());
        // exp(t_0^2) has constant U = 2 hbar: KdV holds, the initial value does not.
        let mut q = TruncSeries::<Rat>::zero(b);
        q.add_term(Mono::new(0, vec![2]), Rat::one());
        let zq = q.exp().unwrap();
        assert!(kdv_residual(&zq).unwrap().is_zero());
        assert!(!bgw_initial(&zq).unwrap().is_zero());
        let one = TruncSeries::<Rat>::one(b);
        let r = bgw_initial(&one).unwrap();
        assert_eq!(r.coeff(&Mono::new(1, vec![])).unwrap(), rat(-1, 8));
        assert_eq!(r.coeff(&Mono::new(1, vec![1])).unwrap(), rat(-2, 8));
    }

    #[test]
    fn small_translations() {
        let cache = VolCache::in_memory();
        let r = verify_translation(&cache, TranslationFlavor::Theta, Bounds::new(1, 2, 2)).unwrap();
        assert!(r.pass, "{:?}", r.diffs);
        let r = verify_translation(&cache, TranslationFlavor::WP, Bounds::new(0, 3, 3)).unwrap();
        assert!(r.pass, "{:?}", r.diffs);
    }

    #[test]
    fn unshifted_matches_tau() {
        let cache = VolCache::in_memory();
        for model in [Model::Theta, Model::KW] {
            let r = verify_unshifted(&cache, model, Bounds::new(1, 3, 4)).unwrap();
            assert!(r.pass, "{:?}", r.diffs);
        }
    }
}
