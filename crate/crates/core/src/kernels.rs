//! Kernel moment data and the monomial integral transforms.
//!
//! The kernels themselves never appear. Only their moments do: `F_{2k+1}` for
//! the super kernels and `F^M_{2k+1}` for Mirzakhani's, plus the four linear
//! maps that turn the integral recursions into polynomial recursions.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parking_lot::Mutex;

use crate::algebra::rat::{binomial, factorial, Rat};
use crate::algebra::{EvenPoly, LaurentSeries, OddPoly, PiScalar, Poly};
use crate::Result;

/// Memoized kernel constants. Safe to share; a missing entry is computed
/// under the lock, so concurrent callers see identical values.
#[derive(Default)]
pub struct KernelTable {
    sec: Mutex<Vec<PiScalar>>,
    zeta: Mutex<Vec<PiScalar>>,
    f: Mutex<Vec<OddPoly>>,
    fm: Mutex<Vec<EvenPoly>>,
}

static TABLE: OnceLock<KernelTable> = OnceLock::new();

/// Process-wide kernel table.
pub fn table() -> &'static KernelTable {
    TABLE.get_or_init(KernelTable::default)
}

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_upto(n: usize) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(Rat::one());
            continue;
        }
        // Σ_{k=0}^{m} C(m+1, k) B_k = 0
        let mut acc = Rat::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += Rat::from_integer(binomial(m as u32 + 1, k as u32)) * bk;
        }
        b.push(-acc / Rat::from_integer(BigInt::from(m + 1)));
    }
    b
}

impl KernelTable {
    /// `a_n`, where `1/cos(2 pi x) = Σ a_n x^{2n} / (2n)!`.
    pub fn sec_coeff(&self, n: usize) -> PiScalar {
        let mut sec = self.sec.lock();
        if sec.len() <= n {
            let order = 2 * n as i32 + 2;
            let inv = LaurentSeries::cos_2pi(order)
                .inverse()
                .expect("cos(2 pi x) starts with 1");
            *sec = (0..=n)
                .map(|m| {
                    let c = inv.coeff(2 * m as i32).expect("within truncation");
                    c.scale(&Rat::from_integer(factorial(2 * m as u32)))
                })
                .collect();
        }
        sec[n].clone()
    }

    /// `zeta(2i)` as a rational multiple of `pi^{2i}`, with `zeta(0) = -1/2`.
    pub fn zeta_even(&self, i: usize) -> PiScalar {
        let mut z = self.zeta.lock();
        if z.len() <= i {
            let b = bernoulli_upto(2 * i);
            *z = (0..=i)
                .map(|j| {
                    let sign: i64 = if j % 2 == 0 { -1 } else { 1 };
                    let num = Rat::from_integer(BigInt::from(sign) * (BigInt::one() << (2 * j)));
                    let c = num * &b[2 * j] / Rat::from_integer(2 * factorial(2 * j as u32));
                    PiScalar::monomial(c, j)
                })
                .collect();
        }
        z[i].clone()
    }

    /// `F_{2k+1}(t) = Σ_i C(2k+1, 2i+1) a_{k-i} t^{2i+1}`.
    pub fn f(&self, k: usize) -> OddPoly {
        if let Some(p) = self.f.lock().get(k) {
            return p.clone();
        }
        for kk in 0..=k {
            // Fill in order; sec_coeff takes its own lock.
            if self.f.lock().len() > kk {
                continue;
            }
            let mut p = Poly::zero(1);
            for i in 0..=kk {
                let c = self.sec_coeff(kk - i).scale(&Rat::from_integer(binomial(
                    2 * kk as u32 + 1,
                    2 * i as u32 + 1,
                )));
                p.add_term(vec![2 * i as u32 + 1], c);
            }
            let mut f = self.f.lock();
            if f.len() == kk {
                f.push(OddPoly::new(p).expect("odd by construction"));
            }
        }
        self.f.lock()[k].clone()
    }

    /// `F^M_{2k+1}(t) = (2k+1)! Σ_{i=0}^{k+1} zeta(2i)(2^{2i+1}-4) t^{2k+2-2i}/(2k+2-2i)!`,
    /// returned as a polynomial in `t^2`.
    pub fn fm(&self, k: usize) -> EvenPoly {
        if let Some(p) = self.fm.lock().get(k) {
            return p.clone();
        }
        for kk in 0..=k {
            if self.fm.lock().len() > kk {
                continue;
            }
            let mut p = Poly::zero(1);
            let pre = Rat::from_integer(factorial(2 * kk as u32 + 1));
            for i in 0..=kk + 1 {
                let w = (BigInt::one() << (2 * i + 1)) - BigInt::from(4);
                let d = 2 * (kk + 1 - i) as u32;
                let c = self.zeta_even(i).scale(&(&pre * Rat::new(w, factorial(d))));
                p.add_term(vec![(kk + 1 - i) as u32], c);
            }
            let mut fm = self.fm.lock();
            if fm.len() == kk {
                fm.push(EvenPoly::from_squares(p));
            }
        }
        self.fm.lock()[k].clone()
    }

    /// JSON table of `F_{2k+1}` and `F^M_{2k+1}` for `k <= kmax`.
    pub fn table_json(&self, kmax: usize) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = (0..=kmax)
            .map(|k| {
                serde_json::json!({
                    "k": k,
                    "F": self.f(k).poly(),
                    "FM": self.fm(k).to_poly(),
                })
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

pub fn sec_coeff(n: usize) -> PiScalar {
    table().sec_coeff(n)
}

pub fn zeta_even(i: usize) -> PiScalar {
    table().zeta_even(i)
}

pub fn f(k: usize) -> OddPoly {
    table().f(k)
}

pub fn fm(k: usize) -> EvenPoly {
    table().fm(k)
}

/// `(m! n! / (m+n+1)!)`, the moment factor shared by the D-type transforms.
fn d_factor(m: u32, n: u32) -> Rat {
    Rat::new(factorial(m) * factorial(n), factorial(m + n + 1))
}

/// Pushes `c · L1^a · Lj^b · rest` into `out`, whose variables are `(L1, Lj, rest..)`.
fn push_two(out: &mut Poly, a: u32, b: u32, rest: &[u32], c: PiScalar) {
    let mut e = Vec::with_capacity(rest.len() + 2);
    e.push(a);
    e.push(b);
    e.extend_from_slice(rest);
    out.add_term(e, c);
}

fn push_one(out: &mut Poly, a: u32, rest: &[u32], c: PiScalar) {
    let mut e = Vec::with_capacity(rest.len() + 1);
    e.push(a);
    e.extend_from_slice(rest);
    out.add_term(e, c);
}

/// Super D-transform. Variables `(x, y, rest..)` become `(L1, rest..)` via
/// `x^{2i+1} y^{2j+1} -> (2i+1)!(2j+1)!/(2i+2j+3)! · F_{2i+2j+3}(L1)`.
pub fn int_d(p: &Poly) -> Result<Poly> {
    p.check_odd_slots(&[0, 1])?;
    let mut out = Poly::zero(p.arity() - 1);
    for (e, c) in p.terms() {
        let (m, n) = (e[0], e[1]);
        let k = ((m + n) / 2) as usize;
        let fk = f(k);
        let s = c.scale(&d_factor(m, n));
        for (fe, fc) in fk.poly().terms() {
            push_one(&mut out, fe[0], &e[2..], &s * fc);
        }
    }
    Ok(out)
}

/// Super R-transform. Variables `(x, rest..)` become `(L1, Lj, rest..)` via
/// `x^{2k+1} -> ½F_{2k+1}(L1+Lj) + ½F_{2k+1}(L1-Lj)`.
pub fn int_r(p: &Poly) -> Result<Poly> {
    p.check_odd_slots(&[0])?;
    let mut out = Poly::zero(p.arity() + 1);
    for (e, c) in p.terms() {
        let fk = f((e[0] / 2) as usize);
        for (fe, fc) in fk.poly().terms() {
            symmetric_binomial(&mut out, fe[0], &e[1..], &(c * fc));
        }
    }
    Ok(out)
}

/// Mirzakhani D-transform in derivative form:
/// `x^{2i+1} y^{2j+1} -> (2i+1)!(2j+1)!/(2i+2j+3)! · F^M_{2i+2j+3}(L1)`.
pub fn int_dm(p: &Poly) -> Result<Poly> {
    p.check_odd_slots(&[0, 1])?;
    let mut out = Poly::zero(p.arity() - 1);
    for (e, c) in p.terms() {
        let (m, n) = (e[0], e[1]);
        let fk = fm(((m + n) / 2) as usize);
        let s = c.scale(&d_factor(m, n));
        for (fe, fc) in fk.terms() {
            push_one(&mut out, 2 * fe[0], &e[2..], &s * fc);
        }
    }
    Ok(out)
}

/// Mirzakhani R-transform in derivative form:
/// `x^{2k+1} -> ½F^M_{2k+1}(L1+Lj) + ½F^M_{2k+1}(L1-Lj)`.
pub fn int_rm(p: &Poly) -> Result<Poly> {
    p.check_odd_slots(&[0])?;
    let mut out = Poly::zero(p.arity() + 1);
    for (e, c) in p.terms() {
        let fk = fm((e[0] / 2) as usize);
        for (fe, fc) in fk.terms() {
            symmetric_binomial(&mut out, 2 * fe[0], &e[1..], &(c * fc));
        }
    }
    Ok(out)
}

/// Adds `c · ½((L1+Lj)^d + (L1-Lj)^d)`, the even-in-`Lj` binomial terms.
fn symmetric_binomial(out: &mut Poly, d: u32, rest: &[u32], c: &PiScalar) {
    for r in (0..=d).step_by(2) {
        let b = Rat::from_integer(binomial(d, r));
        push_two(out, d - r, r, rest, c.scale(&b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::rat;

    fn pi(n: i64, d: i64, j: usize) -> PiScalar {
        PiScalar::monomial(rat(n, d), j)
    }

    #[test]
    fn secant_coefficients() {
        assert_eq!(sec_coeff(0), pi(1, 1, 0));
        assert_eq!(sec_coeff(1), pi(4, 1, 1));
        assert_eq!(sec_coeff(2), pi(80, 1, 2));
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_even(0), pi(-1, 2, 0));
        assert_eq!(zeta_even(1), pi(1, 6, 1));
        assert_eq!(zeta_even(2), pi(1, 90, 2));
        assert_eq!(zeta_even(3), pi(1, 945, 3));
    }

    #[test]
    fn f_polynomials() {
        assert_eq!(f(0).poly(), &Poly::monomial(vec![1], PiScalar::one()));
        let mut f3 = Poly::zero(1);
        f3.add_term(vec![3], PiScalar::one());
        f3.add_term(vec![1], pi(12, 1, 1));
        assert_eq!(f(1).poly(), &f3);
        for k in 0..=8 {
            let p = f(k);
            assert_eq!(p.degree(), Some(2 * k as u32 + 1));
            assert_eq!(p.coeff1(2 * k as u32 + 1), PiScalar::one());
            for i in 0..=k {
                let c = p.coeff1(2 * i as u32 + 1);
                assert_eq!(c.homogeneous_degree(), Some(k - i));
            }
        }
    }

    #[test]
    fn fm_polynomials() {
        let mut f1 = Poly::zero(1);
        f1.add_term(vec![1], pi(1, 2, 0));
        f1.add_term(vec![0], pi(2, 3, 1));
        assert_eq!(fm(0).squares(), &f1);
        let mut f3 = Poly::zero(1);
        f3.add_term(vec![2], pi(1, 4, 0));
        f3.add_term(vec![1], pi(2, 1, 1));
        f3.add_term(vec![0], pi(28, 15, 2));
        assert_eq!(fm(1).squares(), &f3);
        for k in 0..=8usize {
            let p = fm(k);
            assert_eq!(p.degree(), Some(k as u32 + 1));
            assert_eq!(p.coeff(&[k as u32 + 1]), pi(1, 2 * k as i64 + 2, 0));
            assert!(p.pi_grading_ok(k as u32 + 1));
        }
    }

    #[test]
    fn transforms_match_closed_forms() {
        // ∫∫ yz D(x,y,z) dy dz = x^3/6 + 2 pi^2 x
        let xy = Poly::monomial(vec![1, 1], PiScalar::one());
        let mut want = Poly::zero(1);
        want.add_term(vec![3], pi(1, 6, 0));
        want.add_term(vec![1], pi(2, 1, 1));
        assert_eq!(int_d(&xy).unwrap(), want);
        assert!(int_d(&Poly::zero(2)).unwrap().is_zero());

        // ∫ z R dz = x and ∫ z^3 R dz = x(x^2 + 3y^2 + 12 pi^2)
        assert_eq!(
            int_r(&Poly::var(1, 0)).unwrap(),
            Poly::monomial(vec![1, 0], PiScalar::one())
        );
        let mut want = Poly::zero(2);
        want.add_term(vec![3, 0], PiScalar::one());
        want.add_term(vec![1, 2], pi(3, 1, 0));
        want.add_term(vec![1, 0], pi(12, 1, 1));
        assert_eq!(
            int_r(&Poly::monomial(vec![3], PiScalar::one())).unwrap(),
            want
        );

        assert_eq!(int_dm(&xy).unwrap(), fm(1).to_poly().scale_rat(&rat(1, 6)));
        assert!(int_r(&Poly::monomial(vec![2], PiScalar::one())).is_err());
    }
}
