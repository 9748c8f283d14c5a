use proptest::prelude::*;

use supervol::algebra::rat::{fmt_rat, parse_rat};
use supervol::{Bounds, LaurentSeries, Mono, PiScalar, Poly, Rat, TruncSeries};

fn rat() -> impl Strategy<Value = Rat> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| Rat::new(n.into(), d.into()))
}

fn pi_scalar() -> impl Strategy<Value = PiScalar> {
    prop::collection::vec(rat(), 0..4).prop_map(PiScalar::from_coeffs)
}

fn poly2() -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0u32..4, 0u32..4), pi_scalar()), 0..6).prop_map(|terms| {
        let mut p = Poly::zero(2);
        for ((a, b), c) in terms {
            p.add_term(vec![a, b], c);
        }
        p
    })
}

const B: Bounds = Bounds {
    max_hbar: 2,
    max_degree: 3,
    max_index: 2,
};

/// Series with no constant term, so exp and log are defined.
fn small_series() -> impl Strategy<Value = TruncSeries<Rat>> {
    prop::collection::vec(
        ((-1i32..=2, prop::collection::vec(0u32..=2, 0..=3)), rat()),
        0..6,
    )
    .prop_map(|terms| {
        let mut s = TruncSeries::zero(B);
        for ((h, ks), c) in terms {
            // constants only with positive hbar, where they are nilpotent
            let h = if ks.is_empty() { h.max(1) } else { h.max(0) };
            s.add_term(Mono::from_indices(h, &ks), c);
        }
        s
    })
}

fn laurent() -> impl Strategy<Value = LaurentSeries> {
    (-6i32..=0, prop::collection::vec(pi_scalar(), 0..10)).prop_map(|(low, cs)| {
        let order = low + cs.len() as i32 + 1;
        LaurentSeries::new(low, cs, order.max(1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pi_scalar_ring(a in pi_scalar(), b in pi_scalar(), c in pi_scalar()) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c);
        prop_assert!((a.clone() - a).is_zero());
    }

    #[test]
    fn poly_ring(p in poly2(), q in poly2(), r in poly2()) {
        prop_assert_eq!(p.add(&q), q.add(&p));
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        prop_assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn substitution_is_a_homomorphism(p in poly2(), q in poly2(), a in pi_scalar()) {
        prop_assert_eq!(p.mul(&q).substitute(0, &a), p.substitute(0, &a).mul(&q.substitute(0, &a)));
        prop_assert_eq!(p.add(&q).substitute(1, &a), p.substitute(1, &a).add(&q.substitute(1, &a)));
    }

    #[test]
    fn substitutions_commute(p in poly2(), a in pi_scalar(), b in pi_scalar()) {
        let first = p.substitute(0, &a).substitute(0, &b);
        let second = p.substitute(1, &b).substitute(0, &a);
        prop_assert_eq!(first.evaluate(&[]), second.evaluate(&[]));
        prop_assert_eq!(p.evaluate(&[a, b]), first.evaluate(&[]));
    }

    #[test]
    fn log_inverts_exp(x in small_series()) {
        let e = x.exp().unwrap();
        prop_assert_eq!(e.log().unwrap(), x.clone());
        let one_plus = TruncSeries::one(B).add(&x);
        prop_assert_eq!(one_plus.log().unwrap().exp().unwrap(), one_plus);
    }

    #[test]
    fn exp_is_multiplicative(x in small_series(), y in small_series()) {
        prop_assert_eq!(x.add(&y).exp().unwrap(), x.exp().unwrap().mul(&y.exp().unwrap()));
    }

    #[test]
    fn principal_parts_split(s in laurent()) {
        let pp = s.principal_part().unwrap();
        let regular = s.sub(&pp);
        prop_assert!(regular.valuation().is_none_or(|v| v >= 0));
        prop_assert_eq!(s.principal_part_odd().unwrap().add(&s.principal_part_even().unwrap()), pp.clone());
        prop_assert_eq!(pp.principal_part().unwrap(), pp);
    }

    #[test]
    fn series_json_round_trip(x in small_series(), c in pi_scalar()) {
        let s = x.map(|r| PiScalar::from_rat(r.clone())).scale_c(&c);
        prop_assert_eq!(TruncSeries::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn poly_json_round_trip(p in poly2()) {
        let text = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<Poly>(&text).unwrap(), p);
    }

    #[test]
    fn rational_text_round_trip(r in rat()) {
        prop_assert_eq!(parse_rat(&fmt_rat(&r)).unwrap(), r);
    }
}
