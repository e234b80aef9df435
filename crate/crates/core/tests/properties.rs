use std::path::Path;

use proptest::prelude::*;
use siegel2::format::{parse_expansion, write_expansion};
use siegel2::ring::rat;
use siegel2::verify::{check_congruence, check_vanishing, sturm_bound};
use siegel2::{Expansion, PrimePower, VanishingOrder, QQ};

/// A random expansion; `integral` keeps every denominator 1.
fn expansion(integral: bool) -> impl Strategy<Value = Expansion> {
    let den = if integral { 1i64..2 } else { 1i64..7 };
    (1u32..=2, 1u32..=3, 0i64..60, prop::collection::vec((-9i64..10, den), 1..48)).prop_map(
        |(scale, precision, weight, values)| {
            let mut i = 0usize;
            Expansion::from_fn(QQ::new(), weight, scale, precision, |_, _, _| {
                let (num, den) = values[i % values.len()];
                i += 1;
                // roughly half the entries are zero
                if (i * 7 + num.unsigned_abs() as usize).is_multiple_of(2) {
                    rat(0, 1)
                } else {
                    rat(num, den)
                }
            })
        },
    )
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn congruent_to_itself(f in expansion(true), p in prime(), nu in 1u32..4) {
        let r = check_congruence(&f, &f, PrimePower::new(p, nu).unwrap()).unwrap();
        prop_assert!(r.passed());
        prop_assert!(r.violations.is_empty());
    }

    #[test]
    fn sturm_bound_monotone_within_parity(k in 0i64..400, i in 1i64..6) {
        prop_assert!(sturm_bound(k, i) <= sturm_bound(k + 2, i));
        let ki = k * i;
        let expected = if ki % 2 == 0 { ki / 10 } else { (ki - 5).div_euclid(10) };
        if ki >= 5 || ki % 2 == 0 {
            prop_assert_eq!(sturm_bound(k, i), expected);
        }
    }

    #[test]
    fn text_format_round_trip(f in expansion(false)) {
        let text = write_expansion("f", &f);
        let (name, g) = parse_expansion(&text, Path::new("mem")).unwrap();
        prop_assert_eq!(name, "f");
        prop_assert_eq!(write_expansion("f", &g), text);
        prop_assert_eq!(g.entries().collect::<Vec<_>>(), f.entries().collect::<Vec<_>>());
        prop_assert_eq!((g.weight(), g.scale(), g.precision()), (f.weight(), f.scale(), f.precision()));
    }

    #[test]
    fn vp_matches_vanishing_boxes(f in expansion(true), p in prime()) {
        let pp = PrimePower::new(p, 1).unwrap();
        let v = f.vp_diagonal(p).unwrap();
        let s = f.scale() as i64;
        for a in 0..=f.bound() {
            let bound = siegel2::Rational::new(a.into(), s.into());
            let vanishes = check_vanishing(&f, pp, &bound).unwrap().passed();
            let above = match &v {
                VanishingOrder::Finite(x) => *x > bound,
                VanishingOrder::AbovePrecision(_) => true,
            };
            prop_assert_eq!(vanishes, above, "A = {}", bound);
        }
    }

    #[test]
    fn leading_term_multiplicative(f in expansion(false), g in expansion(false)) {
        prop_assume!(f.scale() == g.scale() && !f.is_zero() && !g.is_zero());
        let (lf, lg) = (f.leading_term().unwrap(), g.leading_term().unwrap());
        let prod = f.mul(&g).unwrap();
        let (m, n) = (lf.m + lg.m, lf.n + lg.n);
        if m.max(n) <= prod.bound() {
            let lp = prod.leading_term().unwrap();
            prop_assert_eq!((lp.m, lp.r, lp.n), (m, lf.r + lg.r, n));
            prop_assert_eq!(lp.coeff, &lf.coeff * &lg.coeff);
        }
    }

    #[test]
    fn multiplication_commutes(f in expansion(false), g in expansion(false)) {
        prop_assume!(f.scale() == g.scale());
        let a = f.mul(&g).unwrap();
        let b = g.mul(&f).unwrap();
        prop_assert_eq!(a.entries().collect::<Vec<_>>(), b.entries().collect::<Vec<_>>());
    }

    #[test]
    fn reduction_is_a_ring_map(f in expansion(true), g in expansion(true), p in prime()) {
        prop_assume!(f.scale() == g.scale());
        let lhs = f.mul(&g).unwrap().reduce(p).unwrap();
        let rhs = f.reduce(p).unwrap().mul(&g.reduce(p).unwrap()).unwrap();
        prop_assert_eq!(lhs.entries().collect::<Vec<_>>(), rhs.entries().collect::<Vec<_>>());
    }
}
