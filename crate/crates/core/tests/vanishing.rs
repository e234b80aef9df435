mod common;

use siegel2::linalg::{fp_rank, CoeffMatrix};
use siegel2::ring::{rat, rat_int};
use siegel2::verify::{
    check_congruence, check_vanishing, rank_certificate, sharpness_witness, sturm_bound, verify_truncation_rank, Verdict,
};
use siegel2::GeneratorName::{self, *};
use siegel2::{Error, Expansion, MonomialSpec, PrimePower, VanishingOrder, QQ};

fn pp(p: u64) -> PrimePower {
    PrimePower::new(p, 1).unwrap()
}

#[test]
fn vp_of_generators() {
    let reg = common::registry();
    for p in [2, 3, 5] {
        let x10 = reg.get(X10, 6).unwrap();
        assert_eq!(x10.vp_diagonal(p).unwrap(), VanishingOrder::Finite(rat(1, 1)));
        let x35 = reg.get(X35, 6).unwrap();
        assert_eq!(x35.vp_diagonal(p).unwrap(), VanishingOrder::Finite(rat(3, 1)));
    }
    let zero = Expansion::zero(QQ::new(), 10, 1, 4);
    assert_eq!(zero.vp_diagonal(7).unwrap(), VanishingOrder::AbovePrecision(4));
}

#[test]
fn vp_agrees_with_direct_scan() {
    let reg = common::registry();
    for p in [2, 3, 5, 7] {
        for g in GeneratorName::ALL {
            let r = reg.get(g, 5).unwrap().reduce(p).unwrap();
            let scanned = common::vp_by_scan(&r);
            match r.vp_diagonal().unwrap() {
                VanishingOrder::Finite(v) => assert_eq!(Some(v), scanned, "{g} mod {p}"),
                VanishingOrder::AbovePrecision(b) => {
                    assert_eq!(scanned, None, "{g} mod {p}");
                    assert_eq!(b, 5);
                }
            }
        }
    }
}

#[test]
fn multiplying_by_x10_raises_vp_by_one() {
    let reg = common::registry();
    for p in [2, 3, 5] {
        let x10 = reg.get(X10, 6).unwrap().reduce(p).unwrap();
        for g in GeneratorName::ALL {
            let f = reg.get(g, 6).unwrap().reduce(p).unwrap();
            let VanishingOrder::Finite(v) = f.vp_diagonal().unwrap() else { continue };
            let w = x10.mul(&f).unwrap().vp_diagonal().unwrap();
            assert_eq!(w, VanishingOrder::Finite(v + rat(1, 1)), "X10*{g} mod {p}");
        }
    }
}

#[test]
fn leading_terms_of_x10_y12_x16_monomials_mod_p() {
    let reg = common::registry();
    for p in [2, 3] {
        for a in 0..=4u32 {
            for b in 0..=4u32 {
                for c in 0..=3u32 {
                    let spec = MonomialSpec::new([(X10, a), (Y12, b), (X16, c)]);
                    let w = spec.weight();
                    if w == 0 || w > 48 || (a + b + c) as i64 > 6 {
                        continue;
                    }
                    let (m, n) = ((a + c) as i64, (a + b + c) as i64);
                    let f = reg.monomial_eval(&spec, n.max(1) as u32).unwrap().reduce(p).unwrap();
                    let lt = f.leading_term().unwrap();
                    assert_eq!((lt.m, lt.r, lt.n), (m, -(a as i64), n), "{spec} mod {p}");
                    assert_ne!(lt.coeff, 0);
                }
            }
        }
    }
}

#[test]
fn check_vanishing_examples() {
    let reg = common::registry();
    let x10 = reg.get(X10, 4).unwrap();
    assert_eq!(check_vanishing(&x10, pp(2), &rat(0, 1)).unwrap().verdict, Verdict::Pass);
    let r = check_vanishing(&x10, pp(2), &rat(1, 1)).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.violations.iter().any(|v| v.index == (1, 1, 1)));
    let diff = reg.get(X12, 4).unwrap().sub(&x10).unwrap();
    assert!(check_vanishing(&diff, pp(2), &rat(1, 1)).unwrap().passed());

    let third = x10.scale_by(&rat(1, 3));
    assert!(matches!(check_vanishing(&third, pp(3), &rat(1, 1)), Err(Error::NonIntegral { .. })));

    let beyond = check_vanishing(&diff, pp(2), &rat(9, 1)).unwrap();
    assert!(beyond.precision_note.is_some());
    assert!(!beyond.passed());
}

#[test]
fn higher_prime_powers() {
    let reg = common::registry();
    let x12 = reg.get(X12, 4).unwrap();
    let x10 = reg.get(X10, 4).unwrap();
    let diff = x12.sub(&x10).unwrap();
    // X12 - X10 has a(1, 0, 1) = 12, divisible by 4 but not 8
    assert_eq!(diff.coeff(1, 0, 1), rat(12, 1));
    assert!(check_vanishing(&diff, PrimePower::new(2, 2).unwrap(), &rat(1, 1)).unwrap().passed());
    assert!(!check_vanishing(&diff, PrimePower::new(2, 3).unwrap(), &rat(1, 1)).unwrap().passed());
}

#[test]
fn check_congruence_examples() {
    let reg = common::registry();
    let one = Expansion::one(QQ::new(), 1, 6);
    assert!(check_congruence(&reg.get(X4, 6).unwrap(), &one, pp(2)).unwrap().passed());
    assert!(check_congruence(&reg.get(X12, 6).unwrap(), &reg.get(X10, 6).unwrap(), pp(3)).unwrap().passed());
    let r = check_congruence(&reg.get(X4, 6).unwrap(), &reg.get(X6, 6).unwrap(), pp(5)).unwrap();
    assert!(!r.passed());
    assert!(r.violations.iter().any(|v| v.index == (0, 0, 1)));
}

#[test]
fn x12_and_x10_are_dependent_mod_2() {
    let reg = common::registry();
    let forms = [reg.get(X12, 4).unwrap(), reg.get(X10, 4).unwrap()];
    let m = CoeffMatrix::from_expansions(QQ::new(), vec!["X12".into(), "X10".into()], &forms, 4).unwrap();
    let (rank, kernel) = fp_rank(&m, 2).unwrap();
    assert_eq!(rank, 1);
    assert_eq!(kernel, vec![vec![1, 1]]);
    assert_eq!(fp_rank(&m, 5).unwrap().0, 2);
}

#[test]
fn rank_certificate_examples() {
    let reg = common::registry();
    let c = rank_certificate(&reg, 12, 5, 5, 1).unwrap();
    assert!(c.injective());
    assert_eq!((c.rank_truncated, c.rank_full), (3, 3));
    let c = rank_certificate(&reg, 10, 2, 5, 1).unwrap();
    assert!(c.injective());
    assert_eq!(c.rank_full, 2);
    let c = rank_certificate(&reg, 35, 3, 5, 3).unwrap();
    assert!(c.injective());
    assert_eq!(c.rank_truncated, 1);
    assert!(verify_truncation_rank(&reg, 35, 3, 5).unwrap().passed());
    let refused = verify_truncation_rank(&reg, 18, 2, 5).unwrap();
    assert!(!refused.passed());
    assert!(refused.to_string().contains("SKIP injectivity.k18.p2 not certifiable"));
    assert!(matches!(rank_certificate(&reg, 18, 2, 5, 1), Err(Error::Usage(_))));
}

#[test]
fn witnesses() {
    let reg = common::registry();
    let cases = [(10, "X10", (1, -1, 1)), (22, "X10*X12", (2, -2, 2)), (47, "X12*X35", (3, -2, 4))];
    for (k, name, (m, r, n)) in cases {
        for p in [2, 3, 5, 7] {
            let w = sharpness_witness(&reg, k, p).unwrap();
            assert_eq!(w.monomial.to_string(), name);
            assert!(w.certified(), "k = {k}, p = {p}");
            assert_eq!(w.vp, VanishingOrder::Finite(rat_int(sturm_bound(k, 1))));
            let lt = w.leading_mod_p.unwrap();
            assert_eq!((lt.m, lt.r, lt.n), (m, r, n));
        }
    }
    assert!(matches!(sharpness_witness(&reg, 37, 2), Err(Error::Usage(_))));
    assert!(matches!(sharpness_witness(&reg, 2, 2), Err(Error::Usage(_))));
}

#[test]
fn witness_bound_is_tight() {
    let reg = common::registry();
    for (k, p) in [(10, 2), (14, 3), (35, 5), (44, 7)] {
        let b = sturm_bound(k, 1);
        let c = rank_certificate(&reg, k, p, b.max(3) as u32, b - 1).unwrap();
        assert!(!c.injective(), "k = {k}, p = {p}");
    }
}

#[test]
fn odd_witness_leading_indices() {
    let reg = common::registry();
    for k in [35, 39, 41, 43, 45, 47, 49, 51] {
        let b = sturm_bound(k, 1);
        for p in [2, 3] {
            let lt = sharpness_witness(&reg, k, p).unwrap().leading_mod_p.unwrap();
            assert_eq!((lt.m, lt.r, lt.n), (b - 1, 2 - b, b), "k = {k}, p = {p}");
        }
    }
}
