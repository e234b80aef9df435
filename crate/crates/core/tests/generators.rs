mod common;

use common::same;

use siegel2::format::{read_expansion, save_expansion, write_expansion};
use siegel2::generators::pin;
use siegel2::qexp1::{diag_builder, DiagName};
use siegel2::ring::rat;
use siegel2::GeneratorName::{self, *};
use siegel2::{DiagSeries, GeneratorRegistry, MonomialSpec, Rational};

#[test]
fn e8_shell_sizes() {
    let shells = common::e8_shells(2);
    assert_eq!(shells.iter().map(Vec::len).collect::<Vec<_>>(), [1, 240, 2160]);
}

#[test]
fn x4_matches_e8_pair_counts() {
    let x4 = common::registry().get(X4, 2).unwrap();
    let counts = common::e8_pair_counts(2);
    for ((m, r, n), c) in x4.entries() {
        let expected = counts.get(&(m, r, n)).copied().unwrap_or(0);
        assert_eq!(*c, rat(expected as i64, 1), "a({m}, {r}, {n})");
    }
    // every pair lands inside the stored box
    let stored: usize = counts.keys().filter(|(m, r, n)| x4.get(*m, *r, *n).is_some()).count();
    assert_eq!(stored, counts.len());
}

#[test]
fn all_generators_pin_and_are_integral() {
    let reg = common::registry();
    for g in GeneratorName::ALL {
        let f = reg.get(g, 6).unwrap();
        pin(g, &f).unwrap();
        assert!(f.is_integral(), "{g}");
        assert!(f.symmetry_check().is_empty(), "{g}");
        assert_eq!(f.weight(), g.weight());
    }
}

#[test]
fn documented_coefficients() {
    let reg = common::registry();
    let x4 = reg.get(X4, 6).unwrap();
    let x12 = reg.get(X12, 6).unwrap();
    assert_eq!(x4.mul(&x12).unwrap().coeff(1, 0, 1), rat(10, 1));
    let y12 = reg.get(Y12, 6).unwrap();
    let lt = y12.leading_term().unwrap();
    assert_eq!((lt.m, lt.r, lt.n, lt.coeff), (0, 0, 1, rat(1, 1)));
    let x16 = reg.get(X16, 6).unwrap();
    assert_eq!(x16.coeff(1, 0, 1), rat(1, 1));
    assert_eq!(x16.coeff(1, 1, 1), rat(0, 1));
    assert_eq!(x16.coeff(1, -1, 1), rat(0, 1));
    let x35 = reg.get(X35, 6).unwrap();
    for ((m, r, n), c) in x35.entries() {
        if m == 1 || m == n || r == 0 {
            assert_eq!(*c, rat(0, 1), "X35 at ({m}, {r}, {n})");
        }
    }
    let lt = x35.leading_term().unwrap();
    assert_eq!((lt.m, lt.r, lt.n, lt.coeff), (2, -1, 3, rat(1, 1)));
}

#[test]
fn monomial_leading_terms() {
    let reg = common::registry();
    let cases = [("X10*X12", (2, -2, 2)), ("X4*X35", (2, -1, 3)), ("X12*X35", (3, -2, 4)), ("X10^2*X35", (4, -3, 5))];
    for (spec, (m, r, n)) in cases {
        let spec: MonomialSpec = spec.parse().unwrap();
        let f = reg.monomial_eval(&spec, 6).unwrap();
        assert_eq!(f.weight(), spec.weight());
        let lt = f.leading_term().unwrap();
        assert_eq!((lt.m, lt.r, lt.n, lt.coeff), (m, r, n, rat(1, 1)), "{spec}");
    }
    let one = reg.monomial_eval(&MonomialSpec::default(), 3).unwrap();
    assert_eq!(one.weight(), 0);
    assert_eq!(one.nonzero_entries().count(), 1);
}

#[test]
fn leading_term_is_multiplicative() {
    let reg = common::registry();
    let all = GeneratorName::ALL;
    for (i, f) in all.iter().enumerate() {
        for g in &all[i..] {
            let a = reg.get(*f, 6).unwrap();
            let b = reg.get(*g, 6).unwrap();
            let (la, lb) = (a.leading_term().unwrap(), b.leading_term().unwrap());
            let lp = a.mul(&b).unwrap().leading_term().unwrap();
            assert_eq!((lp.m, lp.r, lp.n), (la.m + lb.m, la.r + lb.r, la.n + lb.n), "{f}*{g}");
            assert_eq!(lp.coeff, &la.coeff * &lb.coeff, "{f}*{g}");
        }
    }
}

#[test]
fn witt_product_rules() {
    let reg = common::registry();
    let b = 6;
    let all = GeneratorName::ALL;
    for (i, f) in all.iter().enumerate() {
        for g in &all[i..] {
            let a = reg.get(*f, b).unwrap();
            let c = reg.get(*g, b).unwrap();
            let prod = a.mul(&c).unwrap();
            let w = |x: &siegel2::Expansion, o| x.witt(o).unwrap();
            assert!(same(&w(&prod, 0), &w(&a, 0).mul(&w(&c, 0))), "W {f}*{g}");
            let wp = w(&a, 1).mul(&w(&c, 0)).add(&w(&a, 0).mul(&w(&c, 1)));
            assert!(same(&w(&prod, 1), &wp), "W' {f}*{g}");
            if f.weight() % 2 == 0 && g.weight() % 2 == 0 {
                let wpp = w(&a, 2).mul(&w(&c, 0)).add(&w(&a, 0).mul(&w(&c, 2)));
                assert!(same(&w(&prod, 2), &wpp), "W'' {f}*{g}");
            }
        }
    }
}

#[test]
fn derived_witt_images() {
    let reg = common::registry();
    let p = 6usize;
    let w35 = reg.get(X35, 6).unwrap();
    assert!(w35.witt(0).unwrap().is_zero());
    assert!(w35.witt(2).unwrap().is_zero());
    assert!(same(&w35.witt(1).unwrap(), &diag_builder(DiagName::Alpha36, p)));
    let x10 = reg.get(X10, 6).unwrap();
    assert_eq!(x10.witt(2).unwrap().coeff(1, 1), rat(1, 1));
    assert!(same(&reg.get(X12, 6).unwrap().witt(0).unwrap(), &diag_builder(DiagName::X12, p).scale(&rat(12, 1))));
    assert!(same(&x10.witt(0).unwrap(), &DiagSeries::zero(p, 10)));
}

#[test]
fn cache_round_trip_and_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let reg = GeneratorRegistry::with_cache_dir(dir.path());
    let x10 = reg.get(X10, 5).unwrap();
    let path = reg.cache_path(X10, 5).unwrap();
    assert!(path.exists());
    let (name, loaded) = read_expansion(&path).unwrap();
    assert_eq!(name, "X10");
    assert_eq!(loaded, x10);
    let bytes = std::fs::read_to_string(&path).unwrap();
    assert_eq!(bytes, write_expansion("X10", &loaded));

    // a fresh registry serves a smaller request from the larger file
    let again = GeneratorRegistry::with_cache_dir(dir.path());
    let small = again.get(X10, 3).unwrap();
    assert_eq!(small, x10.truncate(3).unwrap());
    assert!(!again.cache_path(X10, 3).unwrap().exists());

    let other = dir.path().join("copy.qexp");
    save_expansion(&other, "X10", &small).unwrap();
    assert_eq!(read_expansion(&other).unwrap().1, small);
}

#[test]
fn corrupted_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let reg = GeneratorRegistry::with_cache_dir(dir.path());
    reg.get(X10, 3).unwrap();
    let path = reg.cache_path(X10, 3).unwrap();
    let text = std::fs::read_to_string(&path).unwrap().replace("\n1 -1 1 1 1\n", "\n1 -1 1 2 1\n");
    std::fs::write(&path, text).unwrap();
    let fresh = GeneratorRegistry::with_cache_dir(dir.path());
    assert!(fresh.get(X10, 3).is_err());
}

#[test]
fn y12_and_x16_definitions() {
    let reg = common::registry();
    let g = |n| reg.get(n, 5).unwrap();
    let (x4, x6, x10, x12) = (g(X4), g(X6), g(X10), g(X12));
    let y12 = x4
        .pow(3)
        .unwrap()
        .sub(&x6.pow(2).unwrap())
        .unwrap()
        .scale_by(&Rational::new(1.into(), 1728.into()))
        .add(&x12.scale_by(&rat(144, 1)))
        .unwrap();
    assert_eq!(y12.entries().collect::<Vec<_>>(), g(Y12).entries().collect::<Vec<_>>());
    let x16 = x4.mul(&x12).unwrap().sub(&x6.mul(&x10).unwrap()).unwrap().scale_by(&rat(1, 12));
    assert_eq!(x16.entries().collect::<Vec<_>>(), g(X16).entries().collect::<Vec<_>>());
}
