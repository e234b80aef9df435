//! Index-1 Jacobi forms, Cohen numbers and the Maass lift.
//!
//! The holomorphic generators `X4, X6, X10, X12` are all Maass lifts of
//! index-1 Jacobi forms; everything here is exact.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{bernoulli, bernoulli_any, bernoulli_polynomial, divisors, factorize, mobius, Rational};
use crate::error::{Error, Result};
use crate::qexp1::{divisor_sigma, QSeries1};
use crate::ring::{rat_int, Numeric};
use crate::siegel::SiegelExpansion;

/// Kronecker symbol `(D/n)` for a discriminant `D ≡ 0, 1 (mod 4)` and `n >= 1`.
pub fn kronecker(d: i64, n: u64) -> Result<i64> {
    if d.rem_euclid(4) > 1 {
        return Err(Error::Usage(format!("kronecker: {d} is not a discriminant")));
    }
    if n == 0 {
        return Err(Error::Usage("kronecker: n must be positive".into()));
    }
    let mut acc = 1;
    for (q, e) in factorize(n) {
        let s = if q == 2 {
            match d.rem_euclid(8) {
                1 | 7 => 1,
                3 | 5 => -1,
                _ => 0,
            }
        } else {
            legendre(d, q)
        };
        acc *= s.pow(e);
    }
    Ok(acc)
}

fn legendre(a: i64, q: u64) -> i64 {
    let a = a.rem_euclid(q as i64) as u64;
    if a == 0 {
        return 0;
    }
    let mut acc = 1u64;
    let mut base = a;
    let mut e = (q - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// Splits a discriminant `disc ≡ 0, 1 (mod 4)`, `disc != 0`, as `D f^2` with
/// `D` fundamental.
pub fn fundamental_split(disc: i64) -> (i64, u64) {
    let sign = disc.signum();
    let mut core = 1u64;
    let mut f = 1u64;
    for (q, e) in factorize(disc.unsigned_abs()) {
        if e % 2 == 1 {
            core *= q;
        }
        f *= q.pow(e / 2);
    }
    let d0 = sign * core as i64;
    if d0.rem_euclid(4) == 1 {
        (d0, f)
    } else {
        // disc = 4 d0 (f/2)^2 with f even
        (4 * d0, f / 2)
    }
}

/// Generalized Bernoulli number `B_{r, χ_D}` for a fundamental discriminant `D`.
fn generalized_bernoulli(r: u32, d: i64) -> Rational {
    let c = d.unsigned_abs();
    let mut acc = Rational::zero();
    for a in 1..=c {
        let chi = kronecker(d, a).expect("fundamental discriminant");
        if chi != 0 {
            let x = Rational::new(BigInt::from(a), BigInt::from(c));
            acc += rat_int(chi) * bernoulli_polynomial(r, &x);
        }
    }
    acc * rat_int(BigInt::from(c).pow(r - 1))
}

/// Cohen's function `H(r, N)`.
pub fn cohen_h(r: u32, n: u64) -> Result<Rational> {
    if r == 0 {
        return Err(Error::Usage("cohen_h: r must be at least 1".into()));
    }
    if n == 0 {
        return Ok(-bernoulli(2 * r)? / rat_int(2 * r));
    }
    let disc = if r.is_multiple_of(2) { n as i64 } else { -(n as i64) };
    if disc.rem_euclid(4) > 1 {
        return Ok(Rational::zero());
    }
    let (d, f) = fundamental_split(disc);
    // L(1 - r, χ_D) = -B_{r,χ}/r; for D = 1 this is ζ(1 - r) = -B_r / r.
    let l_value = if d == 1 {
        -bernoulli_any(r) / rat_int(r)
    } else {
        -generalized_bernoulli(r, d) / rat_int(r)
    };
    let mut sum = BigInt::zero();
    for e in divisors(f) {
        let mu = mobius(e);
        if mu == 0 {
            continue;
        }
        let chi = kronecker(d, e)?;
        if chi == 0 {
            continue;
        }
        let term = BigInt::from(mu * chi)
            * BigInt::from(e).pow(r - 1)
            * divisor_sigma((f / e) as i64, 2 * r - 1)?;
        sum += term;
    }
    Ok(l_value * Rational::from_integer(sum))
}

/// A holomorphic Jacobi form of index 1, stored by discriminant
/// `D = 4n - r^2 ↦ c(D)` for `0 <= D <= Dmax`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiForm1 {
    pub weight: i64,
    dmax: u64,
    c: Vec<Rational>,
}

impl JacobiForm1 {
    /// Builds a form from `c(D)`; `f` is only consulted on valid classes.
    pub fn from_fn(weight: i64, dmax: u64, f: impl Fn(u64) -> Rational) -> Self {
        let c = (0..=dmax)
            .map(|d| if is_disc_class(d) { f(d) } else { Rational::zero() })
            .collect();
        JacobiForm1 { weight, dmax, c }
    }

    pub fn dmax(&self) -> u64 {
        self.dmax
    }

    /// `c(D)`, zero for negative `D` and for `D ≡ 1, 2 (mod 4)`.
    pub fn coeff(&self, d: i64) -> Rational {
        if d < 0 || d as u64 > self.dmax {
            return Rational::zero();
        }
        self.c[d as usize].clone()
    }

    /// Coefficient of `q^n ζ^r`.
    pub fn coeff_nr(&self, n: i64, r: i64) -> Rational {
        self.coeff(4 * n - r * r)
    }
}

fn is_disc_class(d: u64) -> bool {
    d.is_multiple_of(4) || d % 4 == 3
}

/// Jacobi–Eisenstein series `E_{k,1}`, `k in {4, 6}`, with `c(0) = 1`.
pub fn jacobi_eisenstein(k: u32, dmax: u64) -> Result<JacobiForm1> {
    if !matches!(k, 4 | 6) {
        return Err(Error::Usage(format!("jacobi_eisenstein: weight {k} not in {{4, 6}}")));
    }
    let h0 = cohen_h(k - 1, 0)?;
    let values: HashMap<u64, Rational> = (0..=dmax)
        .filter(|&d| is_disc_class(d))
        .map(|d| Ok((d, cohen_h(k - 1, d)? / &h0)))
        .collect::<Result<_>>()?;
    Ok(JacobiForm1::from_fn(k as i64, dmax, |d| values[&d].clone()))
}

/// `sum coeff_i * f_i(τ) φ_i(τ, z)`; all terms must share the same weight.
pub fn jacobi_combine(terms: &[(Rational, &QSeries1, &JacobiForm1)]) -> Result<JacobiForm1> {
    let (_, f0, phi0) = terms.first().ok_or_else(|| Error::Usage("jacobi_combine: no terms".into()))?;
    let weight = f0.weight + phi0.weight;
    if terms.iter().any(|(_, f, phi)| f.weight + phi.weight != weight) {
        return Err(Error::Usage("jacobi_combine: terms have different weights".into()));
    }
    let dmax = terms.iter().map(|(_, _, phi)| phi.dmax).min().expect("nonempty");
    let needed = (dmax as usize).div_ceil(4);
    if let Some((_, f, _)) = terms.iter().find(|(_, f, _)| f.precision() < needed) {
        return Err(Error::Precision(format!(
            "jacobi_combine: q-series precision {} below required {needed}",
            f.precision()
        )));
    }
    let combined = JacobiForm1::from_fn(weight, dmax, |d| {
        // D = 4n - r^2 with r in {0, 1}
        let n = (d as i64 + 1) / 4;
        let r = if d % 4 == 0 { 0 } else { 1 };
        let mut acc = Rational::zero();
        for (c, f, phi) in terms {
            let mut s = Rational::zero();
            for j in 0..=n {
                let fj = f.coeff(j as usize);
                if !fj.is_zero() {
                    s += fj * phi.coeff_nr(n - j, r);
                }
            }
            acc += c * s;
        }
        acc
    });
    Ok(combined)
}

/// `φ_{10,1} = (e6 E_{4,1} - e4 E_{6,1}) / 144`.
pub fn phi10(dmax: u64) -> Result<JacobiForm1> {
    let prec = (dmax as usize).div_ceil(4) + 1;
    let e4 = crate::qexp1::eisenstein1(4, prec)?;
    let e6 = crate::qexp1::eisenstein1(6, prec)?;
    let j4 = jacobi_eisenstein(4, dmax)?;
    let j6 = jacobi_eisenstein(6, dmax)?;
    let c = Rational::new(BigInt::one(), BigInt::from(144));
    jacobi_combine(&[(c.clone(), &e6, &j4), (-c, &e4, &j6)])
}

/// `φ_{12,1} = (e4^2 E_{4,1} - e6 E_{6,1}) / 144`.
pub fn phi12(dmax: u64) -> Result<JacobiForm1> {
    let prec = (dmax as usize).div_ceil(4) + 1;
    let e4 = crate::qexp1::eisenstein1(4, prec)?;
    let e6 = crate::qexp1::eisenstein1(6, prec)?;
    let e4sq = e4.pow(2);
    let j4 = jacobi_eisenstein(4, dmax)?;
    let j6 = jacobi_eisenstein(6, dmax)?;
    let c = Rational::new(BigInt::one(), BigInt::from(144));
    jacobi_combine(&[(c.clone(), &e4sq, &j4), (-c, &e6, &j6)])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftMode {
    /// Lift of a cusp form (`c(0) = 0`); all singular coefficients vanish.
    Cusp,
    /// Lift of `E_{k,1}`, normalized to constant term 1.
    Eisenstein,
}

/// The Maass lift of an index-1 Jacobi form to precision `B`.
///
/// `a(m, r, n) = α Σ_{d | gcd(m, r, n)} d^{k-1} c((4mn - r^2)/d^2)` with
/// `α = 1` for cusp forms and `α = -2k/B_k` in Eisenstein mode, where
/// `gcd(0, 0, n) = n` and `a(0, 0, 0) = 1` for Eisenstein series.
pub fn maass_lift(phi: &JacobiForm1, precision: u32, mode: LiftMode) -> Result<SiegelExpansion<Numeric<Rational>>> {
    let b = precision as u64;
    if phi.dmax < 4 * b * b {
        return Err(Error::Precision(format!(
            "maass_lift: Dmax = {} below 4B^2 = {}",
            phi.dmax,
            4 * b * b
        )));
    }
    let k = phi.weight;
    if k < 1 {
        return Err(Error::Usage("maass_lift: weight must be positive".into()));
    }
    let alpha = match mode {
        LiftMode::Cusp => {
            if !phi.coeff(0).is_zero() {
                return Err(Error::Usage("maass_lift: cusp mode requires c(0) = 0".into()));
            }
            Rational::one()
        }
        LiftMode::Eisenstein => -rat_int(2 * k) / bernoulli(k as u32)?,
    };
    let out = SiegelExpansion::from_fn(Numeric::new(), k, 1, precision, |m, r, n| {
        if m == 0 && n == 0 {
            return match mode {
                LiftMode::Cusp => Rational::zero(),
                LiftMode::Eisenstein => Rational::one(),
            };
        }
        let g = m.gcd(&r).gcd(&n);
        let disc = 4 * m * n - r * r;
        let mut acc = BigInt::zero();
        let mut acc_q = Rational::zero();
        for d in divisors(g as u64) {
            let d = d as i64;
            let c = phi.coeff(disc / (d * d));
            if c.is_zero() {
                continue;
            }
            let dk = BigInt::from(d).pow((k - 1) as u32);
            if c.is_integer() {
                acc += dk * c.to_integer();
            } else {
                acc_q += Rational::from_integer(dk) * c;
            }
        }
        (Rational::from_integer(acc) + acc_q) * &alpha
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    /// Independent oracle: (D/q) for an odd prime q by counting square roots.
    fn legendre_by_counting(d: i64, q: u64) -> i64 {
        let a = d.rem_euclid(q as i64) as u64;
        if a == 0 {
            return 0;
        }
        if (1..q).any(|x| x * x % q == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-3, 2).unwrap(), -1);
        assert_eq!(kronecker(-4, 3).unwrap(), -1);
        assert_eq!(kronecker(-7, 1).unwrap(), 1);
        assert_eq!(kronecker(-4, 2).unwrap(), 0);
        assert!(kronecker(2, 3).is_err());
        // x^2 ≡ -3 (mod 8) has no solutions, so (-3/2) = -1
        assert!(!(0..8).any(|x: i64| (x * x + 3) % 8 == 0));
        for d in [-3i64, -4, -7, -8, 5, 8, 12, -15] {
            for q in [3u64, 5, 7, 11, 13] {
                assert_eq!(kronecker(d, q).unwrap(), legendre_by_counting(d, q), "({d}/{q})");
            }
        }
    }

    #[test]
    fn kronecker_is_multiplicative() {
        for d in [-3i64, -4, -7, -20, 5, 13] {
            for a in 1..30u64 {
                for b in 1..30u64 {
                    assert_eq!(
                        kronecker(d, a * b).unwrap(),
                        kronecker(d, a).unwrap() * kronecker(d, b).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn fundamental_splits() {
        assert_eq!(fundamental_split(-3), (-3, 1));
        assert_eq!(fundamental_split(-4), (-4, 1));
        assert_eq!(fundamental_split(-12), (-3, 2));
        assert_eq!(fundamental_split(-16), (-4, 2));
        assert_eq!(fundamental_split(-32), (-8, 2));
        assert_eq!(fundamental_split(-27), (-3, 3));
        assert_eq!(fundamental_split(16), (1, 4));
        assert_eq!(fundamental_split(12), (12, 1));
    }

    #[test]
    fn cohen_examples() {
        assert_eq!(cohen_h(3, 0).unwrap(), rat(-1, 252));
        assert_eq!(cohen_h(3, 3).unwrap(), rat(-2, 9));
        assert_eq!(cohen_h(3, 4).unwrap(), rat(-1, 2));
        assert_eq!(cohen_h(5, 0).unwrap(), rat(-1, 132));
        assert_eq!(cohen_h(3, 1).unwrap(), Rational::zero());
        assert_eq!(cohen_h(3, 2).unwrap(), Rational::zero());
    }

    #[test]
    fn cohen_h1_is_hurwitz_class_number() {
        // H(1, N) for N ≡ 0, 3 mod 4: Hurwitz class numbers 1/3, 1/2, 1, 4/3, 1, 2, ...
        let expected = [(3, rat(1, 3)), (4, rat(1, 2)), (7, rat(1, 1)), (8, rat(1, 1)), (11, rat(1, 1)), (12, rat(4, 3)), (15, rat(2, 1)), (16, rat(3, 2))];
        for (n, h) in expected {
            assert_eq!(cohen_h(1, n).unwrap(), h, "H(1, {n})");
        }
    }

    #[test]
    fn jacobi_eisenstein_examples() {
        let e4 = jacobi_eisenstein(4, 20).unwrap();
        assert_eq!(e4.coeff(0), rat(1, 1));
        assert_eq!(e4.coeff(3), rat(56, 1));
        assert_eq!(e4.coeff(4), rat(126, 1));
        let e6 = jacobi_eisenstein(6, 20).unwrap();
        assert_eq!(e6.coeff(0), rat(1, 1));
        assert_eq!(e6.coeff(3), rat(-88, 1));
        assert_eq!(e6.coeff(4), rat(-330, 1));
        assert!(jacobi_eisenstein(8, 4).is_err());
        for d in 0..=20 {
            if d % 4 == 1 || d % 4 == 2 {
                assert!(e4.coeff(d).is_zero());
            }
        }
    }

    #[test]
    fn cusp_jacobi_forms() {
        let p10 = phi10(36).unwrap();
        assert_eq!(p10.weight, 10);
        assert_eq!(p10.coeff(0), Rational::zero());
        assert_eq!(p10.coeff(3), rat(1, 1));
        assert_eq!(p10.coeff(4), rat(-2, 1));
        let p12 = phi12(36).unwrap();
        assert_eq!(p12.weight, 12);
        assert_eq!(p12.coeff(0), Rational::zero());
        assert_eq!(p12.coeff(3), rat(1, 1));
        assert_eq!(p12.coeff(4), rat(10, 1));
    }

    #[test]
    fn combine_identity_and_weight_check() {
        let e4 = jacobi_eisenstein(4, 16).unwrap();
        let one = QSeries1::one(6);
        assert_eq!(jacobi_combine(&[(rat(1, 1), &one, &e4)]).unwrap(), e4);
        let e6q = crate::qexp1::eisenstein1(6, 6).unwrap();
        assert!(jacobi_combine(&[(rat(1, 1), &one, &e4), (rat(1, 1), &e6q, &e4)]).is_err());
    }

    #[test]
    fn lift_examples() {
        let x10 = maass_lift(&phi10(16).unwrap(), 2, LiftMode::Cusp).unwrap();
        assert_eq!(x10.coeff(1, 1, 1), rat(1, 1));
        assert_eq!(x10.coeff(1, 0, 1), rat(-2, 1));
        for n in 0..=2 {
            assert!(x10.coeff(0, 0, n).is_zero());
        }
        let x4 = maass_lift(&jacobi_eisenstein(4, 16).unwrap(), 2, LiftMode::Eisenstein).unwrap();
        assert_eq!(x4.coeff(1, 0, 1), rat(30240, 1));
        assert_eq!(x4.coeff(1, 1, 1), rat(13440, 1));
        assert_eq!(x4.coeff(0, 0, 0), rat(1, 1));
        assert_eq!(x4.coeff(0, 0, 2), rat(240 * 9, 1));
        let x12 = maass_lift(&phi12(16).unwrap(), 2, LiftMode::Cusp).unwrap();
        assert_eq!(x12.coeff(1, 0, 1), rat(10, 1));
    }

    #[test]
    fn lift_errors() {
        let e4 = jacobi_eisenstein(4, 15).unwrap();
        assert!(matches!(maass_lift(&e4, 2, LiftMode::Eisenstein), Err(Error::Precision(_))));
        let e4 = jacobi_eisenstein(4, 16).unwrap();
        assert!(matches!(maass_lift(&e4, 2, LiftMode::Cusp), Err(Error::Usage(_))));
    }

    #[test]
    fn lift_multiplicativity_at_222() {
        // a(2,2,2) = c(12) + 2^(k-1) c(3) for any lift
        for (phi, mode, alpha) in [
            (phi10(16).unwrap(), LiftMode::Cusp, rat(1, 1)),
            (phi12(16).unwrap(), LiftMode::Cusp, rat(1, 1)),
            (jacobi_eisenstein(4, 16).unwrap(), LiftMode::Eisenstein, rat(240, 1)),
        ] {
            let f = maass_lift(&phi, 2, mode).unwrap();
            let k = phi.weight as u32;
            let expected = (phi.coeff(12) + rat_int(BigInt::from(2).pow(k - 1)) * phi.coeff(3)) * alpha;
            assert_eq!(f.coeff(2, 2, 2), expected);
        }
    }
}
