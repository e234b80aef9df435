//! Elliptic q-expansions and two-variable diagonal series.
//!
//! A [`DiagSeries`] is an element of `Q[[q1, q2]]` truncated to the box
//! `0 <= m, n <= P`; it is the codomain of the Witt operators, with
//! `q ⊗ 1 ↦ q1` and `1 ⊗ q ↦ q2`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{bernoulli, divisors, Rational};
use crate::error::{Error, Result};
use crate::ring::rat_int;

/// `sum_{d | n} d^t`.
pub fn divisor_sigma(n: i64, t: u32) -> Result<BigInt> {
    if n <= 0 {
        return Err(Error::Usage(format!("divisor_sigma: n = {n} must be positive")));
    }
    Ok(divisors(n as u64).into_iter().map(|d| BigInt::from(d).pow(t)).sum())
}

/// A one-variable q-expansion `sum_{n=0}^{P} c_n q^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries1 {
    precision: usize,
    coeffs: Vec<Rational>,
    pub weight: i64,
    /// Set only for the quasi-modular `e2`.
    pub quasi: bool,
}

impl QSeries1 {
    pub fn new(precision: usize, weight: i64, f: impl Fn(usize) -> Rational) -> Self {
        QSeries1 { precision, coeffs: (0..=precision).map(f).collect(), weight, quasi: false }
    }

    pub fn zero(precision: usize, weight: i64) -> Self {
        Self::new(precision, weight, |_| Rational::zero())
    }

    pub fn one(precision: usize) -> Self {
        Self::new(precision, 0, |n| if n == 0 { Rational::one() } else { Rational::zero() })
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn coeff(&self, n: usize) -> Rational {
        self.coeffs.get(n).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, precision: usize) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::Precision(format!(
                "requested q-precision {precision} exceeds available {}",
                self.precision
            )));
        }
        let mut out = self.clone();
        out.coeffs.truncate(precision + 1);
        out.precision = precision;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.precision.min(other.precision);
        let mut out = Self::new(p, self.weight, |n| &self.coeffs[n] + &other.coeffs[n]);
        out.quasi = self.quasi || other.quasi;
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        for x in &mut out.coeffs {
            *x = &*x * c;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.precision.min(other.precision);
        let mut coeffs = vec![Rational::zero(); p + 1];
        for (i, a) in self.coeffs[..=p].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=p - i].iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        QSeries1 {
            precision: p,
            coeffs,
            weight: self.weight + other.weight,
            quasi: self.quasi || other.quasi,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.precision);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Normalized Eisenstein series `e_k`, `k in {2, 4, 6}`, with constant term 1.
pub fn eisenstein1(k: u32, precision: usize) -> Result<QSeries1> {
    if !matches!(k, 2 | 4 | 6) {
        return Err(Error::Usage(format!("eisenstein1: weight {k} not in {{2, 4, 6}}")));
    }
    let factor = -Rational::from_integer(BigInt::from(2 * k)) / bernoulli(k)?;
    let mut out = QSeries1::new(precision, k as i64, |n| {
        if n == 0 {
            Rational::one()
        } else {
            &factor * rat_int(divisor_sigma(n as i64, k - 1).expect("n >= 1"))
        }
    });
    out.quasi = k == 2;
    Ok(out)
}

/// Ramanujan's `Δ = (e4^3 - e6^2) / 1728`.
pub fn delta1(precision: usize) -> QSeries1 {
    let e4 = eisenstein1(4, precision).expect("weight 4");
    let e6 = eisenstein1(6, precision).expect("weight 6");
    e4.pow(3).sub(&e6.pow(2)).scale(&Rational::new(BigInt::one(), BigInt::from(1728)))
}

/// Symmetry type of a diagonal series under `(m, n) -> (n, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// `a(m, n) = a(n, m)`: an element of `Sym^2`.
    Symmetric,
    /// `a(m, n) = -a(n, m)`: an element of `∧^2`.
    Antisymmetric,
    None,
}

impl Symmetry {
    fn times(self, other: Symmetry) -> Symmetry {
        use Symmetry::*;
        match (self, other) {
            (Symmetric, Symmetric) | (Antisymmetric, Antisymmetric) => Symmetric,
            (Symmetric, Antisymmetric) | (Antisymmetric, Symmetric) => Antisymmetric,
            _ => None,
        }
    }
}

/// A truncated two-variable series `sum a(m, n) q1^m q2^n`, `0 <= m, n <= P`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagSeries {
    precision: usize,
    coeffs: Vec<Rational>,
    pub weight: i64,
    symmetry: Symmetry,
}

impl DiagSeries {
    pub fn new(precision: usize, weight: i64, f: impl Fn(usize, usize) -> Rational) -> Self {
        let side = precision + 1;
        let mut coeffs = Vec::with_capacity(side * side);
        for m in 0..side {
            for n in 0..side {
                coeffs.push(f(m, n));
            }
        }
        let mut out = DiagSeries { precision, coeffs, weight, symmetry: Symmetry::None };
        out.symmetry = out.detect_symmetry();
        out
    }

    pub fn zero(precision: usize, weight: i64) -> Self {
        Self::new(precision, weight, |_, _| Rational::zero())
    }

    pub fn one(precision: usize) -> Self {
        Self::new(precision, 0, |m, n| {
            if m == 0 && n == 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn coeff(&self, m: usize, n: usize) -> Rational {
        if m > self.precision || n > self.precision {
            return Rational::zero();
        }
        self.coeffs[m * (self.precision + 1) + n].clone()
    }

    fn at(&self, m: usize, n: usize) -> &Rational {
        &self.coeffs[m * (self.precision + 1) + n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Entries `(m, n, a(m, n))` with `a != 0`, in `(m, n)` order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        let side = self.precision + 1;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (i / side, i % side, c))
    }

    /// Checks the coefficients for symmetry or antisymmetry. The zero series
    /// reports `Symmetric`.
    pub fn detect_symmetry(&self) -> Symmetry {
        let p = self.precision;
        let mut sym = true;
        let mut anti = true;
        for m in 0..=p {
            for n in m..=p {
                let a = self.at(m, n);
                let b = self.at(n, m);
                if a != b {
                    sym = false;
                }
                if *a != -b {
                    anti = false;
                }
            }
        }
        match (sym, anti) {
            (true, _) => Symmetry::Symmetric,
            (false, true) => Symmetry::Antisymmetric,
            _ => Symmetry::None,
        }
    }

    pub fn truncate(&self, precision: usize) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::Precision(format!(
                "requested diagonal precision {precision} exceeds available {}",
                self.precision
            )));
        }
        let mut out = Self::new(precision, self.weight, |m, n| self.at(m, n).clone());
        out.symmetry = if self.symmetry == Symmetry::None { out.symmetry } else { self.symmetry };
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.precision.min(other.precision);
        let mut out = DiagSeries {
            precision: p,
            coeffs: Vec::with_capacity((p + 1) * (p + 1)),
            weight: self.weight.max(other.weight),
            symmetry: Symmetry::None,
        };
        for m in 0..=p {
            for n in 0..=p {
                out.coeffs.push(self.at(m, n) + other.at(m, n));
            }
        }
        out.symmetry = if self.symmetry == other.symmetry && self.symmetry != Symmetry::None {
            self.symmetry
        } else {
            out.detect_symmetry()
        };
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        for x in &mut out.coeffs {
            *x = &*x * c;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.precision.min(other.precision);
        let side = p + 1;
        let mut coeffs = vec![Rational::zero(); side * side];
        for m1 in 0..=p {
            for n1 in 0..=p {
                let a = self.at(m1, n1);
                if a.is_zero() {
                    continue;
                }
                for m2 in 0..=p - m1 {
                    for n2 in 0..=p - n1 {
                        let b = other.at(m2, n2);
                        if !b.is_zero() {
                            coeffs[(m1 + m2) * side + n1 + n2] += a * b;
                        }
                    }
                }
            }
        }
        let mut out = DiagSeries {
            precision: p,
            coeffs,
            weight: self.weight + other.weight,
            symmetry: self.symmetry.times(other.symmetry),
        };
        if out.symmetry == Symmetry::None {
            out.symmetry = out.detect_symmetry();
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.precision);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc.weight = self.weight * e as i64;
        acc
    }
}

impl fmt::Display for DiagSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, n, c) in self.nonzero_entries() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*q1^{m}*q2^{n}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `f ⊗ g`: `a(m, n) = f_m g_n`.
pub fn diag_tensor(f: &QSeries1, g: &QSeries1) -> DiagSeries {
    let p = f.precision().min(g.precision());
    let mut out = DiagSeries::new(p, f.weight, |m, n| f.coeff(m) * g.coeff(n));
    out.weight = f.weight;
    if f == g {
        out.symmetry = Symmetry::Symmetric;
    }
    out
}

/// The named elements of the diagonal ring used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagName {
    X2,
    X4,
    X6,
    X12,
    Y12,
    Alpha36,
}

impl std::str::FromStr for DiagName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "x2" => DiagName::X2,
            "x4" => DiagName::X4,
            "x6" => DiagName::X6,
            "x12" => DiagName::X12,
            "y12" => DiagName::Y12,
            "alpha36" => DiagName::Alpha36,
            other => return Err(Error::Usage(format!("unknown diagonal series {other:?}"))),
        })
    }
}

/// Builds `x2, x4, x6 = e_k ⊗ e_k`, `x12 = Δ ⊗ Δ`, `y12 = e4³ ⊗ Δ + Δ ⊗ e4³`
/// and `alpha36 = x12² (Δ ⊗ e4³ - e4³ ⊗ Δ)`.
pub fn diag_builder(name: DiagName, precision: usize) -> DiagSeries {
    let ek = |k| eisenstein1(k, precision).expect("k in {2,4,6}");
    let mut out = match name {
        DiagName::X2 => diag_tensor(&ek(2), &ek(2)),
        DiagName::X4 => diag_tensor(&ek(4), &ek(4)),
        DiagName::X6 => diag_tensor(&ek(6), &ek(6)),
        DiagName::X12 => {
            let d = delta1(precision);
            diag_tensor(&d, &d)
        }
        DiagName::Y12 => {
            let d = delta1(precision);
            let e43 = ek(4).pow(3);
            diag_tensor(&e43, &d).add(&diag_tensor(&d, &e43))
        }
        DiagName::Alpha36 => {
            let d = delta1(precision);
            let e43 = ek(4).pow(3);
            let x12 = diag_tensor(&d, &d);
            let anti = diag_tensor(&d, &e43).sub(&diag_tensor(&e43, &d));
            x12.pow(2).mul(&anti)
        }
    };
    out.weight = match name {
        DiagName::X2 => 2,
        DiagName::X4 => 4,
        DiagName::X6 => 6,
        DiagName::X12 | DiagName::Y12 => 12,
        DiagName::Alpha36 => 36,
    };
    out
}
