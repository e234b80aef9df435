//! Exact rational arithmetic helpers: Bernoulli numbers, p-adic valuations,
//! reduction modulo a prime, and small integer number theory.

use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The exact rationals. Values are always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// p-adic valuation of a rational; zero has valuation `Infinity`, which
/// compares above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn is_at_least(self, nu: i64) -> bool {
        self >= Valuation::Finite(nu)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

/// A prime power `p^nu` with `nu >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimePower {
    pub p: u64,
    pub nu: u32,
}

impl PrimePower {
    pub fn new(p: u64, nu: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Usage(format!("{p} is not a prime")));
        }
        if nu == 0 {
            return Err(Error::Usage("exponent nu must be at least 1".into()));
        }
        Ok(PrimePower { p, nu })
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.nu)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors of `n >= 1`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn bernoulli_table() -> &'static Mutex<Vec<Rational>> {
    static TABLE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![Rational::one()]))
}

/// Bernoulli number `B_n` for any `n >= 0`, with `B_1 = -1/2`.
pub(crate) fn bernoulli_any(n: u32) -> Rational {
    let mut table = bernoulli_table().lock().expect("bernoulli table poisoned");
    while table.len() <= n as usize {
        let m = table.len() as u64;
        // sum_{j<m} C(m+1, j) B_j + (m+1) B_m = 0
        let mut acc = Rational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += Rational::from_integer(binomial(m + 1, j as u64)) * b;
        }
        let bm = -acc / Rational::from_integer(BigInt::from(m + 1));
        table.push(bm);
    }
    table[n as usize].clone()
}

/// Bernoulli number `B_n` for even `n >= 0` (and `n = 1`).
pub fn bernoulli(n: u32) -> Result<Rational> {
    if n > 1 && n % 2 == 1 {
        return Err(Error::Usage(format!("bernoulli({n}): odd index above 1")));
    }
    Ok(bernoulli_any(n))
}

/// Bernoulli polynomial `B_n(x) = sum_j C(n, j) B_j x^(n-j)`.
pub fn bernoulli_polynomial(n: u32, x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for j in 0..=n {
        let term = Rational::from_integer(binomial(n as u64, j as u64))
            * bernoulli_any(j)
            * pow_rational(x, n - j);
        acc += term;
    }
    acc
}

fn pow_rational(x: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

fn int_valuation(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Exact p-adic valuation.
pub fn p_valuation(x: &Rational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    Valuation::Finite(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
}

/// Image of a p-integral rational in `F_p`.
pub fn reduce_mod_p(x: &Rational, p: u64) -> Result<u64> {
    let pb = BigInt::from(p);
    let den = x.denom().mod_floor(&pb);
    if den.is_zero() {
        return Err(Error::NonIntegral { index: format!("{x}"), p });
    }
    let num = x.numer().mod_floor(&pb).to_u64().expect("residue");
    let den = den.to_u64().expect("residue");
    let inv = mod_pow(den, p - 2, p);
    Ok(num * inv % p)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// `floor(sqrt(n))`, and 0 for negative `n`.
pub fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        0
    } else {
        num_integer::Roots::sqrt(&n)
    }
}
