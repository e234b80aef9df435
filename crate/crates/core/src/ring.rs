//! Coefficient rings for the series and matrix types.
//!
//! Series and matrices carry a ring value next to their coefficients so that
//! rings with runtime parameters (the prime field `F_p`) can be used through
//! the same generic code paths as `Z` and `Q`.

use std::fmt::Debug;
use std::marker::PhantomData;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// A commutative ring with an explicit context value.
pub trait Ring: Clone + Debug + PartialEq + Send + Sync {
    type Element: Clone + Debug + PartialEq + Send + Sync;

    fn zero(&self) -> Self::Element;
    fn one(&self) -> Self::Element;
    fn is_zero(&self, a: &Self::Element) -> bool;
    fn add(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn sub(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn neg(&self, a: &Self::Element) -> Self::Element;
    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn from_i64(&self, n: i64) -> Self::Element;

    /// `acc += a * b`
    fn add_mul_assign(&self, acc: &mut Self::Element, a: &Self::Element, b: &Self::Element) {
        let prod = self.mul(a, b);
        *acc = self.add(acc, &prod);
    }

    fn pow(&self, a: &Self::Element, mut e: u32) -> Self::Element {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// A ring in which every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self, a: &Self::Element) -> Option<Self::Element>;
}

/// The ring structure of any `num_traits::Num` type, e.g. `BigInt` or `BigRational`.
pub struct Numeric<T>(PhantomData<fn() -> T>);

impl<T> Numeric<T> {
    pub const fn new() -> Self {
        Numeric(PhantomData)
    }
}

impl<T> Default for Numeric<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> Clone for Numeric<T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for Numeric<T> {}

impl<T> PartialEq for Numeric<T> {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl<T> Debug for Numeric<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Numeric<{}>", std::any::type_name::<T>())
    }
}

impl<T> Ring for Numeric<T>
where
    T: Num + FromPrimitive + Clone + Debug + Send + Sync,
    for<'a> &'a T: std::ops::Add<&'a T, Output = T>
        + std::ops::Sub<&'a T, Output = T>
        + std::ops::Mul<&'a T, Output = T>,
{
    type Element = T;

    fn zero(&self) -> T {
        T::zero()
    }
    fn one(&self) -> T {
        T::one()
    }
    fn is_zero(&self, a: &T) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &T, b: &T) -> T {
        a + b
    }
    fn sub(&self, a: &T, b: &T) -> T {
        a - b
    }
    fn neg(&self, a: &T) -> T {
        T::zero() - a.clone()
    }
    fn mul(&self, a: &T, b: &T) -> T {
        a * b
    }
    fn from_i64(&self, n: i64) -> T {
        T::from_i64(n).expect("i64 embeds in every numeric ring")
    }
}

impl Field for Numeric<BigRational> {
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
}

/// The prime field `F_p`; elements are canonical residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Usage(format!("{p} is not a prime")));
        }
        if p >= 1 << 31 {
            return Err(Error::Usage(format!("prime {p} is too large for the residue field")));
        }
        Ok(PrimeField { p })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn from_bigint(&self, n: &BigInt) -> u64 {
        let r = n % BigInt::from(self.p);
        let r = if r.is_negative() { r + BigInt::from(self.p) } else { r };
        r.to_u64().expect("residue fits in u64")
    }
}

impl Ring for PrimeField {
    type Element = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn add_mul_assign(&self, acc: &mut u64, a: &u64, b: &u64) {
        *acc = (*acc + a * b) % self.p;
    }
}

impl Field for PrimeField {
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        Some(self.pow(a, (self.p - 2) as u32))
    }
}

/// Convenience: the rational number `n/d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Convenience: the rational number with integer value `n`.
pub fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
        }
        assert_eq!(f.inv(&0), None);
    }

    #[test]
    fn prime_field_rejects_composite() {
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1).is_err());
    }

    #[test]
    fn f2_one_and_negation() {
        let f = PrimeField::new(2).unwrap();
        assert_eq!(f.one(), 1);
        assert_eq!(f.neg(&1), 1);
        assert_eq!(f.from_i64(-3), 1);
    }

    #[test]
    fn numeric_pow() {
        let z = Numeric::<BigInt>::new();
        assert_eq!(z.pow(&BigInt::from(3), 5), BigInt::from(243));
        let q = Numeric::<BigRational>::new();
        assert_eq!(q.pow(&rat(1, 2), 3), rat(1, 8));
    }
}
