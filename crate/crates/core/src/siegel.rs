//! Truncated Fourier expansions of degree-2 Siegel modular forms.
//!
//! An expansion of precision `B` and scale `s` stores every coefficient
//! `a(m, r, n)` with `0 <= m, n <= sB` and `4mn - r^2 >= 0`; the indices are
//! the true half-integral indices multiplied by `s`. Both signs of `r` are
//! stored explicitly, so the sign symmetries are checkable invariants.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{isqrt, p_valuation, reduce_mod_p, Rational, Valuation};
use crate::error::{Error, Result};
use crate::qexp1::DiagSeries;
use crate::ring::{rat, rat_int, Numeric, PrimeField, Ring};

/// A Fourier index `(m, r, n)`, in scaled units.
pub type Index = (i64, i64, i64);

/// `(m, n, r)`-lexicographic comparison: the monomial order on `q1^m q12^r q2^n`.
pub fn index_order(a: &Index, b: &Index) -> Ordering {
    (a.0, a.2, a.1).cmp(&(b.0, b.2, b.1))
}

/// Dense layout of the index box `0 <= m, n <= bound`, `r^2 <= 4mn`.
#[derive(Debug, PartialEq, Eq)]
struct BoxLayout {
    bound: usize,
    /// Start of block `(m, n)`, at position `m * (bound + 1) + n`; one extra
    /// entry holds the total length.
    offsets: Vec<usize>,
    rmax: Vec<i64>,
}

impl BoxLayout {
    fn new(bound: usize) -> Self {
        let side = bound + 1;
        let mut offsets = Vec::with_capacity(side * side + 1);
        let mut rmax = Vec::with_capacity(side * side);
        let mut pos = 0;
        for m in 0..side {
            for n in 0..side {
                offsets.push(pos);
                let rm = isqrt(4 * (m * n) as i64);
                rmax.push(rm);
                pos += (2 * rm + 1) as usize;
            }
        }
        offsets.push(pos);
        BoxLayout { bound, offsets, rmax }
    }

    fn len(&self) -> usize {
        *self.offsets.last().expect("nonempty")
    }

    #[inline]
    fn block(&self, m: usize, n: usize) -> (usize, i64) {
        let b = m * (self.bound + 1) + n;
        (self.offsets[b], self.rmax[b])
    }

    fn position(&self, m: i64, r: i64, n: i64) -> Option<usize> {
        if m < 0 || n < 0 || m as usize > self.bound || n as usize > self.bound {
            return None;
        }
        let (off, rm) = self.block(m as usize, n as usize);
        if r.abs() > rm {
            return None;
        }
        Some(off + (r + rm) as usize)
    }

    /// All indices in storage order: `m`, then `n`, then `r` ascending.
    fn indices(&self) -> impl Iterator<Item = Index> + '_ {
        let side = self.bound + 1;
        (0..side).flat_map(move |m| {
            (0..side).flat_map(move |n| {
                let (_, rm) = self.block(m, n);
                (-rm..=rm).map(move |r| (m as i64, r, n as i64))
            })
        })
    }
}

/// A truncated Siegel expansion over the coefficient ring `R`.
#[derive(Clone, Debug)]
pub struct SiegelExpansion<R: Ring> {
    ring: R,
    weight: i64,
    scale: u32,
    precision: u32,
    layout: Arc<BoxLayout>,
    coeffs: Vec<R::Element>,
}

impl<R: Ring> PartialEq for SiegelExpansion<R> {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.weight == other.weight
            && self.scale == other.scale
            && self.precision == other.precision
            && self.coeffs == other.coeffs
    }
}

/// Leading term of a nonzero expansion under the `(m, n, r)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingTerm<E> {
    pub m: i64,
    pub r: i64,
    pub n: i64,
    pub coeff: E,
}

/// Diagonal vanishing order of a reduced expansion, in true (unscaled) units.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum VanishingOrder {
    Finite(Rational),
    /// The reduction vanishes on the whole computed box `m, n <= B`.
    AbovePrecision(u32),
}

impl VanishingOrder {
    /// `Some(v)` when the order is determined by the computed coefficients.
    pub fn value(&self) -> Option<&Rational> {
        match self {
            VanishingOrder::Finite(v) => Some(v),
            VanishingOrder::AbovePrecision(_) => None,
        }
    }
}

impl fmt::Display for VanishingOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VanishingOrder::Finite(v) => write!(f, "{v}"),
            VanishingOrder::AbovePrecision(b) => write!(f, ">{b}"),
        }
    }
}

/// Direction of a normalized derivative `(2πi)^{-1} ∂/∂τ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaDirection {
    /// Multiplies `a(m, r, n)` by `m`.
    Tau1,
    /// Multiplies by `r`.
    Tau12,
    /// Multiplies by `n`.
    Tau2,
}

impl<R: Ring> SiegelExpansion<R> {
    pub fn from_fn(
        ring: R,
        weight: i64,
        scale: u32,
        precision: u32,
        f: impl FnMut(i64, i64, i64) -> R::Element,
    ) -> Self {
        let layout = Arc::new(BoxLayout::new((scale * precision) as usize));
        let mut f = f;
        let coeffs = layout.indices().map(|(m, r, n)| f(m, r, n)).collect();
        SiegelExpansion { ring, weight, scale, precision, layout, coeffs }
    }

    pub fn zero(ring: R, weight: i64, scale: u32, precision: u32) -> Self {
        let z = ring.zero();
        Self::from_fn(ring, weight, scale, precision, |_, _, _| z.clone())
    }

    /// The constant expansion 1 (weight 0).
    pub fn one(ring: R, scale: u32, precision: u32) -> Self {
        let (z, o) = (ring.zero(), ring.one());
        Self::from_fn(ring, 0, scale, precision, |m, _, n| {
            if m == 0 && n == 0 {
                o.clone()
            } else {
                z.clone()
            }
        })
    }

    /// Builds an expansion from sparse entries; absent indices are zero.
    pub fn from_entries(
        ring: R,
        weight: i64,
        scale: u32,
        precision: u32,
        entries: impl IntoIterator<Item = (Index, R::Element)>,
    ) -> Result<Self> {
        let mut out = Self::zero(ring, weight, scale, precision);
        for ((m, r, n), c) in entries {
            let pos = out
                .layout
                .position(m, r, n)
                .ok_or_else(|| Error::Precision(format!("index ({m}, {r}, {n}) outside the box")))?;
            out.coeffs[pos] = c;
        }
        Ok(out)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn with_weight(mut self, weight: i64) -> Self {
        self.weight = weight;
        self
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Largest stored scaled index, `s * B`.
    pub fn bound(&self) -> i64 {
        self.layout.bound as i64
    }

    /// `a(m, r, n)`; zero for indices with `4mn - r^2 < 0`.
    ///
    /// # Panics
    /// If `m` or `n` lies outside the computed box.
    pub fn coeff(&self, m: i64, r: i64, n: i64) -> R::Element {
        self.get(m, r, n).unwrap_or_else(|| {
            assert!(
                m >= 0 && n >= 0 && m <= self.bound() && n <= self.bound(),
                "index ({m}, {r}, {n}) outside precision box {}",
                self.bound()
            );
            self.ring.zero()
        })
    }

    /// `a(m, r, n)` when the index is stored.
    pub fn get(&self, m: i64, r: i64, n: i64) -> Option<R::Element> {
        self.layout.position(m, r, n).map(|p| self.coeffs[p].clone())
    }

    /// All stored entries in `(m, n, r)` order.
    pub fn entries(&self) -> impl Iterator<Item = (Index, &R::Element)> {
        self.layout.indices().zip(self.coeffs.iter())
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (Index, &R::Element)> {
        self.entries().filter(|(_, c)| !self.ring.is_zero(c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    pub fn truncate(&self, precision: u32) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::Precision(format!(
                "requested precision {precision} exceeds available {}",
                self.precision
            )));
        }
        if precision == self.precision {
            return Ok(self.clone());
        }
        let layout = Arc::new(BoxLayout::new((self.scale * precision) as usize));
        let coeffs = layout
            .indices()
            .map(|(m, r, n)| self.coeffs[self.layout.position(m, r, n).expect("sub-box")].clone())
            .collect();
        Ok(SiegelExpansion { layout, coeffs, precision, ..self.clone() })
    }

    fn common_shape(&self, other: &Self) -> Result<(u32, Self, Self)> {
        if self.scale != other.scale {
            return Err(Error::ScaleMismatch(self.scale, other.scale));
        }
        let p = self.precision.min(other.precision);
        Ok((p, self.truncate(p)?, other.truncate(p)?))
    }

    /// Coefficientwise map into another ring.
    pub fn try_map<S: Ring>(
        &self,
        ring: S,
        mut f: impl FnMut(Index, &R::Element) -> Result<S::Element>,
    ) -> Result<SiegelExpansion<S>> {
        let coeffs = self
            .layout
            .indices()
            .zip(self.coeffs.iter())
            .map(|(i, c)| f(i, c))
            .collect::<Result<_>>()?;
        Ok(SiegelExpansion {
            ring,
            weight: self.weight,
            scale: self.scale,
            precision: self.precision,
            layout: Arc::clone(&self.layout),
            coeffs,
        })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&R, &R::Element, &R::Element) -> R::Element) -> Result<Self> {
        if self.scale == other.scale && self.precision == other.precision {
            let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(&self.ring, a, b)).collect();
            return Ok(SiegelExpansion { coeffs, weight: self.weight.max(other.weight), ..self.clone() });
        }
        let (_, a, b) = self.common_shape(other)?;
        a.zip_with(&b, f)
    }

    /// Sum; the result precision is the smaller of the two. Operands may
    /// have different weights of the same parity (mod-p comparisons); the
    /// larger weight is kept.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_parity(other)?;
        self.zip_with(other, |r, a, b| r.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_parity(other)?;
        self.zip_with(other, |r, a, b| r.sub(a, b))
    }

    fn check_parity(&self, other: &Self) -> Result<()> {
        if (self.weight - other.weight) % 2 != 0 && !self.is_zero() && !other.is_zero() {
            return Err(Error::Usage(format!(
                "cannot add expansions of weights {} and {} (different parity)",
                self.weight, other.weight
            )));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.ring.neg(c)).collect();
        SiegelExpansion { coeffs, ..self.clone() }
    }

    pub fn scale_by(&self, c: &R::Element) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.ring.mul(a, c)).collect();
        SiegelExpansion { coeffs, ..self.clone() }
    }

    /// Product; indices add componentwise, so the product is exact on the
    /// box of the smaller precision.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (_, a, b) = self.common_shape(other)?;
        let layout = Arc::clone(&a.layout);
        let bound = layout.bound;
        let ring = &a.ring;
        let mut out = vec![ring.zero(); layout.len()];
        for m1 in 0..=bound {
            for n1 in 0..=bound {
                let (off1, rm1) = layout.block(m1, n1);
                for (i1, x) in a.coeffs[off1..off1 + (2 * rm1 + 1) as usize].iter().enumerate() {
                    if ring.is_zero(x) {
                        continue;
                    }
                    let r1 = i1 as i64 - rm1;
                    for m2 in 0..=bound - m1 {
                        for n2 in 0..=bound - n1 {
                            let (off2, rm2) = layout.block(m2, n2);
                            let (off3, rm3) = layout.block(m1 + m2, n1 + n2);
                            let ys = &b.coeffs[off2..off2 + (2 * rm2 + 1) as usize];
                            // r1 + r2 always lies in the target block
                            let base = (off3 as i64 + r1 + rm3 - rm2) as usize;
                            for (i2, y) in ys.iter().enumerate() {
                                if !ring.is_zero(y) {
                                    ring.add_mul_assign(&mut out[base + i2], x, y);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(SiegelExpansion {
            ring: a.ring.clone(),
            weight: a.weight + b.weight,
            scale: a.scale,
            precision: a.precision,
            layout,
            coeffs: out,
        })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.ring.clone(), self.scale, self.precision);
        let mut base = self.clone();
        let mut bits = e;
        while bits > 0 {
            if bits & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            bits >>= 1;
            if bits > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.with_weight(self.weight * e as i64))
    }

    /// Multiplies each coefficient by `m`, `r` or `n`.
    pub fn theta(&self, direction: ThetaDirection) -> Result<Self> {
        if self.scale != 1 {
            return Err(Error::Usage("theta derivatives require scale 1".into()));
        }
        let ring = &self.ring;
        let coeffs = self
            .layout
            .indices()
            .zip(&self.coeffs)
            .map(|((m, r, n), c)| {
                let f = match direction {
                    ThetaDirection::Tau1 => m,
                    ThetaDirection::Tau12 => r,
                    ThetaDirection::Tau2 => n,
                };
                ring.mul(c, &ring.from_i64(f))
            })
            .collect();
        Ok(SiegelExpansion { coeffs, weight: self.weight + 2, ..self.clone() })
    }

    /// Minimum nonzero index under the `(m, n, r)` order.
    pub fn leading_term(&self) -> Result<LeadingTerm<R::Element>> {
        // storage order is (m, n, r), so the first nonzero entry is minimal
        self.nonzero_entries()
            .next()
            .map(|((m, r, n), c)| LeadingTerm { m, r, n, coeff: c.clone() })
            .ok_or(Error::NoLeadingTerm)
    }

    /// Checks `a(m, -r, n) = (-1)^k a(m, r, n)` and `a(n, r, m) = (-1)^k a(m, r, n)`;
    /// returns the violating index pairs.
    pub fn symmetry_check(&self) -> Vec<(Index, Index)> {
        let odd = self.weight.rem_euclid(2) == 1;
        let ring = &self.ring;
        let twisted = |c: &R::Element| if odd { ring.neg(c) } else { c.clone() };
        let mut bad = Vec::new();
        for ((m, r, n), c) in self.entries() {
            let expected = twisted(c);
            if r > 0 && self.coeff(m, -r, n) != expected {
                bad.push(((m, r, n), (m, -r, n)));
            }
            if m < n && self.coeff(n, r, m) != expected {
                bad.push(((m, r, n), (n, r, m)));
            }
            if odd && (m == n || r == 0) && !ring.is_zero(c) {
                bad.push(((m, r, n), (m, r, n)));
            }
        }
        bad
    }
}

/// Expansions with rational coefficients.
pub type Expansion = SiegelExpansion<Numeric<Rational>>;
/// Expansions with integer coefficients; used for fast exact products.
pub type IntExpansion = SiegelExpansion<Numeric<BigInt>>;
/// Expansions reduced modulo a prime.
pub type ExpansionFp = SiegelExpansion<PrimeField>;

fn index_label(scale: u32, (m, r, n): Index) -> String {
    if scale == 1 {
        format!("({m}, {r}, {n})")
    } else {
        format!("({}, {}, {})", rat(m, scale as i64), rat(r, scale as i64), rat(n, scale as i64))
    }
}

impl Expansion {
    /// Coefficientwise reduction modulo `p`; fails on the first index whose
    /// coefficient is not p-integral.
    pub fn reduce(&self, p: u64) -> Result<ExpansionFp> {
        let field = PrimeField::new(p)?;
        let scale = self.scale;
        self.try_map(field, |idx, c| {
            reduce_mod_p(c, p).map_err(|_| Error::NonIntegral { index: index_label(scale, idx), p })
        })
    }

    /// The integer expansion, if every coefficient is integral.
    pub fn to_integral(&self) -> Result<IntExpansion> {
        let scale = self.scale;
        self.try_map(Numeric::new(), |idx, c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(Error::Construction {
                    name: "integral expansion".into(),
                    reason: format!("coefficient {c} at {} is not an integer", index_label(scale, idx)),
                })
            }
        })
    }

    /// Every index with negative p-adic valuation.
    pub fn non_integral_indices(&self, p: u64) -> Vec<Index> {
        self.entries()
            .filter(|(_, c)| matches!(p_valuation(c, p), Valuation::Finite(v) if v < 0))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Witt operators: order 0 gives `W(f) = Σ_r a(m, r, n)`, order 1 gives
    /// `W'(f) = ½ Σ_r r a(m, r, n)` and order 2 gives `W''(f) = ½ Σ_r r² a(m, r, n)`.
    pub fn witt(&self, order: u32) -> Result<DiagSeries> {
        if self.scale != 1 {
            return Err(Error::Usage("Witt operators require scale 1".into()));
        }
        if order > 2 {
            return Err(Error::Usage(format!("Witt operator of order {order} is not defined")));
        }
        let half = rat(1, 2);
        let p = self.precision as usize;
        let mut out = DiagSeries::new(p, self.weight, |m, n| {
            let (off, rm) = self.layout.block(m, n);
            let mut acc = Rational::zero();
            for (i, c) in self.coeffs[off..off + (2 * rm + 1) as usize].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let r = i as i64 - rm;
                match order {
                    0 => acc += c,
                    1 => acc += c * rat_int(r),
                    _ => acc += c * rat_int(r * r),
                }
            }
            if order == 0 {
                acc
            } else {
                acc * &half
            }
        });
        out.weight = self.weight + order as i64;
        Ok(out)
    }

    /// Diagonal vanishing order of the reduction modulo `p`.
    pub fn vp_diagonal(&self, p: u64) -> Result<VanishingOrder> {
        self.reduce(p)?.vp_diagonal()
    }
}

impl ExpansionFp {
    /// `min max(m, n) / s` over indices with nonzero coefficient.
    pub fn vp_diagonal(&self) -> Result<VanishingOrder> {
        let best = self.nonzero_entries().map(|((m, _, n), _)| m.max(n)).min();
        Ok(match best {
            Some(v) => VanishingOrder::Finite(rat(v, self.scale as i64)),
            None => VanishingOrder::AbovePrecision(self.precision),
        })
    }
}

impl IntExpansion {
    pub fn to_rational(&self) -> Expansion {
        self.try_map(Numeric::new(), |_, c| Ok(Rational::from_integer(c.clone()))).expect("infallible")
    }

    /// Exact division by an integer; fails if some coefficient is not divisible.
    pub fn div_exact(&self, d: &BigInt, name: &str) -> Result<Self> {
        use num_integer::Integer;
        self.try_map(Numeric::new(), |(m, r, n), c| {
            let (q, rem) = c.div_rem(d);
            if rem.is_zero() {
                Ok(q)
            } else {
                Err(Error::Construction {
                    name: name.to_string(),
                    reason: format!("coefficient at ({m}, {r}, {n}) is not divisible by {d}"),
                })
            }
        })
    }
}

impl<R: Ring> fmt::Display for SiegelExpansion<R>
where
    R::Element: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "weight {} scale {} precision {}", self.weight, self.scale, self.precision)?;
        for ((m, r, n), c) in self.nonzero_entries() {
            writeln!(f, "{m} {r} {n} {c}")?;
        }
        Ok(())
    }
}

/// Determinant of a 4x4 matrix of expansions by Laplace expansion along the
/// first two rows.
pub fn det4<R: Ring>(rows: &[[SiegelExpansion<R>; 4]; 4]) -> Result<SiegelExpansion<R>> {
    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let minor = |ra: usize, rb: usize, (i, j): (usize, usize)| -> Result<SiegelExpansion<R>> {
        rows[ra][i].mul(&rows[rb][j])?.sub(&rows[ra][j].mul(&rows[rb][i])?)
    };
    let mut acc: Option<SiegelExpansion<R>> = None;
    for &(i, j) in &PAIRS {
        let comp = PAIRS.iter().copied().find(|&(a, b)| a != i && a != j && b != i && b != j).expect("complement");
        let term = minor(0, 1, (i, j))?.mul(&minor(2, 3, comp)?)?;
        // sign (-1)^{(0+1)+(i+j)}
        let term = if (1 + i + j) % 2 == 0 { term } else { term.neg() };
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.expect("six terms"))
}
