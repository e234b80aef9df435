//! The constructible generators `X4, X6, X10, X12, Y12, X16, X35`, their
//! pinned normalizations, an on-disk cache, and monomials in them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::format::{read_expansion, save_expansion};
use crate::jacobi::{jacobi_eisenstein, maass_lift, phi10, phi12, LiftMode};
use crate::qexp1::{diag_builder, DiagName, DiagSeries};
use crate::ring::{rat, Numeric, Ring};
use crate::siegel::{det4, Expansion, IntExpansion, ThetaDirection};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "SIEGEL2_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorName {
    X4,
    X6,
    X10,
    X12,
    Y12,
    X16,
    X35,
}

impl GeneratorName {
    pub const ALL: [GeneratorName; 7] = [
        GeneratorName::X4,
        GeneratorName::X6,
        GeneratorName::X10,
        GeneratorName::X12,
        GeneratorName::Y12,
        GeneratorName::X16,
        GeneratorName::X35,
    ];

    pub fn weight(self) -> i64 {
        match self {
            GeneratorName::X4 => 4,
            GeneratorName::X6 => 6,
            GeneratorName::X10 => 10,
            GeneratorName::X12 | GeneratorName::Y12 => 12,
            GeneratorName::X16 => 16,
            GeneratorName::X35 => 35,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorName::X4 => "X4",
            GeneratorName::X6 => "X6",
            GeneratorName::X10 => "X10",
            GeneratorName::X12 => "X12",
            GeneratorName::Y12 => "Y12",
            GeneratorName::X16 => "X16",
            GeneratorName::X35 => "X35",
        }
    }

    /// Expected leading index.
    pub fn leading_index(self) -> (i64, i64, i64) {
        match self {
            GeneratorName::X4 | GeneratorName::X6 => (0, 0, 0),
            GeneratorName::X10 | GeneratorName::X12 => (1, -1, 1),
            GeneratorName::Y12 => (0, 0, 1),
            GeneratorName::X16 => (1, 0, 1),
            GeneratorName::X35 => (2, -1, 3),
        }
    }
}

impl fmt::Display for GeneratorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GeneratorName::ALL
            .into_iter()
            .find(|g| g.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown generator {s:?}")))
    }
}

/// A monomial in the generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialSpec {
    pub exponents: BTreeMap<GeneratorName, u32>,
}

impl MonomialSpec {
    pub fn new(exponents: impl IntoIterator<Item = (GeneratorName, u32)>) -> Self {
        let mut out = MonomialSpec::default();
        for (g, e) in exponents {
            if e > 0 {
                *out.exponents.entry(g).or_insert(0) += e;
            }
        }
        out
    }

    pub fn single(g: GeneratorName) -> Self {
        Self::new([(g, 1)])
    }

    pub fn weight(&self) -> i64 {
        self.exponents.iter().map(|(g, e)| g.weight() * *e as i64).sum()
    }

    pub fn exponent(&self, g: GeneratorName) -> u32 {
        self.exponents.get(&g).copied().unwrap_or(0)
    }

    pub fn times(&self, other: &MonomialSpec) -> MonomialSpec {
        Self::new(self.exponents.iter().chain(&other.exponents).map(|(g, e)| (*g, *e)))
    }
}

impl fmt::Display for MonomialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|(g, e)| if *e == 1 { g.to_string() } else { format!("{g}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

impl FromStr for MonomialSpec {
    type Err = Error;
    /// Parses `1` or products such as `X4^2*X10`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(MonomialSpec::default());
        }
        let mut terms = Vec::new();
        for factor in s.split('*') {
            let (g, e) = match factor.trim().split_once('^') {
                Some((g, e)) => (g, e.parse().map_err(|_| Error::Usage(format!("bad exponent in {factor:?}")))?),
                None => (factor.trim(), 1),
            };
            terms.push((g.parse()?, e));
        }
        Ok(MonomialSpec::new(terms))
    }
}

fn pin_failed(name: GeneratorName, reason: impl Into<String>) -> Error {
    Error::Construction { name: name.to_string(), reason: reason.into() }
}

fn diag_equal(name: GeneratorName, label: &str, got: &DiagSeries, expected: &DiagSeries) -> Result<()> {
    let diff = got.sub(expected);
    let first = diff.nonzero_entries().next().map(|(m, n, c)| format!("differs by {c} at ({m}, {n})"));
    match first {
        None => Ok(()),
        Some(msg) => Err(pin_failed(name, format!("pin {label}: {msg}"))),
    }
}

/// Checks the declared invariants of a generator: integrality, the sign
/// symmetries, its Witt images and its leading term.
pub fn pin(name: GeneratorName, f: &Expansion) -> Result<()> {
    if f.weight() != name.weight() {
        return Err(pin_failed(name, format!("weight {} (expected {})", f.weight(), name.weight())));
    }
    if let Some(c) = f.entries().find(|(_, c)| !c.is_integer()) {
        let (m, r, n) = c.0;
        return Err(pin_failed(name, format!("pin integrality: coefficient {} at ({m}, {r}, {n})", c.1)));
    }
    if let Some((a, b)) = f.symmetry_check().first() {
        return Err(pin_failed(name, format!("pin symmetry: {a:?} vs {b:?}")));
    }
    let p = f.precision() as usize;
    let d = |n| diag_builder(n, p);
    use GeneratorName::*;
    match name {
        X4 => diag_equal(name, "W = x4", &f.witt(0)?, &d(DiagName::X4))?,
        X6 => diag_equal(name, "W = x6", &f.witt(0)?, &d(DiagName::X6))?,
        X10 => {
            diag_equal(name, "W = 0", &f.witt(0)?, &DiagSeries::zero(p, 10))?;
            diag_equal(name, "W'' = x12", &f.witt(2)?, &d(DiagName::X12))?;
        }
        X12 => {
            diag_equal(name, "W = 12 x12", &f.witt(0)?, &d(DiagName::X12).scale(&rat(12, 1)))?;
            diag_equal(name, "W'' = x2 x12", &f.witt(2)?, &d(DiagName::X2).mul(&d(DiagName::X12)))?;
        }
        Y12 => diag_equal(name, "W = y12", &f.witt(0)?, &d(DiagName::Y12))?,
        X16 => diag_equal(name, "W = x4 x12", &f.witt(0)?, &d(DiagName::X4).mul(&d(DiagName::X12)))?,
        X35 => diag_equal(name, "W' = alpha36", &f.witt(1)?, &d(DiagName::Alpha36))?,
    }
    let (m, r, n) = name.leading_index();
    // the leading term needs the box to reach it
    if m.max(n) <= f.precision() as i64 {
        let lt = f.leading_term()?;
        if (lt.m, lt.r, lt.n) != (m, r, n) || lt.coeff != rat(1, 1) {
            return Err(pin_failed(
                name,
                format!("pin leading term: got {} at ({}, {}, {})", lt.coeff, lt.m, lt.r, lt.n),
            ));
        }
    }
    Ok(())
}

fn lift(name: GeneratorName, precision: u32) -> Result<IntExpansion> {
    let dmax = 4 * (precision as u64).pow(2);
    let f = match name {
        GeneratorName::X4 => maass_lift(&jacobi_eisenstein(4, dmax)?, precision, LiftMode::Eisenstein)?,
        GeneratorName::X6 => maass_lift(&jacobi_eisenstein(6, dmax)?, precision, LiftMode::Eisenstein)?,
        GeneratorName::X10 => maass_lift(&phi10(dmax)?, precision, LiftMode::Cusp)?,
        GeneratorName::X12 => maass_lift(&phi12(dmax)?, precision, LiftMode::Cusp)?,
        _ => unreachable!("not a lift"),
    };
    f.to_integral().map_err(|e| pin_failed(name, format!("pin integrality: {e}")))
}

/// The 4x4 Wronskian of `X4, X6, X10, X12`, normalized at `(2, -1, 3)`.
pub fn wronskian35(fs: [&IntExpansion; 4]) -> Result<IntExpansion> {
    let weights = fs.map(|f| f.weight());
    if weights != [4, 6, 10, 12] {
        return Err(Error::Usage(format!("wronskian35 expects weights (4, 6, 10, 12), got {weights:?}")));
    }
    let ring = Numeric::<BigInt>::new();
    let row = |g: &dyn Fn(&IntExpansion) -> Result<IntExpansion>| -> Result<[IntExpansion; 4]> {
        let v = fs.iter().map(|f| g(f)).collect::<Result<Vec<_>>>()?;
        Ok(v.try_into().expect("four columns"))
    };
    // the τ12 row omits its factor 1/2; the normalization absorbs it
    let rows = [
        row(&|f| Ok(f.scale_by(&ring.from_i64(f.weight()))))?,
        row(&|f| f.theta(ThetaDirection::Tau1))?,
        row(&|f| f.theta(ThetaDirection::Tau12))?,
        row(&|f| f.theta(ThetaDirection::Tau2))?,
    ];
    let det = det4(&rows)?;
    if det.precision() < 3 {
        return Err(Error::Precision("wronskian35 needs precision at least 3".into()));
    }
    let c = det.coeff(2, -1, 3);
    if ring.is_zero(&c) {
        return Err(Error::Construction {
            name: "X35".into(),
            reason: "coefficient at (2, -1, 3) of the determinant vanishes".into(),
        });
    }
    Ok(det.div_exact(&c, "X35")?.with_weight(35))
}

/// Named, cached generator expansions.
///
/// Requests at precision `B` are served from any cached entry of precision
/// at least `B` by truncation.
#[derive(Debug, Default)]
pub struct GeneratorRegistry {
    cache_dir: Option<PathBuf>,
    entries: Mutex<HashMap<GeneratorName, Arc<IntExpansion>>>,
}

impl GeneratorRegistry {
    /// A registry without disk persistence.
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn with_cache_dir(dir: impl Into<PathBuf>) -> Self {
        GeneratorRegistry { cache_dir: Some(dir.into()), ..Self::default() }
    }

    /// Uses `$SIEGEL2_CACHE` when set, otherwise no disk cache.
    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(d) if !d.is_empty() => Self::with_cache_dir(d),
            _ => Self::in_memory(),
        }
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.cache_dir.as_deref()
    }

    pub fn cache_path(&self, name: GeneratorName, precision: u32) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(format!("{name}.B{precision}.qexp")))
    }

    /// The generator with rational coefficients.
    pub fn get(&self, name: GeneratorName, precision: u32) -> Result<Expansion> {
        Ok(self.get_int(name, precision)?.to_rational())
    }

    /// The generator with integer coefficients.
    pub fn get_int(&self, name: GeneratorName, precision: u32) -> Result<IntExpansion> {
        let cached = self.entries.lock().expect("registry poisoned").get(&name).cloned();
        if let Some(f) = cached {
            if f.precision() >= precision {
                return f.truncate(precision);
            }
        }
        let f = match self.load(name, precision)? {
            Some(f) => f,
            None => {
                let f = self.build(name, precision)?;
                self.store(name, &f)?;
                f
            }
        };
        let mut entries = self.entries.lock().expect("registry poisoned");
        let keep = entries.get(&name).is_none_or(|g| g.precision() < f.precision());
        if keep {
            entries.insert(name, Arc::new(f.clone()));
        }
        f.truncate(precision)
    }

    fn load(&self, name: GeneratorName, precision: u32) -> Result<Option<IntExpansion>> {
        let Some(dir) = &self.cache_dir else { return Ok(None) };
        let Ok(listing) = fs::read_dir(dir) else { return Ok(None) };
        let prefix = format!("{name}.B");
        let mut best: Option<(u32, PathBuf)> = None;
        for entry in listing.flatten() {
            let file = entry.file_name();
            let Some(s) = file.to_str() else { continue };
            let Some(b) = s.strip_prefix(&prefix).and_then(|r| r.strip_suffix(".qexp")) else { continue };
            let Ok(b) = b.parse::<u32>() else { continue };
            if b >= precision && best.as_ref().is_none_or(|(bb, _)| b < *bb) {
                best = Some((b, entry.path()));
            }
        }
        let Some((_, path)) = best else { return Ok(None) };
        let (stored, f) = read_expansion(&path)?;
        if stored != name.as_str() {
            return Err(Error::Parse { path, line: 2, msg: format!("cache file holds {stored}, expected {name}") });
        }
        pin(name, &f)?;
        Ok(Some(f.to_integral()?))
    }

    fn store(&self, name: GeneratorName, f: &IntExpansion) -> Result<()> {
        match self.cache_path(name, f.precision()) {
            Some(path) => save_expansion(&path, name.as_str(), &f.to_rational()),
            None => Ok(()),
        }
    }

    /// Builds a generator from scratch and runs its pins.
    pub fn build(&self, name: GeneratorName, precision: u32) -> Result<IntExpansion> {
        use GeneratorName::*;
        let f = match name {
            X4 | X6 | X10 | X12 => lift(name, precision)?,
            Y12 => {
                let x4 = self.get_int(X4, precision)?;
                let x6 = self.get_int(X6, precision)?;
                let x12 = self.get_int(X12, precision)?;
                let ring = Numeric::<BigInt>::new();
                x4.pow(3)?
                    .sub(&x6.pow(2)?)?
                    .div_exact(&BigInt::from(1728), "Y12")?
                    .add(&x12.scale_by(&ring.from_i64(144)))?
            }
            X16 => {
                let x4 = self.get_int(X4, precision)?;
                let x6 = self.get_int(X6, precision)?;
                let x10 = self.get_int(X10, precision)?;
                let x12 = self.get_int(X12, precision)?;
                x4.mul(&x12)?.sub(&x6.mul(&x10)?)?.div_exact(&BigInt::from(12), "X16")?
            }
            X35 => {
                let g = [X4, X6, X10, X12].map(|g| self.get_int(g, precision));
                let [a, b, c, d] = g;
                wronskian35([&a?, &b?, &c?, &d?])?
            }
        };
        pin(name, &f.to_rational())?;
        Ok(f)
    }

    /// Evaluates a monomial with integer coefficients.
    pub fn monomial_int(&self, spec: &MonomialSpec, precision: u32) -> Result<IntExpansion> {
        let mut acc = IntExpansion::one(Numeric::new(), 1, precision);
        for (g, e) in &spec.exponents {
            acc = acc.mul(&self.get_int(*g, precision)?.pow(*e)?)?;
        }
        Ok(acc.with_weight(spec.weight()))
    }

    pub fn monomial_eval(&self, spec: &MonomialSpec, precision: u32) -> Result<Expansion> {
        Ok(self.monomial_int(spec, precision)?.to_rational())
    }
}
