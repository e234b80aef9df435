//! Sturm bounds, congruence checks, rank certificates, sharpness witnesses
//! and the identity suites.
//!
//! Suite reports are plain text, one check per line
//! (`PASS|FAIL|SKIP <check-id> <detail>`), closed by
//! `RESULT <suite> <passed>/<checked>` where skipped lines are not counted.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{p_valuation, reduce_mod_p, PrimePower, Rational, Valuation};
use crate::error::{Error, Result};
use crate::generators::{GeneratorName, GeneratorRegistry, MonomialSpec};
use crate::linalg::{row_reduce, CoeffMatrix};
use crate::qexp1::{delta1, diag_builder, diag_tensor, eisenstein1, DiagName, DiagSeries, QSeries1};
use crate::ring::{rat, rat_int, PrimeField};
use crate::siegel::{Expansion, ExpansionFp, Index, LeadingTerm, VanishingOrder};

use GeneratorName::*;

/// The bound `b_{ki}`: `[ki/10]` for even `ki`, `[(ki - 5)/10]` for odd `ki`.
pub fn sturm_bound(k: i64, index: i64) -> i64 {
    let w = k * index;
    if w % 2 == 0 {
        w.div_euclid(10)
    } else {
        (w - 5).div_euclid(10)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// No violation inside the computed box, but the box does not reach the bound.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub index: Index,
    pub valuation: Valuation,
}

/// Outcome of a vanishing or congruence check.
#[derive(Clone, Debug, PartialEq)]
pub struct SturmReport {
    pub bound_used: Rational,
    pub prime_power: PrimePower,
    pub scale: u32,
    pub verdict: Verdict,
    /// Indices (scaled units) whose valuation is below `nu`.
    pub violations: Vec<Violation>,
    /// Set when the expansion precision does not cover `bound_used`.
    pub precision_note: Option<String>,
    /// Sturm bound for the larger weight, for congruence checks.
    pub sturm_bound: Option<i64>,
}

impl SturmReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// True when the checked box reaches the Sturm bound, so a pass is a
    /// congruence of forms rather than of truncations.
    pub fn theorem_backed(&self) -> bool {
        match self.sturm_bound {
            Some(b) => self.passed() && self.bound_used >= rat_int(b),
            None => false,
        }
    }
}

/// Violations listed in the text rendering; the rest are counted.
pub const VIOLATIONS_SHOWN: usize = 20;

impl fmt::Display for SturmReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict {}", self.verdict)?;
        writeln!(f, "modulus {}", self.prime_power)?;
        writeln!(f, "bound {}", self.bound_used)?;
        if let Some(b) = self.sturm_bound {
            writeln!(f, "sturm-bound {b}")?;
            writeln!(f, "theorem-backed {}", self.theorem_backed())?;
        }
        writeln!(f, "violations {}", self.violations.len())?;
        for v in self.violations.iter().take(VIOLATIONS_SHOWN) {
            let (m, r, n) = v.index;
            if self.scale == 1 {
                writeln!(f, "  ({m}, {r}, {n}) valuation {}", v.valuation)?;
            } else {
                let s = self.scale as i64;
                writeln!(f, "  ({}, {}, {}) valuation {}", rat(m, s), rat(r, s), rat(n, s), v.valuation)?;
            }
        }
        if self.violations.len() > VIOLATIONS_SHOWN {
            writeln!(f, "  ... {} more", self.violations.len() - VIOLATIONS_SHOWN)?;
        }
        if let Some(note) = &self.precision_note {
            writeln!(f, "note {note}")?;
        }
        Ok(())
    }
}

fn require_integral(f: &Expansion, p: u64, box_bound: i64) -> Result<()> {
    for ((m, r, n), c) in f.entries() {
        if m <= box_bound && n <= box_bound && !p_valuation(c, p).is_at_least(0) {
            return Err(Error::NonIntegral { index: format!("({m}, {r}, {n})"), p });
        }
    }
    Ok(())
}

/// Checks `a(m, r, n) ≡ 0 mod p^nu` for all `m, n <= bound` (true units).
pub fn check_vanishing(f: &Expansion, pp: PrimePower, bound: &Rational) -> Result<SturmReport> {
    let s = f.scale() as i64;
    let scaled = (bound * rat_int(s)).floor().to_integer();
    let box_bound: i64 = if scaled > BigInt::from(f.bound()) {
        f.bound()
    } else {
        scaled.try_into().unwrap_or(-1)
    };
    require_integral(f, pp.p, box_bound)?;
    let violations: Vec<Violation> = f
        .entries()
        .filter(|((m, _, n), _)| *m <= box_bound && *n <= box_bound)
        .filter_map(|(index, c)| {
            let v = p_valuation(c, pp.p);
            (!v.is_at_least(pp.nu as i64)).then_some(Violation { index, valuation: v })
        })
        .collect();
    let covered = *bound <= rat_int(f.precision());
    let precision_note = (!covered).then(|| {
        format!("bound {bound} exceeds precision {}; only m, n <= {} were checked", f.precision(), f.precision())
    });
    let verdict = if !violations.is_empty() {
        Verdict::Fail
    } else if covered {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(SturmReport {
        bound_used: bound.clone(),
        prime_power: pp,
        scale: f.scale(),
        verdict,
        violations,
        precision_note,
        sturm_bound: None,
    })
}

/// Checks `f ≡ g mod p^nu` on the full common box. Weights may differ.
pub fn check_congruence(f: &Expansion, g: &Expansion, pp: PrimePower) -> Result<SturmReport> {
    if f.scale() != g.scale() {
        return Err(Error::ScaleMismatch(f.scale(), g.scale()));
    }
    let precision = f.precision().min(g.precision());
    let f = f.truncate(precision)?;
    let g = g.truncate(precision)?;
    require_integral(&f, pp.p, f.bound())?;
    require_integral(&g, pp.p, g.bound())?;
    let weight = f.weight().max(g.weight());
    let diff = f.with_weight(weight).sub(&g.with_weight(weight))?;
    let mut report = check_vanishing(&diff, pp, &rat_int(precision))?;
    report.sturm_bound = Some(sturm_bound(weight, 1));
    Ok(report)
}

/// All monomials of weight `k` over `genset`, largest exponents of earlier
/// generators first. Odd weights give `X35` times the even monomials of
/// weight `k - 35` over the rest of the set.
pub fn weight_monomials(k: i64, genset: &[GeneratorName]) -> Vec<MonomialSpec> {
    let even: Vec<GeneratorName> = genset.iter().copied().filter(|g| *g != X35).collect();
    if k < 0 {
        return Vec::new();
    }
    if k % 2 == 1 {
        if !genset.contains(&X35) || k < 35 {
            return Vec::new();
        }
        let x35 = MonomialSpec::single(X35);
        return weight_monomials(k - 35, &even).into_iter().map(|m| m.times(&x35)).collect();
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    enumerate(k, &even, &mut current, &mut out);
    out
}

fn enumerate(k: i64, gens: &[GeneratorName], current: &mut Vec<(GeneratorName, u32)>, out: &mut Vec<MonomialSpec>) {
    match gens.split_first() {
        None => {
            if k == 0 {
                out.push(MonomialSpec::new(current.iter().copied()));
            }
        }
        Some((g, rest)) => {
            let w = g.weight();
            for e in (0..=k / w).rev() {
                current.push((*g, e as u32));
                enumerate(k - e * w, rest, current, out);
                current.pop();
            }
        }
    }
}

/// `dim_C M_k`, counted as monomials in `X4, X6, X10, X12` (and `X35`).
pub fn dimension(k: i64) -> usize {
    weight_monomials(k, &[X4, X6, X10, X12, X35]).len()
}

/// Generator reductions modulo `p` with memoized monomials.
pub struct ReducedForms<'a> {
    registry: &'a GeneratorRegistry,
    field: PrimeField,
    precision: u32,
    memo: HashMap<MonomialSpec, ExpansionFp>,
}

impl<'a> ReducedForms<'a> {
    pub fn new(registry: &'a GeneratorRegistry, p: u64, precision: u32) -> Result<Self> {
        Ok(ReducedForms { registry, field: PrimeField::new(p)?, precision, memo: HashMap::new() })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn generator(&mut self, g: GeneratorName) -> Result<ExpansionFp> {
        self.monomial(&MonomialSpec::single(g))
    }

    pub fn monomial(&mut self, spec: &MonomialSpec) -> Result<ExpansionFp> {
        if let Some(f) = self.memo.get(spec) {
            return Ok(f.clone());
        }
        let f = match spec.exponents.iter().next_back() {
            None => ExpansionFp::one(self.field, 1, self.precision),
            Some((&g, &e)) if e == 1 && spec.exponents.len() == 1 => {
                self.registry.get(g, self.precision)?.reduce(self.field.characteristic())?
            }
            Some((&g, _)) => {
                let mut rest = spec.clone();
                *rest.exponents.get_mut(&g).expect("present") -= 1;
                rest.exponents.retain(|_, e| *e > 0);
                let head = self.monomial(&rest)?;
                let tail = self.generator(g)?;
                head.mul(&tail)?
            }
        };
        let f = f.with_weight(spec.weight());
        self.memo.insert(spec.clone(), f.clone());
        Ok(f)
    }
}

/// Generating set used for rank certificates, if `(k, p)` is covered.
pub fn certified_genset(k: i64, p: u64) -> Option<Vec<GeneratorName>> {
    let odd = k % 2 != 0;
    if k < 0 || (odd && k > 51) {
        return None;
    }
    if p >= 5 {
        Some(if odd { vec![X4, X6, X10, X12, X35] } else { vec![X4, X6, X10, X12] })
    } else if odd {
        Some(vec![X4, X6, X10, X12, Y12, X16, X35])
    } else if k <= 16 {
        Some(vec![X4, X6, X10, X12, Y12, X16])
    } else {
        None
    }
}

/// Ranks mod `p` of all weight-`k` monomials on the box `m, n <= bound`
/// and on the full box `m, n <= B`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankCertificate {
    pub weight: i64,
    pub p: u64,
    pub precision: u32,
    pub bound: i64,
    pub monomials: Vec<MonomialSpec>,
    pub rank_truncated: usize,
    pub rank_full: usize,
    pub dimension: usize,
}

impl RankCertificate {
    /// Truncation at `bound` loses nothing that the full box sees.
    pub fn injective(&self) -> bool {
        self.rank_truncated == self.rank_full
    }
}

pub fn rank_certificate(
    registry: &GeneratorRegistry,
    k: i64,
    p: u64,
    precision: u32,
    bound: i64,
) -> Result<RankCertificate> {
    let genset = certified_genset(k, p).ok_or_else(|| {
        Error::Usage(format!("weight {k} at p = {p} is not certifiable with available generators"))
    })?;
    if bound > precision as i64 {
        return Err(Error::Precision(format!("bound {bound} exceeds precision {precision}")));
    }
    let monomials = weight_monomials(k, &genset);
    let mut forms = ReducedForms::new(registry, p, precision)?;
    let reduced = monomials.iter().map(|m| forms.monomial(m)).collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = monomials.iter().map(ToString::to_string).collect();
    let field = forms.field();
    let full = CoeffMatrix::from_expansions(field, labels.clone(), &reduced, precision as i64)?;
    let trunc = CoeffMatrix::from_expansions(field, labels, &reduced, bound)?;
    Ok(RankCertificate {
        weight: k,
        p,
        precision,
        bound,
        rank_truncated: row_reduce(&field, &trunc.rows).rank,
        rank_full: row_reduce(&field, &full.rows).rank,
        dimension: dimension(k),
        monomials,
    })
}

/// Certifies that truncation at `b_k` is injective mod `p` on the span of
/// the weight-`k` monomials, at precision `B >= b_k`.
pub fn verify_truncation_rank(registry: &GeneratorRegistry, k: i64, p: u64, precision: u32) -> Result<Report> {
    let mut report = Report::new("injectivity");
    injectivity_lines(&mut report, registry, k, p, precision)?;
    Ok(report)
}

fn injectivity_lines(report: &mut Report, registry: &GeneratorRegistry, k: i64, p: u64, precision: u32) -> Result<()> {
    let id = format!("injectivity.k{k}.p{p}");
    let bk = sturm_bound(k, 1);
    if certified_genset(k, p).is_none() {
        report.skip(id, "not certifiable with available generators");
        return Ok(());
    }
    let c = rank_certificate(registry, k, p, precision.max(bk.max(0) as u32), bk)?;
    report.check(
        c.injective(),
        &id,
        format!(
            "{} monomials, rank {} on m,n <= {bk}, rank {} on m,n <= {}",
            c.monomials.len(),
            c.rank_truncated,
            c.rank_full,
            c.precision
        ),
    );
    report.check(c.rank_full == c.dimension, format!("{id}.dim"), format!("rank {} = dim M_k {}", c.rank_full, c.dimension));
    Ok(())
}

/// A form showing that the bound `b_k` cannot be lowered.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    pub weight: i64,
    pub p: u64,
    pub monomial: MonomialSpec,
    pub sturm_bound: i64,
    /// Exact vanishing of all coefficients with `m, n <= b_k - 1`.
    pub exact_zero_below: bool,
    /// The mod-p vanishing check at `b_k - 1`.
    pub vanishing: SturmReport,
    pub leading_mod_p: Option<LeadingTerm<u64>>,
    pub vp: VanishingOrder,
}

impl WitnessReport {
    pub fn certified(&self) -> bool {
        self.exact_zero_below
            && self.vanishing.passed()
            && self.vp == VanishingOrder::Finite(rat_int(self.sturm_bound))
            && self.leading_mod_p.as_ref().is_some_and(|lt| lt.m.max(lt.n) == self.sturm_bound && lt.coeff != 0)
    }
}

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "weight {} prime {}", self.weight, self.p)?;
        writeln!(f, "witness {}", self.monomial)?;
        writeln!(f, "sturm-bound {}", self.sturm_bound)?;
        writeln!(f, "exact-zero-below-bound {}", self.exact_zero_below)?;
        if let Some(lt) = &self.leading_mod_p {
            writeln!(f, "leading ({}, {}, {}) coefficient {} mod {}", lt.m, lt.r, lt.n, lt.coeff, self.p)?;
        }
        writeln!(f, "vp {}", self.vp)?;
        writeln!(f, "certified {}", self.certified())
    }
}

/// The sharpness monomial for weight `k`.
pub fn witness_monomial(k: i64) -> Result<MonomialSpec> {
    let none = || Error::Usage(format!("M_{k} is zero; no witness exists"));
    if k < 0 {
        return Err(none());
    }
    if k % 2 == 0 {
        let (b, rho) = ((k / 10) as u32, k % 10);
        return Ok(match rho {
            0 => MonomialSpec::new([(X10, b)]),
            4 => MonomialSpec::new([(X10, b), (X4, 1)]),
            6 => MonomialSpec::new([(X10, b), (X6, 1)]),
            8 => MonomialSpec::new([(X10, b), (X4, 2)]),
            _ if b == 0 => return Err(none()),
            _ => MonomialSpec::new([(X10, b - 1), (X12, 1)]),
        });
    }
    let base = |j: i64| -> MonomialSpec {
        match j {
            35 => MonomialSpec::single(X35),
            39 => MonomialSpec::new([(X4, 1), (X35, 1)]),
            41 => MonomialSpec::new([(X6, 1), (X35, 1)]),
            43 => MonomialSpec::new([(X4, 2), (X35, 1)]),
            _ => MonomialSpec::new([(X12, 1), (X35, 1)]),
        }
    };
    let j = [35, 39, 41, 43, 47].into_iter().find(|j| (k - j) % 10 == 0).expect("odd residue");
    if k < j {
        return Err(none());
    }
    Ok(base(j).times(&MonomialSpec::new([(X10, ((k - j) / 10) as u32)])))
}

pub fn sharpness_witness(registry: &GeneratorRegistry, k: i64, p: u64) -> Result<WitnessReport> {
    let pp = PrimePower::new(p, 1)?;
    let monomial = witness_monomial(k)?;
    let bk = sturm_bound(k, 1);
    let precision = bk.max(3) as u32;
    let f = registry.monomial_int(&monomial, precision)?;
    let exact_zero_below = f.nonzero_entries().all(|((m, _, n), _)| m.max(n) >= bk);
    let f = f.to_rational();
    let vanishing = check_vanishing(&f, pp, &rat_int(bk - 1))?;
    let reduced = f.reduce(p)?;
    let leading_mod_p = reduced.leading_term().ok();
    Ok(WitnessReport {
        weight: k,
        p,
        monomial,
        sturm_bound: bk,
        exact_zero_below,
        vanishing,
        leading_mod_p,
        vp: reduced.vp_diagonal()?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub status: Status,
    pub id: String,
    pub detail: String,
}

/// An itemized verification report.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: String,
    pub lines: Vec<CheckLine>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), lines: Vec::new() }
    }

    pub fn check(&mut self, ok: bool, id: impl AsRef<str>, detail: impl Into<String>) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.lines.push(CheckLine { status, id: id.as_ref().to_string(), detail: detail.into() });
    }

    pub fn skip(&mut self, id: impl AsRef<str>, detail: impl Into<String>) {
        self.lines.push(CheckLine { status: Status::Skip, id: id.as_ref().to_string(), detail: detail.into() });
    }

    pub fn pass_count(&self) -> usize {
        self.lines.iter().filter(|l| l.status == Status::Pass).count()
    }

    pub fn checked_count(&self) -> usize {
        self.lines.iter().filter(|l| l.status != Status::Skip).count()
    }

    pub fn failed(&self) -> bool {
        self.lines.iter().any(|l| l.status == Status::Fail)
    }

    /// At least one check ran and none failed.
    pub fn passed(&self) -> bool {
        !self.failed() && self.pass_count() > 0
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            let s = match l.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            writeln!(f, "{s} {} {}", l.id, l.detail)?;
        }
        writeln!(f, "RESULT {} {}/{}", self.suite, self.pass_count(), self.checked_count())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    WittImages,
    SmallPrimes,
    WittKernel12,
    Sym2Rank,
    X12Identity,
    BorcherdsStructure,
    ProductVanishing,
    Injectivity,
    Sharpness,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::WittImages,
        Suite::SmallPrimes,
        Suite::WittKernel12,
        Suite::Sym2Rank,
        Suite::X12Identity,
        Suite::BorcherdsStructure,
        Suite::ProductVanishing,
        Suite::Injectivity,
        Suite::Sharpness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::WittImages => "witt-images",
            Suite::SmallPrimes => "small-primes",
            Suite::WittKernel12 => "witt-kernel-12",
            Suite::Sym2Rank => "sym2-rank",
            Suite::X12Identity => "x12-identity",
            Suite::BorcherdsStructure => "borcherds-structure",
            Suite::ProductVanishing => "product-vanishing",
            Suite::Injectivity => "injectivity",
            Suite::Sharpness => "sharpness",
        }
    }

    /// Precision used when none is requested.
    pub fn default_precision(self) -> u32 {
        match self {
            Suite::WittImages => 8,
            Suite::X12Identity => 20,
            Suite::Sym2Rank | Suite::Injectivity | Suite::Sharpness => 5,
            _ => 6,
        }
    }

    /// Primes used when none is requested.
    pub fn default_primes(self) -> &'static [u64] {
        match self {
            Suite::WittImages | Suite::X12Identity => &[],
            Suite::SmallPrimes | Suite::WittKernel12 => &[2, 3],
            Suite::Sym2Rank | Suite::BorcherdsStructure | Suite::ProductVanishing => &[2, 3, 5],
            Suite::Injectivity | Suite::Sharpness => &[2, 3, 5, 7],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown suite {s:?}")))
    }
}

/// Runs a suite at the given prime (or its default primes) and precision.
pub fn verify_identities(
    registry: &GeneratorRegistry,
    suite: Suite,
    prime: Option<u64>,
    precision: Option<u32>,
) -> Result<Report> {
    if let Some(p) = prime {
        PrimePower::new(p, 1)?;
    }
    let b = precision.unwrap_or_else(|| suite.default_precision());
    let primes: Vec<u64> = match prime {
        Some(p) => vec![p],
        None => suite.default_primes().to_vec(),
    };
    let mut report = Report::new(suite.name());
    match suite {
        Suite::WittImages => witt_images(&mut report, registry, b)?,
        Suite::X12Identity => x12_identity(&mut report, b as usize),
        Suite::SmallPrimes => {
            for p in primes {
                small_primes(&mut report, registry, p, b)?;
            }
        }
        Suite::WittKernel12 => {
            for p in primes {
                witt_kernel_12(&mut report, registry, p, b)?;
            }
        }
        Suite::Sym2Rank => {
            for p in primes {
                for k in (4..=24).step_by(2) {
                    sym2_rank(&mut report, k, p)?;
                }
            }
        }
        Suite::BorcherdsStructure => {
            for p in primes {
                borcherds(&mut report, registry, p, b)?;
            }
        }
        Suite::ProductVanishing => {
            for p in primes {
                product_vanishing(&mut report, registry, p, b)?;
            }
        }
        Suite::Injectivity => {
            for p in primes {
                for k in certificate_weights(p) {
                    injectivity_lines(&mut report, registry, k, p, b.max(sturm_bound(k, 1) as u32))?;
                }
            }
        }
        Suite::Sharpness => {
            for p in primes {
                for k in certificate_weights(p) {
                    sharpness_lines(&mut report, registry, k, p)?;
                }
            }
        }
    }
    Ok(report)
}

/// Weights covered by the rank certificates at `p`.
pub fn certificate_weights(p: u64) -> Vec<i64> {
    let even_max = if p >= 5 { 40 } else { 16 };
    let mut ks: Vec<i64> = (4..=even_max).step_by(2).collect();
    ks.extend([35, 39, 41, 43, 45, 47, 49, 51]);
    ks
}

/// Every suite with its defaults.
pub fn verify_all(registry: &GeneratorRegistry) -> Result<Vec<Report>> {
    Suite::ALL.into_iter().map(|s| verify_identities(registry, s, None, None)).collect()
}

fn diag_check(report: &mut Report, id: &str, got: &DiagSeries, expected: &DiagSeries) {
    let diff = got.sub(expected);
    let first = diff.nonzero_entries().next().map(|(m, n, c)| format!("differs by {c} at ({m}, {n})"));
    match first {
        None => report.check(true, id, format!("exact to precision {}", diff.precision())),
        Some(msg) => report.check(false, id, msg),
    }
}

fn witt_images(report: &mut Report, registry: &GeneratorRegistry, b: u32) -> Result<()> {
    let p = b as usize;
    let d = |n| diag_builder(n, p);
    let g = |name| registry.get(name, b);
    let x12 = d(DiagName::X12);
    diag_check(report, "witt.W(X4)=x4", &g(X4)?.witt(0)?, &d(DiagName::X4));
    diag_check(report, "witt.W(X6)=x6", &g(X6)?.witt(0)?, &d(DiagName::X6));
    diag_check(report, "witt.W(X10)=0", &g(X10)?.witt(0)?, &DiagSeries::zero(p, 10));
    diag_check(report, "witt.W(X12)=12x12", &g(X12)?.witt(0)?, &x12.scale(&rat(12, 1)));
    diag_check(report, "witt.W(Y12)=y12", &g(Y12)?.witt(0)?, &d(DiagName::Y12));
    diag_check(report, "witt.W(X16)=x4x12", &g(X16)?.witt(0)?, &d(DiagName::X4).mul(&x12));
    diag_check(report, "witt.W''(X10)=x12", &g(X10)?.witt(2)?, &x12);
    diag_check(report, "witt.W''(X12)=x2x12", &g(X12)?.witt(2)?, &d(DiagName::X2).mul(&x12));
    diag_check(report, "witt.W'(X35)=alpha36", &g(X35)?.witt(1)?, &d(DiagName::Alpha36));
    for name in [X4, X6, X10, X12, Y12, X16] {
        diag_check(report, &format!("witt.W'({name})=0"), &g(name)?.witt(1)?, &DiagSeries::zero(p, 0));
    }
    let x35 = g(X35)?;
    diag_check(report, "witt.W(X35)=0", &x35.witt(0)?, &DiagSeries::zero(p, 0));
    let row1 = x35.entries().filter(|((m, _, _), c)| *m == 1 && !c.is_zero()).count();
    report.check(row1 == 0, "witt.X35.row1", format!("{row1} nonzero a(1, r, n)"));
    Ok(())
}

fn x12_identity(report: &mut Report, p: usize) {
    let x12 = diag_builder(DiagName::X12, p);
    let lhs = x12.scale(&rat(4096 * 729, 1));
    let e43 = eisenstein1(4, p).expect("weight 4").pow(3);
    let e62 = eisenstein1(6, p).expect("weight 6").pow(2);
    let cross = diag_tensor(&e43, &e62).add(&diag_tensor(&e62, &e43));
    let rhs = diag_builder(DiagName::X4, p).pow(3).add(&diag_builder(DiagName::X6, p).pow(2)).sub(&cross);
    diag_check(report, "x12-identity", &lhs, &rhs);
}

fn small_primes(report: &mut Report, registry: &GeneratorRegistry, p: u64, b: u32) -> Result<()> {
    if p != 2 && p != 3 {
        report.skip(format!("small-primes.p{p}"), "stated for p = 2, 3 only");
        return Ok(());
    }
    let pp = PrimePower::new(p, 1)?;
    let one = Expansion::one(crate::QQ::new(), 1, b);
    for (id, f, g) in [("X4=1", X4, None), ("X6=1", X6, None), ("X12=X10", X12, Some(X10))] {
        let f = registry.get(f, b)?;
        let g = match g {
            Some(g) => registry.get(g, b)?,
            None => one.clone(),
        };
        let r = check_congruence(&f, &g, pp)?;
        report.check(r.passed(), format!("small-primes.p{p}.{id}"), format!("{} violations to precision {b}", r.violations.len()));
    }
    // X35^2 as a polynomial in X10, Y12, X16: (coefficient, a, b, c) for X10^a Y12^b X16^c
    let terms: &[(u64, u32, u32, u32)] = if p == 2 {
        &[(1, 2, 2, 2), (1, 6, 0, 0)]
    } else {
        &[(2, 1, 0, 4), (1, 1, 2, 3), (2, 2, 0, 3), (1, 2, 2, 2), (2, 3, 1, 2), (2, 4, 3, 0), (1, 4, 0, 2), (2, 7, 0, 0)]
    };
    let mut forms = ReducedForms::new(registry, p, b)?;
    let x35 = forms.generator(X35)?;
    let lhs = x35.mul(&x35)?;
    let mut rhs = ExpansionFp::zero(forms.field(), 70, 1, b);
    for &(c, e10, e12, e16) in terms {
        let m = forms.monomial(&MonomialSpec::new([(X10, e10), (Y12, e12), (X16, e16)]))?;
        rhs = rhs.add(&m.scale_by(&(c % p)).with_weight(70))?;
    }
    let diff = lhs.sub(&rhs)?;
    let bad = diff.nonzero_entries().count();
    report.check(bad == 0, format!("small-primes.p{p}.X35^2"), format!("{bad} mismatching coefficients to precision {b}"));
    Ok(())
}

fn reduce_diag(d: &DiagSeries, p: u64) -> Result<Vec<u64>> {
    let n = d.precision();
    let mut out = Vec::with_capacity((n + 1) * (n + 1));
    for m in 0..=n {
        for k in 0..=n {
            out.push(reduce_mod_p(&d.coeff(m, k), p).map_err(|_| Error::NonIntegral { index: format!("({m}, {k})"), p })?);
        }
    }
    Ok(out)
}

fn fp_rows(f: &ExpansionFp) -> Vec<u64> {
    f.entries().map(|(_, c)| *c).collect()
}

fn witt_kernel_12(report: &mut Report, registry: &GeneratorRegistry, p: u64, b: u32) -> Result<()> {
    let field = PrimeField::new(p)?;
    let monomials = weight_monomials(12, &[X4, X6, X10, X12, Y12, X16]);
    let mut forms = ReducedForms::new(registry, p, b)?;
    let reduced = monomials.iter().map(|m| forms.monomial(m)).collect::<Result<Vec<_>>>()?;
    let witt = monomials
        .iter()
        .map(|m| reduce_diag(&registry.monomial_eval(m, b)?.witt(0)?, p))
        .collect::<Result<Vec<_>>>()?;
    let span = row_reduce(&field, &reduced.iter().map(fp_rows).collect::<Vec<_>>()).rank;
    report.check(span == dimension(12), format!("witt-kernel-12.p{p}.span"), format!("monomials span dimension {span}"));
    let kernel = row_reduce(&field, &witt).left_kernel;
    // kernel vectors become forms; relations among the reduced monomials vanish here
    let kernel_forms: Vec<Vec<u64>> = kernel
        .iter()
        .map(|v| {
            let mut acc = ExpansionFp::zero(field, 12, 1, b);
            for (c, f) in v.iter().zip(&reduced) {
                acc = acc.add(&f.scale_by(c)).expect("same shape");
            }
            fp_rows(&acc)
        })
        .collect();
    let kernel_rank = row_reduce(&field, &kernel_forms).rank;
    let expected = if p == 2 || p == 3 { 1 } else { 0 };
    report.check(
        kernel_rank == expected,
        format!("witt-kernel-12.p{p}.kernel-dim"),
        format!("kernel of W mod {p} on forms has dimension {kernel_rank}, expected {expected}"),
    );
    let x12 = fp_rows(&forms.generator(X12)?);
    let x12_nonzero = x12.iter().any(|c| *c != 0);
    let mut with_x12 = kernel_forms.clone();
    with_x12.push(x12);
    let joint = row_reduce(&field, &with_x12).rank;
    if expected == 1 {
        report.check(
            x12_nonzero && joint == kernel_rank,
            format!("witt-kernel-12.p{p}.kernel=X12"),
            format!("X12 mod {p} nonzero and in the kernel span (rank {joint})"),
        );
    } else {
        report.check(joint == 1, format!("witt-kernel-12.p{p}.X12-not-in-kernel"), format!("rank with X12 is {joint}"));
    }
    Ok(())
}

/// A Z-basis of `M_k(SL2(Z))`: `Δ^c e4^a e6^b` with `b <= 1`, `c < dim`.
pub fn elliptic_basis(k: i64, precision: usize) -> Vec<QSeries1> {
    if k < 0 || k % 2 == 1 || k == 2 {
        return Vec::new();
    }
    let dim = (k / 12) as usize + usize::from(k % 12 != 2);
    let e4 = eisenstein1(4, precision).expect("weight 4");
    let e6 = eisenstein1(6, precision).expect("weight 6");
    let delta = delta1(precision);
    (0..dim)
        .map(|c| {
            let w = k - 12 * c as i64;
            let (a, b) = if w % 4 == 0 { (w / 4, 0) } else { ((w - 6) / 4, 1) };
            delta.pow(c as u32).mul(&e4.pow(a as u32)).mul(&e6.pow(b as u32))
        })
        .collect()
}

fn sym2_rank(report: &mut Report, k: i64, p: u64) -> Result<()> {
    let field = PrimeField::new(p)?;
    let t = (k / 12) as usize;
    let basis = elliptic_basis(k, t);
    let n = basis.len();
    let mut sym = Vec::new();
    let mut tensor = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let d = diag_tensor(&basis[i], &basis[j]);
            if i < j {
                sym.push(reduce_diag(&d.add(&diag_tensor(&basis[j], &basis[i])), p)?);
            } else if i == j {
                sym.push(reduce_diag(&d, p)?);
            }
            tensor.push(reduce_diag(&d, p)?);
        }
    }
    let rs = row_reduce(&field, &sym).rank;
    let rt = row_reduce(&field, &tensor).rank;
    report.check(rs == sym.len(), format!("sym2-rank.k{k}.p{p}.sym2"), format!("rank {rs} of {} on m,n <= {t}", sym.len()));
    report.check(rt == tensor.len(), format!("sym2-rank.k{k}.p{p}.tensor"), format!("rank {rt} of {} on m,n <= {t}", tensor.len()));
    Ok(())
}

/// `v >= target` for a vanishing order known to precision `b`; `None` if undecided.
fn at_least(v: &VanishingOrder, target: &Rational) -> Option<bool> {
    match v {
        VanishingOrder::Finite(x) => Some(x >= target),
        VanishingOrder::AbovePrecision(b) => (*target <= rat_int(*b + 1)).then_some(true),
    }
}

fn borcherds(report: &mut Report, registry: &GeneratorRegistry, p: u64, b: u32) -> Result<()> {
    let mut forms = ReducedForms::new(registry, p, b)?;
    let x10 = forms.generator(X10)?;
    let x35 = forms.generator(X35)?;
    for g in GeneratorName::ALL {
        let gf = forms.generator(g)?;
        let vg = gf.vp_diagonal()?;
        let id10 = format!("borcherds.p{p}.X10*{g}");
        let id35 = format!("borcherds.p{p}.X35*{g}");
        let Some(v) = vg.value().cloned() else {
            report.skip(&id10, format!("v({g}) above precision {b}"));
            report.skip(&id35, format!("v({g}) above precision {b}"));
            continue;
        };
        let one = Rational::one();
        let v10 = x10.mul(&gf)?.vp_diagonal()?;
        let target = &v + &one;
        match &v10 {
            VanishingOrder::Finite(x) => report.check(*x == target, &id10, format!("v = {x}, v({g}) + 1 = {target}")),
            VanishingOrder::AbovePrecision(bb) if target > rat_int(*bb) => {
                report.skip(&id10, format!("v({g}) + 1 = {target} beyond precision {bb}"))
            }
            VanishingOrder::AbovePrecision(bb) => report.check(false, &id10, format!("v > {bb}, expected {target}")),
        }
        let v35 = x35.mul(&gf)?.vp_diagonal()?;
        let target = &v + rat_int(2);
        match at_least(&v35, &target) {
            Some(ok) => report.check(ok, &id35, format!("v = {v35} >= v({g}) + 2 = {target}")),
            None => report.skip(&id35, format!("v({g}) + 2 = {target} beyond precision {b}")),
        }
    }
    Ok(())
}

fn product_vanishing(report: &mut Report, registry: &GeneratorRegistry, p: u64, b: u32) -> Result<()> {
    let mut forms = ReducedForms::new(registry, p, b)?;
    let all = GeneratorName::ALL;
    for (i, f) in all.iter().enumerate() {
        for g in &all[i..] {
            let id = format!("product-vanishing.p{p}.{f}*{g}");
            let vf = forms.generator(*f)?.vp_diagonal()?;
            let vg = forms.generator(*g)?.vp_diagonal()?;
            let prod = forms.monomial(&MonomialSpec::new([(*f, 1), (*g, 1)]))?.vp_diagonal()?;
            let (Some(a), Some(c)) = (vf.value(), vg.value()) else {
                report.skip(&id, "factor vanishes to precision");
                continue;
            };
            let target = a.max(c).clone();
            match at_least(&prod, &target) {
                Some(ok) => report.check(ok, &id, format!("v = {prod} >= max({vf}, {vg})")),
                None => report.skip(&id, format!("max = {target} beyond precision {b}")),
            }
        }
    }
    Ok(())
}

fn sharpness_lines(report: &mut Report, registry: &GeneratorRegistry, k: i64, p: u64) -> Result<()> {
    let id = format!("sharpness.k{k}.p{p}");
    match sharpness_witness(registry, k, p) {
        Err(Error::Usage(msg)) => report.skip(&id, msg),
        Err(e) => return Err(e),
        Ok(w) => {
            let lt = w
                .leading_mod_p
                .as_ref()
                .map_or("none".to_string(), |lt| format!("({}, {}, {}) = {}", lt.m, lt.r, lt.n, lt.coeff));
            report.check(w.certified(), &id, format!("{} vp {} = b_k {}, leading {lt}", w.monomial, w.vp, w.sturm_bound));
            // truncation at b_k - 1 is not injective: the witness is a nonzero element of its kernel
            let c = rank_certificate(registry, k, p, w.sturm_bound.max(3) as u32, w.sturm_bound - 1);
            match c {
                Ok(c) => report.check(
                    !c.injective(),
                    format!("{id}.tight"),
                    format!("rank {} on m,n <= {} below rank {}", c.rank_truncated, w.sturm_bound - 1, c.rank_full),
                ),
                Err(Error::Usage(msg)) => report.skip(format!("{id}.tight"), msg),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}
