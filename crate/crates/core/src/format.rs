//! Plain-text serialization of expansions.
//!
//! ```text
//! %SIEGEL2-QEXP 1
//! name X10
//! weight 10
//! scale 1
//! precision 2
//! entries 3
//! 1 -1 1 1 1
//! ...
//! ```
//!
//! Entries are `m r n numerator denominator`, strictly ascending in
//! `(m, n, r)`, reduced, with zero coefficients omitted. Diagonal series use
//! the magic `%DIAG-QEXP 1` and entries `m n numerator denominator`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{isqrt, Rational};
use crate::error::{Error, Result};
use crate::qexp1::DiagSeries;
use crate::ring::Numeric;
use crate::siegel::{index_order, Expansion, Index};

pub const SIEGEL_MAGIC: &str = "%SIEGEL2-QEXP 1";
pub const DIAG_MAGIC: &str = "%DIAG-QEXP 1";

/// Formats a rational as `num/den`, or `num` when the denominator is 1.
pub fn fraction(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `num`, `num/den` with `den > 0`.
pub fn parse_fraction(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((n, d)) => {
            let n = n.parse::<BigInt>().ok()?;
            let d = d.parse::<BigInt>().ok()?;
            (d.is_positive()).then(|| Rational::new(n, d))
        }
    }
}

pub fn write_expansion(name: &str, f: &Expansion) -> String {
    let entries: Vec<_> = f.nonzero_entries().collect();
    let mut out = String::new();
    writeln!(out, "{SIEGEL_MAGIC}").unwrap();
    writeln!(out, "name {name}").unwrap();
    writeln!(out, "weight {}", f.weight()).unwrap();
    writeln!(out, "scale {}", f.scale()).unwrap();
    writeln!(out, "precision {}", f.precision()).unwrap();
    writeln!(out, "entries {}", entries.len()).unwrap();
    for ((m, r, n), c) in entries {
        writeln!(out, "{m} {r} {n} {} {}", c.numer(), c.denom()).unwrap();
    }
    out
}

pub fn write_diag(name: &str, f: &DiagSeries) -> String {
    let entries: Vec<_> = f.nonzero_entries().collect();
    let mut out = String::new();
    writeln!(out, "{DIAG_MAGIC}").unwrap();
    writeln!(out, "name {name}").unwrap();
    writeln!(out, "weight {}", f.weight).unwrap();
    writeln!(out, "scale 1").unwrap();
    writeln!(out, "precision {}", f.precision()).unwrap();
    writeln!(out, "entries {}", entries.len()).unwrap();
    for (m, n, c) in entries {
        writeln!(out, "{m} {n} {} {}", c.numer(), c.denom()).unwrap();
    }
    out
}

struct Header {
    name: String,
    weight: i64,
    scale: u32,
    precision: u32,
    entries: usize,
}

struct Lines<'a> {
    path: &'a Path,
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { path: self.path.to_path_buf(), line: self.line, msg: msg.into() }
    }

    fn next(&mut self) -> Result<Option<&'a str>> {
        match self.iter.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(Some(l))
            }
            None => {
                self.line += 1;
                Ok(None)
            }
        }
    }

    fn expect(&mut self) -> Result<&'a str> {
        self.next()?.ok_or_else(|| self.err("unexpected end of file"))
    }

    fn keyed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let l = self.expect()?;
        let value = l
            .strip_prefix(key)
            .and_then(|v| v.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected `{key} <value>`")))?;
        value.parse().map_err(|_| self.err(format!("invalid {key} {value:?}")))
    }
}

fn parse_header<'a>(text: &'a str, path: &'a Path, magic: &str) -> Result<(Header, Lines<'a>)> {
    let mut lines = Lines { path, iter: text.lines().enumerate(), line: 0 };
    let first = lines.expect()?;
    if first != magic {
        return Err(lines.err(format!("bad magic {first:?}, expected {magic:?}")));
    }
    let name: String = lines.keyed("name")?;
    let weight = lines.keyed("weight")?;
    let scale: u32 = lines.keyed("scale")?;
    if scale == 0 {
        return Err(lines.err("scale must be at least 1"));
    }
    let precision = lines.keyed("precision")?;
    let entries = lines.keyed("entries")?;
    Ok((Header { name, weight, scale, precision, entries }, lines))
}

fn parse_coefficient(lines: &Lines<'_>, num: &str, den: &str) -> Result<Rational> {
    let num: BigInt = num.parse().map_err(|_| lines.err(format!("invalid numerator {num:?}")))?;
    let den: BigInt = den.parse().map_err(|_| lines.err(format!("invalid denominator {den:?}")))?;
    if !den.is_positive() {
        return Err(lines.err("denominator must be at least 1"));
    }
    if num.is_zero() {
        return Err(lines.err("zero entries must be omitted"));
    }
    if !num.gcd(&den).is_one() {
        return Err(lines.err(format!("fraction {num}/{den} is not reduced")));
    }
    Ok(Rational::new_raw(num, den))
}

fn finish(lines: &mut Lines<'_>, header: &Header, seen: usize) -> Result<()> {
    while let Some(l) = lines.next()? {
        if !l.trim().is_empty() {
            return Err(lines.err("trailing content after entries"));
        }
    }
    if seen != header.entries {
        return Err(lines.err(format!("header declares {} entries, found {seen}", header.entries)));
    }
    Ok(())
}

/// Parses a `%SIEGEL2-QEXP 1` document; `path` is used in error messages.
pub fn parse_expansion(text: &str, path: &Path) -> Result<(String, Expansion)> {
    let (header, mut lines) = parse_header(text, path, SIEGEL_MAGIC)?;
    let bound = header.scale as i64 * header.precision as i64;
    let mut entries: Vec<(Index, Rational)> = Vec::with_capacity(header.entries);
    for _ in 0..header.entries {
        let l = lines.expect()?;
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(lines.err("expected `m r n numerator denominator`"));
        }
        let mut idx = [0i64; 3];
        for (slot, s) in idx.iter_mut().zip(&fields[..3]) {
            *slot = s.parse().map_err(|_| lines.err(format!("invalid index {s:?}")))?;
        }
        let (m, r, n) = (idx[0], idx[1], idx[2]);
        if m < 0 || n < 0 || m > bound || n > bound || r.abs() > isqrt(4 * m * n) {
            return Err(lines.err(format!("index ({m}, {r}, {n}) outside the precision box")));
        }
        if let Some((prev, _)) = entries.last() {
            if index_order(prev, &(m, r, n)) != std::cmp::Ordering::Less {
                return Err(lines.err("entries not strictly ascending in (m, n, r)"));
            }
        }
        let c = parse_coefficient(&lines, fields[3], fields[4])?;
        entries.push(((m, r, n), c));
    }
    finish(&mut lines, &header, entries.len())?;
    let f = Expansion::from_entries(Numeric::new(), header.weight, header.scale, header.precision, entries)?;
    Ok((header.name, f))
}

/// Parses a `%DIAG-QEXP 1` document.
pub fn parse_diag(text: &str, path: &Path) -> Result<(String, DiagSeries)> {
    let (header, mut lines) = parse_header(text, path, DIAG_MAGIC)?;
    if header.scale != 1 {
        return Err(lines.err("diagonal series must have scale 1"));
    }
    let p = header.precision as usize;
    let mut entries: Vec<((usize, usize), Rational)> = Vec::with_capacity(header.entries);
    for _ in 0..header.entries {
        let l = lines.expect()?;
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(lines.err("expected `m n numerator denominator`"));
        }
        let m: usize = fields[0].parse().map_err(|_| lines.err(format!("invalid index {:?}", fields[0])))?;
        let n: usize = fields[1].parse().map_err(|_| lines.err(format!("invalid index {:?}", fields[1])))?;
        if m > p || n > p {
            return Err(lines.err(format!("index ({m}, {n}) outside the precision box")));
        }
        if let Some((prev, _)) = entries.last() {
            if *prev >= (m, n) {
                return Err(lines.err("entries not strictly ascending in (m, n)"));
            }
        }
        let c = parse_coefficient(&lines, fields[2], fields[3])?;
        entries.push(((m, n), c));
    }
    finish(&mut lines, &header, entries.len())?;
    let side = p + 1;
    let mut dense = vec![Rational::zero(); side * side];
    for ((m, n), c) in entries {
        dense[m * side + n] = c;
    }
    Ok((header.name, DiagSeries::new(p, header.weight, |m, n| dense[m * side + n].clone())))
}

pub fn read_expansion(path: &Path) -> Result<(String, Expansion)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_expansion(&text, path)
}

pub fn read_diag(path: &Path) -> Result<(String, DiagSeries)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_diag(&text, path)
}

/// Writes `contents` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let file_name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp: PathBuf = dir.join(format!(".{file_name}.{}.tmp", std::process::id()));
    let mut fh = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    fh.write_all(contents.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
    fh.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn save_expansion(path: &Path, name: &str, f: &Expansion) -> Result<()> {
    write_atomic(path, &write_expansion(name, f))
}
