#![allow(dead_code)]

use std::collections::HashMap;

use siegel2::{DiagSeries, ExpansionFp, GeneratorRegistry, Rational};

/// Vectors of the E8 lattice (even coordinate system, doubled coordinates)
/// with norm at most `2 * max_half_norm`, grouped by half-norm.
pub fn e8_shells(max_half_norm: i64) -> Vec<Vec<[i64; 8]>> {
    // doubled coordinates: all even or all odd, coordinate sum divisible by 4,
    // and sum of squares = 8 * (half-norm)
    let budget = 8 * max_half_norm;
    let bound = (0..).take_while(|b: &i64| b * b <= budget).last().unwrap_or(0);
    let mut shells = vec![Vec::new(); max_half_norm as usize + 1];
    let mut v = [0i64; 8];
    for parity in [0, 1] {
        extend(&mut v, 0, 0, parity, bound, budget, &mut shells);
    }
    shells
}

fn extend(v: &mut [i64; 8], i: usize, used: i64, parity: i64, bound: i64, budget: i64, out: &mut [Vec<[i64; 8]>]) {
    if i == 8 {
        if v.iter().sum::<i64>() % 4 == 0 && used % 8 == 0 {
            out[(used / 8) as usize].push(*v);
        }
        return;
    }
    for x in -bound..=bound {
        if x.rem_euclid(2) != parity || used + x * x > budget {
            continue;
        }
        v[i] = x;
        extend(v, i + 1, used + x * x, parity, bound, budget, out);
    }
}

/// Degree-2 theta coefficients of E8: the number of pairs `(x, y)` with
/// `x.x = 2m`, `y.y = 2n` and `x.y = r`, for `m, n <= max`.
pub fn e8_pair_counts(max: i64) -> HashMap<(i64, i64, i64), u64> {
    let shells = e8_shells(max);
    let mut counts = HashMap::new();
    for m in 0..=max {
        for n in 0..=max {
            for x in &shells[m as usize] {
                for y in &shells[n as usize] {
                    let dot: i64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                    *counts.entry((m, dot / 4, n)).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

/// Diagonal vanishing order by direct scan: the least `max(m, n) / s` over
/// nonzero residues, `None` when the reduction vanishes on the whole box.
pub fn vp_by_scan(f: &ExpansionFp) -> Option<Rational> {
    f.nonzero_entries()
        .map(|((m, _, n), _)| m.max(n))
        .min()
        .map(|v| Rational::new(v.into(), (f.scale() as i64).into()))
}

pub fn registry() -> GeneratorRegistry {
    GeneratorRegistry::in_memory()
}

/// Equality of diagonal coefficients, ignoring weight and symmetry tags.
pub fn same(a: &DiagSeries, b: &DiagSeries) -> bool {
    a.precision() == b.precision() && a.sub(b).is_zero()
}
