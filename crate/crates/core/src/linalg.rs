//! Exact row reduction over fields, for rank certificates.

use crate::arith::{reduce_mod_p, Rational};
use crate::error::{Error, Result};
use crate::ring::{Field, Numeric, PrimeField, Ring};
use crate::siegel::{Index, SiegelExpansion};

/// Coefficients of several forms at a common list of indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMatrix<R: Ring> {
    pub ring: R,
    pub labels: Vec<String>,
    /// Sorted by `(m, n, r)`.
    pub columns: Vec<Index>,
    pub rows: Vec<Vec<R::Element>>,
}

impl<R: Ring> CoeffMatrix<R> {
    pub fn new(ring: R, labels: Vec<String>, columns: Vec<Index>, rows: Vec<Vec<R::Element>>) -> Result<Self> {
        if labels.len() != rows.len() || rows.iter().any(|r| r.len() != columns.len()) {
            return Err(Error::Usage("coefficient matrix is not rectangular".into()));
        }
        Ok(CoeffMatrix { ring, labels, columns, rows })
    }

    /// One row per expansion, one column per stored index with `m, n <= bound`
    /// (scaled units). A negative bound gives no columns.
    pub fn from_expansions(
        ring: R,
        labels: Vec<String>,
        forms: &[SiegelExpansion<R>],
        bound: i64,
    ) -> Result<Self> {
        let columns: Vec<Index> = match forms.first() {
            Some(f) => {
                if bound > f.bound() {
                    return Err(Error::Precision(format!("bound {bound} exceeds expansion box {}", f.bound())));
                }
                f.entries().map(|(i, _)| i).filter(|&(m, _, n)| m <= bound && n <= bound).collect()
            }
            None => Vec::new(),
        };
        let rows = forms.iter().map(|f| columns.iter().map(|&(m, r, n)| f.coeff(m, r, n)).collect()).collect();
        Self::new(ring, labels, columns, rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Clone, Debug, PartialEq)]
pub struct RowReduction<E> {
    pub rank: usize,
    /// Pivot column of each nonzero echelon row.
    pub pivots: Vec<usize>,
    /// The nonzero rows of the reduced row echelon form.
    pub echelon: Vec<Vec<E>>,
    /// A basis of `{v : v M = 0}` in reduced row echelon form.
    pub left_kernel: Vec<Vec<E>>,
}

/// Gauss-Jordan elimination with the first nonzero column and, within it,
/// the lowest-numbered remaining row as pivot.
pub fn row_reduce<F: Field>(field: &F, rows: &[Vec<F::Element>]) -> RowReduction<F::Element> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    // augment with the identity to track row operations
    let mut aug: Vec<Vec<F::Element>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            v.extend((0..nrows).map(|j| if i == j { field.one() } else { field.zero() }));
            v
        })
        .collect();
    let pivots = eliminate(field, &mut aug, ncols);
    let rank = pivots.len();
    let echelon = aug[..rank].iter().map(|r| r[..ncols].to_vec()).collect();
    let mut kernel: Vec<Vec<F::Element>> = aug[rank..].iter().map(|r| r[ncols..].to_vec()).collect();
    let kpiv = eliminate(field, &mut kernel, nrows);
    kernel.truncate(kpiv.len());
    RowReduction { rank, pivots, echelon, left_kernel: kernel }
}

/// In-place reduced row echelon form on the first `ncols` columns; returns pivots.
fn eliminate<F: Field>(field: &F, m: &mut [Vec<F::Element>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        if next == m.len() {
            break;
        }
        let Some(p) = (next..m.len()).find(|&i| !field.is_zero(&m[i][col])) else { continue };
        m.swap(next, p);
        let inv = field.inv(&m[next][col]).expect("nonzero pivot");
        for x in m[next].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let pivot_row = m[next].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == next || field.is_zero(&row[col]) {
                continue;
            }
            let factor = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !field.is_zero(y) {
                    *x = field.sub(x, &field.mul(&factor, y));
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &CoeffMatrix<F>) -> usize {
    row_reduce(&m.ring, &m.rows).rank
}

/// Rank and left-kernel basis of a rational matrix reduced modulo `p`.
pub fn fp_rank(m: &CoeffMatrix<Numeric<Rational>>, p: u64) -> Result<(usize, Vec<Vec<u64>>)> {
    let field = PrimeField::new(p)?;
    let rows = m
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .zip(&m.columns)
                .map(|(x, &(a, r, n))| {
                    reduce_mod_p(x, p).map_err(|_| Error::NonIntegral {
                        index: format!("row {} at ({a}, {r}, {n})", m.labels.get(i).map_or("?", String::as_str)),
                        p,
                    })
                })
                .collect::<Result<Vec<u64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let red = row_reduce(&field, &rows);
    Ok((red.rank, red.left_kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn qmat(rows: &[&[i64]]) -> CoeffMatrix<Numeric<Rational>> {
        let ncols = rows.first().map_or(0, |r| r.len());
        CoeffMatrix::new(
            Numeric::new(),
            (0..rows.len()).map(|i| format!("f{i}")).collect(),
            (0..ncols as i64).map(|c| (c, 0, 0)).collect(),
            rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_over_f2() {
        let (r, k) = fp_rank(&qmat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), 2).unwrap();
        assert_eq!(r, 3);
        assert!(k.is_empty());
    }

    #[test]
    fn zero_matrix() {
        let (r, k) = fp_rank(&qmat(&[&[0, 0], &[0, 0]]), 3).unwrap();
        assert_eq!(r, 0);
        assert_eq!(k, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn dependent_rows_mod_p_only() {
        let m = qmat(&[&[1, 2], &[3, 1]]);
        assert_eq!(rank(&m), 2);
        // det = -5
        let (r, k) = fp_rank(&m, 5).unwrap();
        assert_eq!(r, 1);
        assert_eq!(k, vec![vec![1, 3]]);
    }

    #[test]
    fn left_kernel_annihilates() {
        let m = qmat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1], &[2, 2, 4]]);
        let red = row_reduce(&m.ring, &m.rows);
        assert_eq!(red.rank, 2);
        assert_eq!(red.left_kernel.len(), 2);
        for v in &red.left_kernel {
            for c in 0..3 {
                let s: Rational = v.iter().zip(&m.rows).map(|(a, row)| a * &row[c]).sum();
                assert_eq!(s, rat(0, 1));
            }
        }
    }

    #[test]
    fn rejects_non_integral() {
        let mut m = qmat(&[&[1, 2]]);
        m.rows[0][1] = rat(1, 2);
        assert!(matches!(fp_rank(&m, 2), Err(Error::NonIntegral { .. })));
    }

    #[test]
    fn rejects_ragged() {
        let r = CoeffMatrix::new(Numeric::<Rational>::new(), vec!["a".into()], vec![(0, 0, 0)], vec![vec![]]);
        assert!(r.is_err());
    }
}
