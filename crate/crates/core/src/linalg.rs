//! Exact rank and kernel computations.
//!
//! Rank uses fraction-free (Bareiss) elimination on integer rows obtained by
//! clearing denominators row by row. Kernels use reduced row echelon form over
//! the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::ring::{clear_denominators, QSeries, Rational};

/// Divides a row by the gcd of its entries.
fn primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Rank of an integer matrix by fraction-free elimination.
///
/// The Bareiss update `a_ij <- (p a_ij - a_ik a_kj) / p_prev` keeps every
/// entry an integer; the division is exact.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    m.retain(|r| r.iter().any(|x| !x.is_zero()));
    for r in m.iter_mut() {
        primitive(r);
    }
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == m.len() {
            break;
        }
        // Smallest nonzero pivot keeps the numbers down.
        let Some(p) = (rank..m.len())
            .filter(|&r| !m[r][c].is_zero())
            .min_by_key(|&r| m[r][c].magnitude().bits())
        else {
            continue;
        };
        m.swap(rank, p);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for j in c..cols {
                let v = &pivot * &row[j] - &f * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    bareiss_rank(rows.iter().map(|r| clear_denominators(r)).collect())
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

/// Basis of the right kernel `{v : M v = 0}` of a matrix with `cols` columns.
///
/// One vector per free column, with a 1 in that column; vectors are returned
/// in increasing free-column order.
pub fn kernel(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let pivots = rref(&mut m);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Scales a vector so that its first nonzero entry is `1`.
pub fn normalize_first(v: &[Rational]) -> Vec<Rational> {
    match v.iter().find(|x| !x.is_zero()) {
        None => v.to_vec(),
        Some(lead) => {
            let inv = lead.recip();
            v.iter().map(|x| x * &inv).collect()
        }
    }
}

/// Whether `a` and `b` are proportional (both zero counts as proportional).
pub fn proportional(a: &[Rational], b: &[Rational]) -> bool {
    a.len() == b.len() && normalize_first(a) == normalize_first(b)
}

/// `true` when the matrix-vector product vanishes.
pub fn annihilates(rows: &[Vec<Rational>], v: &[Rational]) -> bool {
    rows.iter().all(|r| {
        r.iter()
            .zip(v)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            .is_zero()
    })
}

/// Work bound for inverting exact multi-term pivots: the largest finite window
/// in the matrix (exact monomials invert exactly regardless).
fn inverse_cap(rows: &[Vec<QSeries>]) -> i64 {
    rows.iter()
        .flatten()
        .map(QSeries::hi)
        .filter(|&h| h < crate::ring::EXACT)
        .max()
        .unwrap_or(64)
}

/// Rank over `Q((q))` of a matrix whose entries are known below their windows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesRank {
    /// Number of pivots with a certified nonzero leading coefficient.
    pub rank: usize,
    /// The remaining Schur complement vanishes below `q^precision`; `EXACT`
    /// when nothing remains.
    pub precision: i64,
}

/// Gaussian elimination over truncated q-series.
///
/// Pivots are taken with the smallest valuation, so unit pivots cost no
/// precision. The returned rank is a lower bound for the true rank, and equals
/// it if the residual block (zero below `precision`) is exactly zero.
pub fn series_rank(rows: &[Vec<QSeries>]) -> Result<SeriesRank> {
    let cap = inverse_cap(rows);
    let mut m: Vec<Vec<QSeries>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut used = vec![false; cols];
    let mut rank = 0;
    loop {
        let mut best: Option<(i64, usize, usize)> = None;
        for (r, row) in m.iter().enumerate().skip(rank) {
            for (c, x) in row.iter().enumerate() {
                if used[c] {
                    continue;
                }
                if let Some(v) = x.valuation() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((_, r, c)) = best else { break };
        m.swap(rank, r);
        used[c] = true;
        let pivot_row = m[rank].clone();
        let inv = pivot_row[c].inverse(cap)?;
        for row in m.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].mul(&inv);
            for j in 0..cols {
                if !used[j] {
                    row[j] = row[j].sub(&f.mul(&pivot_row[j]));
                }
            }
            row[c] = QSeries::exact_zero();
        }
        rank += 1;
    }
    let precision = m
        .iter()
        .skip(rank)
        .flat_map(|row| row.iter().zip(&used).filter(|(_, u)| !**u).map(|(x, _)| x.hi()))
        .min()
        .unwrap_or(crate::ring::EXACT);
    Ok(SeriesRank { rank, precision })
}

/// Kernel over `Q((q))` of a matrix of truncated series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesKernel {
    pub rank: usize,
    /// One vector per free column (entry 1 there), entries with their windows.
    pub basis: Vec<Vec<QSeries>>,
    /// The rows left after elimination vanish below `q^precision`.
    pub precision: i64,
}

/// Reduced row echelon form over truncated series, then one kernel vector
/// per free column.
pub fn series_kernel(rows: &[Vec<QSeries>], cols: usize) -> Result<SeriesKernel> {
    let cap = inverse_cap(rows);
    let mut m: Vec<Vec<QSeries>> = rows.to_vec();
    let mut used = vec![false; cols];
    let mut pivots: Vec<usize> = Vec::new();
    loop {
        let r = pivots.len();
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(r) {
            for (c, x) in row.iter().enumerate() {
                if used[c] {
                    continue;
                }
                if let Some(v) = x.valuation() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, c));
                    }
                }
            }
        }
        let Some((_, i, c)) = best else { break };
        m.swap(r, i);
        used[c] = true;
        let inv = m[r][c].inverse(cap)?;
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        m[r][c] = QSeries::one();
        let pivot_row = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in 0..cols {
                if j != c && (!used[j] || pivots.contains(&j)) {
                    row[j] = row[j].sub(&f.mul(&pivot_row[j]));
                }
            }
            row[c] = QSeries::exact_zero();
        }
        pivots.push(c);
    }
    let rank = pivots.len();
    let precision = m
        .iter()
        .skip(rank)
        .flat_map(|row| row.iter().zip(&used).filter(|(_, u)| !**u).map(|(x, _)| x.hi()))
        .min()
        .unwrap_or(crate::ring::EXACT);
    let basis = (0..cols)
        .filter(|&f| !used[f])
        .map(|f| {
            let mut v = vec![QSeries::exact_zero(); cols];
            v[f] = QSeries::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = row[f].neg();
            }
            v
        })
        .collect();
    Ok(SeriesKernel { rank, basis, precision })
}
