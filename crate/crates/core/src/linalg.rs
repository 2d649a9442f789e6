//! Dense linear algebra over [`Scalar`]: rank, reduced row echelon form and
//! particular solutions. Exact rank decisions go through fraction-free
//! (Bareiss) elimination over big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar};

pub type Matrix<S> = Vec<Vec<S>>;

pub fn identity<S: Scalar>(n: usize) -> Matrix<S> {
    (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect()
}

pub fn mat_vec<S: Scalar>(m: &Matrix<S>, v: &[S]) -> Vec<S> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
        .collect()
}

pub fn mat_mul<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(S::zero(), |acc, k| acc + row[k].clone() * b[k][j].clone()))
                .collect()
        })
        .collect()
}

/// Rank by fraction-free Gaussian elimination. Rows are scaled to integers
/// first; every intermediate stays in `Z` because Bareiss divisions are exact.
pub fn rank_exact(m: &Matrix<Rational>) -> usize {
    let mut rows: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect();
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(piv) = (rank..n_rows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            let factor = row[col].clone();
            for c in col..n_cols {
                let v = &pivot_row[col] * &row[c] - &factor * &pivot_row[c];
                row[c] = v / &prev;
            }
            for c in 0..col {
                row[c] = BigInt::zero();
            }
        }
        prev = rows[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Reduced row echelon form; returns pivot columns. Pivot choice is the
/// largest magnitude in the column, which is harmless on the exact path and
/// stabilizing on the float path.
pub fn rref<S: Scalar>(m: &mut Matrix<S>) -> Vec<usize> {
    let n_rows = m.len();
    let n_cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n_cols {
        if r == n_rows {
            break;
        }
        let best = (r..n_rows)
            .filter(|&i| !m[i][col].is_zero())
            .max_by(|&a, &b| m[a][col].magnitude().total_cmp(&m[b][col].magnitude()));
        let Some(best) = best else { continue };
        m.swap(r, best);
        let inv = S::one() / m[r][col].clone();
        for c in col..n_cols {
            m[r][c] = m[r][c].clone() * inv.clone();
        }
        for i in 0..n_rows {
            if i == r || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for c in col..n_cols {
                let v = m[r][c].clone() * f.clone();
                m[i][c] -= v;
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(m: &Matrix<S>) -> usize {
    let mut work = m.clone();
    rref(&mut work).len()
}

/// Particular solution of `a x = b` with free variables set to zero, or
/// `None` if the system is inconsistent.
pub fn solve<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Option<Vec<S>> {
    let n_cols = a.first().map_or(0, Vec::len);
    let mut aug: Matrix<S> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&n_cols) {
        return None;
    }
    let mut x = vec![S::zero(); n_cols];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = aug[row][n_cols].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse<S: Scalar>(a: &Matrix<S>) -> Option<Matrix<S>> {
    let n = a.len();
    let mut aug: Matrix<S> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn is_singular<S: Scalar>(a: &Matrix<S>) -> bool {
    rank(a) < a.len()
}
