//! Exact linear algebra over the rationals for small integer matrices.
//!
//! Design matrices are 0/1 and at most a few hundred entries on a side, so
//! plain `BigRational` reduced row echelon form is fast enough and never
//! suffers from the rank ambiguity of floating point elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Reduced row echelon form of an integer matrix.
#[derive(Debug, Clone)]
pub(crate) struct Rref {
    pub rows: Vec<Vec<BigRational>>,
    /// Column index of the leading one in each nonzero row, in increasing order.
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gauss-Jordan elimination scanning columns left to right and taking the
/// first row with a nonzero entry as pivot.
pub(crate) fn rref(matrix: &[Vec<i64>], ncols: usize) -> Rref {
    let mut rows: Vec<Vec<BigRational>> = matrix
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
        .collect();
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..nrows {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].clone();
            let (pivot_row, other) = if i < r {
                let (lo, hi) = rows.split_at_mut(r);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = rows.split_at_mut(i);
                (&lo[r], &mut hi[0])
            };
            for (dst, src) in other.iter_mut().zip(pivot_row.iter()).skip(c) {
                *dst = &*dst - &factor * src;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    Rref { rows, pivots, ncols }
}

/// Integer basis of the right null space, one row per free column.
///
/// Each row is cleared of denominators, divided by the gcd of its entries and
/// signed so that its first nonzero entry is positive.
pub(crate) fn integer_kernel(reduced: &Rref) -> Result<Vec<Vec<i64>>> {
    let n = reduced.ncols;
    let mut is_pivot = vec![false; n];
    for &p in &reduced.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![BigRational::zero(); n];
        v[free] = BigRational::one();
        for (row, &p) in reduced.rows.iter().zip(&reduced.pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(normalize_integer(&v)?);
    }
    Ok(basis)
}

fn normalize_integer(v: &[BigRational]) -> Result<Vec<i64>> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(first) if first.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    let scale = if gcd.is_zero() { BigInt::one() } else { gcd * sign };
    ints.iter()
        .map(|x| (x / &scale).to_i64().ok_or(Error::KernelOverflow))
        .collect()
}

/// Rank of an integer matrix over the rationals.
pub(crate) fn rank(matrix: &[Vec<i64>], ncols: usize) -> usize {
    rref(matrix, ncols).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crab_kernel_is_one_one_minus_one() {
        let a = vec![vec![1, 0, 1], vec![0, 1, 1]];
        let r = rref(&a, 3);
        assert_eq!(r.rank(), 2);
        assert_eq!(integer_kernel(&r).unwrap(), vec![vec![1, 1, -1]]);
    }

    #[test]
    fn kernel_rows_are_reduced() {
        // x + 2y + 4z = 0 gives rational entries before clearing denominators
        let a = vec![vec![2, 4, 8]];
        let k = integer_kernel(&rref(&a, 3)).unwrap();
        assert_eq!(k, vec![vec![2, -1, 0], vec![4, 0, -1]]);
        for row in &k {
            let first = row.iter().find(|v| **v != 0).unwrap();
            assert!(*first > 0);
        }
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let a = vec![vec![0, 0]];
        let r = rref(&a, 2);
        assert_eq!(r.rank(), 0);
        assert_eq!(integer_kernel(&r).unwrap(), vec![vec![1, 0], vec![0, 1]]);
    }
}
