//! Dense Gaussian elimination over exact rationals. Small systems only; the
//! vertex sets in scope stay under a hundred unknowns.

use num::rational::BigRational;
use num::traits::Zero;

use crate::error::{Error, Result};

/// Sparse row: (column, coefficient) pairs. Homogeneous unless paired with a
/// right-hand side elsewhere.
pub type SparseRow = Vec<(usize, BigRational)>;

fn densify(rows: &[SparseRow], ncols: usize) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| {
            let mut dense = vec![BigRational::zero(); ncols];
            for (c, v) in r {
                dense[*c] = &dense[*c] + v;
            }
            dense
        })
        .collect()
}

fn forward_eliminate(m: &mut [Vec<BigRational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for j in c..m[r].len() {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..m[i].len() {
                    let delta = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of the homogeneous system given by sparse rows on `ncols` unknowns.
pub fn rank(rows: &[SparseRow], ncols: usize) -> usize {
    let mut m = densify(rows, ncols);
    forward_eliminate(&mut m, ncols).len()
}

/// Dimension of the solution space of the homogeneous system.
pub fn nullity(rows: &[SparseRow], ncols: usize) -> usize {
    ncols - rank(rows, ncols)
}

/// Unique solution of the inhomogeneous system (rows | rhs); errors if the
/// system is inconsistent or underdetermined.
pub fn solve_unique(rows: &[SparseRow], rhs: &[BigRational], ncols: usize) -> Result<Vec<BigRational>> {
    assert_eq!(rows.len(), rhs.len());
    let mut m = densify(rows, ncols);
    for (row, b) in m.iter_mut().zip(rhs) {
        row.push(b.clone());
    }
    let pivots = forward_eliminate(&mut m, ncols);
    for row in &m {
        if row[..ncols].iter().all(|v| v.is_zero()) && !row[ncols].is_zero() {
            return Err(Error::SystemSingular("inconsistent system".into()));
        }
    }
    if pivots.len() < ncols {
        return Err(Error::SystemSingular(format!(
            "rank {} < {} unknowns",
            pivots.len(),
            ncols
        )));
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (ri, &c) in pivots.iter().enumerate() {
        x[c] = m[ri][ncols].clone();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn solves_a_small_system() {
        // x + y = 3, x - y = 1
        let rows = vec![vec![(0, r(1)), (1, r(1))], vec![(0, r(1)), (1, r(-1))]];
        let x = solve_unique(&rows, &[r(3), r(1)], 2).unwrap();
        assert_eq!(x, vec![r(2), r(1)]);
    }

    #[test]
    fn detects_singular_and_inconsistent_systems() {
        let rows = vec![vec![(0, r(1)), (1, r(1))], vec![(0, r(2)), (1, r(2))]];
        assert!(matches!(
            solve_unique(&rows, &[r(1), r(2)], 2),
            Err(Error::SystemSingular(_))
        ));
        assert!(matches!(
            solve_unique(&rows, &[r(1), r(3)], 2),
            Err(Error::SystemSingular(_))
        ));
        assert_eq!(nullity(&rows, 2), 1);
    }
}
