//! Exact rational linear algebra.

use rug::Rational;

use crate::error::{Error, Result};

pub type RatMatrix = Vec<Vec<Rational>>;

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(mut rows: RatMatrix) -> (RatMatrix, Vec<usize>) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::from(rows[r][col].recip_ref());
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if *y != 0 {
                    *x -= Rational::from(&f * y);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(rows: RatMatrix) -> usize {
    rref(rows).1.len()
}

/// Solve `A x = b` exactly by Gaussian elimination with row pivoting.
pub fn solve(a: &RatMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    let n = a.len();
    let mut m: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| m[i][col] != 0).ok_or(Error::SingularSystem { index: col })?;
        m.swap(col, p);
        let inv = Rational::from(m[col][col].recip_ref());
        let pivot_row = m[col].clone();
        for row in m.iter_mut().skip(col + 1) {
            if row[col] == 0 {
                continue;
            }
            let f = Rational::from(&row[col] * &inv);
            for k in col..=n {
                if pivot_row[k] != 0 {
                    row[k] -= Rational::from(&f * &pivot_row[k]);
                }
            }
        }
    }
    let mut x = vec![Rational::new(); n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].clone();
        for k in i + 1..n {
            if m[i][k] != 0 {
                acc -= Rational::from(&m[i][k] * &x[k]);
            }
        }
        x[i] = acc / &m[i][i];
    }
    Ok(x)
}

/// Integer matrix product.
pub fn int_matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

pub fn int_transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn int_identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn int_matvec(a: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn rref_rank() {
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(1)]];
        let (r, piv) = rref(m);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r[0], vec![q(1), q(0), q(1)]);
    }

    #[test]
    fn solve_small() {
        let a = vec![vec![q(1), q(0)], vec![q(0), q(2)]];
        let x = solve(&a, &[q(1), q(1)]).unwrap();
        assert_eq!(x, vec![q(1), Rational::from((1, 2))]);
        let sing = vec![vec![q(1), q(1)], vec![q(1), q(1)]];
        assert!(solve(&sing, &[q(1), q(2)]).is_err());
    }
}
