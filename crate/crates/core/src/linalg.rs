//! Small dense-matrix helpers shared by the table builders.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major square or rectangular matrix.
pub type Dense<S> = Vec<Vec<S>>;

pub fn identity<S: Scalar>(n: usize) -> Dense<S> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect()
}

pub fn transpose<S: Scalar>(a: &Dense<S>) -> Dense<S> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul<S: Scalar>(a: &Dense<S>, b: &Dense<S>) -> Dense<S> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(S::zero(), |acc, k| {
                        if row[k].is_zero() || b[k][j].is_zero() {
                            acc
                        } else {
                            acc + row[k].clone() * b[k][j].clone()
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<S: Scalar>(a: &Dense<S>, v: &[S]) -> Vec<S> {
    a.iter()
        .map(|row| dot(row, v))
        .collect()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            acc + x.clone() * y.clone()
        }
    })
}

/// Max-norm of the entrywise difference, as `f64`.
pub fn max_abs_diff<S: Scalar>(a: &Dense<S>, b: &Dense<S>) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x.clone() - y.clone()).to_f64().abs()))
        .fold(0.0, f64::max)
}

pub fn max_abs<S: Scalar>(a: &Dense<S>) -> f64 {
    a.iter().flatten().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

/// Index of the pivot row for column `col`, searching rows `col..`.
/// Exact backends take the first nonzero entry, floats the largest.
fn pivot_row<S: Scalar>(a: &Dense<S>, col: usize) -> Option<usize> {
    let rows = col..a.len();
    if S::EXACT {
        rows.into_iter().find(|&r| !a[r][col].is_zero())
    } else {
        rows.into_iter()
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&x, &y| a[x][col].to_f64().abs().total_cmp(&a[y][col].to_f64().abs()))
    }
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn bareiss_determinant<S: Scalar>(matrix: &Dense<S>) -> S {
    let n = matrix.len();
    if n == 0 {
        return S::one();
    }
    let mut a = matrix.clone();
    let mut prev = S::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = pivot_row(&a, k) else {
            return S::zero();
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = num / prev.clone();
            }
            a[i][k] = S::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// All leading principal minors `Δ_0..Δ_{n-1}` of a square matrix in a
/// single Bareiss sweep. After step `k` the pivot equals the `(k+1)×(k+1)`
/// leading minor. A vanishing minor stops the sweep; the remaining minors
/// are then computed one at a time with pivoting.
pub fn leading_minors<S: Scalar>(matrix: &Dense<S>) -> Vec<S> {
    let n = matrix.len();
    let mut a = matrix.clone();
    let mut minors = Vec::with_capacity(n);
    let mut prev = S::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            for m in k..n {
                let sub: Dense<S> = matrix[..=m].iter().map(|row| row[..=m].to_vec()).collect();
                minors.push(bareiss_determinant(&sub));
            }
            return minors;
        }
        minors.push(a[k][k].clone());
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = num / prev.clone();
            }
            a[i][k] = S::zero();
        }
        prev = a[k][k].clone();
    }
    minors
}

/// Inverse by Gauss–Jordan elimination.
pub fn invert<S: Scalar>(matrix: &Dense<S>) -> Result<Dense<S>> {
    let n = matrix.len();
    let mut a = matrix.clone();
    let mut inv = identity::<S>(n);
    for col in 0..n {
        let p = pivot_row(&a, col).ok_or(Error::Numeric(format!("singular matrix at column {col}")))?;
        a.swap(p, col);
        inv.swap(p, col);
        let piv = a[col][col].clone();
        for j in 0..n {
            a[col][j] = a[col][j].clone() / piv.clone();
            inv[col][j] = inv[col][j].clone() / piv.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                if !a[col][j].is_zero() {
                    a[r][j] = a[r][j].clone() - f.clone() * a[col][j].clone();
                }
                if !inv[col][j].is_zero() {
                    inv[r][j] = inv[r][j].clone() - f.clone() * inv[col][j].clone();
                }
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Surd};

    fn q(p: i64, d: i64) -> Surd {
        Surd::rational(ratio(p, d))
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = vec![
            vec![q(1, 1), q(0, 1), q(1, 1)],
            vec![q(0, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(0, 1), q(3, 1)],
        ];
        assert_eq!(bareiss_determinant(&m), q(2, 1));
        assert_eq!(leading_minors(&m), vec![q(1, 1), q(1, 1), q(2, 1)]);
    }

    #[test]
    fn minors_survive_a_zero_pivot() {
        let m = vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]];
        assert_eq!(leading_minors(&m), vec![q(0, 1), q(-1, 1)]);
    }

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        let inv = invert(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity(2));
        assert!(invert(&vec![vec![q(0, 1)]]).is_err());
    }
}
