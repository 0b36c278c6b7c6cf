//! Cholesky–Banachiewicz factorisation of moment matrices and inversion of
//! lower-triangular tables.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Dense;
use crate::moments::HankelMoments;
use crate::scalar::Scalar;

/// What a [`TriangularTable`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableRole {
    /// Cholesky factor of the moment matrix.
    L,
    /// Power coefficients of the orthonormal polynomials.
    Pi,
    /// Expansion of monomials in orthonormal polynomials.
    Lambda,
    /// Power coefficients of the monic polynomials.
    Eta,
    /// Expansion of monomials in monic polynomials.
    Tau,
    /// Auxiliary sequences of the recurrence solutions.
    XiZeta,
    /// Power coefficients of the associated polynomials.
    Associated,
    /// Connection coefficients between two systems.
    Connection,
}

/// Lower-triangular array `t_{i,j}`, `0 ≤ j ≤ i ≤ n`, stored by rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangularTable<S> {
    role: TableRole,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> TriangularTable<S> {
    /// Builds a table from rows; row `i` must have `i + 1` entries.
    pub fn from_rows(role: TableRole, rows: Vec<Vec<S>>) -> Self {
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), i + 1, "row {i} of a triangular table must have {} entries", i + 1);
        }
        TriangularTable { role, rows }
    }

    pub fn identity(order: usize, role: TableRole) -> Self {
        let rows = (0..=order)
            .map(|i| (0..=i).map(|j| if i == j { S::one() } else { S::zero() }).collect())
            .collect();
        TriangularTable { role, rows }
    }

    pub fn role(&self) -> TableRole {
        self.role
    }

    pub fn with_role(mut self, role: TableRole) -> Self {
        self.role = role;
        self
    }

    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    /// Entry `(i, j)`; zero above the diagonal.
    pub fn get(&self, i: usize, j: usize) -> S {
        if j > i {
            S::zero()
        } else {
            self.rows[i][j].clone()
        }
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn diagonal(&self) -> Vec<S> {
        (0..=self.order()).map(|i| self.rows[i][i].clone()).collect()
    }

    /// Leading `(order+1)×(order+1)` block.
    pub fn truncated(&self, order: usize) -> Self {
        TriangularTable {
            role: self.role,
            rows: self.rows[..=order].to_vec(),
        }
    }

    pub fn to_dense(&self) -> Dense<S> {
        let n = self.order();
        (0..=n).map(|i| (0..=n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Product of two lower-triangular tables of equal order.
    pub fn mul(&self, other: &Self, role: TableRole) -> Self {
        let n = self.order().min(other.order());
        let rows = (0..=n)
            .map(|i| {
                (0..=i)
                    .map(|j| {
                        (j..=i).fold(S::zero(), |acc, k| {
                            let (x, y) = (&self.rows[i][k], &other.rows[k][j]);
                            if x.is_zero() || y.is_zero() {
                                acc
                            } else {
                                acc + x.clone() * y.clone()
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        TriangularTable { role, rows }
    }

    /// `T · Tᵀ` as a dense symmetric matrix.
    pub fn gram(&self) -> Dense<S> {
        let n = self.order();
        (0..=n)
            .map(|i| {
                (0..=n)
                    .map(|j| {
                        (0..=i.min(j)).fold(S::zero(), |acc, k| acc + self.get(i, k) * self.get(j, k))
                    })
                    .collect()
            })
            .collect()
    }

    /// `Tᵀ · T` as a dense symmetric matrix.
    pub fn gram_transposed(&self) -> Dense<S> {
        let n = self.order();
        (0..=n)
            .map(|i| {
                (0..=n)
                    .map(|j| {
                        (i.max(j)..=n).fold(S::zero(), |acc, k| acc + self.get(k, i) * self.get(k, j))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TriangularTable<T> {
        TriangularTable {
            role: self.role,
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }
}

/// Float pivots at or below this fraction of `m_{2k}` count as breakdown.
pub const FLOAT_PIVOT_THRESHOLD: f64 = 1e-12;

/// `M = L·Lᵀ` with `L` lower triangular and positive diagonal.
///
/// Rows are filled in Banachiewicz order:
/// `l_{n,k} = (m_{n+k} − Σ_{j<k} l_{n,j} l_{k,j}) / l_{k,k}` for `k < n`,
/// then `l_{n,n} = √(m_{2n} − Σ_{j<n} l_{n,j}²)`.
pub fn cholesky_decompose<S: Scalar>(m: &HankelMoments<S>) -> Result<TriangularTable<S>> {
    let n = m.order();
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row: Vec<S> = Vec::with_capacity(i + 1);
        for (k, prev) in rows.iter().enumerate() {
            let s = (0..k).fold(m.entry(i, k).clone(), |acc, j| {
                if row[j].is_zero() || prev[j].is_zero() {
                    acc
                } else {
                    acc - row[j].clone() * prev[j].clone()
                }
            });
            row.push(if s.is_zero() { S::zero() } else { s / prev[k].clone() });
        }
        let diag = m.entry(i, i).clone();
        let pivot = row.iter().fold(diag.clone(), |acc, v| {
            if v.is_zero() {
                acc
            } else {
                acc - v.square()
            }
        });
        let failed = if S::EXACT {
            !pivot.is_positive()
        } else {
            pivot.to_f64() <= FLOAT_PIVOT_THRESHOLD * diag.to_f64().abs()
        };
        if failed {
            return Err(Error::NotPositiveDefinite { order: i });
        }
        row.push(pivot.sqrt()?);
        rows.push(row);
    }
    Ok(TriangularTable {
        role: TableRole::L,
        rows,
    })
}

/// Squared Cholesky pivots `l_{k,k}²` (rational in exact mode).
pub fn squared_pivots<S: Scalar>(l: &TriangularTable<S>) -> Vec<S> {
    l.diagonal().iter().map(Scalar::square).collect()
}

/// Inverse of a lower-triangular table by forward substitution.
pub fn invert_lower_triangular<S: Scalar>(t: &TriangularTable<S>) -> Result<TriangularTable<S>> {
    let n = t.order();
    if let Some(index) = (0..=n).find(|&i| t.rows[i][i].is_zero()) {
        return Err(Error::ZeroDiagonal { index });
    }
    let mut inv: Vec<Vec<S>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let diag = t.rows[i][i].clone();
        let mut row: Vec<S> = vec![S::zero(); i + 1];
        row[i] = S::one() / diag.clone();
        for j in (0..i).rev() {
            // (T⁻¹)_{i,j} = −(Σ_{k=j}^{i−1} t_{i,k} (T⁻¹)_{k,j}) / t_{i,i}
            let s = (j..i).fold(S::zero(), |acc, k| {
                let (x, y) = (&t.rows[i][k], &inv[k][j]);
                if x.is_zero() || y.is_zero() {
                    acc
                } else {
                    acc + x.clone() * y.clone()
                }
            });
            row[j] = if s.is_zero() { S::zero() } else { -(s / diag.clone()) };
        }
        inv.push(row);
    }
    let role = match t.role {
        TableRole::L | TableRole::Lambda => TableRole::Pi,
        TableRole::Pi => TableRole::L,
        TableRole::Eta => TableRole::Tau,
        TableRole::Tau => TableRole::Eta,
        other => other,
    };
    Ok(TriangularTable { role, rows: inv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{hankel_matrix, make_moments, Family, FamilySpec, MomentSequence};
    use crate::scalar::Surd;

    fn s(text: &str) -> Surd {
        text.parse().unwrap()
    }

    fn gaussian(count: usize) -> MomentSequence<Surd> {
        make_moments(&FamilySpec::new(Family::Gaussian, count)).unwrap()
    }

    #[test]
    fn gaussian_order_two_factor() {
        let h = hankel_matrix(&gaussian(5), 2).unwrap();
        let l = cholesky_decompose(&h).unwrap();
        assert_eq!(l.rows(), &[vec![s("1")], vec![s("0"), s("1")], vec![s("1"), s("0"), s("sqrt(2)")]]);
        assert_eq!(&l.gram(), h.entries());
    }

    #[test]
    fn first_pivot_is_the_variance() {
        // l_{1,1} = √(m₂ − m₁²)
        let m = MomentSequence::new("m", vec![s("1"), s("1/2"), s("1")]).unwrap();
        let l = cholesky_decompose(&hankel_matrix(&m, 1).unwrap()).unwrap();
        assert_eq!(l.get(1, 1), s("sqrt(3/4)"));
        assert_eq!(l.get(1, 0), s("1/2"));
    }

    #[test]
    fn order_zero_is_one() {
        let l = cholesky_decompose(&hankel_matrix(&gaussian(1), 0).unwrap()).unwrap();
        assert_eq!(l.rows(), &[vec![s("1")]]);
    }

    #[test]
    fn detects_loss_of_definiteness() {
        // m₂ = m₁² ⇒ a one-point measure
        let m = MomentSequence::new("dirac", vec![s("1"), s("2"), s("4"), s("8"), s("16")]).unwrap();
        let err = cholesky_decompose(&hankel_matrix(&m, 2).unwrap()).unwrap_err();
        assert_eq!(err, Error::NotPositiveDefinite { order: 1 });
        let mf = m.map(|v| v.to_f64());
        let err = cholesky_decompose(&hankel_matrix(&mf, 2).unwrap()).unwrap_err();
        assert_eq!(err, Error::NotPositiveDefinite { order: 1 });
    }

    #[test]
    fn pivots_are_delta_ratios() {
        let m: MomentSequence<Surd> = make_moments(&FamilySpec::new(Family::Chebyshev1, 17)).unwrap();
        let h = hankel_matrix(&m, 8).unwrap();
        let l = cholesky_decompose(&h).unwrap();
        let d = squared_pivots(&l);
        for n in 1..=8 {
            assert_eq!(d[n].clone() * h.deltas()[n - 1].clone(), h.deltas()[n]);
        }
    }

    #[test]
    fn inverse_examples() {
        let id = TriangularTable::<Surd>::identity(3, TableRole::L);
        assert_eq!(invert_lower_triangular(&id).unwrap().rows(), id.rows());

        let l = cholesky_decompose(&hankel_matrix(&gaussian(5), 2).unwrap()).unwrap();
        let pi = invert_lower_triangular(&l).unwrap();
        assert_eq!(pi.role(), TableRole::Pi);
        assert_eq!(pi.row(2), &[s("-1/2*sqrt(2)"), s("0"), s("1/2*sqrt(2)")]);

        // [[1,0],[m1,l11]]⁻¹ = [[1,0],[−m1/l11, 1/l11]]
        let t = TriangularTable::from_rows(
            TableRole::L,
            vec![vec![s("1")], vec![s("1/3"), s("sqrt(5)")]],
        );
        let inv = invert_lower_triangular(&t).unwrap();
        assert_eq!(inv.row(1), &[s("-1/15*sqrt(5)"), s("1/5*sqrt(5)")]);

        let singular = TriangularTable::from_rows(TableRole::L, vec![vec![s("1")], vec![s("1"), s("0")]]);
        assert_eq!(invert_lower_triangular(&singular).unwrap_err(), Error::ZeroDiagonal { index: 1 });
    }

    #[test]
    fn float_backend_residual() {
        let m: MomentSequence<f64> = make_moments(&FamilySpec::new(Family::Uniform, 17)).unwrap();
        let h = hankel_matrix(&m, 8).unwrap();
        let l = cholesky_decompose(&h).unwrap();
        let err = crate::linalg::max_abs_diff(&l.gram(), h.entries());
        assert!(err <= 1e-12, "{err}");
    }
}
