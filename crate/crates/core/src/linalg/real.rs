use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::{Error, Result};

/// Dense square real matrix, row-major. Used for Born matrices and Gram
/// matrices of Hermitian operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct RealMatrix<T> {
    dim: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Real> RealMatrix<T> {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let rows = (0..dim).map(|i| (0..dim).map(|j| f(i, j)).collect()).collect();
        Self { dim, rows }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// All-ones matrix `J`.
    pub fn ones(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| T::one())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_fn(self.dim, |i, j| {
            (0..self.dim).map(|k| self.rows[i][k] * other.rows[k][j]).sum()
        })
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.dim);
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.dim, |i, j| self.rows[i][j] - other.rows[i][j])
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(self.dim, |i, j| self.rows[i][j] * s)
    }

    pub fn frobenius_norm_sq(&self) -> T {
        self.rows.iter().flatten().map(|x| *x * *x).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> T {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.rows[i][j].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Gauss-Jordan inverse with partial pivoting. Returns the inverse and the
    /// 1-norm condition number `‖A‖₁‖A⁻¹‖₁`.
    pub fn inverse_with_condition(&self) -> Result<(Self, T)> {
        let n = self.dim;
        let mut a = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        let scale = self.rows.iter().flatten().fold(T::zero(), |m, x| m.max(x.abs()));
        if scale.is_zero() {
            return Err(Error::Singular(0.0));
        }
        let tiny = T::epsilon() * scale * T::lit(n as f64);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| {
                    a[i][col]
                        .abs()
                        .partial_cmp(&a[j][col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty pivot range");
            if a[piv][col].abs() <= tiny {
                return Err(Error::Singular(a[piv][col].abs().as_f64()));
            }
            a.swap(col, piv);
            inv.swap(col, piv);
            let p = a[col][col];
            for j in 0..n {
                a[col][j] = a[col][j] / p;
                inv[col][j] = inv[col][j] / p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[i][col];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[i][j] = a[i][j] - f * a[col][j];
                    inv[i][j] = inv[i][j] - f * inv[col][j];
                }
            }
        }
        let inv = Self { dim: n, rows: inv };
        let cond = self.norm_1() * inv.norm_1();
        Ok((inv, cond))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_j_minus_i() {
        // (J - I)^{-1} = J/3 - I for n = 4
        let m = RealMatrix::<f64>::ones(4).sub(&RealMatrix::identity(4));
        let (inv, cond) = m.inverse_with_condition().unwrap();
        let expected = RealMatrix::ones(4).scale(1.0 / 3.0).sub(&RealMatrix::identity(4));
        assert!(inv.max_abs_diff(&expected) < 1e-14);
        assert!(cond > 1.0 && cond < 10.0);
    }

    #[test]
    fn singular_is_reported() {
        let j = RealMatrix::<f64>::ones(3);
        assert!(matches!(j.inverse_with_condition(), Err(Error::Singular(_))));
    }
}
