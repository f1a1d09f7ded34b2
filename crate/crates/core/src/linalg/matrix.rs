//! Dense square complex matrices.
//!
//! Storage is row-major. Tensor products use the row-major block convention:
//! in `a ⊗ b` the left factor indexes the outer blocks, so entry
//! `((i1, i2), (j1, j2))` sits at row `i1 * db + i2`, column `j1 * db + j2`.
//! Factor 1 is always the leftmost one.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{cr, Real, C};
use crate::{Error, Result};

/// A `dim × dim` matrix of complex numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    into = "MatrixRepr<T>",
    try_from = "MatrixRepr<T>",
    bound(serialize = "T: Real", deserialize = "T: Real")
)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

/// Wire form: `{ "dim": n, "re": [[...]], "im": [[...]] }`, row-major.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixRepr<T> {
    pub dim: usize,
    pub re: Vec<Vec<T>>,
    pub im: Vec<Vec<T>>,
}

impl<T: Real> From<ComplexMatrix<T>> for MatrixRepr<T> {
    fn from(m: ComplexMatrix<T>) -> Self {
        let n = m.dim;
        let rows = |f: fn(&C<T>) -> T| {
            m.data
                .chunks(n.max(1))
                .take(n)
                .map(|r| r.iter().map(f).collect())
                .collect()
        };
        MatrixRepr {
            dim: n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl<T: Real> TryFrom<MatrixRepr<T>> for ComplexMatrix<T> {
    type Error = Error;

    fn try_from(r: MatrixRepr<T>) -> Result<Self> {
        let n = r.dim;
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        let shape_ok = |rows: &Vec<Vec<T>>| rows.len() == n && rows.iter().all(|row| row.len() == n);
        if !shape_ok(&r.re) || !shape_ok(&r.im) {
            return Err(Error::InvalidInput(format!("re/im arrays must both be {n}x{n}")));
        }
        let data =
            r.re.iter()
                .flatten()
                .zip(r.im.iter().flatten())
                .map(|(&re, &im)| Complex::new(re, im))
                .collect();
        Ok(Self { dim: n, data })
    }
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { C::one() } else { C::zero() })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds from row-major entries; the length must be a perfect square.
    pub fn from_row_major(data: Vec<C<T>>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::InvalidInput(format!(
                "{} entries do not form a square matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[&[C<T>]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("rows must form a square array".into()));
        }
        Self::from_row_major(rows.iter().flat_map(|r| r.iter().copied()).collect())
    }

    pub fn diagonal(diag: &[C<T>]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { C::zero() })
    }

    pub fn real_diagonal(diag: &[T]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { cr(diag[i]) } else { C::zero() })
    }

    /// Rank-1 operator `|u⟩⟨v|`.
    pub fn outer(u: &[C<T>], v: &[C<T>]) -> Self {
        assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    /// Projector onto the ray spanned by `v` (normalizes first).
    pub fn projector(v: &[C<T>]) -> Self {
        let n = vector_norm(v);
        let u: Vec<_> = v.iter().map(|z| *z / n).collect();
        Self::outer(&u, &u)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C<T> {
        assert_eq!(self.dim, other.dim, "dimension mismatch in trace_product");
        let n = self.dim;
        let mut acc = C::zero();
        for i in 0..n {
            for k in 0..n {
                acc = acc + self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    pub fn frobenius_norm_sq(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_norm_sq().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_distance(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch in frobenius_distance");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Largest entry of `|A - A†|`.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn ensure_hermitian(&self, tol: T) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > tol {
            Err(Error::NotHermitian(defect.as_f64()))
        } else {
            Ok(())
        }
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> T {
        (&self.dagger() * self).frobenius_distance(&Self::identity(self.dim))
    }

    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).fold(C::zero(), |acc, (a, x)| acc + *a * *x))
            .collect()
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.dagger()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = vec![C::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o = *o + a * *b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// Matrix power for small non-negative exponents.
    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::identity(self.dim), |acc, _| &acc * self)
    }

    /// Serializes to the `{dim, re, im}` JSON schema.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("matrix JSON: {e}")))
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

/// Sum of a non-empty slice of equally sized matrices.
pub fn sum_matrices<T: Real>(ms: &[ComplexMatrix<T>]) -> ComplexMatrix<T> {
    let mut it = ms.iter();
    let first = it.next().expect("sum of an empty matrix list").clone();
    it.fold(first, |acc, m| &acc + m)
}

pub fn vector_norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// `⟨u|v⟩`, antilinear in the first slot.
pub fn inner<T: Real>(u: &[C<T>], v: &[C<T>]) -> C<T> {
    assert_eq!(u.len(), v.len());
    u.iter().zip(v).fold(C::zero(), |acc, (a, b)| acc + a.conj() * *b)
}

/// Kronecker product of state vectors, leftmost factor outermost.
pub fn kron_vec<T: Real>(u: &[C<T>], v: &[C<T>]) -> Vec<C<T>> {
    u.iter().flat_map(|a| v.iter().map(move |b| *a * *b)).collect()
}
