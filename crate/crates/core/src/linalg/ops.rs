use super::{hermitian_eigen, ComplexMatrix};
use crate::scalar::{Real, Tolerance, C};
use crate::{Error, Result};

/// Kronecker product `a ⊗ b` in the row-major block convention.
pub fn tensor_product<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let db = b.dim();
    ComplexMatrix::from_fn(a.dim() * db, |i, j| a[(i / db, j / db)] * b[(i % db, j % db)])
}

/// Kronecker product of a non-empty list of factors, leftmost outermost.
pub fn tensor_all<T: Real>(factors: &[&ComplexMatrix<T>]) -> ComplexMatrix<T> {
    let (first, rest) = factors.split_first().expect("tensor product of no factors");
    rest.iter().fold((*first).clone(), |acc, f| tensor_product(&acc, f))
}

/// Traces out the factors listed in `traced` from an operator on
/// `⊗_k C^{factor_dims[k]}`. Kept factors retain their order. Tracing every
/// factor yields the 1×1 matrix `[tr m]`.
pub fn partial_trace<T: Real>(
    m: &ComplexMatrix<T>,
    factor_dims: &[usize],
    traced: &[usize],
) -> Result<ComplexMatrix<T>> {
    let total: usize = factor_dims.iter().product();
    if factor_dims.is_empty() || factor_dims.contains(&0) || total != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            actual: total,
        });
    }
    let nf = factor_dims.len();
    if let Some(&bad) = traced.iter().find(|&&t| t >= nf) {
        return Err(Error::InvalidInput(format!(
            "traced factor {bad} out of range for {nf} factors"
        )));
    }
    let is_traced: Vec<bool> = (0..nf).map(|k| traced.contains(&k)).collect();
    let kept: Vec<usize> = (0..nf).filter(|&k| !is_traced[k]).collect();
    let out_dim: usize = kept.iter().map(|&k| factor_dims[k]).product();

    // strides of the full index (row-major, factor 0 outermost)
    let mut strides = vec![1usize; nf];
    for k in (0..nf.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * factor_dims[k + 1];
    }

    let mut out = ComplexMatrix::zeros(out_dim);
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut d = vec![0; nf];
        for k in (0..nf).rev() {
            d[k] = idx % factor_dims[k];
            idx /= factor_dims[k];
        }
        d
    };
    let compress = |d: &[usize]| kept.iter().fold(0usize, |acc, &k| acc * factor_dims[k] + d[k]);

    for row in 0..total {
        let dr = digits(row);
        let or = compress(&dr);
        // the column shares every traced digit with the row
        for ocol in 0..out_dim {
            let mut rem = ocol;
            let mut col = 0usize;
            for &k in kept.iter().rev() {
                col += (rem % factor_dims[k]) * strides[k];
                rem /= factor_dims[k];
            }
            for k in 0..nf {
                if is_traced[k] {
                    col += dr[k] * strides[k];
                }
            }
            out[(or, ocol)] = out[(or, ocol)] + m[(row, col)];
        }
    }
    Ok(out)
}

/// `X = m^{-1/2}` for Hermitian positive definite `m`, so that `X m X = I`.
pub fn inv_sqrt_psd<T: Real>(m: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eigen(m, tol.eq_tol)?;
    let top = eig.max_abs_value();
    let low = eig.min_value();
    if top.is_zero() || low <= tol.rank_tol * top {
        return Err(Error::Singular(low.as_f64()));
    }
    Ok(eig.reconstruct_with(|l| T::one() / l.sqrt()))
}

/// Number of eigenvalues whose magnitude exceeds `rank_tol · max|λ|`.
pub fn rank_of<T: Real>(m: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<usize> {
    let eig = hermitian_eigen(m, tol.eq_tol)?;
    let cut = tol.rank_tol * eig.max_abs_value();
    Ok(eig.values.iter().filter(|l| l.abs() > cut).count())
}

pub fn min_eigenvalue<T: Real>(m: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<T> {
    Ok(hermitian_eigen(m, tol.eq_tol)?.min_value())
}

/// True iff the smallest eigenvalue is at least `-eq_tol`.
pub fn is_psd<T: Real>(m: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<bool> {
    Ok(min_eigenvalue(m, tol)? >= -tol.eq_tol)
}

pub fn frobenius_norm_sq<T: Real>(m: &ComplexMatrix<T>) -> T {
    m.frobenius_norm_sq()
}

pub fn dagger<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    m.dagger()
}

pub fn trace<T: Real>(m: &ComplexMatrix<T>) -> C<T> {
    m.trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::scalar::c;

    type M = ComplexMatrix<f64>;

    fn bell() -> M {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        M::projector(&[c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)])
    }

    #[test]
    fn identity_tensor_identity() {
        assert_eq!(tensor_product(&M::identity(2), &M::identity(2)), M::identity(4));
    }

    #[test]
    fn zz_is_diagonal() {
        let z = pauli::<f64>(3);
        let zz = tensor_product(&z, &z);
        assert_eq!(zz, M::real_diagonal(&[1., -1., -1., 1.]));
    }

    #[test]
    fn xx_squares_to_identity() {
        let x = pauli::<f64>(1);
        let xx = tensor_product(&x, &x);
        assert_eq!(&xx * &xx, M::identity(4));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let r = partial_trace(&bell(), &[2, 2], &[1]).unwrap();
        assert!(r.max_abs_diff(&M::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn product_marginal_factorizes() {
        let a = M::from_fn(2, |i, j| c((i + 1) as f64, j as f64));
        let b = M::from_fn(3, |i, j| c((i * j) as f64 + 0.5, (i as f64) - (j as f64)));
        let ab = tensor_product(&a, &b);
        let left = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(left.max_abs_diff(&a.scale(b.trace())) < 1e-13);
        let right = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        assert!(right.max_abs_diff(&b.scale(a.trace())) < 1e-13);
    }

    #[test]
    fn full_trace_is_one_by_one() {
        let m = M::from_fn(4, |i, j| c((i * 4 + j) as f64, 0.));
        let r = partial_trace(&m, &[2, 2], &[0, 1]).unwrap();
        assert_eq!(r.dim(), 1);
        assert_eq!(r[(0, 0)], m.trace());
    }

    #[test]
    fn partial_trace_dimension_error_names_sizes() {
        let err = partial_trace(&M::identity(4), &[2, 3], &[0]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 4, actual: 6 });
        assert!(err.to_string().contains("expected 4, got 6"));
    }

    #[test]
    fn inv_sqrt_of_identity_and_diagonal() {
        let tol = Tolerance::default();
        assert!(
            inv_sqrt_psd(&M::identity(3), &tol)
                .unwrap()
                .max_abs_diff(&M::identity(3))
                < 1e-15
        );
        let x = inv_sqrt_psd(&M::real_diagonal(&[4.0, 1.0]), &tol).unwrap();
        assert!(x.max_abs_diff(&M::real_diagonal(&[0.5, 1.0])) < 1e-15);
    }

    #[test]
    fn inv_sqrt_rejects_singular_and_non_hermitian() {
        let tol = Tolerance::default();
        assert!(matches!(
            inv_sqrt_psd(&M::real_diagonal(&[1.0, 0.0]), &tol),
            Err(Error::Singular(_))
        ));
        let nh = M::from_rows(&[&[c(1., 0.), c(2., 0.)], &[c(0., 0.), c(1., 0.)]]).unwrap();
        assert!(matches!(inv_sqrt_psd(&nh, &tol), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rank_psd_norm_basics() {
        let tol = Tolerance::default();
        assert_eq!(rank_of(&M::identity(3), &tol).unwrap(), 3);
        assert!(!is_psd(&M::identity(2).scale_real(-1.0), &tol).unwrap());
        assert!(is_psd(&M::identity(2), &tol).unwrap());
        assert_eq!(frobenius_norm_sq(&M::real_diagonal(&[3.0, -1.0])), 10.0);
        assert_eq!(trace(&M::real_diagonal(&[3.0, -1.0])), c(2.0, 0.0));
    }
}
