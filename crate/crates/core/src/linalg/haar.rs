//! Haar-distributed unitaries from the QR decomposition of a complex
//! Ginibre matrix, with the diagonal of `R` rotated to the positive reals.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{matrix::vector_norm, ComplexMatrix};
use crate::scalar::{Real, C};

/// Matrix of i.i.d. standard complex Gaussians (variance ½ per component).
pub fn complex_gaussian_matrix<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re * s), T::lit(im * s))
    })
}

/// Householder QR: returns `(Q, R)` with `Q` unitary and `R` upper
/// triangular with a real non-negative diagonal.
pub fn qr_decompose<T: Real>(a: &ComplexMatrix<T>) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let n = a.dim();
    let mut r = a.clone();
    let mut q = ComplexMatrix::<T>::identity(n);
    for k in 0..n {
        let x: Vec<C<T>> = (k..n).map(|i| r[(i, k)]).collect();
        let xnorm = vector_norm(&x);
        if xnorm.is_zero() {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm().is_zero() { C::one() } else { x0 / x0.norm() };
        // v = x + e^{iθ}‖x‖ e_1 avoids cancellation
        let mut v = x.clone();
        v[0] = v[0] + phase * xnorm;
        let vnorm = vector_norm(&v);
        if vnorm.is_zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vnorm;
        }
        let two = T::lit(2.0);
        // R <- (I - 2vv†) R on rows k..n
        for j in 0..n {
            let dot = (k..n).fold(C::<T>::zero(), |acc, i| acc + v[i - k].conj() * r[(i, j)]);
            for i in k..n {
                r[(i, j)] = r[(i, j)] - v[i - k] * dot * two;
            }
        }
        // Q <- Q (I - 2vv†) on columns k..n
        for i in 0..n {
            let dot = (k..n).fold(C::<T>::zero(), |acc, j| acc + q[(i, j)] * v[j - k]);
            for j in k..n {
                q[(i, j)] = q[(i, j)] - dot * v[j - k].conj() * two;
            }
        }
    }
    // rotate R's diagonal onto the positive reals: A = (Q Λ)(Λ† R)
    for k in 0..n {
        let d = r[(k, k)];
        let m = d.norm();
        let lam = if m.is_zero() { C::one() } else { d / m };
        for j in 0..n {
            r[(k, j)] = lam.conj() * r[(k, j)];
        }
        for i in 0..n {
            q[(i, k)] = q[(i, k)] * lam;
        }
        for i in k + 1..n {
            r[(i, k)] = C::zero();
        }
    }
    (q, r)
}

/// Haar-random unitary. Deterministic for a given generator state.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = complex_gaussian_matrix(dim, rng);
    qr_decompose(&g).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qr_reconstructs_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = complex_gaussian_matrix::<f64, _>(5, &mut rng);
        let (q, r) = qr_decompose(&a);
        assert!((&q * &r).max_abs_diff(&a) < 1e-12);
        assert!(q.unitarity_defect() < 1e-12);
        for k in 0..5 {
            assert!(r[(k, k)].im.abs() < 1e-14 && r[(k, k)].re > 0.0);
            for i in k + 1..5 {
                assert_eq!(r[(i, k)], C::zero());
            }
        }
    }

    #[test]
    fn haar_is_unitary_and_seeded() {
        let u1 = haar_unitary::<f64, _>(4, &mut ChaCha8Rng::seed_from_u64(11));
        let u2 = haar_unitary::<f64, _>(4, &mut ChaCha8Rng::seed_from_u64(11));
        assert!(u1.unitarity_defect() < 1e-12);
        assert_eq!(u1, u2);
        let u3 = haar_unitary::<f64, _>(4, &mut ChaCha8Rng::seed_from_u64(12));
        assert_ne!(u1, u3);
    }
}
