//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All matrix code is written against [`Real`], which is implemented for
//! `f32` and `f64`. Complex entries are `num_complex::Complex<T>`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Floating point scalar usable as the real part of a matrix entry.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Absolute equality tolerance appropriate for the precision.
    const DEFAULT_EQ_TOL: f64;
    /// Relative eigenvalue cutoff used for rank decisions.
    const DEFAULT_RANK_TOL: f64;

    /// Converts an `f64` literal. Never fails for finite input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    const DEFAULT_EQ_TOL: f64 = 1e-4;
    const DEFAULT_RANK_TOL: f64 = 1e-4;
}

impl Real for f64 {
    const DEFAULT_EQ_TOL: f64 = 1e-10;
    const DEFAULT_RANK_TOL: f64 = 1e-9;
}

/// Shorthand for a complex number over `T`.
pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// Comparison thresholds. Every equality, PSD and rank decision in the crate
/// goes through one of these.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance<T> {
    /// Absolute tolerance for entrywise comparisons.
    pub eq_tol: T,
    /// Relative eigenvalue cutoff (fraction of the largest |eigenvalue|).
    pub rank_tol: T,
}

impl<T: Real> Tolerance<T> {
    pub fn new(eq_tol: T, rank_tol: T) -> crate::Result<Self> {
        if !(eq_tol > T::zero() && rank_tol > T::zero()) {
            return Err(crate::Error::InvalidInput(format!(
                "tolerances must be strictly positive (eq_tol={eq_tol}, rank_tol={rank_tol})"
            )));
        }
        Ok(Self { eq_tol, rank_tol })
    }

    /// Same rank cutoff, different absolute tolerance.
    pub fn with_eq(self, eq_tol: T) -> Self {
        Self { eq_tol, ..self }
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            eq_tol: T::lit(T::DEFAULT_EQ_TOL),
            rank_tol: T::lit(T::DEFAULT_RANK_TOL),
        }
    }
}

/// Neumaier-compensated running sum, used where reduction order must not leak
/// into reported statistics.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerances_follow_precision() {
        let t64 = Tolerance::<f64>::default();
        assert_eq!(t64.eq_tol, 1e-10);
        assert_eq!(t64.rank_tol, 1e-9);
        let t32 = Tolerance::<f32>::default();
        assert!(t32.eq_tol > 1e-6);
    }

    #[test]
    fn tolerance_rejects_nonpositive() {
        assert!(Tolerance::<f64>::new(0.0, 1e-9).is_err());
        assert!(Tolerance::<f64>::new(1e-10, -1.0).is_err());
        assert!(Tolerance::<f64>::new(1e-10, 1e-9).is_ok());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        let s: CompensatedSum = xs.iter().copied().collect();
        assert_eq!(s.value(), 2.0);
    }
}
