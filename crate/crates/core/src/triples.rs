//! Triple products `T_jkl = tr(Π_j Π_k Π_l)` of a SIC, their phases, the
//! triple-transitivity obstruction, structure coefficients and the cubic
//! (QBic) constraint on SIC probabilities.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::scalar::{Real, Tolerance, C};
use crate::sic::SicEnsemble;
use crate::{Error, Result};

/// Dense `n × n × n` complex tensor with `n = d²`.
#[derive(Clone, Debug)]
pub struct TripleTensor<T> {
    pub dim: usize,
    pub n: usize,
    values: Vec<C<T>>,
}

impl<T: Real> TripleTensor<T> {
    #[inline]
    pub fn get(&self, j: usize, k: usize, l: usize) -> C<T> {
        self.values[(j * self.n + k) * self.n + l]
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    /// Largest deviations from the SIC triple-product identities.
    pub fn invariants(&self) -> TripleInvariants {
        let n = self.n;
        let d1 = T::lit(self.dim as f64 + 1.0);
        let pair = T::one() / d1;
        let distinct = d1.powf(T::lit(-1.5));
        let mut inv = TripleInvariants::default();
        let upd = |slot: &mut f64, x: T| *slot = slot.max(x.as_f64());
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let t = self.get(j, k, l);
                    upd(&mut inv.cyclic, (t - self.get(k, l, j)).norm());
                    upd(&mut inv.reversal, (self.get(l, k, j) - t.conj()).norm());
                    if j == k && k == l {
                        upd(&mut inv.all_equal, (t - C::from(T::one())).norm());
                    } else if j == k || k == l || j == l {
                        upd(&mut inv.two_equal, (t - C::from(pair)).norm());
                    } else {
                        upd(&mut inv.distinct_modulus, (t.norm() - distinct).abs());
                    }
                }
            }
        }
        inv
    }
}

/// Maximum absolute deviations; all should vanish for a SIC.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct TripleInvariants {
    /// `|T_jkl − T_klj|`
    pub cyclic: f64,
    /// `|T_lkj − conj(T_jkl)|`
    pub reversal: f64,
    /// `|T_jjj − 1|`
    pub all_equal: f64,
    /// `|T − 1/(d+1)|` when exactly two indices agree
    pub two_equal: f64,
    /// `||T_jkl| − (d+1)^{-3/2}|` for distinct indices
    pub distinct_modulus: f64,
}

impl TripleInvariants {
    pub fn max(&self) -> f64 {
        [
            self.cyclic,
            self.reversal,
            self.all_equal,
            self.two_equal,
            self.distinct_modulus,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Computes all `d⁶` triple products without any checks.
pub fn raw_triple_products<T: Real>(e: &SicEnsemble<T>) -> TripleTensor<T> {
    let n = e.projectors.len();
    let ps = &e.projectors;
    let values: Vec<C<T>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|j| {
            (0..n).flat_map(move |k| {
                let jk = &ps[j] * &ps[k];
                (0..n).map(move |l| jk.trace_product(&ps[l]))
            })
        })
        .collect();
    TripleTensor { dim: e.dim, n, values }
}

/// Triple products of a SIC; fails when the SIC identities are violated by
/// more than `tol.eq_tol`.
pub fn triple_products<T: Real>(e: &SicEnsemble<T>, tol: &Tolerance<T>) -> Result<TripleTensor<T>> {
    let t = raw_triple_products(e);
    let inv = t.invariants();
    if inv.max() > tol.eq_tol.as_f64() {
        return Err(Error::InvalidInput(format!(
            "triple products violate the SIC identities by {:e}",
            inv.max()
        )));
    }
    Ok(t)
}

/// `Σ_l T_jkl` for `j ≠ k`, which equals `d · tr(Π_j Π_k) = d/(d+1)`.
pub fn row_sum<T: Real>(t: &TripleTensor<T>, j: usize, k: usize) -> Result<C<T>> {
    if j == k {
        return Err(Error::InvalidInput("row_sum requires j != k".into()));
    }
    Ok(unchecked_row_sum(t, j, k))
}

pub(crate) fn unchecked_row_sum<T: Real>(t: &TripleTensor<T>, j: usize, k: usize) -> C<T> {
    (0..t.n).fold(C::new(T::zero(), T::zero()), |acc, l| acc + t.get(j, k, l))
}

/// Entrywise phases `T_jkl / |T_jkl|`.
pub fn normalized_triples<T: Real>(t: &TripleTensor<T>, tol: &Tolerance<T>) -> Result<TripleTensor<T>> {
    let n = t.n;
    let mut values = Vec::with_capacity(t.values.len());
    for (idx, z) in t.values.iter().enumerate() {
        let m = z.norm();
        if m <= tol.eq_tol {
            return Err(Error::DegenerateTriple(idx / (n * n), (idx / n) % n, idx % n));
        }
        values.push(*z / m);
    }
    Ok(TripleTensor { dim: t.dim, n, values })
}

/// `|T̃_jkl − T̃_mjk T̃_mkl T̃_mlj|`.
pub fn cocycle_residual<T: Real>(nt: &TripleTensor<T>, m: usize, j: usize, k: usize, l: usize) -> T {
    (nt.get(j, k, l) - nt.get(m, j, k) * nt.get(m, k, l) * nt.get(m, l, j)).norm()
}

/// Worst cocycle residual over all `n⁴` index quadruples.
pub fn max_cocycle_residual<T: Real>(nt: &TripleTensor<T>) -> (T, usize) {
    let n = nt.n;
    let worst = (0..n)
        .into_par_iter()
        .map(|m| {
            let mut w = T::zero();
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        w = w.max(cocycle_residual(nt, m, j, k, l));
                    }
                }
            }
            w
        })
        .reduce(T::zero, T::max);
    (worst, n.pow(4))
}

/// Worst cocycle residual over `samples` uniformly drawn quadruples.
pub fn sampled_cocycle_residual<T: Real, R: Rng + ?Sized>(nt: &TripleTensor<T>, samples: usize, rng: &mut R) -> T {
    let n = nt.n;
    (0..samples).fold(T::zero(), |w, _| {
        let [m, j, k, l] = [0; 4].map(|_| rng.random_range(0..n));
        w.max(cocycle_residual(nt, m, j, k, l))
    })
}

/// Distinct-index phase values, as angles in units of π rounded to
/// `resolution`, with their multiplicities. Sorted by angle.
pub fn distinct_phase_histogram<T: Real>(nt: &TripleTensor<T>, resolution: f64) -> Vec<(f64, usize)> {
    let n = nt.n;
    let mut counts: std::collections::BTreeMap<i64, usize> = Default::default();
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                if j == k || k == l || j == l {
                    continue;
                }
                let ang = nt.get(j, k, l).arg().as_f64() / std::f64::consts::PI;
                let mut key = (ang / resolution).round() as i64;
                // identify −π with π
                if key == (-1.0 / resolution).round() as i64 {
                    key = -key;
                }
                *counts.entry(key).or_default() += 1;
            }
        }
    }
    counts.into_iter().map(|(k, c)| (k as f64 * resolution, c)).collect()
}

/// One row of the triple-transitivity check.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ObstructionRow {
    pub d: usize,
    /// The common normalized triple product, `+1` or `−1`.
    pub tau: i8,
    /// `2/(d+1) + τ (d² − 2)(d+1)^{-3/2}`: row sum implied by equal phases.
    pub implied_sum: f64,
    /// `d/(d+1)`: row sum forced by `Σ_l Π_l = d I`.
    pub required_sum: f64,
    pub mismatch: f64,
}

/// If every distinct-index phase equals one constant `τ`, the cocycle
/// identity forces `τ = τ³`, so `τ = ±1`. Each choice predicts a row sum;
/// a nonzero mismatch with `d/(d+1)` rules out triple transitivity.
pub fn triple_transitivity_obstruction(d: usize) -> Result<[ObstructionRow; 2]> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d, "obstruction needs d >= 2"));
    }
    let df = d as f64;
    let row = |tau: i8| {
        let implied = 2.0 / (df + 1.0) + tau as f64 * (df * df - 2.0) * (df + 1.0).powf(-1.5);
        let required = df / (df + 1.0);
        ObstructionRow {
            d,
            tau,
            implied_sum: implied,
            required_sum: required,
            mismatch: (implied - required).abs(),
        }
    };
    Ok([row(1), row(-1)])
}

pub fn obstruction_sweep(dims: std::ops::RangeInclusive<usize>) -> Result<Vec<ObstructionRow>> {
    let mut out = Vec::new();
    for d in dims {
        out.extend(triple_transitivity_obstruction(d)?);
    }
    Ok(out)
}

/// `α_jkl` with `Π_j Π_k = Σ_l α_jkl Π_l`.
#[derive(Clone, Debug)]
pub struct StructureCoefficients<T> {
    pub dim: usize,
    pub n: usize,
    values: Vec<C<T>>,
}

impl<T: Real> StructureCoefficients<T> {
    #[inline]
    pub fn get(&self, j: usize, k: usize, l: usize) -> C<T> {
        self.values[(j * self.n + k) * self.n + l]
    }

    /// `max_{j,k} ‖Π_j Π_k − Σ_l α_jkl Π_l‖_F`.
    pub fn reconstruction_residual(&self, e: &SicEnsemble<T>) -> T {
        let n = self.n;
        let ps = &e.projectors;
        (0..n)
            .into_par_iter()
            .map(|j| {
                let mut w = T::zero();
                for k in 0..n {
                    let lhs = &ps[j] * &ps[k];
                    let mut rhs = ComplexMatrix::zeros(e.dim);
                    for (l, p) in ps.iter().enumerate() {
                        rhs = &rhs + &p.scale(self.get(j, k, l));
                    }
                    w = w.max(lhs.frobenius_distance(&rhs));
                }
                w
            })
            .reduce(T::zero, T::max)
    }
}

/// `α_jkl = [(d+1) T_ljk − tr(Π_j Π_k)] / d`, from the SIC dual basis
/// `A = Σ_l [(d+1) tr(A Π_l) − tr A]/d · Π_l`.
pub fn structure_coefficients<T: Real>(e: &SicEnsemble<T>, t: &TripleTensor<T>) -> StructureCoefficients<T> {
    let n = t.n;
    let dd = T::lit(e.dim as f64);
    let gram: Vec<C<T>> = e
        .projectors
        .iter()
        .flat_map(|a| e.projectors.iter().map(move |b| a.trace_product(b)))
        .collect();
    let mut values = Vec::with_capacity(n * n * n);
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                values.push((t.get(l, j, k) * (dd + T::one()) - gram[j * n + k]) / dd);
            }
        }
    }
    StructureCoefficients { dim: e.dim, n, values }
}

/// `max |d α_jkl + tr(Π_j Π_k) − (d+1) T_ljk|`.
pub fn structure_relation_residual<T: Real>(
    a: &StructureCoefficients<T>,
    e: &SicEnsemble<T>,
    t: &TripleTensor<T>,
) -> T {
    let n = a.n;
    let dd = T::lit(e.dim as f64);
    let mut w = T::zero();
    for j in 0..n {
        for k in 0..n {
            let g = e.projectors[j].trace_product(&e.projectors[k]);
            for l in 0..n {
                let r = a.get(j, k, l) * dd + g - t.get(l, j, k) * (dd + T::one());
                w = w.max(r.norm());
            }
        }
    }
    w
}

/// `4/(d(d+1)²)`, the value of the cubic form on pure states.
pub fn qbic_target(d: usize) -> f64 {
    let df = d as f64;
    4.0 / (df * (df + 1.0) * (df + 1.0))
}

fn check_probs<T: Real>(n: usize, p: &[T]) -> Result<()> {
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: p.len(),
        });
    }
    let s: T = p.iter().copied().sum();
    if (s - T::one()).abs() > T::lit(T::DEFAULT_EQ_TOL).sqrt() {
        return Err(Error::InvalidInput(format!(
            "probability vector sums to {s}, expected 1"
        )));
    }
    Ok(())
}

/// `Σ_{jkl} Re(α_jkl) p(j) p(k) p(l)`.
pub fn qbic_lhs<T: Real>(a: &StructureCoefficients<T>, p: &[T]) -> Result<T> {
    check_probs(a.n, p)?;
    let n = a.n;
    let mut acc = T::zero();
    for j in 0..n {
        for k in 0..n {
            let pjk = p[j] * p[k];
            let inner: T = (0..n).map(|l| a.get(j, k, l).re * p[l]).sum();
            acc = acc + pjk * inner;
        }
    }
    Ok(acc)
}

/// Coefficient of `Σ p(j)³` once the repeated-index terms of the cubic form
/// are eliminated on pure states: `(d − 1)/(d + 1)`.
///
/// For `j ≠ k` one has `α_jjk = 0` and `α_jkj = α_kjj = 1/(d+1)`, and
/// `Σ p² = 2/(d(d+1))` on pure states, which leaves
/// `(d−1)/(d+1) Σ p³ + Σ_{distinct} Re α p p p = 0`.
pub fn reduced_qbic_coefficient(d: usize) -> f64 {
    (d as f64 - 1.0) / (d as f64 + 1.0)
}

/// `c Σ_j p(j)³ + Σ_{j,k,l distinct} Re(α_jkl) p(j) p(k) p(l)` with an
/// explicit cubic coefficient `c`.
pub fn reduced_qbic_with<T: Real>(a: &StructureCoefficients<T>, p: &[T], cubic: T) -> Result<T> {
    check_probs(a.n, p)?;
    let n = a.n;
    let mut acc = cubic * p.iter().map(|x| *x * *x * *x).sum::<T>();
    for j in 0..n {
        for k in 0..n {
            if k == j {
                continue;
            }
            for l in 0..n {
                if l == j || l == k {
                    continue;
                }
                acc = acc + a.get(j, k, l).re * p[j] * p[k] * p[l];
            }
        }
    }
    Ok(acc)
}

/// Reduced cubic form with the dimension-correct coefficient; vanishes on
/// pure states. At `d = 3` the coefficient is `½`.
pub fn reduced_qbic<T: Real>(a: &StructureCoefficients<T>, p: &[T]) -> Result<T> {
    reduced_qbic_with(a, p, T::lit(reduced_qbic_coefficient(a.dim)))
}

/// Qubit case of [`reduced_qbic`] (coefficient `⅓`).
pub fn qubit_qbic_reduced<T: Real>(a: &StructureCoefficients<T>, p: &[T]) -> Result<T> {
    if a.dim != 2 {
        return Err(Error::UnsupportedDimension(a.dim, "qubit reduced QBic"));
    }
    reduced_qbic(a, p)
}
