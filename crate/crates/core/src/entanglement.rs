//! Three-qubit structure of the Hoggar SIC: the 3-tangle, Fano
//! (Pauli-word) coefficients, marginals, and the sign-flipped pseudo-SIC.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{
    bloch_vector, hermitian_eigen, inner, partial_trace, pauli_digits, pauli_word, sum_matrices, ComplexMatrix,
};
use crate::scalar::{Real, Tolerance, C};
use crate::sic::qubit_count;
use crate::{Error, Result};

/// `τ = 4 |Det a|`, with `Det` Cayley's hyperdeterminant of the amplitudes
/// `a_{ijk}` stored at index `4i + 2j + k`.
pub fn three_tangle<T: Real>(v: &[C<T>], tol: &Tolerance<T>) -> Result<T> {
    if v.len() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            actual: v.len(),
        });
    }
    let norm = inner(v, v).re.sqrt();
    if (norm - T::one()).abs() > tol.eq_tol {
        return Err(Error::NotNormalized(norm.as_f64()));
    }
    Ok(hyperdeterminant(v).norm() * T::lit(4.0))
}

pub fn hyperdeterminant<T: Real>(a: &[C<T>]) -> C<T> {
    let [a000, a001, a010, a011, a100, a101, a110, a111] = std::array::from_fn(|i| a[i]);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let (p, q, r, s) = (a000 * a111, a001 * a110, a010 * a101, a100 * a011);
    let squares = p * p + q * q + r * r + s * s;
    let cross = p * q + p * r + p * s + q * r + q * s + r * s;
    let quartic = a000 * a011 * a101 * a110 + a111 * a100 * a010 * a001;
    squares - cross * two + quartic * four
}

/// Real coefficients `c_α = tr(ρ σ_α)` over the `4ⁿ` Pauli words.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct FanoRep<T> {
    pub n_qubits: usize,
    pub coefficients: Vec<T>,
}

impl<T: Real> FanoRep<T> {
    /// `2⁻ⁿ Σ_α c_α σ_α`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let n = self.n_qubits;
        let scale = T::one() / T::lit((1usize << n) as f64);
        let mut out = ComplexMatrix::zeros(1 << n);
        for (alpha, &ca) in self.coefficients.iter().enumerate() {
            if !ca.is_zero() {
                out = &out + &pauli_word::<T>(alpha, n).scale_real(ca * scale);
            }
        }
        out
    }

    /// `Σ_α c_α²`, equal to `2ⁿ tr ρ²`.
    pub fn purity_sum(&self) -> T {
        self.coefficients.iter().map(|c| *c * *c).sum()
    }

    /// Magnitudes of the nontrivial coefficients, rounded to `resolution`,
    /// with multiplicities.
    pub fn magnitude_histogram(&self, resolution: f64) -> Vec<(f64, usize)> {
        let mut counts: std::collections::BTreeMap<i64, usize> = Default::default();
        for c in &self.coefficients[1..] {
            *counts
                .entry((c.abs().as_f64() / resolution).round() as i64)
                .or_default() += 1;
        }
        counts.into_iter().map(|(k, n)| (k as f64 * resolution, n)).collect()
    }
}

pub fn fano_coefficients<T: Real>(rho: &ComplexMatrix<T>, n_qubits: usize, tol: &Tolerance<T>) -> Result<FanoRep<T>> {
    let dim = 1usize << n_qubits;
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: rho.dim(),
        });
    }
    rho.ensure_hermitian(tol.eq_tol)?;
    let coefficients = (0..dim * dim)
        .into_par_iter()
        .map(|alpha| rho.trace_product(&pauli_word(alpha, n_qubits)).re)
        .collect();
    Ok(FanoRep { n_qubits, coefficients })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QubitMarginal {
    pub qubit: usize,
    pub bloch: [f64; 3],
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct MarginalReport<T> {
    /// `(traced qubit, reduced state)` for each two-qubit marginal.
    pub two_qubit: Vec<(usize, ComplexMatrix<T>)>,
    pub one_qubit: Vec<QubitMarginal>,
    /// Largest difference between the partial-trace and Fano-truncation
    /// routes over all six marginals.
    pub route_deviation: f64,
}

/// Marginal on the `kept` qubits computed by keeping only the Pauli words
/// that act as the identity on every other qubit.
pub fn fano_marginal<T: Real>(f: &FanoRep<T>, kept: &[usize]) -> ComplexMatrix<T> {
    let n = f.n_qubits;
    let k = kept.len();
    let scale = T::one() / T::lit((1usize << k) as f64);
    let mut out = ComplexMatrix::zeros(1 << k);
    for (alpha, &ca) in f.coefficients.iter().enumerate() {
        let digits = pauli_digits(alpha, n);
        if (0..n).any(|q| !kept.contains(&q) && digits[q] != 0) {
            continue;
        }
        let sub = kept.iter().fold(0usize, |acc, &q| acc * 4 + digits[q]);
        out = &out + &pauli_word::<T>(sub, k).scale_real(ca * scale);
    }
    out
}

/// All two- and one-qubit marginals of a three-qubit operator.
pub fn marginals<T: Real>(rho: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<MarginalReport<T>> {
    if rho.dim() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            actual: rho.dim(),
        });
    }
    let f = fano_coefficients(rho, 3, tol)?;
    let mut route = T::zero();
    let mut two_qubit = Vec::with_capacity(3);
    for traced in 0..3 {
        let m = partial_trace(rho, &[2, 2, 2], &[traced])?;
        let kept: Vec<usize> = (0..3).filter(|&q| q != traced).collect();
        route = route.max(m.max_abs_diff(&fano_marginal(&f, &kept)));
        two_qubit.push((traced, m));
    }
    let mut one_qubit = Vec::with_capacity(3);
    for qubit in 0..3 {
        let traced: Vec<usize> = (0..3).filter(|&q| q != qubit).collect();
        let m = partial_trace(rho, &[2, 2, 2], &traced)?;
        route = route.max(m.max_abs_diff(&fano_marginal(&f, &[qubit])));
        let b = bloch_vector(&m).map(|x| x.as_f64());
        one_qubit.push(QubitMarginal {
            qubit,
            bloch: b,
            radius: (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt(),
        });
    }
    Ok(MarginalReport {
        two_qubit,
        one_qubit,
        route_deviation: route.as_f64(),
    })
}

/// `(−1)^{number of σ_y factors}`: the sign complex conjugation puts on `σ_α`.
pub fn conjugation_sign(alpha: usize, n_qubits: usize) -> i8 {
    let ys = pauli_digits(alpha, n_qubits).into_iter().filter(|&k| k == 2).count();
    if ys % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjugateRelation {
    /// `max_α |c_α(−) − ε_α c_α(+)|`.
    pub max_violation: f64,
    /// Words whose coefficient changes sign.
    pub flipped_words: usize,
}

pub fn conjugate_fano_relation<T: Real>(plus: &FanoRep<T>, minus: &FanoRep<T>) -> Result<ConjugateRelation> {
    if plus.n_qubits != minus.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: plus.n_qubits,
            actual: minus.n_qubits,
        });
    }
    let n = plus.n_qubits;
    let mut worst = 0.0f64;
    let mut flipped = 0;
    for (alpha, (p, m)) in plus.coefficients.iter().zip(&minus.coefficients).enumerate() {
        let eps = conjugation_sign(alpha, n);
        if eps < 0 {
            flipped += 1;
        }
        let v = (*m - *p * T::lit(eps as f64)).abs().as_f64();
        worst = worst.max(v);
    }
    Ok(ConjugateRelation {
        max_violation: worst,
        flipped_words: flipped,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct SignFlipped<T> {
    pub operator: ComplexMatrix<T>,
    /// Ascending eigenvalues.
    pub spectrum: Vec<f64>,
    pub trace: f64,
    /// `tr Q²`.
    pub purity: f64,
    pub psd: bool,
}

/// `Q = 2⁻ⁿ (c₀ I − Σ_{α≠0} c_α σ_α)`, which for three qubits and `tr ρ = 1`
/// is `I/4 − ρ`.
pub fn sign_flipped_operator<T: Real>(rho: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<SignFlipped<T>> {
    let n = qubit_count(rho.dim())?;
    let tr = rho.trace().re;
    if (tr - T::one()).abs() > tol.eq_tol {
        return Err(Error::InvalidTrace(tr.as_f64()));
    }
    let mut f = fano_coefficients(rho, n, tol)?;
    for c in f.coefficients.iter_mut().skip(1) {
        *c = -*c;
    }
    let q = f.reconstruct();
    let eig = hermitian_eigen(&q, tol.eq_tol)?;
    Ok(SignFlipped {
        spectrum: eig.values.iter().map(|x| x.as_f64()).collect(),
        trace: q.trace().re.as_f64(),
        purity: q.trace_product(&q).re.as_f64(),
        psd: eig.min_value() >= -tol.eq_tol,
        operator: q,
    })
}

/// Pauli-word orbit `{σ_α Q σ_α}` of a sign-flipped operator, ordered by
/// word index.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct PseudoSic<T> {
    pub dim: usize,
    pub operators: Vec<ComplexMatrix<T>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PseudoSicReport {
    pub count: usize,
    pub trace_deviation: f64,
    /// `max |tr(Q_j Q_k) − (dδ_jk + 1)/(d+1)|`.
    pub gram_deviation: f64,
    /// `max |Σ Q_j − d I|`.
    pub sum_deviation: f64,
    pub non_psd: usize,
}

impl<T: Real> PseudoSic<T> {
    pub fn gram(&self) -> Vec<Vec<T>> {
        let ops = &self.operators;
        ops.par_iter()
            .map(|a| ops.iter().map(|b| a.trace_product(b).re).collect())
            .collect()
    }

    pub fn report(&self, tol: &Tolerance<T>) -> Result<PseudoSicReport> {
        let d = T::lit(self.dim as f64);
        let off = T::one() / (d + T::one());
        let mut gram_dev = T::zero();
        for (j, row) in self.gram().iter().enumerate() {
            for (k, g) in row.iter().enumerate() {
                let want = if j == k { T::one() } else { off };
                gram_dev = gram_dev.max((*g - want).abs());
            }
        }
        let trace_dev = self
            .operators
            .iter()
            .map(|q| (q.trace().re - T::one()).abs())
            .fold(T::zero(), T::max);
        let sum_dev = sum_matrices(&self.operators).max_abs_diff(&ComplexMatrix::identity(self.dim).scale_real(d));
        let mut non_psd = 0;
        for q in &self.operators {
            if hermitian_eigen(q, tol.eq_tol)?.min_value() < -tol.eq_tol {
                non_psd += 1;
            }
        }
        Ok(PseudoSicReport {
            count: self.operators.len(),
            trace_deviation: trace_dev.as_f64(),
            gram_deviation: gram_dev.as_f64(),
            sum_deviation: sum_dev.as_f64(),
            non_psd,
        })
    }
}

pub fn pseudo_sic<T: Real>(rho: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<PseudoSic<T>> {
    let n = qubit_count(rho.dim())?;
    let q = sign_flipped_operator(rho, tol)?.operator;
    let operators = (0..4usize.pow(n as u32))
        .into_par_iter()
        .map(|alpha| q.conjugate_by(&pauli_word(alpha, n)))
        .collect();
    Ok(PseudoSic {
        dim: rho.dim(),
        operators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::scalar::c;
    use crate::sic::{hoggar_fiducial_vector, hoggar_sic, Sign};

    type F = f64;

    fn tol() -> Tolerance<F> {
        Tolerance::default()
    }

    fn basis(bits: &[usize], amp: f64) -> Vec<C<F>> {
        let mut v = vec![c(0.0, 0.0); 8];
        for &b in bits {
            v[b] = c(amp, 0.0);
        }
        v
    }

    #[test]
    fn ghz_and_w_anchor_the_normalization() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((three_tangle(&basis(&[0, 7], h), &tol()).unwrap() - 1.0).abs() < 1e-14);
        let w = basis(&[1, 2, 4], 1.0 / 3f64.sqrt());
        assert!(three_tangle(&w, &tol()).unwrap().abs() < 1e-14);
        assert!(matches!(
            three_tangle(&basis(&[0], 2.0), &tol()),
            Err(Error::NotNormalized(_))
        ));
        assert!(three_tangle(&[c::<F>(1.0, 0.0)], &tol()).is_err());
    }

    #[test]
    fn hoggar_tangle_is_two_ninths() {
        let v = hoggar_fiducial_vector::<F>(Sign::Plus);
        assert!((three_tangle(&v, &tol()).unwrap() - 2.0 / 9.0).abs() < 1e-14);
        let y = 1.0 / (2.0 * 3f64.sqrt());
        let x = c::<F>(-y, 2.0 * y);
        let closed = (x - c(y, 0.0)) * (x - c(y, 0.0)) * y * y;
        assert!((hyperdeterminant(&v) - closed).norm() < 1e-15);
    }

    #[test]
    fn fano_of_maximally_mixed_and_product() {
        let r = fano_coefficients(&ComplexMatrix::<F>::identity(8).scale_real(0.125), 3, &tol()).unwrap();
        assert!((r.coefficients[0] - 1.0).abs() < 1e-15);
        assert!(r.coefficients[1..].iter().all(|x| x.abs() < 1e-15));

        let zero = ComplexMatrix::<F>::projector(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let rho = crate::linalg::tensor_product(&zero, &ComplexMatrix::identity(4).scale_real(0.25));
        let f = fano_coefficients(&rho, 3, &tol()).unwrap();
        for (alpha, ca) in f.coefficients.iter().enumerate() {
            let nonzero = alpha == 0 || alpha == 48;
            assert_eq!(ca.abs() > 1e-12, nonzero, "word {alpha}");
        }
        assert!(f.reconstruct().max_abs_diff(&rho) < 1e-15);
        assert!(fano_coefficients(&rho, 2, &tol()).is_err());
    }

    #[test]
    fn hoggar_fano_magnitudes() {
        let e = hoggar_sic::<F>(Sign::Plus).unwrap();
        let f = fano_coefficients(&e.fiducial, 3, &tol()).unwrap();
        assert!(f.coefficients[1..].iter().all(|x| (x.abs() - 1.0 / 3.0).abs() < 1e-14));
        assert!((f.purity_sum() - 8.0).abs() < 1e-13);
        let h = f.magnitude_histogram(1e-9);
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].1, 63);
        assert!((h[0].0 - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn hoggar_marginals() {
        let e = hoggar_sic::<F>(Sign::Plus).unwrap();
        let m = marginals(&e.fiducial, &tol()).unwrap();
        assert!(m.route_deviation < 1e-15);
        for q in &m.one_qubit {
            assert!((q.radius - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        }
        let ghz = ComplexMatrix::projector(&basis(&[0, 7], std::f64::consts::FRAC_1_SQRT_2));
        for q in marginals(&ghz, &tol()).unwrap().one_qubit {
            assert!(q.radius < 1e-15);
        }
    }

    #[test]
    fn conjugation_signs() {
        assert_eq!(conjugation_sign(2 * 16, 3), -1);
        assert_eq!(conjugation_sign(2 * 16 + 2 * 4, 3), 1);
        let p = fano_coefficients(&hoggar_sic::<F>(Sign::Plus).unwrap().fiducial, 3, &tol()).unwrap();
        let m = fano_coefficients(&hoggar_sic::<F>(Sign::Minus).unwrap().fiducial, 3, &tol()).unwrap();
        let r = conjugate_fano_relation(&p, &m).unwrap();
        assert!(r.max_violation < 1e-14);
        assert_eq!(r.flipped_words, 28);
    }

    #[test]
    fn sign_flip_is_quarter_identity_minus_rho() {
        let e = hoggar_sic::<F>(Sign::Plus).unwrap();
        let s = sign_flipped_operator(&e.fiducial, &tol()).unwrap();
        let want = &ComplexMatrix::identity(8).scale_real(0.25) - &e.fiducial;
        assert!(s.operator.max_abs_diff(&want) < 1e-14);
        assert!((s.spectrum[0] + 0.75).abs() < 1e-13);
        assert!(s.spectrum[1..].iter().all(|x| (x - 0.25).abs() < 1e-13));
        assert!((s.trace - 1.0).abs() < 1e-14 && (s.purity - 1.0).abs() < 1e-13);
        assert!(!s.psd);
        let half = ComplexMatrix::<F>::identity(8).scale_real(0.5);
        assert!(matches!(
            sign_flipped_operator(&half, &tol()),
            Err(Error::InvalidTrace(_))
        ));
    }

    #[test]
    fn pseudo_sic_has_sic_gram() {
        let e = hoggar_sic::<F>(Sign::Plus).unwrap();
        let p = pseudo_sic(&e.fiducial, &tol()).unwrap();
        let r = p.report(&tol()).unwrap();
        assert_eq!(r.count, 64);
        assert_eq!(r.non_psd, 64);
        assert!(r.gram_deviation < 1e-13 && r.sum_deviation < 1e-12 && r.trace_deviation < 1e-14);
        let g = e.gram();
        let pg = p.gram();
        for j in 0..64 {
            for k in 0..64 {
                assert!((g[j][k] - pg[j][k]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn qubit_fano_is_bloch() {
        let rho = crate::linalg::qubit_from_bloch([0.1, 0.2, -0.3]);
        let f = fano_coefficients(&rho, 1, &tol()).unwrap();
        assert!((f.coefficients[3] + 0.3).abs() < 1e-15);
        assert_eq!(pauli::<F>(2).trace_product(&pauli(2)), c(2.0, 0.0));
    }
}
