//! The sporadic SIC catalog and the Weyl–Heisenberg displacement operators.
//!
//! A SIC in dimension `d` is a family of `d²` rank-1 projectors with
//! `tr(Π_j Π_k) = (d δ_jk + 1)/(d + 1)`. The catalog covers
//!
//! * the qubit SIC, orbit of the Bloch vector `(1,1,1)/√3` under the Paulis,
//! * the Hesse SIC, orbit of `(0, 1, −1)/√2` under the qutrit displacements,
//! * the two Hoggar-type SICs, orbits of `(−1 ± 2i, 1, …, 1)/(2√3)` under
//!   the three-qubit Pauli group.
//!
//! Every catalog constructor runs [`verify_sic`] before returning.

use std::f64::consts::PI;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{
    hermitian_eigen, inner, is_psd, kron_vec, pauli, pauli_word, rank_of, sum_matrices, vector_norm, ComplexMatrix,
};
use crate::scalar::{c, cr, Real, Tolerance, C};
use crate::{Error, Result};

/// Phase attached to `X^a Z^b` when building displacement operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseConvention {
    /// `τ^{ab} X^a Z^b` with `τ = −e^{iπ/d}` for odd `d` and `τ = e^{iπ/d}`
    /// for even `d` (so `d = 2` gives exactly `I, σx, σy, σz`).
    Standard,
    /// The constant prefactor `−e^{iπ/d}` on every `X^a Z^b`, identity included.
    ConstantPrefactor,
}

impl PhaseConvention {
    pub fn describe(self, d: usize) -> String {
        match self {
            Self::Standard if d % 2 == 1 => "tau^(a*b) X^a Z^b, tau = -exp(i*pi/d)".into(),
            Self::Standard => "exp(i*pi*a*b/d) X^a Z^b".into(),
            Self::ConstantPrefactor => "-exp(i*pi/d) X^a Z^b".into(),
        }
    }
}

/// Shift `X|j⟩ = |j+1 mod d⟩`.
pub fn shift<T: Real>(d: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(d, |i, j| if i == (j + 1) % d { C::one() } else { C::zero() })
}

/// Clock `Z|j⟩ = ω^j |j⟩`, `ω = e^{2πi/d}`.
pub fn clock<T: Real>(d: usize) -> ComplexMatrix<T> {
    let diag: Vec<C<T>> = (0..d).map(|j| root_of_unity(j, d)).collect();
    ComplexMatrix::diagonal(&diag)
}

/// `e^{2πi k/n}`.
pub fn root_of_unity<T: Real>(k: usize, n: usize) -> C<T> {
    let th = 2.0 * PI * (k % n) as f64 / n as f64;
    c(th.cos(), th.sin())
}

/// The `d²` operators `D_{a,b}`, stored at index `a·d + b`.
#[derive(Clone, Debug)]
pub struct DisplacementSet<T> {
    pub dim: usize,
    pub ops: Vec<ComplexMatrix<T>>,
    pub convention: PhaseConvention,
    pub phase_convention: String,
}

impl<T: Real> DisplacementSet<T> {
    pub fn get(&self, a: usize, b: usize) -> &ComplexMatrix<T> {
        let d = self.dim;
        &self.ops[(a % d) * d + (b % d)]
    }

    pub fn index_pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let d = self.dim;
        (0..d).flat_map(move |a| (0..d).map(move |b| (a, b)))
    }
}

pub fn displacement_set<T: Real>(d: usize) -> Result<DisplacementSet<T>> {
    displacement_set_with(d, PhaseConvention::Standard)
}

pub fn displacement_set_with<T: Real>(d: usize, convention: PhaseConvention) -> Result<DisplacementSet<T>> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d, "displacements need d >= 2"));
    }
    let x = shift::<T>(d);
    let z = clock::<T>(d);
    let xs: Vec<_> = (0..d).map(|a| x.pow(a)).collect();
    let zs: Vec<_> = (0..d).map(|b| z.pow(b)).collect();
    let mut ops = Vec::with_capacity(d * d);
    for (a, xa) in xs.iter().enumerate() {
        for (b, zb) in zs.iter().enumerate() {
            let phase_angle = match convention {
                // −e^{iπ/d} = e^{iπ(d+1)/d}
                PhaseConvention::Standard if d % 2 == 1 => PI * ((d + 1) * a * b) as f64 / d as f64,
                PhaseConvention::Standard => PI * (a * b) as f64 / d as f64,
                PhaseConvention::ConstantPrefactor => PI * (d + 1) as f64 / d as f64,
            };
            let phase = c(phase_angle.cos(), phase_angle.sin());
            ops.push((xa * zb).scale(phase));
        }
    }
    Ok(DisplacementSet {
        dim: d,
        ops,
        convention,
        phase_convention: convention.describe(d),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn suffix(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// `d²` projectors with their fiducial.
#[derive(Clone, Debug)]
pub struct SicEnsemble<T> {
    pub dim: usize,
    pub projectors: Vec<ComplexMatrix<T>>,
    pub fiducial: ComplexMatrix<T>,
    /// How the ensemble was generated, e.g. `"hoggar+: 3-qubit Pauli orbit"`.
    pub convention: String,
}

/// Ensemble dump: `{ "dim": d, "projectors": [...], "convention": "..." }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct EnsembleJson<T> {
    pub dim: usize,
    pub projectors: Vec<ComplexMatrix<T>>,
    pub convention: String,
}

impl<T: Real> SicEnsemble<T> {
    /// Wraps `d²` operators without checking the SIC property.
    pub fn from_projectors(projectors: Vec<ComplexMatrix<T>>, convention: impl Into<String>) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or_else(|| Error::InvalidInput("empty projector list".into()))?;
        let dim = first.dim();
        if projectors.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: projectors.len(),
            });
        }
        if let Some(bad) = projectors.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.dim(),
            });
        }
        Ok(Self {
            dim,
            fiducial: first.clone(),
            projectors,
            convention: convention.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    /// Gram matrix `tr(Π_j Π_k)` (real parts).
    pub fn gram(&self) -> Vec<Vec<T>> {
        self.projectors
            .iter()
            .map(|a| self.projectors.iter().map(|b| a.trace_product(b).re).collect())
            .collect()
    }

    /// The POVM `{Π_j / d}`.
    pub fn povm_elements(&self) -> Vec<ComplexMatrix<T>> {
        let s = T::one() / T::lit(self.dim as f64);
        self.projectors.iter().map(|p| p.scale_real(s)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&EnsembleJson {
            dim: self.dim,
            projectors: self.projectors.clone(),
            convention: self.convention.clone(),
        })
        .expect("ensemble serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: EnsembleJson<T> =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("ensemble JSON: {e}")))?;
        let e = Self::from_projectors(raw.projectors, raw.convention)?;
        if e.dim != raw.dim {
            return Err(Error::DimensionMismatch {
                expected: raw.dim,
                actual: e.dim,
            });
        }
        Ok(e)
    }
}

/// `{U |v⟩⟨v| U†}` for each unitary, in order, without deduplication.
pub fn orbit_projectors<T: Real>(v: &[C<T>], unitaries: &[ComplexMatrix<T>]) -> Vec<ComplexMatrix<T>> {
    unitaries
        .iter()
        .map(|u| ComplexMatrix::projector(&u.apply(v)))
        .collect()
}

/// Number of operators that are pairwise at Frobenius distance ≥ `tol`.
pub fn count_distinct<T: Real>(ops: &[ComplexMatrix<T>], tol: T) -> usize {
    dedup_by_distance(ops.to_vec(), tol).len()
}

pub fn dedup_by_distance<T: Real>(ops: Vec<ComplexMatrix<T>>, tol: T) -> Vec<ComplexMatrix<T>> {
    let mut kept: Vec<ComplexMatrix<T>> = Vec::new();
    for op in ops {
        if !kept.iter().any(|k| k.frobenius_distance(&op) < tol) {
            kept.push(op);
        }
    }
    kept
}

/// Weyl–Heisenberg orbit `{D_{a,b} Π D_{a,b}†}` ordered by `a·d + b`.
pub fn weyl_heisenberg_orbit<T: Real>(fiducial: &[C<T>], convention: impl Into<String>) -> Result<SicEnsemble<T>> {
    let ds = displacement_set::<T>(fiducial.len())?;
    SicEnsemble::from_projectors(orbit_projectors(fiducial, &ds.ops), convention)
}

/// Orbit under the `4ⁿ` Pauli words, ordered by word index.
pub fn pauli_orbit<T: Real>(fiducial: &[C<T>], convention: impl Into<String>) -> Result<SicEnsemble<T>> {
    let n = qubit_count(fiducial.len())?;
    let words: Vec<_> = (0..4usize.pow(n as u32)).map(|a| pauli_word(a, n)).collect();
    SicEnsemble::from_projectors(orbit_projectors(fiducial, &words), convention)
}

pub(crate) fn qubit_count(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::UnsupportedDimension(dim, "expected a power of two"));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Unit vector with Bloch vector `(1, ±1, 1)/√3`. `Plus` is the eigenvector
/// of `½(I + (σx + σy + σz)/√3)`; `Minus` is its entrywise complex conjugate.
pub fn qubit_fiducial_vector<T: Real>(sign: Sign) -> Vec<C<T>> {
    let r = 1.0 / 3f64.sqrt();
    let cos_half = ((1.0 + r) / 2.0).sqrt();
    let sin_half = ((1.0 - r) / 2.0).sqrt();
    let phi = sign.value() * PI / 4.0;
    vec![c(cos_half, 0.0), c(sin_half * phi.cos(), sin_half * phi.sin())]
}

pub fn hesse_fiducial_vector<T: Real>() -> Vec<C<T>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0)]
}

/// `(−1 ± 2i, 1, 1, 1, 1, 1, 1, 1)/(2√3)`.
pub fn hoggar_fiducial_vector<T: Real>(sign: Sign) -> Vec<C<T>> {
    let n = 1.0 / (2.0 * 3f64.sqrt());
    let mut v = vec![c(n, 0.0); 8];
    v[0] = c(-n, 2.0 * n * sign.value());
    v
}

fn catalog<T: Real>(e: SicEnsemble<T>) -> Result<SicEnsemble<T>> {
    let tol = Tolerance::default();
    let report = verify_sic(&e, &tol)?;
    let distinct = count_distinct(&e.projectors, tol.eq_tol.sqrt());
    if !report.pass || distinct != e.dim * e.dim {
        return Err(Error::InvalidInput(format!(
            "catalog ensemble {} failed verification ({} distinct, max deviation {:e})",
            e.convention,
            distinct,
            report.max_deviation()
        )));
    }
    Ok(e)
}

pub fn qubit_sic<T: Real>(sign: Sign) -> Result<SicEnsemble<T>> {
    let label = format!(
        "qubit{}: Pauli orbit of Bloch (1,{}1,1)/sqrt(3)",
        sign.suffix(),
        sign.suffix()
    );
    catalog(pauli_orbit(&qubit_fiducial_vector::<T>(sign), label)?)
}

pub fn hesse_sic<T: Real>() -> Result<SicEnsemble<T>> {
    let ds = displacement_set::<T>(3)?;
    let label = format!("hesse: orbit of (0,1,-1)/sqrt(2) under {}", ds.phase_convention);
    catalog(SicEnsemble::from_projectors(
        orbit_projectors(&hesse_fiducial_vector::<T>(), &ds.ops),
        label,
    )?)
}

pub fn hoggar_sic<T: Real>(sign: Sign) -> Result<SicEnsemble<T>> {
    let label = format!(
        "hoggar{}: 3-qubit Pauli orbit of (-1{}2i,1,1,1,1,1,1,1)/(2 sqrt(3))",
        sign.suffix(),
        sign.suffix()
    );
    catalog(pauli_orbit(&hoggar_fiducial_vector::<T>(sign), label)?)
}

/// Outcome of [`verify_sic`]. Deviations are maxima over the ensemble.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SicReport {
    pub dim: usize,
    pub count: usize,
    /// Largest rank among the projectors (eigenvalue cutoff `rank_tol`).
    pub max_rank: usize,
    /// Worst of Hermiticity defect, `|tr Π − 1|` and `max|Π² − Π|`.
    pub projector_deviation: f64,
    /// `max |tr(Π_j Π_k) − (d δ_jk + 1)/(d + 1)|`.
    pub gram_deviation: f64,
    /// `max |Σ Π_j − d I|` entrywise.
    pub completeness_deviation: f64,
    pub pass: bool,
}

impl SicReport {
    pub fn max_deviation(&self) -> f64 {
        self.projector_deviation
            .max(self.gram_deviation)
            .max(self.completeness_deviation)
    }
}

pub fn verify_sic<T: Real>(e: &SicEnsemble<T>, tol: &Tolerance<T>) -> Result<SicReport> {
    let d = e.dim;
    let n = e.projectors.len();
    let mut proj_dev = T::zero();
    let mut max_rank = 0;
    for p in &e.projectors {
        let herm = p.hermiticity_defect();
        let tr = (p.trace() - C::one()).norm();
        let idem = (p * p).max_abs_diff(p);
        proj_dev = proj_dev.max(herm).max(tr).max(idem);
        if herm <= tol.eq_tol.sqrt() {
            max_rank = max_rank.max(rank_of(p, &tol.with_eq(herm + tol.eq_tol))?);
        } else {
            max_rank = max_rank.max(d);
        }
    }
    let mut gram_dev = T::zero();
    let dd = T::lit(d as f64);
    for (j, a) in e.projectors.iter().enumerate() {
        for (k, b) in e.projectors.iter().enumerate() {
            let delta = if j == k { dd } else { T::zero() };
            let want = (delta + T::one()) / (dd + T::one());
            gram_dev = gram_dev.max((a.trace_product(b) - cr(want)).norm());
        }
    }
    let total = sum_matrices(&e.projectors);
    let comp_dev = total.max_abs_diff(&ComplexMatrix::identity(d).scale_real(dd));
    let count_ok = n == d * d;
    let pass = count_ok && max_rank == 1 && proj_dev <= tol.eq_tol && gram_dev <= tol.eq_tol && comp_dev <= tol.eq_tol;
    Ok(SicReport {
        dim: d,
        count: n,
        max_rank,
        projector_deviation: proj_dev.as_f64(),
        gram_deviation: gram_dev.as_f64(),
        completeness_deviation: comp_dev.as_f64(),
        pass,
    })
}

/// `{I − Π_j}`, a SIC again when `d = 2`.
pub fn conjugate_sic<T: Real>(e: &SicEnsemble<T>) -> Result<SicEnsemble<T>> {
    if e.dim != 2 {
        return Err(Error::UnsupportedDimension(e.dim, "I - Π is rank 1 only for qubits"));
    }
    let id = ComplexMatrix::identity(2);
    let projectors = e.projectors.iter().map(|p| &id - p).collect();
    SicEnsemble::from_projectors(projectors, format!("antipodes of {}", e.convention))
}

/// Entrywise complex conjugate of every projector.
pub fn complex_conjugate_sic<T: Real>(e: &SicEnsemble<T>) -> SicEnsemble<T> {
    SicEnsemble {
        dim: e.dim,
        projectors: e.projectors.iter().map(|p| p.conj()).collect(),
        fiducial: e.fiducial.conj(),
        convention: format!("complex conjugate of {}", e.convention),
    }
}

/// Checks that `rho` is a density matrix of dimension `dim`.
pub fn ensure_density_matrix<T: Real>(rho: &ComplexMatrix<T>, dim: usize, tol: &Tolerance<T>) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: rho.dim(),
        });
    }
    let tr = rho.trace();
    if (tr - C::one()).norm() > tol.eq_tol.sqrt() {
        return Err(Error::InvalidTrace(tr.re.as_f64()));
    }
    if !is_psd(rho, tol)? {
        let low = hermitian_eigen(rho, tol.eq_tol)?.min_value();
        return Err(Error::NotPsd(low.as_f64()));
    }
    Ok(())
}

/// `p(j) = tr(ρ Π_j)/d`.
pub fn sic_probabilities<T: Real>(e: &SicEnsemble<T>, rho: &ComplexMatrix<T>, tol: &Tolerance<T>) -> Result<Vec<T>> {
    ensure_density_matrix(rho, e.dim, tol)?;
    Ok(raw_probabilities(e, rho))
}

pub(crate) fn raw_probabilities<T: Real>(e: &SicEnsemble<T>, rho: &ComplexMatrix<T>) -> Vec<T> {
    let dd = T::lit(e.dim as f64);
    e.projectors.iter().map(|p| rho.trace_product(p).re / dd).collect()
}

/// `ρ = Σ_j [(d+1) p(j) − 1/d] Π_j`. Any `p` is accepted.
pub fn state_from_probs<T: Real>(p: &[T], e: &SicEnsemble<T>) -> Result<ComplexMatrix<T>> {
    if p.len() != e.projectors.len() {
        return Err(Error::DimensionMismatch {
            expected: e.projectors.len(),
            actual: p.len(),
        });
    }
    let dd = T::lit(e.dim as f64);
    let mut rho = ComplexMatrix::zeros(e.dim);
    for (pj, proj) in p.iter().zip(&e.projectors) {
        let w = (dd + T::one()) * *pj - T::one() / dd;
        rho = &rho + &proj.scale_real(w);
    }
    Ok(rho)
}

/// Qubit form `ρ = Σ_j [3 p(j) − ½] Π_j`.
pub fn qubit_state_from_probs<T: Real>(p: &[T], e: &SicEnsemble<T>) -> Result<ComplexMatrix<T>> {
    if e.dim != 2 {
        return Err(Error::UnsupportedDimension(e.dim, "qubit reconstruction"));
    }
    state_from_probs(p, e)
}

/// `a |π+⟩^{⊗3} + b |π−⟩^{⊗3}`.
pub fn wootters_fiducial<T: Real>(
    a: T,
    b: T,
    pi_plus: &[C<T>],
    pi_minus: &[C<T>],
    tol: &Tolerance<T>,
) -> Result<Vec<C<T>>> {
    if pi_plus.len() != 2 || pi_minus.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: pi_plus.len().max(pi_minus.len()),
        });
    }
    let slack = tol.eq_tol.sqrt();
    for v in [pi_plus, pi_minus] {
        let n = vector_norm(v);
        if (n - T::one()).abs() > slack {
            return Err(Error::NotNormalized(n.as_f64()));
        }
    }
    let overlap = inner(pi_plus, pi_minus).norm();
    if overlap > slack {
        return Err(Error::InvalidInput(format!(
            "pi_plus and pi_minus are not orthogonal (overlap {:e})",
            overlap.as_f64()
        )));
    }
    let cube = |v: &[C<T>]| kron_vec(&kron_vec(v, v), v);
    Ok(cube(pi_plus)
        .into_iter()
        .zip(cube(pi_minus))
        .map(|(p, m)| p * a + m * b)
        .collect())
}

/// `(a, b)` with `a² + b² = 1` and `a² − b² = 1/√3`.
pub fn wootters_coefficients<T: Real>() -> (T, T) {
    let r = 1.0 / 3f64.sqrt();
    (T::lit(((1.0 + r) / 2.0).sqrt()), T::lit(((1.0 - r) / 2.0).sqrt()))
}

/// Basis `(π+, π−)` for the qubit fiducial `Π₀` of `qubit_sic(+)`.
///
/// The triple-product construction is sensitive to the phase of `π−`
/// relative to `π+`: the Pauli orbit is a SIC only when
/// `⟨π+|σx|π−⟩⟨π+|σy|π−⟩⟨π+|σz|π−⟩` is real and negative. `π−` is returned
/// in that gauge.
pub fn wootters_basis<T: Real>() -> (Vec<C<T>>, Vec<C<T>>) {
    let plus = qubit_fiducial_vector::<T>(Sign::Plus);
    let perp = vec![-plus[1].conj(), plus[0].conj()];
    let g = pauli_triple_product(&plus, &perp);
    let chi = (PI - g.arg().as_f64()) / 3.0;
    let rot: C<T> = c(chi.cos(), chi.sin());
    let minus = perp.into_iter().map(|z| z * rot).collect();
    (plus, minus)
}

/// `⟨u|σx|v⟩⟨u|σy|v⟩⟨u|σz|v⟩`.
pub fn pauli_triple_product<T: Real>(u: &[C<T>], v: &[C<T>]) -> C<T> {
    (1..4).fold(C::one(), |acc, k| acc * inner(u, &pauli::<T>(k).apply(v)))
}

/// Embeds a qubit vector of the form `(re, im)` pairs; convenience for tests
/// and the CLI.
pub fn vector_from_pairs<T: Real>(pairs: &[(f64, f64)]) -> Vec<C<T>> {
    pairs
        .iter()
        .map(|&(re, im)| Complex::new(T::lit(re), T::lit(im)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::bloch_vector;

    type F = f64;

    fn tol() -> Tolerance<F> {
        Tolerance::default()
    }

    #[test]
    fn qutrit_shift_and_clock_act_as_defined() {
        let ds = displacement_set::<F>(3).unwrap();
        let x = ds.get(1, 0);
        let e0 = vector_from_pairs::<F>(&[(1., 0.), (0., 0.), (0., 0.)]);
        let e1 = vector_from_pairs::<F>(&[(0., 0.), (1., 0.), (0., 0.)]);
        let xe0 = x.apply(&e0);
        assert!(xe0.iter().zip(&e1).all(|(a, b)| (a - b).norm() < 1e-15));
        let z = ds.get(0, 1);
        let ze1 = z.apply(&e1);
        let w = root_of_unity::<F>(1, 3);
        assert!((ze1[1] - w).norm() < 1e-15);
        assert!(ze1[0].norm() < 1e-15 && ze1[2].norm() < 1e-15);
    }

    #[test]
    fn displacements_are_unitary_and_traceless() {
        for d in [2, 3, 4, 5, 7] {
            let ds = displacement_set::<F>(d).unwrap();
            assert!(ds.get(0, 0).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-15);
            for (a, b) in ds.index_pairs() {
                let op = ds.get(a, b);
                assert!(op.unitarity_defect() < 1e-12, "d={d} ({a},{b})");
                if (a, b) != (0, 0) {
                    assert!(op.trace().norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn standard_phase_gives_dagger_as_inverse_index() {
        for d in [2, 3, 5, 7] {
            let ds = displacement_set::<F>(d).unwrap();
            for (a, b) in ds.index_pairs() {
                let lhs = ds.get(a, b).dagger();
                let rhs = ds.get((d - a) % d, (d - b) % d);
                assert!(lhs.max_abs_diff(rhs) < 1e-12, "d={d} ({a},{b})");
            }
        }
    }

    #[test]
    fn constant_prefactor_breaks_dagger_relation() {
        let ds = displacement_set_with::<F>(3, PhaseConvention::ConstantPrefactor).unwrap();
        assert!(ds.get(0, 0).max_abs_diff(&ComplexMatrix::identity(3)) > 0.5);
        let lhs = ds.get(1, 0).dagger();
        assert!(lhs.max_abs_diff(ds.get(2, 0)) > 0.1);
    }

    #[test]
    fn qubit_displacements_are_the_paulis() {
        let ds = displacement_set::<F>(2).unwrap();
        assert!(ds.get(1, 0).max_abs_diff(&pauli(1)) < 1e-15);
        assert!(ds.get(1, 1).max_abs_diff(&pauli(2)) < 1e-15);
        assert!(ds.get(0, 1).max_abs_diff(&pauli(3)) < 1e-15);
    }

    #[test]
    fn qubit_sic_gram_and_fiducial() {
        let e = qubit_sic::<F>(Sign::Plus).unwrap();
        let g = e.gram();
        assert!((g[0][1] - 1.0 / 3.0).abs() < 1e-14);
        let total = sum_matrices(&e.projectors);
        assert!(total.max_abs_diff(&ComplexMatrix::identity(2).scale_real(2.0)) < 1e-14);
        let r = bloch_vector(&e.fiducial);
        let s = 1.0 / 3f64.sqrt();
        for k in r {
            assert!((k - s).abs() < 1e-14);
        }
        let m = bloch_vector(&qubit_sic::<F>(Sign::Minus).unwrap().fiducial);
        assert!((m[1] + s).abs() < 1e-14);
    }

    #[test]
    fn hesse_and_hoggar_verify() {
        let h = hesse_sic::<F>().unwrap();
        let rep = verify_sic(&h, &tol()).unwrap();
        assert!(rep.pass && rep.max_deviation() < 1e-12, "{rep:?}");
        assert!((h.gram()[0][5] - 0.25).abs() < 1e-14);
        for s in [Sign::Plus, Sign::Minus] {
            let g = hoggar_sic::<F>(s).unwrap();
            assert_eq!(count_distinct(&g.projectors, 1e-6), 64);
            assert!((g.gram()[3][40] - 1.0 / 9.0).abs() < 1e-13);
            let total = sum_matrices(&g.projectors);
            assert!(total.max_abs_diff(&ComplexMatrix::identity(8).scale_real(8.0)) < 1e-12);
        }
    }

    #[test]
    fn verify_flags_maximally_mixed_member() {
        let mut e = qubit_sic::<F>(Sign::Plus).unwrap();
        e.projectors[2] = ComplexMatrix::identity(2).scale_real(0.5);
        let rep = verify_sic(&e, &tol()).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.max_rank, 2);
        assert!(rep.projector_deviation > 0.1);
    }

    #[test]
    fn conjugate_sic_is_an_involution_and_antipodal() {
        let e = qubit_sic::<F>(Sign::Plus).unwrap();
        let c1 = conjugate_sic(&e).unwrap();
        assert!(verify_sic(&c1, &tol()).unwrap().pass);
        for (p, q) in e.projectors.iter().zip(&c1.projectors) {
            let (rp, rq) = (bloch_vector(p), bloch_vector(q));
            for k in 0..3 {
                assert!((rp[k] + rq[k]).abs() < 1e-14);
            }
        }
        let c2 = conjugate_sic(&c1).unwrap();
        for (p, q) in e.projectors.iter().zip(&c2.projectors) {
            assert!(p.max_abs_diff(q) < 1e-15);
        }
        let h = hesse_sic::<F>().unwrap();
        assert!(matches!(conjugate_sic(&h), Err(Error::UnsupportedDimension(3, _))));
    }

    #[test]
    fn probabilities_of_special_states() {
        let e = qubit_sic::<F>(Sign::Plus).unwrap();
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        let p = sic_probabilities(&e, &mixed, &tol()).unwrap();
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-15));
        let p0 = sic_probabilities(&e, &e.fiducial, &tol()).unwrap();
        assert!((p0[0] - 0.5).abs() < 1e-14);
        for x in &p0[1..] {
            assert!((x - 1.0 / 6.0).abs() < 1e-14);
        }
        let back = qubit_state_from_probs(&p0, &e).unwrap();
        assert!(back.max_abs_diff(&e.fiducial) < 1e-12);
        assert!(qubit_state_from_probs(&[0.25; 4], &e).unwrap().max_abs_diff(&mixed) < 1e-15);
    }

    #[test]
    fn probabilities_reject_non_states() {
        let e = qubit_sic::<F>(Sign::Plus).unwrap();
        let twice = ComplexMatrix::identity(2);
        assert!(matches!(
            sic_probabilities(&e, &twice, &tol()),
            Err(Error::InvalidTrace(_))
        ));
        let neg = ComplexMatrix::real_diagonal(&[1.5, -0.5]);
        assert!(matches!(sic_probabilities(&e, &neg, &tol()), Err(Error::NotPsd(_))));
    }

    #[test]
    fn antipodal_probabilities_reconstruct_same_state() {
        let e = qubit_sic::<F>(Sign::Plus).unwrap();
        let conj = conjugate_sic(&e).unwrap();
        let rho = crate::linalg::qubit_from_bloch([0.3, -0.2, 0.5]);
        let p = sic_probabilities(&e, &rho, &tol()).unwrap();
        let flipped: Vec<F> = p.iter().map(|x| 0.5 - x).collect();
        let direct = sic_probabilities(&conj, &rho, &tol()).unwrap();
        for (a, b) in flipped.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-15);
        }
        let back = qubit_state_from_probs(&flipped, &conj).unwrap();
        assert!(back.max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn wootters_construction() {
        let (plus, minus) = wootters_basis::<F>();
        let pi0 = qubit_sic::<F>(Sign::Plus).unwrap().fiducial;
        let pp = pi0.apply(&plus);
        assert!(pp.iter().zip(&plus).all(|(a, b)| (a - b).norm() < 1e-14));
        let g = pauli_triple_product(&plus, &minus);
        assert!(g.im.abs() < 1e-14 && g.re < 0.0);

        let (a, b) = wootters_coefficients::<F>();
        assert!((a * a + b * b - 1.0).abs() < 1e-15);
        assert!((a * a - b * b - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let v = wootters_fiducial(a, b, &plus, &minus, &tol()).unwrap();
        assert!((vector_norm(&v) - 1.0).abs() < 1e-14);
        let orbit = pauli_orbit(&v, "wootters").unwrap();
        assert!(verify_sic(&orbit, &tol()).unwrap().pass);

        let prod = wootters_fiducial(1.0, 0.0, &plus, &minus, &tol()).unwrap();
        let bad = pauli_orbit(&prod, "product").unwrap();
        assert!(!verify_sic(&bad, &tol()).unwrap().pass);
    }

    #[test]
    fn wootters_rejects_bad_basis() {
        let (plus, _) = wootters_basis::<F>();
        let t = tol();
        assert!(wootters_fiducial(0.8, 0.6, &plus, &plus, &t).is_err());
        let long: Vec<_> = plus.iter().map(|z| z * 2.0).collect();
        assert!(matches!(
            wootters_fiducial(0.8, 0.6, &long, &plus, &t),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn ensemble_json_round_trip() {
        let e = qubit_sic::<F>(Sign::Minus).unwrap();
        let back = SicEnsemble::<F>::from_json(&e.to_json()).unwrap();
        assert_eq!(back.dim, 2);
        assert_eq!(back.projectors, e.projectors);
        assert_eq!(back.convention, e.convention);
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert!(v["projectors"][0]["re"].is_array());
    }

    #[test]
    fn single_precision_catalog() {
        let e = qubit_sic::<f32>(Sign::Plus).unwrap();
        assert!(verify_sic(&e, &Tolerance::default()).unwrap().pass);
        let h = hesse_sic::<f32>().unwrap();
        assert_eq!(h.len(), 9);
    }
}
