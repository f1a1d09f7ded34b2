//! Minimal informationally complete POVMs: validation, the orthocross and
//! rank-(d+1)/2 families, unbiased qubit MICs, Born matrices and update
//! policy experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{haar_unitary, inv_sqrt_psd, qubit_from_bloch, rank_of, ComplexMatrix, RealMatrix};
use crate::scalar::{c, CompensatedSum, Real, Tolerance, C};
use crate::sic::{displacement_set, SicEnsemble};
use crate::{Error, Result};

/// Largest condition number accepted when inverting `[tr(R_i σ_j)]`.
pub const CONDITION_GUARD: f64 = 1e12;

/// How post-measurement states are assigned to the outcomes of a reference
/// measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdatePolicy {
    /// `σ_i = R_i / tr R_i`.
    Parallel,
    /// `σ_i = I − R_i / tr R_i` (qubits only).
    Antipodal,
    /// Parallel states rotated by one Haar-random unitary.
    RandomUnitaryOfSelf,
    /// Antipodal states rotated by one Haar-random unitary.
    RandomUnitaryOfAntipodal,
}

impl UpdatePolicy {
    pub const ALL: [UpdatePolicy; 4] = [
        UpdatePolicy::Parallel,
        UpdatePolicy::Antipodal,
        UpdatePolicy::RandomUnitaryOfSelf,
        UpdatePolicy::RandomUnitaryOfAntipodal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UpdatePolicy::Parallel => "parallel",
            UpdatePolicy::Antipodal => "antipodal",
            UpdatePolicy::RandomUnitaryOfSelf => "random-unitary-of-self",
            UpdatePolicy::RandomUnitaryOfAntipodal => "random-unitary-of-antipodal",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(
            self,
            UpdatePolicy::RandomUnitaryOfSelf | UpdatePolicy::RandomUnitaryOfAntipodal
        )
    }

    fn is_antipodal(self) -> bool {
        matches!(self, UpdatePolicy::Antipodal | UpdatePolicy::RandomUnitaryOfAntipodal)
    }
}

impl std::fmt::Display for UpdatePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for UpdatePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown update policy '{s}'")))
    }
}

/// A POVM on `C^d`, nominally with `d²` elements, optionally carrying
/// post-measurement states.
#[derive(Clone, Debug)]
pub struct Mic<T> {
    pub dim: usize,
    pub elements: Vec<ComplexMatrix<T>>,
    pub post_states: Option<Vec<ComplexMatrix<T>>>,
    pub policy: Option<UpdatePolicy>,
    pub label: String,
}

impl<T: Real> Mic<T> {
    pub fn new(elements: Vec<ComplexMatrix<T>>, label: impl Into<String>) -> Result<Self> {
        let dim = elements
            .first()
            .ok_or_else(|| Error::InvalidInput("a POVM needs at least one element".into()))?
            .dim();
        if let Some(bad) = elements.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.dim(),
            });
        }
        Ok(Self {
            dim,
            elements,
            post_states: None,
            policy: None,
            label: label.into(),
        })
    }

    /// `E_j = Π_j / d`.
    pub fn from_sic(e: &SicEnsemble<T>) -> Self {
        let inv_d = T::one() / T::lit(e.dim as f64);
        Self {
            dim: e.dim,
            elements: e.projectors.iter().map(|p| p.scale_real(inv_d)).collect(),
            post_states: None,
            policy: None,
            label: format!("SIC MIC from {}", e.convention),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `R_i / tr R_i`.
    pub fn parallel_states(&self) -> Vec<ComplexMatrix<T>> {
        self.elements
            .iter()
            .map(|e| e.scale_real(T::one() / e.trace().re))
            .collect()
    }

    /// Post-measurement states for `policy`. Random policies need the
    /// rotating unitary `u`; deterministic ones ignore it.
    pub fn states_for(&self, policy: UpdatePolicy, u: Option<&ComplexMatrix<T>>) -> Result<Vec<ComplexMatrix<T>>> {
        let mut states = self.parallel_states();
        if policy.is_antipodal() {
            if self.dim != 2 {
                return Err(Error::UnsupportedDimension(self.dim, "antipodal updating"));
            }
            let id = ComplexMatrix::identity(2);
            states = states.iter().map(|s| &id - s).collect();
        }
        if policy.is_random() {
            let u = u.ok_or_else(|| Error::InvalidInput(format!("policy {policy} needs a unitary")))?;
            if u.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    actual: u.dim(),
                });
            }
            states = states.iter().map(|s| s.conjugate_by(u)).collect();
        }
        Ok(states)
    }

    pub fn with_policy(mut self, policy: UpdatePolicy, u: Option<&ComplexMatrix<T>>) -> Result<Self> {
        self.post_states = Some(self.states_for(policy, u)?);
        self.policy = Some(policy);
        Ok(self)
    }

    pub fn with_post_states(mut self, states: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if states.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: states.len(),
            });
        }
        self.post_states = Some(states);
        self.policy = None;
        Ok(self)
    }

    /// `[tr(E_i E_j)]`.
    pub fn gram(&self) -> RealMatrix<T> {
        let es = &self.elements;
        RealMatrix::from_fn(es.len(), |i, j| es[i].trace_product(&es[j]).re)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MicReport {
    pub dim: usize,
    pub count: usize,
    pub min_eigenvalue: f64,
    pub completeness_deviation: f64,
    pub gram_rank: usize,
    pub psd: bool,
    pub complete: bool,
    pub informationally_complete: bool,
    pub pass: bool,
}

/// PSD elements, `Σ E = I`, and a Gram matrix of rank `d²`.
pub fn validate_mic<T: Real>(m: &Mic<T>, tol: &Tolerance<T>) -> Result<MicReport> {
    let mut min_eig = T::infinity();
    for e in &m.elements {
        let eig = crate::linalg::hermitian_eigen(e, tol.eq_tol)?;
        min_eig = min_eig.min(eig.min_value());
    }
    let total = crate::linalg::sum_matrices(&m.elements);
    let completeness = total.max_abs_diff(&ComplexMatrix::identity(m.dim));
    let gram = m.gram();
    let gram_c = ComplexMatrix::from_fn(gram.dim(), |i, j| C::new(gram.get(i, j), T::zero()));
    let rank = rank_of(&gram_c, tol)?;
    let d2 = m.dim * m.dim;
    let psd = min_eig >= -tol.eq_tol;
    let complete = completeness <= tol.eq_tol;
    let ic = rank == d2;
    Ok(MicReport {
        dim: m.dim,
        count: m.len(),
        min_eigenvalue: min_eig.as_f64(),
        completeness_deviation: completeness.as_f64(),
        gram_rank: rank,
        psd,
        complete,
        informationally_complete: ic,
        pass: psd && complete && ic && m.len() == d2,
    })
}

/// Projectors onto `|j⟩`, `(|j⟩+|k⟩)/√2` and `(|j⟩+i|k⟩)/√2` for `j < k`, in
/// that order.
pub fn orthocross_projectors<T: Real>(d: usize) -> Result<Vec<ComplexMatrix<T>>> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d, "orthocross needs d >= 2"));
    }
    let basis = |j: usize| -> Vec<C<T>> { (0..d).map(|i| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect() };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: Vec<_> = (0..d).map(|j| ComplexMatrix::projector(&basis(j))).collect();
    for phase in [c::<T>(h, 0.0), c::<T>(0.0, h)] {
        for j in 0..d {
            for k in j + 1..d {
                let mut v = vec![c::<T>(0.0, 0.0); d];
                v[j] = c(h, 0.0);
                v[k] = phase;
                out.push(ComplexMatrix::projector(&v));
            }
        }
    }
    Ok(out)
}

/// `E_α = S^{-1/2} Π_α S^{-1/2}` with `S = Σ_α Π_α`.
pub fn orthocross_mic<T: Real>(d: usize, tol: &Tolerance<T>) -> Result<Mic<T>> {
    let ps = orthocross_projectors::<T>(d)?;
    let s = crate::linalg::sum_matrices(&ps);
    let x = inv_sqrt_psd(&s, tol)?;
    let elements = ps.iter().map(|p| &(&x * p) * &x).collect();
    Mic::new(elements, format!("orthocross d={d}"))
}

/// `Φ` together with its defining inverse `[tr(R_i σ_j)]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct BornMatrix<T> {
    pub dim: usize,
    pub phi: RealMatrix<T>,
    pub phi_inverse: RealMatrix<T>,
    /// 1-norm condition number of `phi_inverse`.
    pub condition: f64,
}

impl<T: Real> BornMatrix<T> {
    /// `max |Φ · Φ⁻¹ − I|`, recomputed from the stored matrices.
    pub fn remultiplication_residual(&self) -> T {
        let n = self.phi.dim();
        self.phi
            .matmul(&self.phi_inverse)
            .max_abs_diff(&RealMatrix::identity(n))
    }
}

/// Inverts `[Φ⁻¹]_ij = tr(R_i σ_j)`.
pub fn born_matrix<T: Real>(r: &Mic<T>) -> Result<BornMatrix<T>> {
    let states = r
        .post_states
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("reference measurement has no post-measurement states".into()))?;
    born_matrix_with(r, states)
}

fn born_matrix_with<T: Real>(r: &Mic<T>, states: &[ComplexMatrix<T>]) -> Result<BornMatrix<T>> {
    let n = r.len();
    if states.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: states.len(),
        });
    }
    let m = RealMatrix::from_fn(n, |i, j| r.elements[i].trace_product(&states[j]).re);
    let (phi, cond) = m.inverse_with_condition()?;
    let cond = cond.as_f64();
    if cond.is_nan() || cond > CONDITION_GUARD {
        return Err(Error::IllConditioned(cond));
    }
    Ok(BornMatrix {
        dim: r.dim,
        phi,
        phi_inverse: m,
        condition: cond,
    })
}

/// `‖I − Φ‖_F²`.
pub fn phi_distance<T: Real>(b: &BornMatrix<T>) -> T {
    RealMatrix::identity(b.phi.dim()).sub(&b.phi).frobenius_norm_sq()
}

/// `d²(d²−1)`, the parallel-update distance of any SIC.
pub fn sic_parallel_distance(d: usize) -> f64 {
    let d2 = (d * d) as f64;
    d2 * (d2 - 1.0)
}

/// `q(D) = p(D|R) · Φ · p(R)`, where `cond` has one row per outcome of `D`
/// and one column per reference outcome.
pub fn apply_born_rule<T: Real>(cond: &[Vec<T>], b: &BornMatrix<T>, prior: &[T]) -> Result<Vec<T>> {
    let n = b.phi.dim();
    if prior.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: prior.len(),
        });
    }
    if let Some(row) = cond.iter().find(|row| row.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: row.len(),
        });
    }
    let total: T = prior.iter().copied().sum();
    if (total - T::one()).abs() > T::lit(T::DEFAULT_EQ_TOL).sqrt() {
        return Err(Error::InvalidInput(format!("prior sums to {total}, expected 1")));
    }
    let weights = b.phi.apply(prior);
    Ok(cond
        .iter()
        .map(|row| row.iter().zip(&weights).map(|(a, w)| *a * *w).sum())
        .collect())
}

/// `p(D_k | R_j) = tr(D_k σ_j)` for a measurement `D` and the reference's
/// post-measurement states.
pub fn conditional_matrix<T: Real>(d: &[ComplexMatrix<T>], r: &Mic<T>) -> Result<Vec<Vec<T>>> {
    let states = r
        .post_states
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("reference measurement has no post-measurement states".into()))?;
    Ok(d.iter()
        .map(|dk| states.iter().map(|s| dk.trace_product(s).re).collect())
        .collect())
}

/// `E_{a,b} = (I + B_{a,b}/√(d+1))/d²` with
/// `B = (d+1)^{-1/2} Σ_{(a,b)≠(0,0)} D_{a,b}` and `B_{a,b} = D_{a,b} B D_{a,b}†`.
/// Each element is `2/(d(d+1))` times a projector of rank `(d+1)/2`.
pub fn rank_half_povm<T: Real>(d: usize) -> Result<Mic<T>> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::UnsupportedDimension(d, "rank-half POVM needs odd d >= 3"));
    }
    let disp = displacement_set::<T>(d)?;
    let s = T::one() / T::lit(d as f64 + 1.0).sqrt();
    let mut b = ComplexMatrix::zeros(d);
    for op in disp.ops.iter().skip(1) {
        b = &b + op;
    }
    let b = b.scale_real(s);
    let id = ComplexMatrix::identity(d);
    let inv_d2 = T::one() / T::lit((d * d) as f64);
    let elements = disp
        .ops
        .iter()
        .map(|dab| (&id + &b.conjugate_by(dab).scale_real(s)).scale_real(inv_d2))
        .collect();
    Mic::new(elements, format!("rank-half d={d}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Matched,
    Unmatched,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HesseComparison {
    /// `deviation[i][j] = max |E_i − (I − Π_j)/6|`.
    pub deviation: Vec<Vec<f64>>,
    /// `bijection[i] = j` when every `E_i` matches a distinct complement.
    pub bijection: Option<Vec<usize>>,
    /// Largest matched deviation (or the best achievable row minimum).
    pub max_deviation: f64,
    pub trace_gap: f64,
    pub verdict: Verdict,
}

/// Tests whether each `E_{a,b}` equals `(I − Π_j)/6` for some Hesse projector,
/// with distinct `j` for distinct elements.
pub fn compare_with_hesse<T: Real>(m: &Mic<T>, hesse: &SicEnsemble<T>, tol: &Tolerance<T>) -> Result<HesseComparison> {
    if m.dim != 3 || hesse.dim != 3 {
        return Err(Error::UnsupportedDimension(m.dim, "Hesse comparison"));
    }
    let id = ComplexMatrix::identity(3);
    let sixth = T::one() / T::lit(6.0);
    let targets: Vec<_> = hesse.projectors.iter().map(|p| (&id - p).scale_real(sixth)).collect();
    let deviation: Vec<Vec<f64>> = m
        .elements
        .iter()
        .map(|e| targets.iter().map(|t| e.max_abs_diff(t).as_f64()).collect())
        .collect();
    let trace_gap = m
        .elements
        .iter()
        .map(|e| (e.trace().re - T::lit(1.0 / 3.0)).abs().as_f64())
        .fold(0.0, f64::max);

    let cut = tol.eq_tol.as_f64();
    let mut best = Vec::with_capacity(deviation.len());
    let mut worst = 0.0f64;
    for row in &deviation {
        let (j, v) = row
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (j, &v)| if v < acc.1 { (j, v) } else { acc });
        best.push(j);
        worst = worst.max(v);
    }
    let mut seen = vec![false; targets.len()];
    let injective = best.iter().all(|&j| !std::mem::replace(&mut seen[j], true));
    let matched = worst <= cut && injective && best.len() == targets.len();
    Ok(HesseComparison {
        deviation,
        bijection: matched.then_some(best),
        max_deviation: worst,
        trace_gap,
        verdict: if matched { Verdict::Matched } else { Verdict::Unmatched },
    })
}

/// Four unit Bloch vectors summing to zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct BlochMic<T> {
    pub vectors: [[T; 3]; 4],
}

fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3<T: Real>(a: &[T; 3]) -> T {
    dot(a, a).sqrt()
}

impl<T: Real> BlochMic<T> {
    pub fn new(vectors: [[T; 3]; 4], tol: &Tolerance<T>) -> Result<Self> {
        for r in &vectors {
            let n = norm3(r);
            if (n - T::one()).abs() > tol.eq_tol {
                return Err(Error::NotNormalized(n.as_f64()));
            }
        }
        let sum: [T; 3] = std::array::from_fn(|k| vectors.iter().map(|r| r[k]).sum());
        let s = norm3(&sum);
        if s > tol.eq_tol {
            return Err(Error::InvalidInput(format!(
                "Bloch vectors sum to a vector of length {s}, not an unbiased rank-1 MIC"
            )));
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let diff: [T; 3] = std::array::from_fn(|k| vectors[i][k] - vectors[j][k]);
                if norm3(&diff) <= tol.eq_tol {
                    return Err(Error::InvalidInput(format!("Bloch vectors {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { vectors })
    }

    /// `E_j = ½ |ψ_j⟩⟨ψ_j| = (I + r_j·σ)/4`.
    pub fn to_mic(&self) -> Mic<T> {
        let half = T::lit(0.5);
        let elements = self
            .vectors
            .iter()
            .map(|r| qubit_from_bloch(*r).scale_real(half))
            .collect();
        Mic {
            dim: 2,
            elements,
            post_states: None,
            policy: None,
            label: "unbiased qubit MIC".into(),
        }
    }

    /// A random zero-sum quadruple: `r₀ + r₁ = s = −(r₂ + r₃)` for a random
    /// `s` with `0 < |s| < 2`, each pair split about a random perpendicular.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let s_len: f64 = rng.random_range(0.05..1.95);
        let axis = random_unit(rng);
        let s = axis.map(|x| x * s_len);
        let v0 = split_pair(&s, rng);
        let v1 = split_pair(&s.map(|x| -x), rng);
        let vectors = [v0.0, v0.1, v1.0, v1.1].map(|r| r.map(T::lit));
        Self { vectors }
    }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

/// Two unit vectors `a, b` with `a + b = s`, `0 < |s| < 2`.
fn split_pair<R: Rng + ?Sized>(s: &[f64; 3], rng: &mut R) -> ([f64; 3], [f64; 3]) {
    let len = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
    let u = s.map(|x| x / len);
    // a component perpendicular to s
    let mut p = random_unit(rng);
    let along = p[0] * u[0] + p[1] * u[1] + p[2] * u[2];
    p = std::array::from_fn(|k| p[k] - along * u[k]);
    let pn = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let p = p.map(|x| x / pn);
    let h = len / 2.0;
    let w = (1.0 - h * h).sqrt();
    let a = std::array::from_fn(|k| h * u[k] + w * p[k]);
    let b = std::array::from_fn(|k| h * u[k] - w * p[k]);
    (a, b)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlochGeometry {
    pub dots: [[f64; 4]; 4],
    /// `max |r₀·r₁ − r₂·r₃|` over the three splittings into disjoint pairs.
    pub disjoint_pair_residual: f64,
    /// Centroid of the face opposite vertex `j`.
    pub face_centroids: [[f64; 3]; 4],
    pub centroid_distances: [f64; 4],
    /// `max ||centroid| − 1/3|`.
    pub centroid_error: f64,
}

pub fn bloch_geometry<T: Real>(b: &BlochMic<T>) -> BlochGeometry {
    let v = &b.vectors;
    let dots: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| dot(&v[i], &v[j]).as_f64()));
    let disjoint_pair_residual = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
        .iter()
        .map(|&((a, b), (c, d))| (dots[a][b] - dots[c][d]).abs())
        .fold(0.0, f64::max);
    let third = T::lit(1.0 / 3.0);
    let face_centroids: [[f64; 3]; 4] = std::array::from_fn(|j| {
        std::array::from_fn(|k| {
            let s: T = (0..4).filter(|&i| i != j).map(|i| v[i][k]).sum();
            (s * third).as_f64()
        })
    });
    let centroid_distances = face_centroids.map(|f| (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt());
    let centroid_error = centroid_distances
        .iter()
        .map(|r| (r - 1.0 / 3.0).abs())
        .fold(0.0, f64::max);
    BlochGeometry {
        dots,
        disjoint_pair_residual,
        face_centroids,
        centroid_distances,
        centroid_error,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrthogonalityAudit {
    pub trials: usize,
    pub min_inner_product: f64,
    pub max_zero_count: usize,
    pub zero_tol: f64,
    pub pass: bool,
}

/// Outcome probabilities `tr(ρ E_j)`.
pub fn mic_probabilities<T: Real>(m: &Mic<T>, rho: &ComplexMatrix<T>) -> Vec<T> {
    m.elements.iter().map(|e| rho.trace_product(e).re).collect()
}

/// Number of outcomes with probability at most `zero_tol`.
pub fn zero_count<T: Real>(p: &[T], zero_tol: T) -> usize {
    p.iter().filter(|&&x| x <= zero_tol).count()
}

/// Draws `trials` pairs of qubit states (alternating pure and mixed) and
/// records the smallest overlap `p·p'` of their outcome distributions and the
/// largest number of vanishing outcomes for any single state.
pub fn orthogonality_audit<T: Real, R: Rng + ?Sized>(
    m: &Mic<T>,
    trials: usize,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<OrthogonalityAudit> {
    if m.dim != 2 || m.len() != 4 {
        return Err(Error::UnsupportedDimension(
            m.dim,
            "orthogonality audit needs a 4-outcome qubit MIC",
        ));
    }
    let mut draw = |k: usize| {
        let n = random_unit(rng);
        let r = if k.is_multiple_of(2) {
            1.0
        } else {
            rng.random_range(0.0f64..1.0).cbrt()
        };
        qubit_from_bloch(n.map(|x| T::lit(x * r)))
    };
    let mut min_ip = f64::INFINITY;
    let mut max_zero = 0;
    for t in 0..trials {
        let a = mic_probabilities(m, &draw(2 * t));
        let b = mic_probabilities(m, &draw(2 * t + 1));
        max_zero = max_zero.max(zero_count(&a, tol.eq_tol)).max(zero_count(&b, tol.eq_tol));
        let ip: T = a.iter().zip(&b).map(|(x, y)| *x * *y).sum();
        min_ip = min_ip.min(ip.as_f64());
    }
    Ok(OrthogonalityAudit {
        trials,
        min_inner_product: min_ip,
        max_zero_count: max_zero,
        zero_tol: tol.eq_tol.as_f64(),
        pass: min_ip > 0.0 && max_zero <= 1,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub policy: UpdatePolicy,
    pub seed: u64,
    pub samples: usize,
    pub used: usize,
    pub skipped: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub histogram: Vec<HistogramBin>,
    pub distances: Vec<f64>,
}

pub const HISTOGRAM_BINS: usize = 20;

/// `‖I − Φ‖²` for the states of `policy` rotated by `u`.
pub fn distance_under_rotation<T: Real>(reference: &Mic<T>, policy: UpdatePolicy, u: &ComplexMatrix<T>) -> Result<T> {
    let states = reference.states_for(policy, Some(u))?;
    Ok(phi_distance(&born_matrix_with(reference, &states)?))
}

/// Samples `‖I − Φ‖²` under `policy`. Sample `i` draws its unitary from a
/// ChaCha8 stream `i` keyed by `seed`, so results do not depend on thread
/// scheduling; sums use compensated accumulation in sample order.
/// Singular or ill-conditioned draws are skipped and counted.
pub fn monte_carlo_phi<T: Real>(
    reference: &Mic<T>,
    policy: UpdatePolicy,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    if policy.is_antipodal() && reference.dim != 2 {
        return Err(Error::UnsupportedDimension(reference.dim, "antipodal updating"));
    }
    let id = ComplexMatrix::identity(reference.dim);
    let results: Vec<Result<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let u = if policy.is_random() {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                haar_unitary::<T, _>(reference.dim, &mut rng)
            } else {
                id.clone()
            };
            distance_under_rotation(reference, policy, &u).map(|x| x.as_f64())
        })
        .collect();

    let mut distances = Vec::with_capacity(samples);
    let mut skipped = 0;
    for r in results {
        match r {
            Ok(x) => distances.push(x),
            Err(Error::Singular(_) | Error::IllConditioned(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if distances.is_empty() {
        return Err(Error::Singular(0.0));
    }
    let min = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let max = distances.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = distances.iter().copied().collect::<CompensatedSum>().value() / distances.len() as f64;
    Ok(MonteCarloReport {
        policy,
        seed,
        samples,
        used: distances.len(),
        skipped,
        min,
        mean,
        max,
        histogram: histogram(&distances, min, max, HISTOGRAM_BINS),
        distances,
    })
}

fn histogram(xs: &[f64], min: f64, max: f64, bins: usize) -> Vec<HistogramBin> {
    if max <= min {
        return vec![HistogramBin {
            lo: min,
            hi: max,
            count: xs.len(),
        }];
    }
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in xs {
        let k = (((x - min) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            lo: min + k as f64 * width,
            hi: if k + 1 == bins {
                max
            } else {
                min + (k + 1) as f64 * width
            },
            count,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::sic::{hesse_sic, qubit_sic, Sign};

    type F = f64;

    fn tol() -> Tolerance<F> {
        Tolerance::default()
    }

    fn qubit_mic() -> Mic<F> {
        Mic::from_sic(&qubit_sic(Sign::Plus).unwrap())
    }

    #[test]
    fn sic_mic_validates() {
        let r = validate_mic(&qubit_mic(), &tol()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.gram_rank, 4);
    }

    #[test]
    fn validation_catches_forced_failures() {
        let mut m = qubit_mic();
        m.elements[2] = m.elements[2].scale_real(-1.0);
        let r = validate_mic(&m, &tol()).unwrap();
        assert!(!r.psd && !r.pass);

        let mut m = qubit_mic();
        m.elements.pop();
        let r = validate_mic(&m, &tol()).unwrap();
        assert_eq!(r.gram_rank, 3);
        assert!(!r.informationally_complete && !r.pass);
    }

    #[test]
    fn orthocross_is_a_mic() {
        for d in [2, 3] {
            let m = orthocross_mic::<F>(d, &tol()).unwrap();
            assert_eq!(m.len(), d * d);
            let r = validate_mic(&m, &tol()).unwrap();
            assert!(r.pass, "{r:?}");
            assert!(r.completeness_deviation < 1e-12);
        }
        assert!(orthocross_mic::<F>(1, &tol()).is_err());
    }

    #[test]
    fn qubit_parallel_and_antipodal_born_matrices() {
        let par = born_matrix(&qubit_mic().with_policy(UpdatePolicy::Parallel, None).unwrap()).unwrap();
        let want = RealMatrix::from_fn(4, |i, j| if i == j { 2.5 } else { -0.5 });
        assert!(par.phi.max_abs_diff(&want) < 1e-12);
        assert!((phi_distance(&par) - 12.0).abs() < 1e-10);

        let anti = born_matrix(&qubit_mic().with_policy(UpdatePolicy::Antipodal, None).unwrap()).unwrap();
        let want = RealMatrix::from_fn(4, |i, j| if i == j { -2.0 } else { 1.0 });
        assert!(anti.phi.max_abs_diff(&want) < 1e-12);
        assert!((phi_distance(&anti) - 48.0).abs() < 1e-10);
        assert!(anti.remultiplication_residual() < 1e-12);
    }

    #[test]
    fn maximally_mixed_states_are_singular() {
        let m = qubit_mic()
            .with_post_states(vec![ComplexMatrix::identity(2).scale_real(0.5); 4])
            .unwrap();
        assert!(matches!(born_matrix(&m), Err(Error::Singular(_))));
        assert!(born_matrix(&qubit_mic()).is_err());
    }

    #[test]
    fn antipodal_is_qubit_only() {
        let m = Mic::from_sic(&hesse_sic::<F>().unwrap());
        assert!(m.clone().with_policy(UpdatePolicy::Antipodal, None).is_err());
        assert!(m.clone().with_policy(UpdatePolicy::RandomUnitaryOfSelf, None).is_err());
        assert!(monte_carlo_phi(&m, UpdatePolicy::RandomUnitaryOfAntipodal, 3, 1).is_err());
    }

    #[test]
    fn born_rule_matches_direct_trace() {
        let e = qubit_sic::<F>(Sign::Plus).unwrap();
        let r = Mic::from_sic(&e).with_policy(UpdatePolicy::Parallel, None).unwrap();
        let b = born_matrix(&r).unwrap();
        let rho = qubit_from_bloch([0.3, -0.5, 0.6]);
        let prior = mic_probabilities(&r, &rho);
        let z = [pauli::<F>(0), pauli::<F>(3)];
        let d: Vec<_> = [1.0, -1.0]
            .iter()
            .map(|s| (&z[0] + &z[1].scale_real(*s)).scale_real(0.5))
            .collect();
        let cond = conditional_matrix(&d, &r).unwrap();
        let q = apply_born_rule(&cond, &b, &prior).unwrap();
        for (qk, dk) in q.iter().zip(&d) {
            assert!((qk - rho.trace_product(dk).re).abs() < 1e-12);
        }
        // explicit SIC form: Σ_i [(d+1) p_i − 1/d] p(D|R_i)
        let q0: f64 = (0..4).map(|i| (3.0 * prior[i] - 0.5) * cond[0][i]).sum();
        assert!((q0 - q[0]).abs() < 1e-12);
        assert!(apply_born_rule(&cond, &b, &[0.5; 4]).is_err());
        assert!(apply_born_rule(&cond, &b, &[0.5; 2]).is_err());
    }

    #[test]
    fn classical_born_rule_is_total_probability() {
        let b = BornMatrix {
            dim: 2,
            phi: RealMatrix::<F>::identity(2),
            phi_inverse: RealMatrix::identity(2),
            condition: 1.0,
        };
        let q = apply_born_rule(&[vec![0.9, 0.2], vec![0.1, 0.8]], &b, &[0.25, 0.75]).unwrap();
        assert!((q[0] - 0.375).abs() < 1e-15 && (q[1] - 0.625).abs() < 1e-15);
        assert_eq!(phi_distance(&b), 0.0);
    }

    #[test]
    fn rank_half_povm_properties() {
        for d in [3, 5] {
            let m = rank_half_povm::<F>(d).unwrap();
            assert!(validate_mic(&m, &tol()).unwrap().pass);
            for e in &m.elements {
                assert!((e.trace().re - 1.0 / d as f64).abs() < 1e-12);
                assert_eq!(rank_of(e, &tol()).unwrap(), d.div_ceil(2));
            }
        }
        assert!(rank_half_povm::<F>(4).is_err());
    }

    #[test]
    fn rank_half_matches_hesse_complements() {
        let m = rank_half_povm::<F>(3).unwrap();
        let h = hesse_sic::<F>().unwrap();
        let r = compare_with_hesse(&m, &h, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Matched);
        assert_eq!(r.bijection, Some((0..9).collect()));
        assert!(r.trace_gap < 1e-14);

        let mut bad = m.clone();
        bad.elements[0][(0, 1)] += c(0.01, 0.0);
        let r = compare_with_hesse(&bad, &h, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Unmatched);
        assert!(r.bijection.is_none());
    }

    #[test]
    fn bloch_mic_checks() {
        let s = 1.0 / 3f64.sqrt();
        let tet = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        let b = BlochMic::<F>::new(tet, &tol()).unwrap();
        let g = bloch_geometry(&b);
        assert!((g.dots[0][1] + 1.0 / 3.0).abs() < 1e-15);
        assert!(g.centroid_error < 1e-15);
        assert!(validate_mic(&b.to_mic(), &tol()).unwrap().pass);

        let skew = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]];
        assert!(BlochMic::<F>::new(skew, &tol()).is_ok());
        let off = [
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.1f64.cos(), -0.1f64.sin()],
        ];
        assert!(BlochMic::<F>::new(off, &tol()).is_err());
        let long = [[2.0, 0.0, 0.0], [-2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0]];
        assert!(matches!(BlochMic::<F>::new(long, &tol()), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn random_bloch_mics_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let b = BlochMic::<F>::random(&mut rng);
            let b = BlochMic::new(b.vectors, &tol()).unwrap();
            let g = bloch_geometry(&b);
            assert!(g.centroid_error < 1e-12);
            assert!(g.disjoint_pair_residual < 1e-12);
            assert!(validate_mic(&b.to_mic(), &tol()).unwrap().pass);
        }
    }

    #[test]
    fn antipodal_pure_state_has_one_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = BlochMic::<F>::random(&mut rng);
        let m = b.to_mic();
        let r0 = b.vectors[0].map(|x| -x);
        let p = mic_probabilities(&m, &qubit_from_bloch(r0));
        assert_eq!(zero_count(&p, 1e-12), 1);
        assert!(p[0].abs() < 1e-12);
        let p = mic_probabilities(&m, &qubit_from_bloch([0.0; 3]));
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-15));
        let a = orthogonality_audit(&m, 500, &mut rng, &tol()).unwrap();
        assert!(a.pass, "{a:?}");
    }

    #[test]
    fn monte_carlo_deterministic_policies_are_constant() {
        let m = qubit_mic();
        let r = monte_carlo_phi(&m, UpdatePolicy::Parallel, 4, 0).unwrap();
        assert!((r.min - 12.0).abs() < 1e-10 && (r.max - 12.0).abs() < 1e-10);
        let r = monte_carlo_phi(&m, UpdatePolicy::Antipodal, 4, 0).unwrap();
        assert!((r.mean - 48.0).abs() < 1e-10);
        assert_eq!(r.histogram.len(), 1);
        let d = distance_under_rotation(&m, UpdatePolicy::RandomUnitaryOfSelf, &ComplexMatrix::identity(2)).unwrap();
        assert!((d - 12.0).abs() < 1e-10);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_bounded() {
        let m = qubit_mic();
        let a = monte_carlo_phi(&m, UpdatePolicy::RandomUnitaryOfSelf, 200, 42).unwrap();
        let b = monte_carlo_phi(&m, UpdatePolicy::RandomUnitaryOfSelf, 200, 42).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.min >= 12.0 - 1e-8);
        assert_eq!(a.histogram.iter().map(|h| h.count).sum::<usize>(), a.used);
        assert_eq!(a.used + a.skipped, 200);
        let c = monte_carlo_phi(&m, UpdatePolicy::RandomUnitaryOfSelf, 200, 43).unwrap();
        assert_ne!(a.mean, c.mean);
        assert!(monte_carlo_phi(&m, UpdatePolicy::Parallel, 0, 1).is_err());
    }

    #[test]
    fn policy_names_round_trip() {
        for p in UpdatePolicy::ALL {
            assert_eq!(p.name().parse::<UpdatePolicy>().unwrap(), p);
            assert_eq!(serde_json::to_string(&p).unwrap(), format!("\"{}\"", p.name()));
        }
        assert!("sideways".parse::<UpdatePolicy>().is_err());
    }
}
