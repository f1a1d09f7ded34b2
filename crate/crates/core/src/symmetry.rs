//! Finite unitary groups and their actions: the single-qubit Clifford group,
//! multi-qubit Pauli groups, the qutrit Fourier and Zauner unitaries, and
//! conjugation bookkeeping on displacement operators.
//!
//! Group elements are compared modulo a global phase. The canonical
//! representative of a unitary is the one whose first non-negligible entry,
//! in row-major order, is real and positive.

use num_complex::Complex;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::linalg::{
    bloch_vector, inner, pauli, pauli_label, pauli_word, qubit_from_bloch, vector_norm, ComplexMatrix,
};
use crate::scalar::{c, Real, Tolerance, C};
use crate::sic::{qubit_state_from_probs, raw_probabilities, root_of_unity, DisplacementSet, SicEnsemble};
use crate::{Error, Result};

/// Rescales `m` so its first entry with modulus above `tol` is real positive.
pub fn canonicalize_phase<T: Real>(m: &ComplexMatrix<T>, tol: T) -> ComplexMatrix<T> {
    match m.as_slice().iter().find(|z| z.norm() > tol) {
        Some(z) => m.scale(z.conj() / z.norm()),
        None => m.clone(),
    }
}

pub fn equal_up_to_phase<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>, tol: T) -> bool {
    a.dim() == b.dim() && canonicalize_phase(a, tol).max_abs_diff(&canonicalize_phase(b, tol)) <= tol
}

/// A finite group of unitaries modulo phases.
#[derive(Clone, Debug)]
pub struct UnitaryGroup<T> {
    pub dim: usize,
    pub elements: Vec<ComplexMatrix<T>>,
    /// Word over the generators for each element, e.g. `"HS·σy"`.
    pub labels: Vec<String>,
}

impl<T: Real> UnitaryGroup<T> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Index of the element equal to `m` up to phase.
    pub fn position(&self, m: &ComplexMatrix<T>, tol: T) -> Option<usize> {
        let key = canonicalize_phase(m, tol);
        self.elements
            .iter()
            .position(|e| canonicalize_phase(e, tol).max_abs_diff(&key) <= tol)
    }

    /// Checks every product `g_i g_j` and every inverse for membership.
    /// Returns the number of products checked.
    pub fn verify_closure(&self, tol: T) -> Result<usize> {
        let mut checked = 0;
        for (i, a) in self.elements.iter().enumerate() {
            if self.position(&a.dagger(), tol).is_none() {
                return Err(Error::InvalidInput(format!(
                    "inverse of {} is not in the group",
                    self.labels[i]
                )));
            }
            for (j, b) in self.elements.iter().enumerate() {
                if self.position(&(a * b), tol).is_none() {
                    return Err(Error::InvalidInput(format!(
                        "product {}·{} is not in the group",
                        self.labels[i], self.labels[j]
                    )));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }

    pub fn contains_identity(&self, tol: T) -> bool {
        self.position(&ComplexMatrix::identity(self.dim), tol).is_some()
    }
}

/// Phase gate `diag(1, i)`.
pub fn phase_gate<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::diagonal(&[C::one(), c(0.0, 1.0)])
}

pub fn hadamard<T: Real>() -> ComplexMatrix<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(2, |i, j| if i == 1 && j == 1 { c(-h, 0.0) } else { c(h, 0.0) })
}

/// The 24-element single-qubit Clifford group: products `M·P` with
/// `M ∈ {I, H, S, HS, SH, HSH}` and `P ∈ {I, σx, σy, σz}`, phase-canonicalized.
/// Distinctness and closure are checked before returning.
pub fn qubit_clifford_group<T: Real>() -> Result<UnitaryGroup<T>> {
    let h = hadamard::<T>();
    let s = phase_gate::<T>();
    let id = ComplexMatrix::identity(2);
    let cosets = [
        ("I", id.clone()),
        ("H", h.clone()),
        ("S", s.clone()),
        ("HS", &h * &s),
        ("SH", &s * &h),
        ("HSH", &(&h * &s) * &h),
    ];
    let pauli_names = ["I", "σx", "σy", "σz"];
    let tol = T::lit(T::DEFAULT_EQ_TOL);
    let mut elements = Vec::with_capacity(24);
    let mut labels = Vec::with_capacity(24);
    for (mname, m) in &cosets {
        for (k, pname) in pauli_names.iter().enumerate() {
            let label = match (*mname, k) {
                ("I", 0) => "I".to_string(),
                (_, 0) => mname.to_string(),
                ("I", _) => pname.to_string(),
                _ => format!("{mname}·{pname}"),
            };
            let u = canonicalize_phase(&(m * &pauli::<T>(k)), tol);
            elements.push(u);
            labels.push(label);
        }
    }
    let g = UnitaryGroup {
        dim: 2,
        elements,
        labels,
    };
    for i in 0..g.order() {
        for j in 0..i {
            if equal_up_to_phase(&g.elements[i], &g.elements[j], tol) {
                return Err(Error::InvalidInput(format!(
                    "{} and {} coincide up to phase",
                    g.labels[i], g.labels[j]
                )));
            }
        }
    }
    g.verify_closure(tol)?;
    Ok(g)
}

/// The `4ⁿ` Pauli words `σ_α`. Elements are kept Hermitian rather than
/// phase-canonicalized; membership tests still compare up to phase.
pub fn pauli_group<T: Real>(n_qubits: usize) -> Result<UnitaryGroup<T>> {
    if n_qubits == 0 || n_qubits > 4 {
        return Err(Error::InvalidInput(format!(
            "pauli_group supports 1..=4 qubits, got {n_qubits}"
        )));
    }
    let count = 4usize.pow(n_qubits as u32);
    Ok(UnitaryGroup {
        dim: 1 << n_qubits,
        elements: (0..count).map(|a| pauli_word(a, n_qubits)).collect(),
        labels: (0..count).map(|a| pauli_label(a, n_qubits)).collect(),
    })
}

/// Distinct projectors `U p U†` over the group, in first-seen order.
pub fn orbit_of_projector<T: Real>(
    g: &UnitaryGroup<T>,
    p: &ComplexMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<ComplexMatrix<T>>> {
    if p.dim() != g.dim {
        return Err(Error::DimensionMismatch {
            expected: g.dim,
            actual: p.dim(),
        });
    }
    p.ensure_hermitian(tol.eq_tol)?;
    let idem = (p * p).max_abs_diff(p);
    if idem > tol.eq_tol {
        return Err(Error::NotProjector(idem.as_f64()));
    }
    let images = g.elements.iter().map(|u| p.conjugate_by(u)).collect();
    Ok(crate::sic::dedup_by_distance(images, tol.eq_tol.sqrt()))
}

/// Image of `σx, σy, σz` under `σ ↦ U σ U†`, as `(sign, pauli index)`.
/// `None` when some image is not `±` a Pauli matrix.
pub fn pauli_conjugation_table<T: Real>(u: &ComplexMatrix<T>, tol: T) -> Option<[(i8, usize); 3]> {
    let mut out = [(0i8, 0usize); 3];
    for (slot, k) in (1..4).enumerate() {
        let img = pauli::<T>(k).conjugate_by(u);
        let hit = (1..4).find_map(|m| {
            let p = pauli::<T>(m);
            if img.max_abs_diff(&p) <= tol {
                Some((1, m))
            } else if img.max_abs_diff(&(-&p)) <= tol {
                Some((-1, m))
            } else {
                None
            }
        })?;
        out[slot] = hit;
    }
    Some(out)
}

/// `U = (1/√3) [ω^{jk}]`, the qutrit discrete Fourier transform.
pub fn qutrit_fourier<T: Real>() -> ComplexMatrix<T> {
    let s = T::one() / T::lit(3f64.sqrt());
    ComplexMatrix::from_fn(3, |j, k| root_of_unity::<T>(j * k, 3) * s)
}

/// `V = (e^{iπ/6}/√3) [[1, 1, 1], [ω², 1, ω], [ω², ω, 1]]`.
pub fn zauner_unitary<T: Real>() -> ComplexMatrix<T> {
    let pre = std::f64::consts::PI / 6.0;
    let s = Complex::new(T::lit(pre.cos()), T::lit(pre.sin())) / T::lit(3f64.sqrt());
    let w = |k: usize| root_of_unity::<T>(k, 3);
    let rows = [[0, 0, 0], [2, 0, 1], [2, 1, 0]];
    ComplexMatrix::from_fn(3, |i, j| w(rows[i][j]) * s)
}

/// `u† D_{a,b} u = phase · D_{a',b'}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct ConjugationAction<T> {
    pub source: (usize, usize),
    pub image: (usize, usize),
    pub phase: C<T>,
}

pub fn conjugation_action<T: Real>(
    u: &ComplexMatrix<T>,
    disp: &DisplacementSet<T>,
    a: usize,
    b: usize,
    tol: T,
) -> Result<ConjugationAction<T>> {
    let d = disp.dim;
    if u.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: u.dim(),
        });
    }
    let defect = u.unitarity_defect();
    if defect > tol {
        return Err(Error::InvalidInput(format!(
            "matrix is not unitary (defect {:e})",
            defect.as_f64()
        )));
    }
    let m = &(&u.dagger() * disp.get(a, b)) * u;
    let dd = T::lit(d as f64);
    for (a2, b2) in disp.index_pairs() {
        let target = disp.get(a2, b2);
        let coef = target.dagger().trace_product(&m) / dd;
        if (coef.norm() - T::one()).abs() > tol.sqrt() {
            continue;
        }
        if m.max_abs_diff(&target.scale(coef)) <= tol {
            return Ok(ConjugationAction {
                source: (a % d, b % d),
                image: (a2, b2),
                phase: coef / coef.norm(),
            });
        }
    }
    Err(Error::NotClifford(a, b))
}

/// Actions for every `(a, b)`, ordered by `a·d + b`.
pub fn conjugation_table<T: Real>(
    u: &ComplexMatrix<T>,
    disp: &DisplacementSet<T>,
    tol: T,
) -> Result<Vec<ConjugationAction<T>>> {
    disp.index_pairs()
        .map(|(a, b)| conjugation_action(u, disp, a, b, tol))
        .collect()
}

/// True iff `(a, b) ↦ (a', b')` is additive mod `d` over the whole table.
pub fn is_linear_mod_d<T>(table: &[ConjugationAction<T>], d: usize) -> bool {
    let image = |a: usize, b: usize| table[(a % d) * d + (b % d)].image;
    if table.len() != d * d {
        return false;
    }
    for a in 0..d {
        for b in 0..d {
            for a2 in 0..d {
                for b2 in 0..d {
                    let (x1, y1) = image(a, b);
                    let (x2, y2) = image(a2, b2);
                    if image(a + a2, b + b2) != ((x1 + x2) % d, (y1 + y2) % d) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Returns `λ` with `u v = λ v`, or an error when the residual exceeds
/// `tol · ‖v‖`.
pub fn eigen_check<T: Real>(u: &ComplexMatrix<T>, v: &[C<T>], tol: T) -> Result<C<T>> {
    if v.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            actual: v.len(),
        });
    }
    let norm = vector_norm(v);
    if norm.is_zero() {
        return Err(Error::InvalidInput("zero vector".into()));
    }
    let uv = u.apply(v);
    let lambda = inner(v, &uv) / (norm * norm);
    let residual = uv
        .iter()
        .zip(v)
        .map(|(x, y)| (*x - *y * lambda).norm_sqr())
        .sum::<T>()
        .sqrt();
    if residual > tol * norm {
        return Err(Error::NotEigenvector(residual.as_f64()));
    }
    Ok(lambda)
}

/// A group element carrying one ensemble onto another.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CliffordMapping {
    pub element: usize,
    pub label: String,
    /// `U Π_j U† = Π'_{permutation[j]}`.
    pub permutation: Vec<usize>,
}

/// Brute-force search for `U ∈ g` with `{U Π_j U†} = {Π'_k}` as sets.
pub fn find_clifford_mapping<T: Real>(
    a: &SicEnsemble<T>,
    b: &SicEnsemble<T>,
    g: &UnitaryGroup<T>,
    tol: T,
) -> Result<Option<CliffordMapping>> {
    if a.dim != b.dim || a.dim != g.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            actual: if a.dim != b.dim { b.dim } else { g.dim },
        });
    }
    if a.len() != b.len() {
        return Ok(None);
    }
    'outer: for (idx, u) in g.elements.iter().enumerate() {
        let mut perm = Vec::with_capacity(a.len());
        let mut used = vec![false; b.len()];
        for p in &a.projectors {
            let img = p.conjugate_by(u);
            let hit = b
                .projectors
                .iter()
                .enumerate()
                .find(|(k, q)| !used[*k] && img.frobenius_distance(q) <= tol);
            match hit {
                Some((k, _)) => {
                    used[k] = true;
                    perm.push(k);
                }
                None => continue 'outer,
            }
        }
        return Ok(Some(CliffordMapping {
            element: idx,
            label: g.labels[idx].clone(),
            permutation: perm,
        }));
    }
    Ok(None)
}

/// Linear part of the Bloch-ball map induced by a transformation of qubit
/// SIC probabilities: columns are images of the three Bloch axes, each taken
/// relative to the image of the maximally mixed state.
pub fn induced_bloch_map<T: Real>(e: &SicEnsemble<T>, map: impl Fn(&[T]) -> Vec<T>) -> Result<[[T; 3]; 3]> {
    if e.dim != 2 {
        return Err(Error::UnsupportedDimension(e.dim, "Bloch maps are defined for qubits"));
    }
    let image = |r: [T; 3]| -> Result<[T; 3]> {
        let p = raw_probabilities(e, &qubit_from_bloch(r));
        Ok(bloch_vector(&qubit_state_from_probs(&map(&p), e)?))
    };
    let origin = image([T::zero(); 3])?;
    let mut m = [[T::zero(); 3]; 3];
    for k in 0..3 {
        let mut axis = [T::zero(); 3];
        axis[k] = T::one();
        let img = image(axis)?;
        for (row, (i, o)) in m.iter_mut().zip(img.iter().zip(origin.iter())) {
            row[k] = *i - *o;
        }
    }
    Ok(m)
}

pub fn det3<T: Real>(m: &[[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}
