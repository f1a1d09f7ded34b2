//! Dense complex linear algebra: matrices, Hermitian spectra, tensor
//! products, partial traces and Haar-random unitaries.

mod eigen;
mod haar;
mod matrix;
mod ops;
mod real;

pub use eigen::{hermitian_eigen, HermitianEigen};
pub use haar::{complex_gaussian_matrix, haar_unitary, qr_decompose};
pub use matrix::{inner, kron_vec, sum_matrices, vector_norm, ComplexMatrix, MatrixRepr};
pub use ops::{
    dagger, frobenius_norm_sq, inv_sqrt_psd, is_psd, min_eigenvalue, partial_trace, rank_of, tensor_all,
    tensor_product, trace,
};
pub use real::RealMatrix;

use crate::scalar::{c, Real};

/// Pauli matrix by index: 0 = I, 1 = σx, 2 = σy, 3 = σz.
pub fn pauli<T: Real>(k: usize) -> ComplexMatrix<T> {
    let rows: [[(f64, f64); 4]; 4] = [
        [(1., 0.), (0., 0.), (0., 0.), (1., 0.)],
        [(0., 0.), (1., 0.), (1., 0.), (0., 0.)],
        [(0., 0.), (0., -1.), (0., 1.), (0., 0.)],
        [(1., 0.), (0., 0.), (0., 0.), (-1., 0.)],
    ];
    let r = rows[k];
    ComplexMatrix::from_row_major(r.iter().map(|&(re, im)| c(re, im)).collect()).expect("2x2 literal")
}

/// Bloch vector `(tr ρσx, tr ρσy, tr ρσz)` of a qubit operator.
pub fn bloch_vector<T: Real>(rho: &ComplexMatrix<T>) -> [T; 3] {
    assert_eq!(rho.dim(), 2, "Bloch vectors are defined for qubits");
    [1, 2, 3].map(|k| rho.trace_product(&pauli(k)).re)
}

/// `½(I + r·σ)`.
pub fn qubit_from_bloch<T: Real>(r: [T; 3]) -> ComplexMatrix<T> {
    let half = T::lit(0.5);
    let mut m = pauli::<T>(0);
    for (k, rk) in r.iter().enumerate() {
        m = &m + &pauli::<T>(k + 1).scale_real(*rk);
    }
    m.scale_real(half)
}

/// Digits of a Pauli word index in base 4, leftmost digit = qubit 1.
pub fn pauli_digits(alpha: usize, n_qubits: usize) -> Vec<usize> {
    let mut d = vec![0; n_qubits];
    let mut a = alpha;
    for k in (0..n_qubits).rev() {
        d[k] = a % 4;
        a /= 4;
    }
    d
}

/// `σ_{α_1} ⊗ … ⊗ σ_{α_n}` for the base-4 word index `alpha`.
pub fn pauli_word<T: Real>(alpha: usize, n_qubits: usize) -> ComplexMatrix<T> {
    let factors: Vec<ComplexMatrix<T>> = pauli_digits(alpha, n_qubits).into_iter().map(pauli).collect();
    let refs: Vec<&ComplexMatrix<T>> = factors.iter().collect();
    tensor_all(&refs)
}

/// Word label such as `"xIz"`; the all-identity word is `"III"`.
pub fn pauli_label(alpha: usize, n_qubits: usize) -> String {
    pauli_digits(alpha, n_qubits)
        .into_iter()
        .map(|k| ['I', 'x', 'y', 'z'][k])
        .collect()
}
