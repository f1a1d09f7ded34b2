//! Numerics for the sporadic SICs in dimensions 2, 3 and 8.
//!
//! The building blocks are generic over the real scalar ([`Real`], implemented
//! for `f32` and `f64`). The aliases below fix the scalar to `f64`, which is
//! what the tolerances in the checks are tuned for.
//!
//! ```
//! use sicnum::{sic, Tolerance};
//!
//! let hesse = sic::hesse_sic::<f64>().unwrap();
//! let report = sic::verify_sic(&hesse, &Tolerance::default()).unwrap();
//! assert!(report.pass);
//! ```

pub mod entanglement;
mod error;
pub mod linalg;
pub mod mic;
pub mod scalar;
pub mod sic;
pub mod symmetry;
pub mod triples;

pub use error::{Error, Result};
pub use scalar::{Real, Tolerance};

pub type Complex64 = num_complex::Complex<f64>;
pub type Matrix = linalg::ComplexMatrix<f64>;
pub type RealMatrix64 = linalg::RealMatrix<f64>;
pub type Tolerance64 = Tolerance<f64>;
pub type SicEnsemble64 = sic::SicEnsemble<f64>;
pub type Mic64 = mic::Mic<f64>;
pub type BornMatrix64 = mic::BornMatrix<f64>;
pub type TripleTensor64 = triples::TripleTensor<f64>;
pub type StructureCoefficients64 = triples::StructureCoefficients<f64>;
pub type FanoRep64 = entanglement::FanoRep<f64>;
pub type PseudoSic64 = entanglement::PseudoSic<f64>;
pub type UnitaryGroup64 = symmetry::UnitaryGroup<f64>;
