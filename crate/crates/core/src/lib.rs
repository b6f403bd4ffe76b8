//! Multipartite entanglement detection from quantum Fisher information and
//! variance inequalities.
//!
//! The library evaluates, for a density matrix and one local observable per
//! subsystem, inequalities of the form `F(ρ, ΣA_i) ≤ (variance bound)` that
//! every fully separable state satisfies. A violation certifies entanglement.
//! It also carries two earlier QFI-based baselines and the PPT test for
//! comparison, sweeps white-noise families, and locates critical noise levels.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`). The generic types
//! default to `f64`; the aliases below name both precisions explicitly.
//!
//! QFI normalization: `F` equals the variance on pure states (no factor 4).

// `!(x <= tol)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod error;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod qfi;
pub mod sampling;
pub mod scalar;
pub mod states;
pub mod thresholds;

pub use criteria::{CriterionId, CriterionReport, Verdict};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Dims, SpectralDecomposition};
pub use observables::{Observable, ObservableSet};
pub use qfi::QfiResult;
pub use scalar::{Cx, Real};
pub use states::{DensityMatrix, NoisyFamily, PureState};
pub use thresholds::{GapColumn, SweepRow, ThresholdResult};

pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type PureState64 = PureState<f64>;
pub type PureState32 = PureState<f32>;
pub type Observable64 = Observable<f64>;
pub type Observable32 = Observable<f32>;
pub type ObservableSet64 = ObservableSet<f64>;
pub type ObservableSet32 = ObservableSet<f32>;
pub type NoisyFamily64 = NoisyFamily<f64>;
pub type NoisyFamily32 = NoisyFamily<f32>;
pub type CriterionReport64 = CriterionReport<f64>;
pub type CriterionReport32 = CriterionReport<f32>;
