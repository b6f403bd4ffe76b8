//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All matrix code is written against [`Real`], which is implemented for
//! `f32` and `f64`. Each precision carries its own tolerance set; the `f64`
//! values are the ones the library is calibrated and tested against.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Maximum entrywise |M − M†| accepted as Hermitian.
    const HERMITIAN_TOL: Self;
    /// Maximum |tr ρ − 1| accepted for a density matrix.
    const TRACE_TOL: Self;
    /// Most negative eigenvalue accepted as positive semidefinite.
    const PSD_TOL: Self;
    /// Maximum |‖ψ‖ − 1| accepted for a pure state.
    const NORM_TOL: Self;
    /// Pairs with λ_k + λ_l at or below this are dropped from the QFI sum.
    const QFI_CUTOFF: Self;
    /// A criterion gap must exceed this to count as a detection.
    const DETECTION_THRESHOLD: Self;
    /// Jacobi stops once the off-diagonal norm falls below this times ‖M‖_F.
    const JACOBI_REL_TOL: Self;
    /// Largest imaginary residue tolerated when a trace should be real.
    const IMAG_RESIDUE_TOL: Self;
    /// Tolerance on affine parameter constraints such as 4p + 2q = 1.
    const CONSTRAINT_TOL: Self;

    /// Converts an `f64` literal. Every `f64` is representable (possibly rounded).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal converts to Real")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to Real")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f64 {
    const HERMITIAN_TOL: Self = 1e-10;
    const TRACE_TOL: Self = 1e-10;
    const PSD_TOL: Self = 1e-10;
    const NORM_TOL: Self = 1e-12;
    const QFI_CUTOFF: Self = 1e-12;
    const DETECTION_THRESHOLD: Self = 1e-9;
    const JACOBI_REL_TOL: Self = 1e-14;
    const IMAG_RESIDUE_TOL: Self = 1e-10;
    const CONSTRAINT_TOL: Self = 1e-12;
}

impl Real for f32 {
    const HERMITIAN_TOL: Self = 1e-5;
    const TRACE_TOL: Self = 1e-5;
    const PSD_TOL: Self = 1e-5;
    const NORM_TOL: Self = 1e-5;
    const QFI_CUTOFF: Self = 1e-6;
    const DETECTION_THRESHOLD: Self = 1e-4;
    const JACOBI_REL_TOL: Self = 1e-6;
    const IMAG_RESIDUE_TOL: Self = 1e-5;
    const CONSTRAINT_TOL: Self = 1e-6;
}

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

/// Checks a complex value is finite in both components.
#[inline]
pub(crate) fn is_finite<T: Real>(z: Cx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
