//! Variance, covariance and quantum Fisher information.
//!
//! The QFI uses the spectral sum
//!
//! ```text
//! F(ρ, O) = Σ_{k≠l, λ_k+λ_l > cutoff} (λ_k − λ_l)² / (2(λ_k + λ_l)) · |⟨k|O|l⟩|²
//! ```
//!
//! In this normalization the QFI of a pure state equals the variance of `O`
//! (no factor of 4). Much of the metrology literature uses 4× this value.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::observables::{local_product, Observable};
use crate::states::{check_probability, DensityMatrix, NoisyFamily, PureState};
use crate::scalar::{Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QfiResult<T = f64> {
    pub value: T,
    /// Eigenvalues of ρ above the cutoff.
    pub rank_used: usize,
}

fn check_operator<T: Real>(rho_dim: usize, op: &ComplexMatrix<T>) -> Result<()> {
    if op.dim() != rho_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {0}x{0} but the state is {1}x{1}",
            op.dim(),
            rho_dim
        )));
    }
    let dev = op.hermitian_deviation();
    if !(dev <= T::HERMITIAN_TOL) {
        return Err(Error::NotHermitian { max_deviation: dev.as_f64() });
    }
    Ok(())
}

fn real_part<T: Real>(z: Cx<T>) -> Result<T> {
    if !(z.im.abs() <= T::IMAG_RESIDUE_TOL) {
        return Err(Error::InvariantViolation(format!(
            "expectation value has imaginary residue {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// ⟨O⟩_ρ = tr(ρO).
pub fn expectation<T: Real>(rho: &DensityMatrix<T>, op: &ComplexMatrix<T>) -> Result<T> {
    check_operator(rho.dim(), op)?;
    real_part(rho.matrix().trace_product(op))
}

/// (ΔO)²_ρ = ⟨O²⟩_ρ − ⟨O⟩²_ρ.
pub fn variance<T: Real>(rho: &DensityMatrix<T>, op: &ComplexMatrix<T>) -> Result<T> {
    check_operator(rho.dim(), op)?;
    let mean = real_part(rho.matrix().trace_product(op))?;
    let second = real_part(rho.matrix().trace_product(&op.matmul(op)))?;
    Ok(second - mean * mean)
}

/// Variance of `op` on a pure state, ⟨ψ|O²|ψ⟩ − ⟨ψ|O|ψ⟩².
pub fn pure_variance<T: Real>(psi: &PureState<T>, op: &ComplexMatrix<T>) -> Result<T> {
    check_operator(psi.amplitudes().len(), op)?;
    let a = psi.amplitudes();
    let oa = op.mul_vec(a);
    let mean = real_part(a.iter().zip(&oa).fold(Cx::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y))?;
    let second: T = oa.iter().map(|z| z.norm_sqr()).sum();
    Ok(second - mean * mean)
}

/// Cov_ρ(A⊗I, I⊗B) = ⟨A⊗B⟩ − ⟨A⊗I⟩⟨I⊗B⟩ on a bipartite state.
pub fn covariance<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>, b: &Observable<T>) -> Result<T> {
    let dims = rho.dims().as_slice();
    if dims != [a.local_dim(), b.local_dim()] {
        return Err(Error::DimensionMismatch(format!(
            "covariance needs a bipartite state on ({}, {}), got {}",
            a.local_dim(),
            b.local_dim(),
            rho.dims()
        )));
    }
    let joint = expectation(rho, &local_product(a, b))?;
    let mean_a = expectation(&rho.reduced(&[0])?, a.matrix())?;
    let mean_b = expectation(&rho.reduced(&[1])?, b.matrix())?;
    Ok(joint - mean_a * mean_b)
}

/// QFI with the default cutoff [`Real::QFI_CUTOFF`].
pub fn qfi<T: Real>(rho: &DensityMatrix<T>, op: &ComplexMatrix<T>) -> Result<QfiResult<T>> {
    qfi_with_cutoff(rho, op, T::QFI_CUTOFF)
}

/// QFI from the spectral sum, skipping ordered pairs with λ_k + λ_l ≤ `cutoff`.
/// Eigenvalues inside the PSD tolerance below zero are clamped to zero.
pub fn qfi_with_cutoff<T: Real>(rho: &DensityMatrix<T>, op: &ComplexMatrix<T>, cutoff: T) -> Result<QfiResult<T>> {
    check_operator(rho.dim(), op)?;
    let spec = rho.spectrum();
    let lambda: Vec<T> = spec.eigenvalues.iter().map(|&l| l.max(T::zero())).collect();
    let v = &spec.eigenvectors;
    // Matrix elements ⟨k|O|l⟩ = (V† O V)_{kl}.
    let elements = v.adjoint().matmul(&op.matmul(v));
    let n = lambda.len();
    let two = T::lit(2.0);
    let mut value = T::zero();
    for k in 0..n {
        for l in 0..n {
            if k == l {
                continue;
            }
            let s = lambda[k] + lambda[l];
            if s <= cutoff {
                continue;
            }
            let d = lambda[k] - lambda[l];
            value += d * d / (two * s) * elements[(k, l)].norm_sqr();
        }
    }
    Ok(QfiResult { value, rank_used: lambda.iter().filter(|&&l| l > cutoff).count() })
}

/// p² / (p + 2(1−p)/D) · F(|ψ⟩, O) for the white-noise family, with the pure
/// state QFI taken as the variance.
pub fn qfi_noisy_closed_form<T: Real>(family: &NoisyFamily<T>, op: &ComplexMatrix<T>, p: T) -> Result<T> {
    check_probability("p", p)?;
    let pure = pure_variance(family.psi(), op)?;
    let d = T::from_usize_lossy(family.dims().total());
    let denom = p + T::lit(2.0) * (T::one() - p) / d;
    Ok(p * p / denom * pure)
}
