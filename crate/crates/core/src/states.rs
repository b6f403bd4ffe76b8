//! Pure states, validated density matrices and the built-in example families.
//!
//! Basis ordering follows [`crate::linalg`]: the ket |i j …⟩ sits at the
//! flattened index with subsystem 0 as the most significant digit, so |03⟩ on
//! two ququarts is index 3.

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_trace, ComplexMatrix, Dims, SpectralDecomposition};
use crate::sampling::{random_product_state, simplex_weights};
use crate::scalar::{re, Cx, Real};

/// Normalized state vector over a tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T = f64> {
    amplitudes: Vec<Cx<T>>,
    dims: Dims,
}

impl<T: Real> PureState<T> {
    pub fn new(amplitudes: Vec<Cx<T>>, dims: Dims) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {dims} (product {})",
                amplitudes.len(),
                dims.total()
            )));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !((norm - T::one()).abs() <= T::NORM_TOL) {
            return Err(Error::NotNormalized { norm: norm.as_f64() });
        }
        Ok(Self { amplitudes, dims })
    }

    /// Superposition Σ c |digits⟩ given as (per-subsystem digits, coefficient) pairs.
    pub fn from_terms(dims: Dims, terms: &[(&[usize], T)]) -> Result<Self> {
        let strides = dims.strides();
        let mut amplitudes = vec![Cx::zero(); dims.total()];
        for (digits, coeff) in terms {
            if digits.len() != dims.len() || digits.iter().zip(dims.as_slice()).any(|(&d, &n)| d >= n) {
                return Err(Error::DimensionMismatch(format!("ket {digits:?} does not fit dims {dims}")));
            }
            let idx: usize = digits.iter().zip(&strides).map(|(d, s)| d * s).sum();
            amplitudes[idx] += re(*coeff);
        }
        Self::new(amplitudes, dims)
    }

    pub fn amplitudes(&self) -> &[Cx<T>] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn inner(&self, other: &Self) -> Cx<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Cx::zero(), |acc, (a, b)| acc + a.conj() * b)
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix with its subsystem
/// dimensions. The spectrum computed during validation is kept.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T = f64> {
    matrix: ComplexMatrix<T>,
    dims: Dims,
    spectrum: SpectralDecomposition<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates and symmetrizes `matrix`.
    pub fn new(matrix: ComplexMatrix<T>, dims: Dims) -> Result<Self> {
        dims.check_matrix(&matrix)?;
        let matrix = matrix.hermitian_part_checked()?;
        let tr = matrix.trace();
        if !((tr.re - T::one()).abs() <= T::TRACE_TOL) || !(tr.im.abs() <= T::TRACE_TOL) {
            return Err(Error::InvariantViolation(format!("trace is {} + {}i, expected 1", tr.re, tr.im)));
        }
        let spectrum = hermitian_eig(&matrix)?;
        let min = spectrum.min_eigenvalue();
        if !(min >= -T::PSD_TOL) {
            return Err(Error::InvariantViolation(format!("minimum eigenvalue {min:e} is negative")));
        }
        Ok(Self { matrix, dims, spectrum })
    }

    /// I/D over `dims`.
    pub fn maximally_mixed(dims: Dims) -> Result<Self> {
        let d = dims.total();
        Self::new(ComplexMatrix::identity(d).scale(T::one() / T::from_usize_lossy(d)), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn spectrum(&self) -> &SpectralDecomposition<T> {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// tr(ρ²).
    pub fn purity(&self) -> T {
        self.matrix.trace_product(&self.matrix).re
    }

    /// Reduced state on `keep` (ascending subsystem order).
    pub fn reduced(&self, keep: &[usize]) -> Result<Self> {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        let m = partial_trace(&self.matrix, &self.dims, &sorted)?;
        Self::new(m, self.dims.select(&sorted)?)
    }

    /// Number of eigenvalues above `threshold`.
    pub fn rank(&self, threshold: T) -> usize {
        self.spectrum.eigenvalues.iter().filter(|&&l| l > threshold).count()
    }
}

/// |ψ⟩⟨ψ|.
pub fn pure_density<T: Real>(psi: &PureState<T>) -> Result<DensityMatrix<T>> {
    let a = psi.amplitudes();
    DensityMatrix::new(ComplexMatrix::outer(a, a), psi.dims().clone())
}

/// A pure state together with the white-noise family ρ(p) = p|ψ⟩⟨ψ| + (1−p)I/D.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyFamily<T = f64> {
    psi: PureState<T>,
}

impl<T: Real> NoisyFamily<T> {
    pub fn new(psi: PureState<T>) -> Self {
        Self { psi }
    }

    pub fn psi(&self) -> &PureState<T> {
        &self.psi
    }

    pub fn dims(&self) -> &Dims {
        self.psi.dims()
    }

    pub fn at(&self, p: T) -> Result<DensityMatrix<T>> {
        white_noise_mix(self, p)
    }
}

pub(crate) fn check_probability<T: Real>(name: &'static str, p: T) -> Result<()> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::ParameterOutOfRange { name, value: p.as_f64() });
    }
    Ok(())
}

/// p·|ψ⟩⟨ψ| + (1−p)·I/D.
pub fn white_noise_mix<T: Real>(family: &NoisyFamily<T>, p: T) -> Result<DensityMatrix<T>> {
    check_probability("p", p)?;
    let a = family.psi.amplitudes();
    let d = a.len();
    let noise = (T::one() - p) / T::from_usize_lossy(d);
    let mut m = ComplexMatrix::outer(a, a).scale(p);
    for i in 0..d {
        m[(i, i)] += re(noise);
    }
    DensityMatrix::new(m, family.dims().clone())
}

/// The six orthonormal two-ququart vectors of the bound entangled family,
/// in order |ψ₁⟩…|ψ₆⟩.
pub fn example1_vectors<T: Real>() -> [PureState<T>; 6] {
    let dims = || Dims::uniform(4, 2).expect("valid dims");
    let h = T::FRAC_1_SQRT_2();
    let half = T::lit(0.5);
    let mk = |terms: &[(&[usize], T)]| PureState::from_terms(dims(), terms).expect("normalized by construction");
    [
        mk(&[(&[0, 1], h), (&[2, 3], h)]),
        mk(&[(&[1, 0], h), (&[3, 2], h)]),
        mk(&[(&[1, 1], h), (&[2, 2], h)]),
        mk(&[(&[0, 0], h), (&[3, 3], -h)]),
        mk(&[(&[0, 3], half), (&[1, 2], half), (&[2, 1], h)]),
        mk(&[(&[0, 3], -half), (&[1, 2], half), (&[3, 0], h)]),
    ]
}

/// p·Σ_{n≤4}|ψ_n⟩⟨ψ_n| + q·Σ_{n=5,6}|ψ_n⟩⟨ψ_n| with 4p + 2q = 1.
pub fn example1_state<T: Real>(p: T, q: T) -> Result<DensityMatrix<T>> {
    if !(p >= T::zero()) {
        return Err(Error::ParameterOutOfRange { name: "p", value: p.as_f64() });
    }
    if !(q >= T::zero()) {
        return Err(Error::ParameterOutOfRange { name: "q", value: q.as_f64() });
    }
    let constraint = T::lit(4.0) * p + T::lit(2.0) * q - T::one();
    if !(constraint.abs() <= T::CONSTRAINT_TOL) {
        return Err(Error::ParameterOutOfRange { name: "4p+2q-1", value: constraint.as_f64() });
    }
    let mut m = ComplexMatrix::zeros(16);
    for (n, psi) in example1_vectors::<T>().iter().enumerate() {
        let w = if n < 4 { p } else { q };
        let a = psi.amplitudes();
        m = &m + &ComplexMatrix::outer(a, a).scale(w);
    }
    DensityMatrix::new(m, Dims::uniform(4, 2)?)
}

/// The bound entangled point p = (2−√2)/4, q = (√2−1)/2.
pub fn example1_parameters<T: Real>() -> (T, T) {
    let s = T::SQRT_2();
    ((T::lit(2.0) - s) / T::lit(4.0), (s - T::one()) / T::lit(2.0))
}

/// (2/3)(|00⟩+|11⟩) + (1/3)|10⟩ on two qubits.
pub fn example2_family<T: Real>() -> NoisyFamily<T> {
    let (two, one) = (T::lit(2.0) / T::lit(3.0), T::one() / T::lit(3.0));
    let psi = PureState::from_terms(Dims::uniform(2, 2).expect("valid dims"), &[
        (&[0, 0], two),
        (&[1, 1], two),
        (&[1, 0], one),
    ])
    .expect("normalized by construction");
    NoisyFamily::new(psi)
}

/// (2/3)(|000⟩+|111⟩) + (1/3)|110⟩ on three qubits.
pub fn example3_family<T: Real>() -> NoisyFamily<T> {
    let (two, one) = (T::lit(2.0) / T::lit(3.0), T::one() / T::lit(3.0));
    let psi = PureState::from_terms(Dims::uniform(2, 3).expect("valid dims"), &[
        (&[0, 0, 0], two),
        (&[1, 1, 1], two),
        (&[1, 1, 0], one),
    ])
    .expect("normalized by construction");
    NoisyFamily::new(psi)
}

/// (|0…0⟩ + |1…1⟩)/√2 on `n` qubits.
pub fn ghz_family<T: Real>(n: usize) -> Result<NoisyFamily<T>> {
    let zeros = vec![0; n];
    let ones = vec![1; n];
    let h = T::FRAC_1_SQRT_2();
    let psi = PureState::from_terms(Dims::uniform(2, n)?, &[(&zeros, h), (&ones, h)])?;
    Ok(NoisyFamily::new(psi))
}

/// Convex mixture of `k_terms` Haar-random product states with uniform simplex
/// weights. Deterministic for a given seed.
pub fn random_separable<T: Real>(dims: &Dims, k_terms: usize, seed: u64) -> Result<DensityMatrix<T>> {
    if k_terms == 0 {
        return Err(Error::ParameterOutOfRange { name: "k_terms", value: 0.0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = simplex_weights(k_terms, &mut rng);
    let mut m = ComplexMatrix::zeros(dims.total());
    for w in weights {
        let phi = random_product_state::<T, _>(dims, &mut rng)?;
        let a = phi.amplitudes();
        m = &m + &ComplexMatrix::outer(a, a).scale(T::lit(w));
    }
    DensityMatrix::new(m, dims.clone())
}
