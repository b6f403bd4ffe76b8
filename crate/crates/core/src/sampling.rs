//! Random states, observables and unitaries for property tests and sampling.
//!
//! Everything is drawn in `f64` from a caller-supplied RNG and converted,
//! so a fixed seed yields the same values in either precision up to rounding.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::Result;
use crate::linalg::{hermitian_eig, kron_vec, ComplexMatrix, Dims};
use crate::scalar::{cx, Cx, Real};
use crate::states::{DensityMatrix, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-distributed unit vector: a normalized complex Gaussian vector.
pub fn haar_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Cx<T>> {
    loop {
        let raw: Vec<(f64, f64)> = (0..dim).map(|_| (gaussian(rng), gaussian(rng))).collect();
        let norm = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return raw.into_iter().map(|(a, b)| cx(T::lit(a / norm), T::lit(b / norm))).collect();
        }
    }
}

/// Uniform point on the (k−1)-simplex via normalized exponential draws.
pub fn simplex_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Hermitian matrix with independent Gaussian entries (GUE up to scale).
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = cx(T::lit(gaussian(rng)), T::zero());
        for j in (i + 1)..dim {
            let z = cx(T::lit(gaussian(rng)), T::lit(gaussian(rng)));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Unitary taken as the eigenvector matrix of a random Hermitian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix<T>> {
    Ok(hermitian_eig(&random_hermitian::<T, R>(dim, rng))?.eigenvectors)
}

/// Mixed state Σ w_k |φ_k⟩⟨φ_k| of `rank` Haar vectors with simplex weights.
pub fn random_density<T: Real, R: Rng + ?Sized>(dims: &Dims, rank: usize, rng: &mut R) -> Result<DensityMatrix<T>> {
    let d = dims.total();
    let weights = simplex_weights(rank.max(1), rng);
    let mut m = ComplexMatrix::zeros(d);
    for w in weights {
        let v = haar_vector::<T, R>(d, rng);
        m = &m + &ComplexMatrix::outer(&v, &v).scale(T::lit(w));
    }
    DensityMatrix::new(m, dims.clone())
}

/// Haar-random product pure state over `dims`.
pub fn random_product_state<T: Real, R: Rng + ?Sized>(dims: &Dims, rng: &mut R) -> Result<PureState<T>> {
    let amplitudes = dims
        .as_slice()
        .iter()
        .map(|&d| haar_vector::<T, R>(d, rng))
        .reduce(|acc, v| kron_vec(&acc, &v))
        .expect("dims are non-empty");
    PureState::new(amplitudes, dims.clone())
}
