//! Local observables and the collective operators built from them.

use crate::error::{Error, Result};
use crate::linalg::{kron, kron_all, ComplexMatrix, Dims};
use crate::scalar::{cx, Real};

/// Hermitian operator on a single subsystem of dimension `local_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable<T = f64> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> Observable<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        Ok(Self { matrix: matrix.hermitian_part_checked()? })
    }

    pub fn diagonal(diag: &[T]) -> Self {
        Self { matrix: ComplexMatrix::from_real_diagonal(diag) }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn local_dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Pauli matrix or identity by name: `x`, `y`, `z`, `i` (optionally prefixed
/// with `sigma_`/`sigma`).
pub fn pauli<T: Real>(name: &str) -> Result<Observable<T>> {
    let key = name.trim().to_ascii_lowercase();
    let key = key.strip_prefix("sigma_").or_else(|| key.strip_prefix("sigma")).unwrap_or(&key);
    let (o, l) = (T::zero(), T::one());
    let rows = match key {
        "x" => vec![vec![cx(o, o), cx(l, o)], vec![cx(l, o), cx(o, o)]],
        "y" => vec![vec![cx(o, o), cx(o, -l)], vec![cx(o, l), cx(o, o)]],
        "z" => vec![vec![cx(l, o), cx(o, o)], vec![cx(o, o), cx(-l, o)]],
        "i" | "id" | "identity" => vec![vec![cx(l, o), cx(o, o)], vec![cx(o, o), cx(l, o)]],
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Observable::new(ComplexMatrix::from_rows(rows)?)
}

/// Σ_n signs[n]·|kets[n]⟩⟨kets[n]| on a `dim`-level system.
pub fn projector<T: Real>(dim: usize, kets: &[usize], signs: &[T]) -> Result<Observable<T>> {
    if kets.len() != signs.len() {
        return Err(Error::DimensionMismatch(format!("{} kets but {} signs", kets.len(), signs.len())));
    }
    if dim == 0 {
        return Err(Error::DimensionMismatch("projector on a zero-dimensional space".into()));
    }
    let mut diag = vec![T::zero(); dim];
    for (&k, &s) in kets.iter().zip(signs) {
        if k >= dim {
            return Err(Error::DimensionMismatch(format!("ket |{k}⟩ outside dimension {dim}")));
        }
        diag[k] += s;
    }
    Ok(Observable::diagonal(&diag))
}

/// One observable per subsystem, in subsystem order.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSet<T = f64> {
    ops: Vec<Observable<T>>,
    dims: Dims,
}

impl<T: Real> ObservableSet<T> {
    pub fn new(ops: Vec<Observable<T>>) -> Result<Self> {
        let dims = Dims::new(ops.iter().map(Observable::local_dim).collect())?;
        Ok(Self { ops, dims })
    }

    /// Same observable on each of `n` subsystems.
    pub fn uniform(op: Observable<T>, n: usize) -> Result<Self> {
        Self::new(vec![op; n])
    }

    pub fn ops(&self) -> &[Observable<T>] {
        &self.ops
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub(crate) fn check_dims(&self, dims: &Dims) -> Result<()> {
        if &self.dims != dims {
            return Err(Error::DimensionMismatch(format!(
                "observables act on {} but the state has dims {dims}",
                self.dims
            )));
        }
        Ok(())
    }
}

/// Σ_i I⊗…⊗A_i⊗…⊗I on the full space.
pub fn collective_sum<T: Real>(set: &ObservableSet<T>) -> Result<ComplexMatrix<T>> {
    let d = set.dims();
    let mut total = ComplexMatrix::zeros(d.total());
    let identities: Vec<ComplexMatrix<T>> = d.as_slice().iter().map(|&n| ComplexMatrix::identity(n)).collect();
    for (i, op) in set.ops().iter().enumerate() {
        let factors = identities
            .iter()
            .enumerate()
            .map(|(j, id)| if j == i { op.matrix() } else { id });
        total = &total + &kron_all(factors);
    }
    Ok(total)
}

/// A_i⊗I − I⊗A_j on the two-subsystem space (dims[i], dims[j]).
pub fn pairwise_difference<T: Real>(set: &ObservableSet<T>, i: usize, j: usize) -> Result<ComplexMatrix<T>> {
    let n = set.len();
    if i >= n || j >= n {
        return Err(Error::DimensionMismatch(format!("pair ({i}, {j}) out of range for {n} observables")));
    }
    if i == j {
        return Err(Error::DimensionMismatch(format!("pair ({i}, {j}) must name two different subsystems")));
    }
    Ok(local_difference(&set.ops()[i], &set.ops()[j]))
}

/// A⊗I − I⊗B.
pub fn local_difference<T: Real>(a: &Observable<T>, b: &Observable<T>) -> ComplexMatrix<T> {
    let ia = ComplexMatrix::identity(a.local_dim());
    let ib = ComplexMatrix::identity(b.local_dim());
    &kron(a.matrix(), &ib) - &kron(&ia, b.matrix())
}

/// A⊗I + I⊗B.
pub fn local_sum<T: Real>(a: &Observable<T>, b: &Observable<T>) -> ComplexMatrix<T> {
    let ia = ComplexMatrix::identity(a.local_dim());
    let ib = ComplexMatrix::identity(b.local_dim());
    &kron(a.matrix(), &ib) + &kron(&ia, b.matrix())
}

/// A⊗B.
pub fn local_product<T: Real>(a: &Observable<T>, b: &Observable<T>) -> ComplexMatrix<T> {
    kron(a.matrix(), b.matrix())
}
