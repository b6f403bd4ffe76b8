//! Dense complex linear algebra on small square matrices.
//!
//! Index convention: subsystem 0 is the leftmost tensor factor and the most
//! significant digit of a flattened basis index. Storage is row-major.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};

/// Maximum number of full Jacobi sweeps before giving up.
pub const JACOBI_SWEEP_BUDGET: usize = 100;

/// Local dimensions of a tensor-product space, subsystem 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::DimensionMismatch("dims must list at least one subsystem".into()));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::DimensionMismatch(format!("subsystem {pos} has dimension 0")));
        }
        Ok(Self(dims))
    }

    /// `n` copies of the same local dimension.
    pub fn uniform(local: usize, n: usize) -> Result<Self> {
        Self::new(vec![local; n])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Number of subsystems.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Dimension of the joint space.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Stride of each subsystem digit in a flattened index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for i in (0..self.0.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.0[i + 1];
        }
        strides
    }

    /// Dimensions of the listed subsystems, in the listed order.
    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        let mut out = Vec::with_capacity(idx.len());
        for &i in idx {
            out.push(*self.0.get(i).ok_or_else(|| {
                Error::DimensionMismatch(format!("subsystem index {i} out of range for {} subsystems", self.0.len()))
            })?);
        }
        Self::new(out)
    }

    pub(crate) fn check_matrix<T: Real>(&self, m: &ComplexMatrix<T>) -> Result<()> {
        if self.total() != m.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} have product {} but matrix is {}x{}",
                self.0,
                self.total(),
                m.dim(),
                m.dim()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Square matrix of complex entries, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T = f64> {
    dim: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self { dim, data: vec![Cx::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Cx::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting non-square or non-finite input.
    pub fn from_row_major(dim: usize, data: Vec<Cx<T>>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries cannot form a square matrix of dimension {dim}",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !crate::scalar::is_finite(*z)) {
            return Err(Error::NonFinite { row: k / dim, col: k % dim });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<Cx<T>>>) -> Result<Self> {
        let dim = rows.len();
        if let Some(r) = rows.iter().position(|row| row.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "row {r} has {} entries, expected {dim}",
                rows[r].len()
            )));
        }
        Self::from_row_major(dim, rows.into_iter().flatten().collect())
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = re(d);
        }
        m
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[Cx<T>], v: &[Cx<T>]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product of vectors of different length");
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Cx<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<Cx<T>> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(Cx::zero(), |a, b| a + b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// max |M − M†| over all entries.
    pub fn hermitian_deviation(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Checks Hermiticity within [`Real::HERMITIAN_TOL`] and returns (M + M†)/2.
    pub fn hermitian_part_checked(&self) -> Result<Self> {
        let dev = self.hermitian_deviation();
        if !(dev <= T::HERMITIAN_TOL) {
            return Err(Error::NotHermitian { max_deviation: dev.as_f64() });
        }
        Ok(self.symmetrized())
    }

    /// (M + M†)/2 with an exactly real diagonal.
    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            out[(i, i)] = re(self[(i, i)].re);
            for j in (i + 1)..self.dim {
                let z = (self[(i, j)] + self[(j, i)].conj()) * half;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        assert_eq!(self.dim, v.len(), "matrix-vector dimension mismatch");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).fold(Cx::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Cx<T> {
        assert_eq!(self.dim, other.dim, "trace_product dimension mismatch");
        let n = self.dim;
        let mut acc = Cx::zero();
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    /// ⟨u|self|v⟩.
    pub fn sandwich(&self, u: &[Cx<T>], v: &[Cx<T>]) -> Cx<T> {
        let mv = self.mul_vec(v);
        u.iter().zip(&mv).fold(Cx::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Converts entries to another precision.
    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| Cx::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64()))).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Cx<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

/// Eigenvalues (ascending) with column-aligned orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T = f64> {
    pub eigenvalues: Vec<T>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn eigenvector(&self, k: usize) -> Vec<Cx<T>> {
        self.eigenvectors.column(k)
    }

    /// Σ λ_k |v_k⟩⟨v_k|.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).fold(Cx::zero(), |acc, k| acc + v[(i, k)] * v[(j, k)].conj() * self.eigenvalues[k])
        })
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> T {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Degenerate eigenspaces come back in whatever orthonormal basis the
/// rotations produce; nothing downstream depends on that choice.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let mut a = m.hermitian_part_checked()?;
    let n = a.dim();
    let mut v = ComplexMatrix::<T>::identity(n);
    let threshold = T::JACOBI_REL_TOL * m.frobenius_norm();

    let off_norm = |a: &ComplexMatrix<T>| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_SWEEP_BUDGET {
            return Err(Error::NoConvergence { sweeps });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_norm(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Annihilates a[p][q] with the unitary U = diag(1, e^{-iφ}) · R(θ) on (p, q).
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == T::zero() {
        return;
    }
    let n = a.dim();
    let phase = apq / g; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (g + g);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // U entries on the (p, q) block.
    let u_pp = re(c);
    let u_pq = re(s);
    let u_qp = phase.conj() * (-s);
    let u_qq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = Cx::zero();
    a[(q, p)] = Cx::zero();
    a[(p, p)] = re(app - t * g);
    a[(q, q)] = re(aqq + t * g);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Kronecker product A ⊗ B.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, leftmost first.
pub fn kron_all<'a, T: Real>(factors: impl IntoIterator<Item = &'a ComplexMatrix<T>>) -> ComplexMatrix<T> {
    factors
        .into_iter()
        .fold(None, |acc: Option<ComplexMatrix<T>>, f| Some(match acc {
            None => f.clone(),
            Some(m) => kron(&m, f),
        }))
        .expect("kron_all needs at least one factor")
}

/// Tensor product of two vectors, `a` as the more significant factor.
pub fn kron_vec<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Vec<Cx<T>> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Offsets in the full index for every multi-index over `subsystems`.
fn digit_offsets(dims: &Dims, subsystems: &[usize]) -> Vec<usize> {
    let strides = dims.strides();
    let mut offsets = vec![0usize];
    for &s in subsystems {
        let d = dims.as_slice()[s];
        let stride = strides[s];
        offsets = offsets
            .iter()
            .flat_map(|&base| (0..d).map(move |digit| base + digit * stride))
            .collect();
    }
    offsets
}

fn normalize_keep(dims: &Dims, keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::DimensionMismatch("partial trace must keep at least one subsystem".into()));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(Error::DimensionMismatch(format!("repeated subsystem in {keep:?}")));
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem index {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    Ok(sorted)
}

/// Traces out every subsystem not in `keep`. The result lives on the kept
/// subsystems in ascending index order.
pub fn partial_trace<T: Real>(m: &ComplexMatrix<T>, dims: &Dims, keep: &[usize]) -> Result<ComplexMatrix<T>> {
    dims.check_matrix(m)?;
    let keep = normalize_keep(dims, keep)?;
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_off = digit_offsets(dims, &keep);
    let traced_off = digit_offsets(dims, &traced);
    let dk = kept_off.len();
    let mut out = ComplexMatrix::zeros(dk);
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &cb) in kept_off.iter().enumerate() {
            let mut acc = Cx::zero();
            for &t in &traced_off {
                acc += m[(ra + t, cb + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Transposes the tensor factor at `subsystem`, leaving the others untouched.
pub fn partial_transpose<T: Real>(m: &ComplexMatrix<T>, dims: &Dims, subsystem: usize) -> Result<ComplexMatrix<T>> {
    dims.check_matrix(m)?;
    if subsystem >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem index {subsystem} out of range for {} subsystems",
            dims.len()
        )));
    }
    let stride = dims.strides()[subsystem];
    let d = dims.as_slice()[subsystem];
    let digit = |idx: usize| (idx / stride) % d;
    Ok(ComplexMatrix::from_fn(m.dim(), |r, c| {
        let (dr, dc) = (digit(r), digit(c));
        let r2 = r - dr * stride + dc * stride;
        let c2 = c - dc * stride + dr * stride;
        m[(r2, c2)]
    }))
}

/// Partial transpose over every subsystem in `subsystems`.
pub fn partial_transpose_set<T: Real>(
    m: &ComplexMatrix<T>,
    dims: &Dims,
    subsystems: &[usize],
) -> Result<ComplexMatrix<T>> {
    let mut out = m.clone();
    for &s in subsystems {
        out = partial_transpose(&out, dims, s)?;
    }
    dims.check_matrix(&out)?;
    Ok(out)
}
