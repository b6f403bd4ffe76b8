//! Entanglement criteria evaluated as signed gaps.
//!
//! Every criterion here is a necessary condition for separability written as
//! `lhs ≤ rhs`. A gap `lhs − rhs` above [`Real::DETECTION_THRESHOLD`] certifies
//! entanglement; anything else is inconclusive. No criterion ever reports a
//! state as separable.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_transpose_set};
use crate::observables::{collective_sum, local_difference, local_product, local_sum, Observable, ObservableSet};
use crate::qfi::{expectation, qfi, variance};
use crate::states::DensityMatrix;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriterionId {
    /// F(ρ, A⊗I + I⊗B) ≤ Δ(A⊗I − I⊗B)²_ρ.
    Theorem1,
    /// F(ρ, A+B+C) ≤ ½[Δ(A−B)²_{ρ_AB} + Δ(A−C)²_{ρ_AC} + Δ(B−C)²_{ρ_BC}].
    Theorem2,
    /// F(ρ, ΣA_i) ≤ ½ Σ_i Δ(A_i − A_{i+1})²_{ρ_{i,i+1}}, cyclic.
    TheoremN,
    /// F(ρ, A⊗I + I⊗B) ≤ ⟨A²⟩_{ρ_A} + ⟨B²⟩_{ρ_B} − 2|⟨A⊗B⟩_ρ|.
    YmBipartite,
    /// F(ρ, A+B+C) ≤ ⟨A²⟩ + ⟨B²⟩ + ⟨C²⟩ − (|⟨A⊗B⟩| + |⟨B⊗C⟩| + |⟨A⊗C⟩|).
    YmTripartite,
    /// Negativity of the partial transpose, minimized over bipartitions.
    Ppt,
}

impl CriterionId {
    pub const ALL: [CriterionId; 6] = [
        CriterionId::Theorem1,
        CriterionId::Theorem2,
        CriterionId::TheoremN,
        CriterionId::YmBipartite,
        CriterionId::YmTripartite,
        CriterionId::Ppt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionId::Theorem1 => "theorem1",
            CriterionId::Theorem2 => "theorem2",
            CriterionId::TheoremN => "theorem_n",
            CriterionId::YmBipartite => "ym_bipartite",
            CriterionId::YmTripartite => "ym_tripartite",
            CriterionId::Ppt => "ppt",
        }
    }

    /// Whether the criterion is defined on `n` subsystems.
    pub fn applies_to(self, n: usize) -> bool {
        match self {
            CriterionId::Theorem1 | CriterionId::YmBipartite => n == 2,
            CriterionId::Theorem2 | CriterionId::YmTripartite => n == 3,
            CriterionId::TheoremN | CriterionId::Ppt => n >= 2,
        }
    }

    /// All criteria defined on `n` subsystems, in declaration order.
    pub fn applicable(n: usize) -> Vec<CriterionId> {
        Self::ALL.into_iter().filter(|c| c.applies_to(n)).collect()
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CriterionId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Entangled,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Entangled => "entangled",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriterionReport<T = f64> {
    pub criterion: CriterionId,
    pub lhs: T,
    pub rhs: T,
    pub gap: T,
    pub entangled_detected: bool,
}

impl<T: Real> CriterionReport<T> {
    pub fn new(criterion: CriterionId, lhs: T, rhs: T) -> Self {
        let gap = lhs - rhs;
        Self { criterion, lhs, rhs, gap, entangled_detected: gap > T::DETECTION_THRESHOLD }
    }

    pub fn verdict(&self) -> Verdict {
        if self.entangled_detected {
            Verdict::Entangled
        } else {
            Verdict::Inconclusive
        }
    }

    /// `criterion_id,lhs,rhs,gap,detected` with 17 significant digits.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.criterion,
            format_sig17(self.lhs.as_f64()),
            format_sig17(self.rhs.as_f64()),
            format_sig17(self.gap.as_f64()),
            self.entangled_detected
        )
    }
}

pub const REPORT_CSV_HEADER: &str = "criterion_id,lhs,rhs,gap,detected";

/// Scientific notation with 17 significant digits; parses back to the same f64.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn require_parties<T: Real>(rho: &DensityMatrix<T>, n: usize, what: &str) -> Result<()> {
    if rho.num_subsystems() != n {
        return Err(Error::DimensionMismatch(format!(
            "{what} needs {n} subsystems, state has dims {}",
            rho.dims()
        )));
    }
    Ok(())
}

fn require_local_dims<T: Real>(rho: &DensityMatrix<T>, ops: &[&Observable<T>]) -> Result<()> {
    let dims = rho.dims().as_slice();
    let local: Vec<usize> = ops.iter().map(|o| o.local_dim()).collect();
    if dims != local.as_slice() {
        return Err(Error::DimensionMismatch(format!(
            "observables act on {local:?} but the state has dims {}",
            rho.dims()
        )));
    }
    Ok(())
}

/// Variance of A_i⊗I − I⊗A_j on the reduced state of subsystems i and j,
/// with the pair taken in ascending subsystem order.
fn pair_variance<T: Real>(rho: &DensityMatrix<T>, ops: &[&Observable<T>], i: usize, j: usize) -> Result<T> {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    let reduced = rho.reduced(&[lo, hi])?;
    variance(&reduced, &local_difference(ops[lo], ops[hi]))
}

fn second_moment<T: Real>(rho: &DensityMatrix<T>, op: &Observable<T>, subsystem: usize) -> Result<T> {
    let reduced = rho.reduced(&[subsystem])?;
    expectation(&reduced, &op.matrix().matmul(op.matrix()))
}

fn pair_correlation<T: Real>(rho: &DensityMatrix<T>, ops: &[&Observable<T>], i: usize, j: usize) -> Result<T> {
    let reduced = rho.reduced(&[i, j])?;
    expectation(&reduced, &local_product(ops[i], ops[j]))
}

/// Bipartite QFI-versus-variance test.
pub fn theorem1<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>, b: &Observable<T>) -> Result<CriterionReport<T>> {
    require_parties(rho, 2, "theorem1")?;
    require_local_dims(rho, &[a, b])?;
    let lhs = qfi(rho, &local_sum(a, b))?.value;
    let rhs = variance(rho, &local_difference(a, b))?;
    Ok(CriterionReport::new(CriterionId::Theorem1, lhs, rhs))
}

/// Tripartite test against pairwise variances on the two-party reduced states.
pub fn theorem2<T: Real>(
    rho: &DensityMatrix<T>,
    a: &Observable<T>,
    b: &Observable<T>,
    c: &Observable<T>,
) -> Result<CriterionReport<T>> {
    require_parties(rho, 3, "theorem2")?;
    let ops = [a, b, c];
    require_local_dims(rho, &ops)?;
    let set = ObservableSet::new(vec![a.clone(), b.clone(), c.clone()])?;
    let lhs = qfi(rho, &collective_sum(&set)?)?.value;
    let half = T::lit(0.5);
    let rhs = half * (pair_variance(rho, &ops, 0, 1)? + pair_variance(rho, &ops, 0, 2)? + pair_variance(rho, &ops, 1, 2)?);
    Ok(CriterionReport::new(CriterionId::Theorem2, lhs, rhs))
}

/// N-partite test with the cyclic neighbour sum (A_{N+1} = A_1).
pub fn theorem_n<T: Real>(rho: &DensityMatrix<T>, set: &ObservableSet<T>) -> Result<CriterionReport<T>> {
    let n = rho.num_subsystems();
    if n < 2 {
        return Err(Error::DimensionMismatch(format!("theorem_n needs at least 2 subsystems, state has dims {}", rho.dims())));
    }
    set.check_dims(rho.dims())?;
    let ops: Vec<&Observable<T>> = set.ops().iter().collect();
    let lhs = qfi(rho, &collective_sum(set)?)?.value;
    let mut sum = T::zero();
    for i in 0..n {
        sum += pair_variance(rho, &ops, i, (i + 1) % n)?;
    }
    Ok(CriterionReport::new(CriterionId::TheoremN, lhs, T::lit(0.5) * sum))
}

/// Bipartite baseline using second moments of the local observables.
pub fn ym_bipartite<T: Real>(rho: &DensityMatrix<T>, a: &Observable<T>, b: &Observable<T>) -> Result<CriterionReport<T>> {
    require_parties(rho, 2, "ym_bipartite")?;
    let ops = [a, b];
    require_local_dims(rho, &ops)?;
    let lhs = qfi(rho, &local_sum(a, b))?.value;
    let corr = expectation(rho, &local_product(a, b))?;
    let rhs = second_moment(rho, a, 0)? + second_moment(rho, b, 1)? - T::lit(2.0) * corr.abs();
    Ok(CriterionReport::new(CriterionId::YmBipartite, lhs, rhs))
}

/// Tripartite baseline: Σ⟨X²⟩ − η with η the summed absolute pair correlations.
pub fn ym_tripartite<T: Real>(
    rho: &DensityMatrix<T>,
    a: &Observable<T>,
    b: &Observable<T>,
    c: &Observable<T>,
) -> Result<CriterionReport<T>> {
    require_parties(rho, 3, "ym_tripartite")?;
    let ops = [a, b, c];
    require_local_dims(rho, &ops)?;
    let set = ObservableSet::new(vec![a.clone(), b.clone(), c.clone()])?;
    let lhs = qfi(rho, &collective_sum(&set)?)?.value;
    let moments = second_moment(rho, a, 0)? + second_moment(rho, b, 1)? + second_moment(rho, c, 2)?;
    let eta = pair_correlation(rho, &ops, 0, 1)?.abs()
        + pair_correlation(rho, &ops, 1, 2)?.abs()
        + pair_correlation(rho, &ops, 0, 2)?.abs();
    Ok(CriterionReport::new(CriterionId::YmTripartite, lhs, moments - eta))
}

/// Minimum eigenvalue of ρ partially transposed on every subsystem in `bipartition`.
pub fn ppt_min_eigenvalue<T: Real>(rho: &DensityMatrix<T>, bipartition: &[usize]) -> Result<T> {
    let n = rho.num_subsystems();
    if bipartition.is_empty() || bipartition.len() >= n {
        return Err(Error::DimensionMismatch(format!(
            "bipartition {bipartition:?} must be a non-empty proper subset of {n} subsystems"
        )));
    }
    let pt = partial_transpose_set(rho.matrix(), rho.dims(), bipartition)?;
    Ok(hermitian_eig(&pt)?.min_eigenvalue())
}

/// Every bipartition of `n` subsystems, each listed once as the side that
/// excludes the last subsystem.
pub fn bipartitions(n: usize) -> Vec<Vec<usize>> {
    if n < 2 {
        return Vec::new();
    }
    (1u64..(1u64 << (n - 1)))
        .map(|mask| (0..n - 1).filter(|&i| mask & (1 << i) != 0).collect())
        .collect()
}

/// PPT test as a report: lhs = −min over bipartitions of λ_min(ρ^Γ), rhs = 0.
pub fn ppt<T: Real>(rho: &DensityMatrix<T>) -> Result<CriterionReport<T>> {
    let n = rho.num_subsystems();
    if n < 2 {
        return Err(Error::DimensionMismatch(format!("ppt needs at least 2 subsystems, state has dims {}", rho.dims())));
    }
    let mut min = T::infinity();
    for part in bipartitions(n) {
        min = min.min(ppt_min_eigenvalue(rho, &part)?);
    }
    Ok(CriterionReport::new(CriterionId::Ppt, -min, T::zero()))
}

/// Evaluates `criterion` on `rho` with one observable per subsystem.
pub fn evaluate<T: Real>(criterion: CriterionId, rho: &DensityMatrix<T>, set: &ObservableSet<T>) -> Result<CriterionReport<T>> {
    let n = rho.num_subsystems();
    if !criterion.applies_to(n) {
        return Err(Error::DimensionMismatch(format!("{criterion} is not defined for {n} subsystems")));
    }
    if criterion != CriterionId::Ppt {
        set.check_dims(rho.dims())?;
    }
    let ops = set.ops();
    match criterion {
        CriterionId::Theorem1 => theorem1(rho, &ops[0], &ops[1]),
        CriterionId::Theorem2 => theorem2(rho, &ops[0], &ops[1], &ops[2]),
        CriterionId::TheoremN => theorem_n(rho, set),
        CriterionId::YmBipartite => ym_bipartite(rho, &ops[0], &ops[1]),
        CriterionId::YmTripartite => ym_tripartite(rho, &ops[0], &ops[1], &ops[2]),
        CriterionId::Ppt => ppt(rho),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, ComplexMatrix, Dims};
    use crate::observables::{pauli, projector};
    use crate::sampling::random_hermitian;
    use crate::states::{
        example1_parameters, example1_state, example2_family, example3_family, ghz_family, random_separable,
        white_noise_mix,
    };
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sz() -> Observable {
        pauli("z").unwrap()
    }

    fn ex3_ops() -> [Observable; 3] {
        let m1 = projector(2, &[1], &[-1.0]).unwrap();
        let p0 = projector(2, &[0], &[1.0]).unwrap();
        [m1.clone(), m1, p0]
    }

    #[test]
    fn ids_round_trip_through_strings() {
        for id in CriterionId::ALL {
            assert_eq!(id.as_str().parse::<CriterionId>().unwrap(), id);
        }
        assert!("nope".parse::<CriterionId>().is_err());
        assert_eq!(
            CriterionId::applicable(2),
            vec![CriterionId::Theorem1, CriterionId::TheoremN, CriterionId::YmBipartite, CriterionId::Ppt]
        );
        assert_eq!(CriterionId::applicable(4), vec![CriterionId::TheoremN, CriterionId::Ppt]);
    }

    #[test]
    fn report_invariants() {
        let r = CriterionReport::new(CriterionId::Theorem1, 2.5, 1.0);
        assert_eq!(r.gap, 1.5);
        assert_eq!(r.verdict(), Verdict::Entangled);
        let r = CriterionReport::new(CriterionId::Theorem1, 1.0 + 1e-10, 1.0);
        assert!(!r.entangled_detected);
        assert_eq!(r.verdict(), Verdict::Inconclusive);
    }

    #[test]
    fn csv_row_format() {
        let r = CriterionReport::new(CriterionId::Ppt, 0.5, 0.0);
        assert_eq!(r.csv_row(), "ppt,5.0000000000000000e-1,0.0000000000000000e0,5.0000000000000000e-1,true");
        let x = 0.1f64 + 0.2;
        assert_eq!(format_sig17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn theorem1_example1() {
        let (p, q) = example1_parameters::<f64>();
        let rho = example1_state(p, q).unwrap();
        let a = projector(4, &[0, 1, 2, 3], &[1.0, 1.0, -1.0, -1.0]).unwrap();
        let r = theorem1(&rho, &a, &a).unwrap();
        let s2 = 2f64.sqrt();
        assert_abs_diff_eq!(r.lhs, 8.0 - 4.0 * s2, epsilon = 1e-10);
        assert_abs_diff_eq!(r.rhs, 4.0 * s2 - 4.0, epsilon = 1e-10);
        assert!(r.entangled_detected);
    }

    #[test]
    fn theorem1_product_pure_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random_separable::<f64>(&Dims::new(vec![2, 3]).unwrap(), 1, 21).unwrap();
        let a = Observable::<f64>::new(random_hermitian(2, &mut rng)).unwrap();
        let b = Observable::<f64>::new(random_hermitian(3, &mut rng)).unwrap();
        let r = theorem1(&rho, &a, &b).unwrap();
        assert!(r.gap <= 1e-9, "gap {}", r.gap);
        assert_abs_diff_eq!(r.lhs, r.rhs, epsilon = 1e-9);
    }

    #[test]
    fn ym_bipartite_example2() {
        let fam = example2_family();
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let r = ym_bipartite(&white_noise_mix(&fam, p).unwrap(), &sz(), &sz()).unwrap();
            assert_abs_diff_eq!(r.rhs, 2.0 - 14.0 * p / 9.0, epsilon = 1e-12);
        }
        let mixed = DensityMatrix::maximally_mixed(Dims::new(vec![2, 2]).unwrap()).unwrap();
        let r = ym_bipartite(&mixed, &sz(), &sz()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_abs_diff_eq!(r.rhs, 2.0, epsilon = 1e-15);
        assert!(!r.entangled_detected);
    }

    #[test]
    fn theorem2_example3_rhs() {
        // Hand expansion at p = 1: Δ(A−B)²_{AB} = 0, Δ(A−C)²_{AC} = Δ(B−C)²_{BC} = 8/81.
        // At p = 0 every pair variance is 1/2. The rhs is linear-plus-quadratic in p:
        // 3/4 − 23p/36 − p²/81.
        let fam = example3_family();
        let [a, b, c] = ex3_ops();
        let r1 = theorem2(&white_noise_mix(&fam, 1.0).unwrap(), &a, &b, &c).unwrap();
        assert_abs_diff_eq!(r1.rhs, 8.0 / 81.0, epsilon = 1e-12);
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let r = theorem2(&white_noise_mix(&fam, p).unwrap(), &a, &b, &c).unwrap();
            assert_abs_diff_eq!(r.rhs, 0.75 - 23.0 * p / 36.0 - p * p / 81.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.lhs, 656.0 * p * p / (243.0 * p + 81.0), epsilon = 1e-10);
        }
    }

    #[test]
    fn ym_tripartite_example3() {
        let fam = example3_family();
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let r = ym_tripartite(&white_noise_mix(&fam, p).unwrap(), &sz(), &sz(), &sz()).unwrap();
            assert_abs_diff_eq!(r.rhs, 3.0 - 23.0 * p / 9.0, epsilon = 1e-12);
        }
        let mixed = DensityMatrix::maximally_mixed(Dims::new(vec![2, 2, 2]).unwrap()).unwrap();
        let r = ym_tripartite(&mixed, &sz(), &sz(), &sz()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_abs_diff_eq!(r.rhs, 3.0, epsilon = 1e-15);
    }

    #[test]
    fn theorem_n_reductions() {
        let (p, q) = example1_parameters::<f64>();
        let rho = example1_state(p, q).unwrap();
        let a = projector(4, &[0, 1, 2, 3], &[1.0, 1.0, -1.0, -1.0]).unwrap();
        let t1 = theorem1(&rho, &a, &a).unwrap();
        let tn = theorem_n(&rho, &ObservableSet::uniform(a, 2).unwrap()).unwrap();
        assert_abs_diff_eq!(t1.gap, tn.gap, epsilon = 1e-12);

        let fam = example3_family();
        let [a, b, c] = ex3_ops();
        let set = ObservableSet::new(vec![a.clone(), b.clone(), c.clone()]).unwrap();
        for i in 0..=10 {
            let rho = white_noise_mix(&fam, i as f64 / 10.0).unwrap();
            let t2 = theorem2(&rho, &a, &b, &c).unwrap();
            let tn = theorem_n(&rho, &set).unwrap();
            assert_abs_diff_eq!(t2.gap, tn.gap, epsilon = 1e-12);
        }
    }

    #[test]
    fn theorem_n_ghz4() {
        let rho = white_noise_mix(&ghz_family::<f64>(4).unwrap(), 1.0).unwrap();
        let r = theorem_n(&rho, &ObservableSet::uniform(sz(), 4).unwrap()).unwrap();
        // Σσ_z takes ±4 on the two GHZ branches; each neighbour pair is perfectly
        // correlated so every σ_z⊗I − I⊗σ_z vanishes on the support.
        assert_abs_diff_eq!(r.lhs, 16.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.rhs, 0.0, epsilon = 1e-12);
        assert!(r.entangled_detected);
    }

    #[test]
    fn ppt_cases() {
        let fam = example2_family();
        assert!(ppt_min_eigenvalue(&white_noise_mix(&fam, 1.0).unwrap(), &[1]).unwrap() < 0.0);
        let at = ppt_min_eigenvalue(&white_noise_mix(&fam, 9.0 / 25.0).unwrap(), &[1]).unwrap();
        assert_abs_diff_eq!(at, 0.0, epsilon = 1e-9);
        let prod = DensityMatrix::new(
            kron(&ComplexMatrix::from_real_diagonal(&[0.2, 0.8]), &ComplexMatrix::from_real_diagonal(&[0.5, 0.5])),
            Dims::new(vec![2, 2]).unwrap(),
        )
        .unwrap();
        assert!(ppt_min_eigenvalue(&prod, &[0]).unwrap() >= -1e-12);
        assert!(ppt_min_eigenvalue(&prod, &[]).is_err());
        assert!(ppt_min_eigenvalue(&prod, &[0, 1]).is_err());
    }

    #[test]
    fn ppt_bound_entangled_example1() {
        let (p, q) = example1_parameters::<f64>();
        let rho = example1_state(p, q).unwrap();
        assert!(ppt_min_eigenvalue(&rho, &[0]).unwrap() >= -1e-9);
        assert!(ppt_min_eigenvalue(&rho, &[1]).unwrap() >= -1e-9);
        assert!(!ppt(&rho).unwrap().entangled_detected);
    }

    #[test]
    fn bipartition_enumeration() {
        assert_eq!(bipartitions(2), vec![vec![0]]);
        assert_eq!(bipartitions(3), vec![vec![0], vec![1], vec![0, 1]]);
        assert_eq!(bipartitions(4).len(), 7);
    }

    #[test]
    fn dimension_errors() {
        let rho3 = white_noise_mix(&example3_family(), 0.5).unwrap();
        assert!(theorem1(&rho3, &sz(), &sz()).is_err());
        let rho2 = white_noise_mix(&example2_family(), 0.5).unwrap();
        assert!(theorem2(&rho2, &sz(), &sz(), &sz()).is_err());
        let q = projector(3, &[0], &[1.0]).unwrap();
        assert!(matches!(theorem1(&rho2, &sz(), &q), Err(Error::DimensionMismatch(_))));
        assert!(evaluate(CriterionId::YmTripartite, &rho2, &ObservableSet::uniform(sz(), 2).unwrap()).is_err());
    }

    #[test]
    fn covariance_consistency_on_detection() {
        // Whenever the gap is positive, the universal bound F ≤ Δ(A⊗I + I⊗B)² still
        // holds and the covariance of A⊗I and I⊗B is positive.
        let fam = example2_family();
        for i in 51..=100 {
            let rho = white_noise_mix(&fam, i as f64 / 100.0).unwrap();
            let r = theorem1(&rho, &sz(), &sz()).unwrap();
            assert!(r.entangled_detected);
            assert!(r.lhs <= variance(&rho, &local_sum(&sz(), &sz())).unwrap() + 1e-9);
            assert!(crate::qfi::covariance(&rho, &sz(), &sz()).unwrap() > 0.0);
        }
    }
}
