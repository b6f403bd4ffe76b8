//! Gap sweeps over the white-noise parameter and critical-p search.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::criteria::{evaluate, format_sig17, CriterionId};
use crate::error::{Error, Result};
use crate::observables::ObservableSet;
use crate::scalar::Real;
use crate::states::NoisyFamily;

/// Step of the coarse scan that precedes bisection.
pub const COARSE_STEP: f64 = 1e-2;

/// A criterion paired with the observables it is evaluated with.
#[derive(Clone, Debug, PartialEq)]
pub struct GapColumn<T = f64> {
    pub criterion: CriterionId,
    pub observables: ObservableSet<T>,
}

impl<T: Real> GapColumn<T> {
    pub fn new(criterion: CriterionId, observables: ObservableSet<T>) -> Self {
        Self { criterion, observables }
    }

    /// Gap of the criterion on the family member at `p`.
    pub fn gap_at(&self, family: &NoisyFamily<T>, p: T) -> Result<T> {
        let rho = family.at(p)?;
        Ok(evaluate(self.criterion, &rho, &self.observables)?.gap)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow<T = f64> {
    pub p: T,
    /// Gap per column, in column order.
    pub gaps: Vec<(CriterionId, T)>,
}

impl<T: Real> SweepRow<T> {
    pub fn gap(&self, criterion: CriterionId) -> Option<T> {
        self.gaps.iter().find(|(c, _)| *c == criterion).map(|&(_, g)| g)
    }
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace<T: Real>(start: T, stop: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / T::from_usize_lossy(count - 1);
            (0..count)
                .map(|i| if i == count - 1 { stop } else { start + step * T::from_usize_lossy(i) })
                .collect()
        }
    }
}

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    for (i, &p) in grid.iter().enumerate() {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::ParameterOutOfRange { name: "grid point", value: p.as_f64() });
        }
        if i > 0 && !(p > grid[i - 1]) {
            return Err(Error::ParameterOutOfRange { name: "grid point (not increasing)", value: p.as_f64() });
        }
    }
    Ok(())
}

/// Evaluates every column at every grid point through the full numeric pipeline.
/// Points run in parallel; rows come back in grid order.
pub fn sweep<T: Real>(family: &NoisyFamily<T>, columns: &[GapColumn<T>], grid: &[T]) -> Result<Vec<SweepRow<T>>> {
    check_grid(grid)?;
    grid.par_iter()
        .map(|&p| {
            let rho = family.at(p)?;
            let gaps = columns
                .iter()
                .map(|col| Ok((col.criterion, evaluate(col.criterion, &rho, &col.observables)?.gap)))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow { p, gaps })
        })
        .collect()
}

/// Writes `p,<criterion ids…>` then one row per grid point, 17 significant digits, LF endings.
pub fn write_sweep_csv<T: Real, W: Write>(out: &mut W, columns: &[CriterionId], rows: &[SweepRow<T>]) -> io::Result<()> {
    let mut header = String::from("p");
    for c in columns {
        header.push(',');
        header.push_str(c.as_str());
    }
    out.write_all(header.as_bytes())?;
    out.write_all(b"\n")?;
    for row in rows {
        let mut line = format_sig17(row.p.as_f64());
        for (_, g) in &row.gaps {
            line.push(',');
            line.push_str(&format_sig17(g.as_f64()));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdResult<T = f64> {
    pub criterion: CriterionId,
    /// Midpoint of the final bracket.
    pub p_critical: T,
    /// gap(lo) ≤ 0 < gap(hi).
    pub bracket: (T, T),
    pub iterations: usize,
}

/// Smallest p at which the gap turns positive.
///
/// A coarse scan with step [`COARSE_STEP`] finds the first sign change; bisection
/// then narrows that bracket to width ≤ `tol`. The gap is not assumed monotone.
/// Returns [`Error::NoViolation`] when the gap never turns positive on [0, 1].
pub fn find_threshold<T: Real>(family: &NoisyFamily<T>, column: &GapColumn<T>, tol: T) -> Result<ThresholdResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::ParameterOutOfRange { name: "tol", value: tol.as_f64() });
    }
    let steps = (1.0 / COARSE_STEP).round() as usize;
    let grid = linspace(T::zero(), T::one(), steps + 1);
    let gaps = grid.par_iter().map(|&p| column.gap_at(family, p)).collect::<Result<Vec<T>>>()?;
    if gaps[0] > T::zero() {
        return Err(Error::InvariantViolation(format!(
            "{} already detects the maximally mixed state (gap {:e} at p = 0)",
            column.criterion, gaps[0]
        )));
    }
    let k = (0..steps)
        .find(|&k| gaps[k] <= T::zero() && gaps[k + 1] > T::zero())
        .ok_or(Error::NoViolation)?;
    let (mut lo, mut hi) = (grid[k], grid[k + 1]);
    let half = T::lit(0.5);
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        if column.gap_at(family, mid)? > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(ThresholdResult { criterion: column.criterion, p_critical: (lo + hi) * half, bracket: (lo, hi), iterations })
}
