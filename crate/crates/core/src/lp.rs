//! Linear optimization of a gamble's expectation over a credal row.
//!
//! Interval rows use a greedy allocation, vertex rows are scanned, and
//! constraint rows go through the dense simplex in [`crate::simplex`].

use crate::credal::{dot, CredalRow, Gamble, Pmf};
use crate::error::{Error, Result};
use crate::simplex::{self, Failure};

/// Tolerance of the membership test applied to reported maximizers.
pub const FEAS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub value: f64,
    /// The optimizing pmf (a minimizer for [`minimize`]).
    pub maximizer: Pmf,
    /// Simplex pivots; zero for the closed-form interval and vertex paths.
    pub iterations: usize,
}

fn check_row_dim(row: &CredalRow, dim: usize) -> Result<()> {
    let mismatch = |got| Err(Error::Dimension { expected: dim, got });
    match row {
        CredalRow::Intervals { lower, upper } => {
            if lower.len() != dim {
                return mismatch(lower.len());
            }
            if upper.len() != dim {
                return mismatch(upper.len());
            }
        }
        CredalRow::Vertices(vs) => {
            if let Some(v) = vs.iter().find(|v| v.len() != dim) {
                return mismatch(v.len());
            }
        }
        CredalRow::Constraints { a, .. } => {
            if let Some(r) = a.iter().find(|r| r.len() != dim) {
                return mismatch(r.len());
            }
        }
    }
    Ok(())
}

/// `sup_{p ∈ row} Σ_y p(y)·objective(y)` together with an optimal pmf.
pub fn maximize(row: &CredalRow, objective: &Gamble) -> Result<LpResult> {
    let f = objective.values();
    check_row_dim(row, f.len())?;
    let (probs, iterations) = match row {
        CredalRow::Intervals { lower, upper } => (greedy(lower, upper, f)?, 0),
        CredalRow::Vertices(vertices) => {
            let mut best: Option<(&Pmf, f64)> = None;
            for v in vertices {
                let val = dot(v.probs(), f);
                if best.map_or(true, |(_, b)| val > b) {
                    best = Some((v, val));
                }
            }
            let (v, _) = best.ok_or(Error::Infeasible)?;
            (v.probs().to_vec(), 0)
        }
        CredalRow::Constraints { a, b } => match simplex::solve(f, a, b) {
            Ok(sol) => (sol.x, sol.pivots),
            Err(Failure::Infeasible) => return Err(Error::Infeasible),
            Err(Failure::Unbounded) => return Err(Error::Unbounded),
        },
    };
    let value = dot(&probs, f);
    Ok(LpResult { value, maximizer: Pmf::new_unchecked(probs), iterations })
}

/// `inf_{p ∈ row} Σ_y p(y)·objective(y)`, computed as `−maximize(row, −objective)`.
pub fn minimize(row: &CredalRow, objective: &Gamble) -> Result<LpResult> {
    let r = maximize(row, &-objective)?;
    Ok(LpResult { value: -r.value, ..r })
}

/// Lower bounds first, then the free mass goes to states in decreasing order
/// of the objective (stable, so ties favour the lower index).
fn greedy(lower: &[f64], upper: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    let mut p = lower.to_vec();
    let mut remaining = 1.0 - lower.iter().sum::<f64>();
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&i, &j| f[j].total_cmp(&f[i]));
    for i in order {
        if remaining <= 0.0 {
            break;
        }
        let add = (upper[i] - lower[i]).min(remaining).max(0.0);
        p[i] += add;
        remaining -= add;
    }
    if remaining.abs() > crate::credal::PROB_TOL {
        return Err(Error::Infeasible);
    }
    Ok(p)
}

/// Whether the row's membership set is non-empty.
pub fn feasible(row: &CredalRow) -> bool {
    match row {
        CredalRow::Intervals { lower, upper } => {
            lower.len() == upper.len() && row.violations(lower.len()).is_empty()
        }
        CredalRow::Vertices(vs) => match vs.first() {
            Some(v) => row.violations(v.len()).is_empty(),
            None => false,
        },
        CredalRow::Constraints { a, b } => match a.first() {
            Some(first) => a.len() == b.len() && simplex::find_feasible(first.len(), a, b).is_some(),
            // No constraints: the whole probability simplex.
            None => b.is_empty(),
        },
    }
}
