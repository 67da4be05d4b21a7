//! Dense two-phase simplex for linear programs over the probability simplex:
//! maximize `c·x` subject to `A·x ≤ b`, `Σx = 1`, `x ≥ 0`.
//!
//! Bland's rule is used for both the entering and the leaving variable, so
//! the pivot sequence is a pure function of the input.

const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Solution {
    pub x: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Failure {
    Infeasible,
    /// No leaving row, or the pivot budget ran out.
    Unbounded,
}

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    structural: usize,
    first_artificial: usize,
    ncols: usize,
    pivots: usize,
}

impl Tableau {
    fn new(structural: usize, a: &[Vec<f64>], b: &[f64]) -> Self {
        let slacks = a.len();
        let artificials = b.iter().filter(|&&v| v < 0.0).count() + 1;
        let first_artificial = structural + slacks;
        let ncols = first_artificial + artificials;
        let mut rows = Vec::with_capacity(slacks + 1);
        let mut basis = Vec::with_capacity(slacks + 1);
        let mut next_artificial = first_artificial;

        for (i, (coeffs, &bound)) in a.iter().zip(b).enumerate() {
            let sign = if bound < 0.0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; ncols + 1];
            for (j, &c) in coeffs.iter().enumerate() {
                row[j] = sign * c;
            }
            row[structural + i] = sign;
            row[ncols] = sign * bound;
            if bound < 0.0 {
                row[next_artificial] = 1.0;
                basis.push(next_artificial);
                next_artificial += 1;
            } else {
                basis.push(structural + i);
            }
            rows.push(row);
        }

        let mut total = vec![0.0; ncols + 1];
        total[..structural].iter_mut().for_each(|v| *v = 1.0);
        total[next_artificial] = 1.0;
        total[ncols] = 1.0;
        basis.push(next_artificial);
        rows.push(total);

        Tableau { rows, basis, structural, first_artificial, ncols, pivots: 0 }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let inv = 1.0 / self.rows[r][col];
        self.rows[r].iter_mut().for_each(|v| *v *= inv);
        self.rows[r][col] = 1.0;
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[col];
            if factor != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= factor * p);
                row[col] = 0.0;
            }
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    /// Maximizes `cost·x` over the current feasible basis, letting only
    /// columns below `col_limit` enter.
    fn optimize(&mut self, cost: &[f64], col_limit: usize) -> Result<(), Failure> {
        let mut reduced: Vec<f64> = (0..self.ncols)
            .map(|j| {
                cost[j]
                    - self
                        .rows
                        .iter()
                        .zip(&self.basis)
                        .map(|(row, &bv)| cost[bv] * row[j])
                        .sum::<f64>()
            })
            .collect();

        loop {
            let Some(col) = (0..col_limit).find(|&j| reduced[j] > PIVOT_TOL && !self.basis.contains(&j)) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[col] <= PIVOT_TOL {
                    continue;
                }
                let ratio = row[self.ncols] / row[col];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((best, best_ratio)) => {
                        let tie = (ratio - best_ratio).abs() <= 1e-12;
                        if (!tie && ratio < best_ratio) || (tie && self.basis[i] < self.basis[best]) {
                            Some((i, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Err(Failure::Unbounded);
            };
            if self.pivots >= MAX_PIVOTS {
                return Err(Failure::Unbounded);
            }
            self.pivot(r, col);
            let factor = reduced[col];
            reduced
                .iter_mut()
                .zip(&self.rows[r])
                .for_each(|(z, p)| *z -= factor * p);
            reduced[col] = 0.0;
        }
    }

    /// Phase one: reach a basis free of artificial variables.
    fn make_feasible(&mut self, scale: f64) -> Result<(), Failure> {
        let mut cost = vec![0.0; self.ncols];
        cost[self.first_artificial..].iter_mut().for_each(|v| *v = -1.0);
        self.optimize(&cost, self.ncols)?;

        let infeasibility: f64 = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &bv)| bv >= self.first_artificial)
            .map(|(i, _)| self.rhs(i))
            .sum();
        if infeasibility > FEAS_TOL * scale {
            return Err(Failure::Infeasible);
        }

        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| self.rows[i][j].abs() > PIVOT_TOL) {
                Some(col) => {
                    self.pivot(i, col);
                    i += 1;
                }
                None => {
                    // Redundant constraint.
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
        Ok(())
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.structural];
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < self.structural {
                x[bv] = self.rhs(i).max(0.0);
            }
        }
        x
    }
}

fn rhs_scale(b: &[f64]) -> f64 {
    1.0 + b.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Solves `max c·x` over `{x : A·x ≤ b, Σx = 1, x ≥ 0}`.
pub(crate) fn solve(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<Solution, Failure> {
    let mut tableau = Tableau::new(c.len(), a, b);
    tableau.make_feasible(rhs_scale(b))?;
    let mut cost = vec![0.0; tableau.ncols];
    cost[..c.len()].copy_from_slice(c);
    tableau.optimize(&cost, tableau.first_artificial)?;
    Ok(Solution { x: tableau.primal(), pivots: tableau.pivots })
}

/// Some point of `{x ∈ ℝⁿ : A·x ≤ b, Σx = 1, x ≥ 0}`, if the set is non-empty.
pub(crate) fn find_feasible(n: usize, a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    if n == 0 {
        return None;
    }
    let mut tableau = Tableau::new(n, a, b);
    tableau.make_feasible(rhs_scale(b)).ok()?;
    Some(tableau.primal())
}
