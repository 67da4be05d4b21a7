//! Exponential-cost reference computations used to check the recursion:
//! explicit tabulation of `τₙ`, backward induction over the full history
//! tree, and brute-force enumeration of extreme compatible processes.

use crate::credal::{dot, CredalRow, Gamble, ImpreciseMarkovChain, Pmf, PROB_TOL};
use crate::error::{Error, Result};
use crate::recursion::RecursiveSpec;
use crate::transition::{history_len, HistoryFunction, Transitions, DEFAULT_HISTORY_CAP};

/// Default bound on the number of vertex assignments enumerated.
pub const DEFAULT_ASSIGNMENT_CAP: u128 = 1_000_000;

/// Tabulates `τₙ` on all `|𝒳|ⁿ` histories.
pub fn materialize_tau(spec: &RecursiveSpec, cap: usize) -> Result<HistoryFunction> {
    let dim = spec.dim();
    history_len(dim, spec.horizon(), cap)?;
    let mut values = spec.g0().values().to_vec();
    for step in spec.steps() {
        let block = values.len();
        let mut next = Vec::with_capacity(block * dim);
        for x1 in 0..dim {
            let (h, g) = (step.h[x1], step.g[x1]);
            next.extend(values.iter().map(|v| h * v + g));
        }
        values = next;
    }
    HistoryFunction::new(dim, spec.horizon(), values, cap)
}

/// Convenience wrapper using [`DEFAULT_HISTORY_CAP`].
pub fn materialize_tau_default(spec: &RecursiveSpec) -> Result<HistoryFunction> {
    materialize_tau(spec, DEFAULT_HISTORY_CAP)
}

/// Backward induction over the history tree on an existing operator handle.
pub fn naive_conditional_bounds_with(ops: &Transitions<'_>, func: &HistoryFunction) -> Result<(Gamble, Gamble)> {
    let mut upper = func.clone();
    while upper.horizon() > 1 {
        upper = ops.extended_upper(&upper)?;
    }
    let mut lower = func.clone();
    while lower.horizon() > 1 {
        lower = ops.extended_lower(&lower)?;
    }
    if func.dim() != ops.model().dim() {
        return Err(Error::Dimension { expected: ops.model().dim(), got: func.dim() });
    }
    Ok((upper.to_gamble().unwrap(), lower.to_gamble().unwrap()))
}

/// Upper and lower expectation of `F(X₁:ₙ)` given `X₁`, reducing the horizon
/// one coordinate at a time with the extended operators. Solves
/// `2·Σᵢ₌₁ⁿ⁻¹ |𝒳|ⁱ` row LPs.
pub fn naive_conditional_bounds(model: &ImpreciseMarkovChain, func: &HistoryFunction) -> Result<(Gamble, Gamble)> {
    naive_conditional_bounds_with(&Transitions::new(model), func)
}

/// The extreme pmfs of a 2-state interval row, largest `p(0)` first.
pub fn interval_vertices_2state(lower: &[f64], upper: &[f64]) -> Option<Vec<Pmf>> {
    if lower.len() != 2 || upper.len() != 2 {
        return None;
    }
    let lo = lower[0].max(1.0 - upper[1]);
    let hi = upper[0].min(1.0 - lower[1]);
    if lo > hi + PROB_TOL {
        return None;
    }
    let mut out = vec![Pmf::new_unchecked(vec![hi, 1.0 - hi])];
    if hi - lo > PROB_TOL {
        out.push(Pmf::new_unchecked(vec![lo, 1.0 - lo]));
    }
    Some(out)
}

fn vertex_lists(model: &ImpreciseMarkovChain) -> Result<Vec<Vec<Pmf>>> {
    model
        .rows()
        .iter()
        .enumerate()
        .map(|(x, row)| {
            let label = || model.states().label(x).to_string();
            match row {
                CredalRow::Vertices(vs) => Ok(vs.clone()),
                CredalRow::Intervals { lower, upper } if model.dim() == 2 => {
                    interval_vertices_2state(lower, upper).ok_or_else(|| Error::NotVertexRow(label()))
                }
                _ => Err(Error::NotVertexRow(label())),
            }
        })
        .collect()
}

/// Componentwise max and min, over every assignment of a vertex pmf to each
/// history node of depth below `n`, of the precise expectation of `F(X₁:ₙ)`
/// given `X₁`.
///
/// Assignments are per history, not per state, so the enumeration covers
/// non-homogeneous and non-Markov extreme processes. For a fixed initial
/// state only the nodes of its own subtree matter; the count checked against
/// `cap` is the sum over initial states of the per-subtree products.
pub fn enumerate_vertex_processes(
    model: &ImpreciseMarkovChain,
    func: &HistoryFunction,
    cap: u128,
) -> Result<(Gamble, Gamble)> {
    let dim = model.dim();
    if func.dim() != dim {
        return Err(Error::Dimension { expected: dim, got: func.dim() });
    }
    let n = func.horizon();
    if n == 1 {
        let diag = Gamble::from_values(func.values().to_vec());
        return Ok((diag.clone(), diag));
    }
    let vertices = vertex_lists(model)?;

    // Nodes of the subtree rooted at x₁, grouped by depth k = 1..n−1; node r
    // at depth k is the history x₁ followed by the base-|𝒳| digits of r.
    let last_state = |root: usize, depth: usize, r: usize| if depth == 1 { root } else { r % dim };
    let mut total: u128 = 0;
    for root in 0..dim {
        let mut count: u128 = 1;
        for depth in 1..n {
            for r in 0..dim.pow(depth as u32 - 1) {
                count = count.saturating_mul(vertices[last_state(root, depth, r)].len() as u128);
            }
        }
        total = total.saturating_add(count);
    }
    if total > cap {
        return Err(Error::CapExceeded { what: "vertex assignments", required: total, cap });
    }

    let leaf_block = dim.pow(n as u32 - 1);
    let mut maxima = Vec::with_capacity(dim);
    let mut minima = Vec::with_capacity(dim);
    for root in 0..dim {
        let leaves = &func.values()[root * leaf_block..(root + 1) * leaf_block];
        // Flattened digits: depth 1 first, then depth 2, ...
        let mut radices = Vec::new();
        for depth in 1..n {
            for r in 0..dim.pow(depth as u32 - 1) {
                radices.push(vertices[last_state(root, depth, r)].len());
            }
        }
        let mut digits = vec![0usize; radices.len()];
        let (mut best, mut worst) = (f64::NEG_INFINITY, f64::INFINITY);
        loop {
            let value = assignment_value(root, n, dim, leaves, &vertices, &digits);
            best = best.max(value);
            worst = worst.min(value);
            // Mixed-radix increment.
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < radices[i] {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
        maxima.push(best);
        minima.push(worst);
    }
    Ok((Gamble::from_values(maxima), Gamble::from_values(minima)))
}

/// Backward pass over one root's subtree with the vertex choices fixed.
fn assignment_value(
    root: usize,
    n: usize,
    dim: usize,
    leaves: &[f64],
    vertices: &[Vec<Pmf>],
    digits: &[usize],
) -> f64 {
    let mut offsets = Vec::with_capacity(n);
    let mut acc = 0;
    for depth in 1..n {
        offsets.push(acc);
        acc += dim.pow(depth as u32 - 1);
    }
    let mut current = leaves.to_vec();
    for depth in (1..n).rev() {
        let nodes = dim.pow(depth as u32 - 1);
        current = (0..nodes)
            .map(|r| {
                let state = if depth == 1 { root } else { r % dim };
                let choice = &vertices[state][digits[offsets[depth - 1] + r]];
                dot(choice.probs(), &current[r * dim..(r + 1) * dim])
            })
            .collect();
    }
    current[0]
}
