//! Linear-time recursion for conditional lower and upper expectations of
//! recursively decomposable functions
//! `τₖ₊₁(x₁:ₖ₊₁) = hₖ(x₁)·τₖ(x₂:ₖ₊₁) + gₖ(x₁)`, `τ₁ = g₀`.

use crate::credal::{Gamble, ImpreciseMarkovChain};
use crate::error::{Error, Result};
use crate::lp;
use crate::transition::Transitions;

/// One recursion step: multiplier `h` and offset `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub h: Gamble,
    pub g: Gamble,
}

/// The sequences `g₀` and `(hₖ, gₖ)` for `k = 1..n−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursiveSpec {
    g0: Gamble,
    steps: Vec<Step>,
}

impl RecursiveSpec {
    pub fn new(g0: Gamble, steps: Vec<Step>) -> Result<Self> {
        let dim = g0.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("g0 must not be empty".into()));
        }
        for step in &steps {
            step.h.check_dim(dim)?;
            step.g.check_dim(dim)?;
        }
        Ok(RecursiveSpec { g0, steps })
    }

    pub fn g0(&self) -> &Gamble {
        &self.g0
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn dim(&self) -> usize {
        self.g0.len()
    }

    /// `n = 1 + number of steps`.
    pub fn horizon(&self) -> usize {
        1 + self.steps.len()
    }

    /// Multiplies every offset by `factor`, leaving the multipliers alone.
    pub fn scale_offsets(&self, factor: f64) -> RecursiveSpec {
        RecursiveSpec {
            g0: self.g0.scale(factor),
            steps: self
                .steps
                .iter()
                .map(|s| Step { h: s.h.clone(), g: s.g.scale(factor) })
                .collect(),
        }
    }
}

/// Output of [`infer`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsResult {
    /// Upper expectation conditional on each initial state.
    pub upper_conditional: Gamble,
    pub lower_conditional: Gamble,
    pub upper: f64,
    pub lower: f64,
    pub lp_calls: usize,
}

impl BoundsResult {
    /// Applies a non-negative factor to all four bounds.
    pub fn scaled(&self, factor: f64) -> BoundsResult {
        debug_assert!(factor >= 0.0);
        BoundsResult {
            upper_conditional: self.upper_conditional.scale(factor),
            lower_conditional: self.lower_conditional.scale(factor),
            upper: self.upper * factor,
            lower: self.lower * factor,
            lp_calls: self.lp_calls,
        }
    }
}

/// Conditional bound vectors after some number of recursion steps.
///
/// Advancing one step costs one application of each of `T̄` and `T̲`, so
/// `2|𝒳|` row LPs.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionState {
    upper: Gamble,
    lower: Gamble,
    horizon: usize,
}

impl RecursionState {
    pub fn start(g0: &Gamble) -> Self {
        RecursionState { upper: g0.clone(), lower: g0.clone(), horizon: 1 }
    }

    pub fn upper(&self) -> &Gamble {
        &self.upper
    }

    pub fn lower(&self) -> &Gamble {
        &self.lower
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn into_bounds(self) -> (Gamble, Gamble) {
        (self.upper, self.lower)
    }

    pub fn advance(&mut self, ops: &Transitions<'_>, step: &Step) -> Result<()> {
        let dim = self.upper.len();
        step.h.check_dim(dim)?;
        step.g.check_dim(dim)?;
        let up = ops.upper(&self.upper)?;
        let low = ops.lower(&self.lower)?;
        let mut next_upper = Vec::with_capacity(dim);
        let mut next_lower = Vec::with_capacity(dim);
        for x in 0..dim {
            let (h, g) = (step.h[x], step.g[x]);
            debug_assert!(h != 0.0 || h * up[x] == h * low[x]);
            if h >= 0.0 {
                next_upper.push(h * up[x] + g);
                next_lower.push(h * low[x] + g);
            } else {
                next_upper.push(h * low[x] + g);
                next_lower.push(h * up[x] + g);
            }
        }
        self.upper = Gamble::from_values(next_upper);
        self.lower = Gamble::from_values(next_lower);
        self.horizon += 1;
        Ok(())
    }
}

fn check_spec(model: &ImpreciseMarkovChain, spec: &RecursiveSpec) -> Result<()> {
    if spec.dim() != model.dim() {
        return Err(Error::Dimension { expected: model.dim(), got: spec.dim() });
    }
    Ok(())
}

/// Runs the recursion on an existing operator handle, so callers can read
/// its LP counter.
pub fn conditional_bounds_with(ops: &Transitions<'_>, spec: &RecursiveSpec) -> Result<(Gamble, Gamble)> {
    check_spec(ops.model(), spec)?;
    let mut state = RecursionState::start(&spec.g0);
    for step in &spec.steps {
        state.advance(ops, step)?;
    }
    Ok(state.into_bounds())
}

/// Upper and lower expectations of `τₙ(X₁:ₙ)` conditional on each `X₁ = x`.
pub fn conditional_bounds(model: &ImpreciseMarkovChain, spec: &RecursiveSpec) -> Result<(Gamble, Gamble)> {
    conditional_bounds_with(&Transitions::new(model), spec)
}

/// Optimizes each conditional vector over the initial credal set.
pub fn unconditional_bounds(
    model: &ImpreciseMarkovChain,
    upper_cond: &Gamble,
    lower_cond: &Gamble,
) -> Result<(f64, f64)> {
    let upper = lp::maximize(model.initial(), upper_cond)?.value;
    let lower = lp::minimize(model.initial(), lower_cond)?.value;
    Ok((upper, lower))
}

pub fn infer_with(ops: &Transitions<'_>, spec: &RecursiveSpec) -> Result<BoundsResult> {
    let before = ops.lp_calls();
    let (upper_conditional, lower_conditional) = conditional_bounds_with(ops, spec)?;
    let (upper, lower) = unconditional_bounds(ops.model(), &upper_conditional, &lower_conditional)?;
    Ok(BoundsResult {
        upper_conditional,
        lower_conditional,
        upper,
        lower,
        lp_calls: ops.lp_calls() - before + 2,
    })
}

/// Conditional and unconditional bounds with the number of LPs solved.
pub fn infer(model: &ImpreciseMarkovChain, spec: &RecursiveSpec) -> Result<BoundsResult> {
    infer_with(&Transitions::new(model), spec)
}
