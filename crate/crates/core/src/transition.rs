//! Upper and lower transition operators, their iterates, and the extension
//! of the upper operator to functions of whole state histories.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::credal::{CredalRow, Gamble, ImpreciseMarkovChain};
use crate::error::{Error, Result};
use crate::lp::{self, LpResult};

/// Default bound on the number of entries of a materialized history function.
pub const DEFAULT_HISTORY_CAP: usize = 10_000_000;

/// A real function on `𝒳ⁿ`, stored flat in row-major order with the first
/// time index most significant. The slice over the last coordinate for a
/// fixed prefix is therefore a contiguous block of `|𝒳|` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryFunction {
    dim: usize,
    horizon: usize,
    values: Vec<f64>,
}

/// `dim^horizon`, or a cap error when it exceeds `cap`.
pub fn history_len(dim: usize, horizon: usize, cap: usize) -> Result<usize> {
    let required = (dim as u128).checked_pow(horizon as u32).unwrap_or(u128::MAX);
    if required > cap as u128 || horizon > u32::MAX as usize {
        return Err(Error::CapExceeded { what: "history function", required, cap: cap as u128 });
    }
    Ok(required as usize)
}

impl HistoryFunction {
    pub fn new(dim: usize, horizon: usize, values: Vec<f64>, cap: usize) -> Result<Self> {
        if horizon == 0 || dim == 0 {
            return Err(Error::InvalidArgument("history functions need dim ≥ 1 and horizon ≥ 1".into()));
        }
        let len = history_len(dim, horizon, cap)?;
        if values.len() != len {
            return Err(Error::Dimension { expected: len, got: values.len() });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(HistoryFunction { dim, horizon, values })
    }

    /// Tabulates `f` over every history `x₁:ₙ`.
    pub fn from_fn(dim: usize, horizon: usize, cap: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = history_len(dim, horizon, cap)?;
        let mut history = vec![0; horizon];
        let mut values = Vec::with_capacity(len);
        for index in 0..len {
            decode(index, dim, &mut history);
            values.push(f(&history));
        }
        Self::new(dim, horizon, values, cap)
    }

    pub fn from_gamble(g: &Gamble) -> Self {
        HistoryFunction { dim: g.len(), horizon: 1, values: g.values().to_vec() }
    }

    pub(crate) fn from_parts(dim: usize, horizon: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(Some(values.len()), dim.checked_pow(horizon as u32));
        HistoryFunction { dim, horizon, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, history: &[usize]) -> f64 {
        assert_eq!(history.len(), self.horizon);
        self.values[encode(history, self.dim)]
    }

    /// The function of `x₁` alone, available once the horizon is 1.
    pub fn to_gamble(&self) -> Option<Gamble> {
        (self.horizon == 1).then(|| Gamble::from_values(self.values.clone()))
    }
}

pub(crate) fn encode(history: &[usize], dim: usize) -> usize {
    history.iter().fold(0, |acc, &x| acc * dim + x)
}

pub(crate) fn decode(mut index: usize, dim: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % dim;
        index /= dim;
    }
}

type Optimizer = fn(&CredalRow, &Gamble) -> Result<LpResult>;

/// Transition operators of one model, with an instrumented LP-call counter.
#[derive(Debug)]
pub struct Transitions<'m> {
    model: &'m ImpreciseMarkovChain,
    lp_calls: AtomicUsize,
    parallel: bool,
}

impl<'m> Transitions<'m> {
    pub fn new(model: &'m ImpreciseMarkovChain) -> Self {
        Transitions { model, lp_calls: AtomicUsize::new(0), parallel: false }
    }

    /// Evaluate the per-state LPs of one application on the rayon pool.
    pub fn parallel(mut self, enabled: bool) -> Self {
        self.parallel = enabled;
        self
    }

    pub fn model(&self) -> &'m ImpreciseMarkovChain {
        self.model
    }

    /// Row LPs solved so far.
    pub fn lp_calls(&self) -> usize {
        self.lp_calls.load(Ordering::Relaxed)
    }

    fn solve(&self, state: usize, objective: &Gamble, optimizer: Optimizer) -> Result<f64> {
        self.lp_calls.fetch_add(1, Ordering::Relaxed);
        Ok(optimizer(self.model.row(state), objective)?.value)
    }

    fn apply(&self, f: &Gamble, optimizer: Optimizer) -> Result<Gamble> {
        let dim = self.model.dim();
        f.check_dim(dim)?;
        let values = if self.parallel {
            (0..dim)
                .into_par_iter()
                .map(|x| self.solve(x, f, optimizer))
                .collect::<Result<Vec<_>>>()?
        } else {
            (0..dim).map(|x| self.solve(x, f, optimizer)).collect::<Result<Vec<_>>>()?
        };
        Ok(Gamble::from_values(values))
    }

    /// `[T̄f](x) = max_{p ∈ 𝒯ₓ} Σ_y p(y) f(y)`.
    pub fn upper(&self, f: &Gamble) -> Result<Gamble> {
        self.apply(f, lp::maximize)
    }

    /// `[T̲f](x) = −[T̄(−f)](x)`.
    pub fn lower(&self, f: &Gamble) -> Result<Gamble> {
        self.apply(f, lp::minimize)
    }

    pub fn iterate_upper(&self, f: &Gamble, k: usize) -> Result<Gamble> {
        f.check_dim(self.model.dim())?;
        (0..k).try_fold(f.clone(), |acc, _| self.upper(&acc))
    }

    pub fn iterate_lower(&self, f: &Gamble, k: usize) -> Result<Gamble> {
        f.check_dim(self.model.dim())?;
        (0..k).try_fold(f.clone(), |acc, _| self.lower(&acc))
    }

    fn extend(&self, func: &HistoryFunction, optimizer: Optimizer) -> Result<HistoryFunction> {
        let dim = self.model.dim();
        if func.dim != dim {
            return Err(Error::Dimension { expected: dim, got: func.dim });
        }
        if func.horizon < 2 {
            return Err(Error::InvalidArgument(
                "the extended operator needs a history function of horizon ≥ 2".into(),
            ));
        }
        let eval = |(prefix, slice): (usize, &[f64])| {
            let objective = Gamble::from_values(slice.to_vec());
            self.solve(prefix % dim, &objective, optimizer)
        };
        let values = if self.parallel {
            func.values.par_chunks(dim).enumerate().map(eval).collect::<Result<Vec<_>>>()?
        } else {
            func.values.chunks(dim).enumerate().map(eval).collect::<Result<Vec<_>>>()?
        };
        Ok(HistoryFunction::from_parts(dim, func.horizon - 1, values))
    }

    /// `[T̄F](x₁:ₙ) = [T̄ F(x₁:ₙ ·)](xₙ)`: maximizes over the last coordinate
    /// using the row of the last state of each prefix.
    pub fn extended_upper(&self, func: &HistoryFunction) -> Result<HistoryFunction> {
        self.extend(func, lp::maximize)
    }

    pub fn extended_lower(&self, func: &HistoryFunction) -> Result<HistoryFunction> {
        self.extend(func, lp::minimize)
    }
}

pub fn upper_t(model: &ImpreciseMarkovChain, f: &Gamble) -> Result<Gamble> {
    Transitions::new(model).upper(f)
}

pub fn lower_t(model: &ImpreciseMarkovChain, f: &Gamble) -> Result<Gamble> {
    Transitions::new(model).lower(f)
}

pub fn iterate_upper(model: &ImpreciseMarkovChain, f: &Gamble, k: usize) -> Result<Gamble> {
    Transitions::new(model).iterate_upper(f, k)
}

pub fn iterate_lower(model: &ImpreciseMarkovChain, f: &Gamble, k: usize) -> Result<Gamble> {
    Transitions::new(model).iterate_lower(f, k)
}

pub fn extended_upper(model: &ImpreciseMarkovChain, func: &HistoryFunction) -> Result<HistoryFunction> {
    Transitions::new(model).extended_upper(func)
}
