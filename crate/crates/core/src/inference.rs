//! Recursive specs for common inferences, and the horizon-extension loop
//! that approximates hitting probabilities and hitting times over an
//! unbounded horizon.

use log::warn;

use crate::credal::{Gamble, ImpreciseMarkovChain};
use crate::error::{Error, Result};
use crate::recursion::{unconditional_bounds, RecursionState, RecursiveSpec, Step};
use crate::transition::Transitions;

fn check_horizon(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    Ok(())
}

fn check_target(dim: usize, target: &[usize]) -> Result<()> {
    match target.iter().find(|&&a| a >= dim) {
        Some(a) => Err(Error::InvalidArgument(format!("target state {a} out of range for {dim} states"))),
        None => Ok(()),
    }
}

fn repeat_step(step: Step, n: usize) -> Vec<Step> {
    vec![step; n - 1]
}

/// `f(Xₙ)`: `g₀ = f`, then `n − 1` steps with `h = 1`, `g = 0`.
pub fn spec_single_instant(f: &Gamble, n: usize) -> Result<RecursiveSpec> {
    check_horizon(n)?;
    let dim = f.len();
    RecursiveSpec::new(f.clone(), repeat_step(Step { h: Gamble::ones(dim), g: Gamble::zeros(dim) }, n))
}

/// `Σₖ fₖ(Xₖ)` with `fs[k − 1] = fₖ`.
pub fn spec_sum(fs: &[Gamble]) -> Result<RecursiveSpec> {
    let (last, rest) = fs
        .split_last()
        .ok_or_else(|| Error::InvalidArgument("sum needs at least one function".into()))?;
    let ones = Gamble::ones(last.len());
    let steps = rest.iter().rev().map(|f| Step { h: ones.clone(), g: f.clone() }).collect();
    RecursiveSpec::new(last.clone(), steps)
}

/// `(1/n) Σₖ f(Xₖ)` as a sum spec plus the factor `1/n` to apply to its bounds.
pub fn spec_time_average(f: &Gamble, n: usize) -> Result<(RecursiveSpec, f64)> {
    check_horizon(n)?;
    let spec = spec_sum(&vec![f.clone(); n])?;
    Ok((spec, 1.0 / n as f64))
}

/// `Πₖ fₖ(Xₖ)` with `fs[k − 1] = fₖ`; factors may change sign.
pub fn spec_product(fs: &[Gamble]) -> Result<RecursiveSpec> {
    let (last, rest) = fs
        .split_last()
        .ok_or_else(|| Error::InvalidArgument("product needs at least one function".into()))?;
    let zeros = Gamble::zeros(last.len());
    let steps = rest.iter().rev().map(|f| Step { h: f.clone(), g: zeros.clone() }).collect();
    RecursiveSpec::new(last.clone(), steps)
}

/// Indicator that one of `X₁, …, Xₙ` lies in `target`.
pub fn spec_hitting_probability(dim: usize, target: &[usize], n: usize) -> Result<RecursiveSpec> {
    check_horizon(n)?;
    check_target(dim, target)?;
    let (g0, step) = hitting_probability_parts(dim, target);
    RecursiveSpec::new(g0, repeat_step(step, n))
}

/// Number of steps before the first visit to `target`: zero when `X₁` is in
/// the target, and `n` when none of `X₁, …, Xₙ` is.
pub fn spec_hitting_time(dim: usize, target: &[usize], n: usize) -> Result<RecursiveSpec> {
    check_horizon(n)?;
    check_target(dim, target)?;
    if target.is_empty() {
        warn!("hitting time of an empty set grows with the horizon");
    }
    let (g0, step) = hitting_time_parts(dim, target);
    RecursiveSpec::new(g0, repeat_step(step, n))
}

fn complement(dim: usize, target: &[usize]) -> Gamble {
    Gamble::from_fn(dim, |x| if target.contains(&x) { 0.0 } else { 1.0 })
}

fn hitting_probability_parts(dim: usize, target: &[usize]) -> (Gamble, Step) {
    let hit = Gamble::indicator(dim, target);
    (hit.clone(), Step { h: complement(dim, target), g: hit })
}

fn hitting_time_parts(dim: usize, target: &[usize]) -> (Gamble, Step) {
    let miss = complement(dim, target);
    (miss.clone(), Step { h: miss.clone(), g: miss })
}

/// Families of non-finitary inferences approximated by growing the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitFamily {
    HittingProbability(Vec<usize>),
    HittingTime(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitResult {
    pub upper: f64,
    pub lower: f64,
    pub horizon_reached: usize,
    pub converged: bool,
    /// Unconditional bounds at horizons `1..=horizon_reached`.
    pub upper_trace: Vec<f64>,
    pub lower_trace: Vec<f64>,
    pub upper_conditional: Gamble,
    pub lower_conditional: Gamble,
    pub lp_calls: usize,
}

pub const DEFAULT_LIMIT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_HORIZON: usize = 100_000;

pub fn limit_infer(
    model: &ImpreciseMarkovChain,
    family: &LimitFamily,
    tol: f64,
    max_horizon: usize,
) -> Result<LimitResult> {
    limit_infer_with(&Transitions::new(model), family, tol, max_horizon)
}

/// Extends the horizon one recursion step at a time until both unconditional
/// bounds move by less than `tol`, or `max_horizon` is reached.
pub fn limit_infer_with(
    ops: &Transitions<'_>,
    family: &LimitFamily,
    tol: f64,
    max_horizon: usize,
) -> Result<LimitResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if max_horizon < 2 {
        return Err(Error::InvalidArgument(format!("max_horizon must be at least 2, got {max_horizon}")));
    }
    let model = ops.model();
    let dim = model.dim();
    let (g0, step) = match family {
        LimitFamily::HittingProbability(target) => {
            check_target(dim, target)?;
            hitting_probability_parts(dim, target)
        }
        LimitFamily::HittingTime(target) => {
            check_target(dim, target)?;
            hitting_time_parts(dim, target)
        }
    };
    warn!("the finite-horizon bounds approach the limit only if every transition credal set is closed and convex");

    let calls_before = ops.lp_calls();
    let mut state = RecursionState::start(&g0);
    let (u, l) = unconditional_bounds(model, state.upper(), state.lower())?;
    let mut upper_trace = vec![u];
    let mut lower_trace = vec![l];
    let mut converged = false;

    while state.horizon() < max_horizon {
        state.advance(ops, &step)?;
        let (u, l) = unconditional_bounds(model, state.upper(), state.lower())?;
        if !(u.is_finite() && l.is_finite()) {
            warn!("non-finite bounds at horizon {}", state.horizon());
            break;
        }
        let (pu, pl) = (*upper_trace.last().unwrap(), *lower_trace.last().unwrap());
        upper_trace.push(u);
        lower_trace.push(l);
        if (u - pu).abs() < tol && (l - pl).abs() < tol {
            converged = true;
            break;
        }
    }

    let horizon_reached = upper_trace.len();
    let (upper_conditional, lower_conditional) = state.into_bounds();
    Ok(LimitResult {
        upper: *upper_trace.last().unwrap(),
        lower: *lower_trace.last().unwrap(),
        horizon_reached,
        converged,
        upper_trace,
        lower_trace,
        upper_conditional,
        lower_conditional,
        lp_calls: ops.lp_calls() - calls_before + 2 * horizon_reached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credal::{CredalRow, StateSpace};
    use crate::recursion::{conditional_bounds, infer};

    fn g(v: &[f64]) -> Gamble {
        Gamble::new(v.to_vec()).unwrap()
    }

    fn e1() -> ImpreciseMarkovChain {
        let rows = vec![
            CredalRow::Intervals { lower: vec![0.7, 0.1], upper: vec![0.9, 0.3] },
            CredalRow::Intervals { lower: vec![0.4, 0.4], upper: vec![0.6, 0.6] },
        ];
        let initial = CredalRow::Intervals { lower: vec![0.5, 0.2], upper: vec![0.8, 0.5] };
        ImpreciseMarkovChain::new(StateSpace::numbered(2).unwrap(), initial, rows).unwrap()
    }

    #[test]
    fn single_instant_specs() {
        let f = g(&[0.0, 1.0]);
        assert!(spec_single_instant(&f, 1).unwrap().steps().is_empty());
        let (up, _) = conditional_bounds(&e1(), &spec_single_instant(&f, 3).unwrap()).unwrap();
        assert!(up.max_abs_diff(&g(&[0.39, 0.48])) < 1e-12);
        let c = Gamble::constant(2, 2.5);
        let (up, low) = conditional_bounds(&e1(), &spec_single_instant(&c, 4).unwrap()).unwrap();
        assert!(up.max_abs_diff(&c) < 1e-12 && low.max_abs_diff(&c) < 1e-12);
        assert!(spec_single_instant(&f, 0).is_err());
    }

    #[test]
    fn sum_and_time_average() {
        let f = g(&[0.0, 1.0]);
        let (up, _) = conditional_bounds(&e1(), &spec_sum(&[f.clone(), f.clone()]).unwrap()).unwrap();
        assert!(up.max_abs_diff(&g(&[0.3, 1.6])) < 1e-12);
        let (spec, scale) = spec_time_average(&f, 2).unwrap();
        let r = infer(&e1(), &spec).unwrap().scaled(scale);
        assert!(r.upper_conditional.max_abs_diff(&g(&[0.15, 0.8])) < 1e-12);
        assert_eq!(spec_time_average(&f, 1).unwrap().1, 1.0);
        let consts = [Gamble::constant(2, 1.5), Gamble::constant(2, -4.0)];
        let (up, low) = conditional_bounds(&e1(), &spec_sum(&consts).unwrap()).unwrap();
        assert!(up.max_abs_diff(&Gamble::constant(2, -2.5)) < 1e-12);
        assert!(low.max_abs_diff(&Gamble::constant(2, -2.5)) < 1e-12);
        assert!(spec_sum(&[]).is_err());
    }

    #[test]
    fn sum_uses_last_function_as_g0() {
        let fs = [g(&[1.0, 2.0]), g(&[3.0, 4.0]), g(&[5.0, 6.0])];
        let spec = spec_sum(&fs).unwrap();
        assert_eq!(spec.g0(), &fs[2]);
        assert_eq!(spec.steps()[0].g, fs[1]);
        assert_eq!(spec.steps()[1].g, fs[0]);
    }

    #[test]
    fn product_of_indicators() {
        let a = g(&[1.0, 0.0]);
        let (up, low) = conditional_bounds(&e1(), &spec_product(&[a.clone(), a]).unwrap()).unwrap();
        // Starting in s1 the first factor is already zero.
        assert!(up.max_abs_diff(&g(&[0.9, 0.0])) < 1e-12);
        assert!(low.max_abs_diff(&g(&[0.7, 0.0])) < 1e-12);
    }

    #[test]
    fn hitting_probability_specs() {
        let (up, low) = conditional_bounds(&e1(), &spec_hitting_probability(2, &[1], 2).unwrap()).unwrap();
        assert!(up.max_abs_diff(&g(&[0.3, 1.0])) < 1e-15);
        assert!(low.max_abs_diff(&g(&[0.1, 1.0])) < 1e-15);
        let (up, low) = conditional_bounds(&e1(), &spec_hitting_probability(2, &[0, 1], 5).unwrap()).unwrap();
        assert!(up.max_abs_diff(&Gamble::ones(2)) < 1e-15 && low.max_abs_diff(&Gamble::ones(2)) < 1e-15);
        let (up, low) = conditional_bounds(&e1(), &spec_hitting_probability(2, &[], 5).unwrap()).unwrap();
        assert!(up.max_abs_diff(&Gamble::zeros(2)) < 1e-15 && low.max_abs_diff(&Gamble::zeros(2)) < 1e-15);
        assert!(spec_hitting_probability(2, &[2], 2).is_err());
    }

    #[test]
    fn hitting_time_specs() {
        let (up, low) = conditional_bounds(&e1(), &spec_hitting_time(2, &[1], 2).unwrap()).unwrap();
        assert!(low.max_abs_diff(&g(&[1.7, 0.0])) < 1e-12);
        assert!(up.max_abs_diff(&g(&[1.9, 0.0])) < 1e-12);
        for n in 1..6 {
            let (up, _) = conditional_bounds(&e1(), &spec_hitting_time(2, &[1], n).unwrap()).unwrap();
            assert_eq!(up[1], 0.0);
            let (up, low) = conditional_bounds(&e1(), &spec_hitting_time(2, &[0, 1], n).unwrap()).unwrap();
            assert_eq!(up, Gamble::zeros(2));
            assert_eq!(low, Gamble::zeros(2));
        }
    }

    #[test]
    fn limit_hitting_probability_converges_to_one() {
        let r = limit_infer(&e1(), &LimitFamily::HittingProbability(vec![1]), 1e-9, 100_000).unwrap();
        assert!(r.converged);
        assert!(r.horizon_reached < 500);
        assert!((r.upper - 1.0).abs() < 1e-6 && (r.lower - 1.0).abs() < 1e-6);
        assert!(r.upper_trace.windows(2).all(|w| w[1] >= w[0]));
        assert!(r.lower_trace.windows(2).all(|w| w[1] >= w[0]));
        // Conditional on s0: uₙ = 1 − 0.7ⁿ⁻¹ and lₙ = 1 − 0.9ⁿ⁻¹.
        let n = r.horizon_reached as i32;
        assert!((r.upper_conditional[0] - (1.0 - 0.7f64.powi(n - 1))).abs() < 1e-12);
        assert!((r.lower_conditional[0] - (1.0 - 0.9f64.powi(n - 1))).abs() < 1e-12);
        assert_eq!(r.lp_calls, 2 * 2 * (r.horizon_reached - 1) + 2 * r.horizon_reached);
    }

    #[test]
    fn limit_of_certain_hit_stops_at_horizon_two() {
        let r = limit_infer(&e1(), &LimitFamily::HittingProbability(vec![0, 1]), 1e-9, 100).unwrap();
        assert!(r.converged);
        assert_eq!(r.horizon_reached, 2);
        assert_eq!((r.upper, r.lower), (1.0, 1.0));
    }

    #[test]
    fn unreachable_target_has_linear_hitting_time() {
        let rows = vec![
            CredalRow::Intervals { lower: vec![1.0, 0.0], upper: vec![1.0, 0.0] },
            CredalRow::Intervals { lower: vec![0.5, 0.5], upper: vec![0.5, 0.5] },
        ];
        let initial = CredalRow::Intervals { lower: vec![1.0, 0.0], upper: vec![1.0, 0.0] };
        let m = ImpreciseMarkovChain::new(StateSpace::numbered(2).unwrap(), initial, rows).unwrap();
        let r = limit_infer(&m, &LimitFamily::HittingTime(vec![1]), 1e-6, 50).unwrap();
        assert!(!r.converged);
        assert_eq!(r.horizon_reached, 50);
        for (i, (&u, &l)) in r.upper_trace.iter().zip(&r.lower_trace).enumerate() {
            assert_eq!(u, (i + 1) as f64);
            assert_eq!(l, (i + 1) as f64);
        }
    }

    #[test]
    fn incremental_matches_fresh_recursion() {
        let family = LimitFamily::HittingTime(vec![1]);
        let r = limit_infer(&e1(), &family, 1e-300, 17).unwrap();
        assert_eq!(r.horizon_reached, 17);
        let (up, low) = conditional_bounds(&e1(), &spec_hitting_time(2, &[1], 17).unwrap()).unwrap();
        assert_eq!(r.upper_conditional, up);
        assert_eq!(r.lower_conditional, low);
    }

    #[test]
    fn limit_argument_checks() {
        let fam = LimitFamily::HittingProbability(vec![1]);
        assert!(limit_infer(&e1(), &fam, 0.0, 10).is_err());
        assert!(limit_infer(&e1(), &fam, 1e-6, 1).is_err());
    }
}
