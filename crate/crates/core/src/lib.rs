//! Lower and upper expectations for imprecise Markov chains.
//!
//! An imprecise Markov chain is described by a credal set of initial
//! distributions and, for each state, a credal set of transition pmfs. The
//! crate bounds the expectation of `τₙ(X₁:ₙ)` over every compatible process
//! (including non-homogeneous and non-Markov ones) whenever `τₙ` unfolds as
//! `τₖ₊₁(x₁:ₖ₊₁) = hₖ(x₁)·τₖ(x₂:ₖ₊₁) + gₖ(x₁)`. The cost is `2(n−1)|𝒳|`
//! small linear programs plus two over the initial set.
//!
//! ```
//! use imprecise_markov::{infer, spec_hitting_probability, CredalRow, ImpreciseMarkovChain, StateSpace};
//!
//! let states = StateSpace::new(["s0", "s1"]).unwrap();
//! let rows = vec![
//!     CredalRow::Intervals { lower: vec![0.7, 0.1], upper: vec![0.9, 0.3] },
//!     CredalRow::Intervals { lower: vec![0.4, 0.4], upper: vec![0.6, 0.6] },
//! ];
//! let initial = CredalRow::Intervals { lower: vec![0.5, 0.2], upper: vec![0.8, 0.5] };
//! let model = ImpreciseMarkovChain::new(states, initial, rows).unwrap();
//!
//! let spec = spec_hitting_probability(2, &[1], 2).unwrap();
//! let bounds = infer(&model, &spec).unwrap();
//! assert!((bounds.upper - 0.65).abs() < 1e-12);
//! assert!((bounds.lower - 0.28).abs() < 1e-12);
//! ```

pub mod cli;
pub mod credal;
pub mod error;
pub mod inference;
pub mod lp;
pub mod oracle;
pub mod recursion;
mod simplex;
pub mod transition;

pub use credal::{expectation, validate_model, CredalRow, Gamble, ImpreciseMarkovChain, Pmf, StateSpace, Violation};
pub use error::{Error, Result};
pub use inference::{
    limit_infer, spec_hitting_probability, spec_hitting_time, spec_product, spec_single_instant, spec_sum,
    spec_time_average, LimitFamily, LimitResult,
};
pub use lp::{feasible, maximize, minimize, LpResult};
pub use oracle::{enumerate_vertex_processes, materialize_tau, naive_conditional_bounds};
pub use recursion::{conditional_bounds, infer, unconditional_bounds, BoundsResult, RecursiveSpec, Step};
pub use transition::{
    extended_upper, iterate_lower, iterate_upper, lower_t, upper_t, HistoryFunction, Transitions,
};
