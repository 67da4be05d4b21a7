//! State spaces, gambles, probability mass functions and credal sets.

use std::fmt;
use std::ops::{Index, Neg};

use crate::error::{Error, Result};
use crate::simplex;

/// Tolerance for normalization and nonnegativity checks on probabilities.
pub const PROB_TOL: f64 = 1e-9;

/// Ordered, non-empty set of distinctly named states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    labels: Vec<String>,
}

impl StateSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidArgument("state space must not be empty".into()));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::InvalidArgument(format!("duplicate state name {label:?}")));
            }
        }
        Ok(StateSpace { labels })
    }

    /// States named `s0, s1, ...`.
    pub fn numbered(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| format!("s{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }
}

/// A real-valued function on the state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamble(Vec<f64>);

impl Gamble {
    /// Builds a gamble, rejecting non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(Gamble(values))
    }

    /// Wraps values produced internally from finite inputs.
    pub(crate) fn from_values(values: Vec<f64>) -> Self {
        Gamble(values)
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Gamble(vec![value; dim])
    }

    pub fn zeros(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    pub fn ones(dim: usize) -> Self {
        Self::constant(dim, 1.0)
    }

    /// Indicator of the given set of state indices. Out-of-range indices are ignored.
    pub fn indicator(dim: usize, set: &[usize]) -> Self {
        Gamble((0..dim).map(|i| if set.contains(&i) { 1.0 } else { 0.0 }).collect())
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> f64) -> Self {
        Gamble((0..dim).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scale(&self, factor: f64) -> Gamble {
        Gamble(self.0.iter().map(|v| v * factor).collect())
    }

    pub fn shift(&self, offset: f64) -> Gamble {
        Gamble(self.0.iter().map(|v| v + offset).collect())
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &Gamble) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.len() != dim {
            return Err(Error::Dimension { expected: dim, got: self.len() });
        }
        Ok(())
    }
}

impl Index<usize> for Gamble {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl Neg for &Gamble {
    type Output = Gamble;

    fn neg(self) -> Gamble {
        Gamble(self.0.iter().map(|v| -v).collect())
    }
}

impl Neg for Gamble {
    type Output = Gamble;

    fn neg(self) -> Gamble {
        -&self
    }
}

/// A probability mass function on the state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if let Some(problem) = pmf_problem(&probs) {
            return Err(Error::InvalidPmf(problem));
        }
        Ok(Pmf(probs))
    }

    pub fn point_mass(dim: usize, state: usize) -> Self {
        let mut probs = vec![0.0; dim];
        probs[state] = 1.0;
        Pmf(probs)
    }

    pub fn uniform(dim: usize) -> Self {
        Pmf(vec![1.0 / dim as f64; dim])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    /// Wraps a vector without checking it; see [`CredalRow::violations`].
    pub fn new_unchecked(probs: Vec<f64>) -> Self {
        Pmf(probs)
    }
}

impl Index<usize> for Pmf {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

fn pmf_problem(probs: &[f64]) -> Option<String> {
    if probs.is_empty() {
        return Some("empty probability vector".into());
    }
    if let Some((i, v)) = probs.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Some(format!("entry {i} is not finite ({v})"));
    }
    if let Some((i, v)) = probs
        .iter()
        .enumerate()
        .find(|(_, &v)| v < -PROB_TOL || v > 1.0 + PROB_TOL)
    {
        return Some(format!("entry {i} = {v} lies outside [0, 1]"));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Some(format!("entries sum to {sum}, not 1"));
    }
    None
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        Some((index, &value)) => Err(Error::NonFinite { index, value }),
        None => Ok(()),
    }
}

/// `Σ_y p(y) f(y)`.
pub fn expectation(p: &Pmf, f: &Gamble) -> Result<f64> {
    f.check_dim(p.len())?;
    Ok(dot(p.probs(), f.values()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A non-empty closed convex set of pmfs on the state space.
///
/// `Constraints` describes `{p : A·p ≤ b, p ≥ 0, Σp = 1}`; `a` holds one
/// constraint per entry.
#[derive(Debug, Clone, PartialEq)]
pub enum CredalRow {
    Intervals { lower: Vec<f64>, upper: Vec<f64> },
    Vertices(Vec<Pmf>),
    Constraints { a: Vec<Vec<f64>>, b: Vec<f64> },
}

impl CredalRow {
    /// A credal set holding exactly one pmf.
    pub fn singleton(p: Pmf) -> Self {
        CredalRow::Vertices(vec![p])
    }

    /// Every invariant violation of this row for a state space of size `dim`.
    pub fn violations(&self, dim: usize) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            CredalRow::Intervals { lower, upper } => {
                if lower.len() != dim || upper.len() != dim {
                    out.push(format!(
                        "interval bounds have lengths {}/{}, expected {dim}",
                        lower.len(),
                        upper.len()
                    ));
                    return out;
                }
                if lower.iter().chain(upper).any(|v| !v.is_finite()) {
                    out.push("interval bounds must be finite".into());
                    return out;
                }
                for (i, (&l, &u)) in lower.iter().zip(upper).enumerate() {
                    if l < -PROB_TOL || u > 1.0 + PROB_TOL {
                        out.push(format!("bounds of state {i} lie outside [0, 1]"));
                    }
                    if l > u + PROB_TOL {
                        out.push(format!("lower bound {l} exceeds upper bound {u} at state {i}"));
                    }
                }
                let sum_lower: f64 = lower.iter().sum();
                let sum_upper: f64 = upper.iter().sum();
                if sum_lower > 1.0 + PROB_TOL {
                    out.push(format!("Σ lower > 1 ({sum_lower})"));
                }
                if sum_upper < 1.0 - PROB_TOL {
                    out.push(format!("Σ upper < 1 ({sum_upper})"));
                }
            }
            CredalRow::Vertices(vertices) => {
                if vertices.is_empty() {
                    out.push("vertex list is empty".into());
                }
                for (k, v) in vertices.iter().enumerate() {
                    if v.len() != dim {
                        out.push(format!("vertex {k} has length {}, expected {dim}", v.len()));
                        continue;
                    }
                    if let Some(problem) = pmf_problem(v.probs()) {
                        if problem.contains("sum") {
                            out.push(format!("vertex {k} does not sum to 1 ({problem})"));
                        } else {
                            out.push(format!("vertex {k} is not a pmf ({problem})"));
                        }
                    }
                }
            }
            CredalRow::Constraints { a, b } => {
                if a.len() != b.len() {
                    out.push(format!("A has {} rows but b has {} entries", a.len(), b.len()));
                    return out;
                }
                for (i, row) in a.iter().enumerate() {
                    if row.len() != dim {
                        out.push(format!("constraint {i} has {} coefficients, expected {dim}", row.len()));
                    }
                }
                if !out.is_empty() {
                    return out;
                }
                if a.iter().flatten().chain(b).any(|v| !v.is_finite()) {
                    out.push("constraint coefficients must be finite".into());
                    return out;
                }
                if simplex::find_feasible(dim, a, b).is_none() {
                    out.push("constraints are infeasible".into());
                }
            }
        }
        out
    }

    /// Membership test with tolerance `tol`.
    pub fn contains(&self, p: &Pmf, tol: f64) -> bool {
        let probs = p.probs();
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol || probs.iter().any(|&v| v < -tol) {
            return false;
        }
        match self {
            CredalRow::Intervals { lower, upper } => probs
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&v, (&l, &u))| v >= l - tol && v <= u + tol),
            CredalRow::Constraints { a, b } => a
                .iter()
                .zip(b)
                .all(|(row, &bound)| dot(row, probs) <= bound + tol),
            CredalRow::Vertices(vertices) => {
                // p ∈ conv(V) iff some λ in the simplex has |Vᵀλ − p| ≤ tol.
                let dim = probs.len();
                let mut rows = Vec::with_capacity(2 * dim);
                let mut bounds = Vec::with_capacity(2 * dim);
                for y in 0..dim {
                    let coeffs: Vec<f64> = vertices.iter().map(|v| v[y]).collect();
                    rows.push(coeffs.iter().map(|c| -c).collect());
                    bounds.push(tol - probs[y]);
                    rows.push(coeffs);
                    bounds.push(probs[y] + tol);
                }
                simplex::find_feasible(vertices.len(), &rows, &bounds).is_some()
            }
        }
    }
}

/// One failed invariant, located by the part of the model it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// An imprecise Markov chain with separately specified rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpreciseMarkovChain {
    states: StateSpace,
    initial: CredalRow,
    rows: Vec<CredalRow>,
}

impl ImpreciseMarkovChain {
    /// Builds and validates a model.
    pub fn new(states: StateSpace, initial: CredalRow, rows: Vec<CredalRow>) -> Result<Self> {
        let model = Self::new_unchecked(states, initial, rows);
        let violations = validate_model(&model);
        if violations.is_empty() {
            Ok(model)
        } else {
            Err(Error::InvalidModel(violations))
        }
    }

    /// Assembles a model without validation; see [`validate_model`].
    pub fn new_unchecked(states: StateSpace, initial: CredalRow, rows: Vec<CredalRow>) -> Self {
        ImpreciseMarkovChain { states, initial, rows }
    }

    /// A precise homogeneous chain: every credal set is a singleton.
    pub fn precise(states: StateSpace, initial: Pmf, matrix: Vec<Pmf>) -> Result<Self> {
        let rows = matrix.into_iter().map(CredalRow::singleton).collect();
        Self::new(states, CredalRow::singleton(initial), rows)
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> &CredalRow {
        &self.initial
    }

    pub fn rows(&self) -> &[CredalRow] {
        &self.rows
    }

    pub fn row(&self, state: usize) -> &CredalRow {
        &self.rows[state]
    }
}

/// Lists every invariant violation of `model`; empty iff the model is valid.
pub fn validate_model(model: &ImpreciseMarkovChain) -> Vec<Violation> {
    let dim = model.dim();
    let mut out = Vec::new();
    if model.rows.len() != dim {
        out.push(Violation {
            location: "rows".into(),
            message: format!("{} rows given for {dim} states", model.rows.len()),
        });
    }
    for message in model.initial.violations(dim) {
        out.push(Violation { location: "initial".into(), message });
    }
    for (i, row) in model.rows.iter().enumerate() {
        let location = match model.states.labels().get(i) {
            Some(label) => format!("row {label}"),
            None => format!("row #{i}"),
        };
        for message in row.violations(dim) {
            out.push(Violation { location: location.clone(), message });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_states() -> StateSpace {
        StateSpace::numbered(2).unwrap()
    }

    fn interval(lower: &[f64], upper: &[f64]) -> CredalRow {
        CredalRow::Intervals { lower: lower.to_vec(), upper: upper.to_vec() }
    }

    #[test]
    fn state_space_rejects_duplicates_and_empty() {
        assert!(StateSpace::new(["a", "a"]).is_err());
        assert!(StateSpace::new(Vec::<String>::new()).is_err());
        let s = StateSpace::new(["a", "b"]).unwrap();
        assert_eq!(s.index_of("b"), Some(1));
        assert_eq!(s.index_of("c"), None);
    }

    #[test]
    fn valid_interval_model_has_no_violations() {
        let row = interval(&[0.7, 0.1], &[0.9, 0.3]);
        let m = ImpreciseMarkovChain::new_unchecked(two_states(), row.clone(), vec![row.clone(), row]);
        assert!(validate_model(&m).is_empty());
    }

    #[test]
    fn excessive_lower_mass_is_one_violation() {
        let bad = interval(&[0.6, 0.6], &[0.9, 0.9]);
        let ok = interval(&[0.0, 0.0], &[1.0, 1.0]);
        let m = ImpreciseMarkovChain::new_unchecked(two_states(), ok.clone(), vec![bad, ok]);
        let v = validate_model(&m);
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("Σ lower > 1"));
        assert_eq!(v[0].location, "row s0");
    }

    #[test]
    fn unnormalized_vertex_is_one_violation() {
        let bad = CredalRow::Vertices(vec![Pmf::new_unchecked(vec![0.5, 0.6])]);
        let ok = CredalRow::singleton(Pmf::uniform(2));
        let m = ImpreciseMarkovChain::new_unchecked(two_states(), ok.clone(), vec![ok, bad]);
        let v = validate_model(&m);
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("does not sum to 1"));
    }

    #[test]
    fn infeasible_constraints_and_wrong_row_count_are_reported() {
        let bad = CredalRow::Constraints { a: vec![vec![1.0, 0.0], vec![-1.0, 0.0]], b: vec![0.2, -0.5] };
        let ok = CredalRow::singleton(Pmf::uniform(2));
        let m = ImpreciseMarkovChain::new_unchecked(two_states(), bad, vec![ok]);
        let v = validate_model(&m);
        assert_eq!(v.len(), 2);
        assert!(ImpreciseMarkovChain::new(two_states(), CredalRow::singleton(Pmf::uniform(2)), vec![]).is_err());
    }

    #[test]
    fn expectation_examples() {
        let f = Gamble::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(expectation(&Pmf::new(vec![0.5, 0.5]).unwrap(), &f).unwrap(), 0.5);
        let g = Gamble::new(vec![3.0, 7.0]).unwrap();
        assert_eq!(expectation(&Pmf::new(vec![1.0, 0.0]).unwrap(), &g).unwrap(), 3.0);
        let ones = Gamble::ones(2);
        assert_eq!(expectation(&Pmf::new(vec![0.2, 0.8]).unwrap(), &ones).unwrap(), 1.0);
        assert!(expectation(&Pmf::uniform(3), &ones).is_err());
    }

    #[test]
    fn pmf_and_gamble_validation() {
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::new(vec![0.3, 0.7 + 1e-12]).is_ok());
        assert!(Gamble::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn membership_tests() {
        let row = interval(&[0.7, 0.1], &[0.9, 0.3]);
        assert!(row.contains(&Pmf::new(vec![0.8, 0.2]).unwrap(), 1e-8));
        assert!(!row.contains(&Pmf::new(vec![0.5, 0.5]).unwrap(), 1e-8));
        let hull = CredalRow::Vertices(vec![Pmf::point_mass(3, 0), Pmf::point_mass(3, 1)]);
        assert!(hull.contains(&Pmf::new(vec![0.4, 0.6, 0.0]).unwrap(), 1e-8));
        assert!(!hull.contains(&Pmf::new(vec![0.4, 0.4, 0.2]).unwrap(), 1e-8));
    }

    #[test]
    fn one_state_space_is_allowed() {
        let s = StateSpace::numbered(1).unwrap();
        let m = ImpreciseMarkovChain::precise(s, Pmf::point_mass(1, 0), vec![Pmf::point_mass(1, 0)]);
        assert!(m.is_ok());
    }
}
