//! Random instance generators and independent reference computations shared
//! by the integration suites.
#![allow(dead_code)]

use imprecise_markov::{CredalRow, Gamble, ImpreciseMarkovChain, Pmf, RecursiveSpec, StateSpace, Step};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn e1() -> ImpreciseMarkovChain {
    let rows = vec![
        CredalRow::Intervals { lower: vec![0.7, 0.1], upper: vec![0.9, 0.3] },
        CredalRow::Intervals { lower: vec![0.4, 0.4], upper: vec![0.6, 0.6] },
    ];
    let initial = CredalRow::Intervals { lower: vec![0.5, 0.2], upper: vec![0.8, 0.5] };
    ImpreciseMarkovChain::new(StateSpace::numbered(2).unwrap(), initial, rows).unwrap()
}

pub fn gamble(v: &[f64]) -> Gamble {
    Gamble::new(v.to_vec()).unwrap()
}

pub fn random_probs(rng: &mut TestRng, dim: usize) -> Vec<f64> {
    // Normalized exponentials: uniform on the simplex.
    let raw: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

pub fn random_pmf(rng: &mut TestRng, dim: usize) -> Pmf {
    Pmf::new(random_probs(rng, dim)).unwrap()
}

pub fn random_interval_row(rng: &mut TestRng, dim: usize) -> CredalRow {
    let center = random_probs(rng, dim);
    let lower = center.iter().map(|&c| (c - 0.3 * rng.gen::<f64>()).max(0.0)).collect();
    let upper = center.iter().map(|&c| (c + 0.3 * rng.gen::<f64>()).min(1.0)).collect();
    CredalRow::Intervals { lower, upper }
}

pub fn random_vertex_row(rng: &mut TestRng, dim: usize, max_vertices: usize) -> CredalRow {
    let k = rng.gen_range(1..=max_vertices);
    CredalRow::Vertices((0..k).map(|_| random_pmf(rng, dim)).collect())
}

/// Random half-spaces that all contain a random interior pmf.
pub fn random_constraint_row(rng: &mut TestRng, dim: usize) -> CredalRow {
    let center = random_probs(rng, dim);
    let m = rng.gen_range(1..=dim + 2);
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for _ in 0..m {
        let row: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let at_center: f64 = row.iter().zip(&center).map(|(x, y)| x * y).sum();
        b.push(at_center + 0.2 * rng.gen::<f64>());
        a.push(row);
    }
    CredalRow::Constraints { a, b }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Intervals,
    Vertices,
    Constraints,
    Mixed,
}

pub fn random_row(rng: &mut TestRng, dim: usize, kind: RowKind) -> CredalRow {
    let kind = match kind {
        RowKind::Mixed => [RowKind::Intervals, RowKind::Vertices, RowKind::Constraints][rng.gen_range(0..3)],
        k => k,
    };
    match kind {
        RowKind::Intervals => random_interval_row(rng, dim),
        RowKind::Vertices => random_vertex_row(rng, dim, 3),
        _ => random_constraint_row(rng, dim),
    }
}

pub fn random_model(rng: &mut TestRng, dim: usize, kind: RowKind) -> ImpreciseMarkovChain {
    let rows = (0..dim).map(|_| random_row(rng, dim, kind)).collect();
    let initial = random_row(rng, dim, kind);
    ImpreciseMarkovChain::new(StateSpace::numbered(dim).unwrap(), initial, rows).unwrap()
}

/// A precise chain: transition matrix rows and initial distribution.
pub fn random_precise(rng: &mut TestRng, dim: usize) -> (ImpreciseMarkovChain, Vec<Vec<f64>>, Vec<f64>) {
    let matrix: Vec<Vec<f64>> = (0..dim).map(|_| random_probs(rng, dim)).collect();
    let initial = random_probs(rng, dim);
    let model = ImpreciseMarkovChain::precise(
        StateSpace::numbered(dim).unwrap(),
        Pmf::new(initial.clone()).unwrap(),
        matrix.iter().map(|r| Pmf::new(r.clone()).unwrap()).collect(),
    )
    .unwrap();
    (model, matrix, initial)
}

pub fn random_gamble(rng: &mut TestRng, dim: usize, scale: f64) -> Gamble {
    Gamble::from_fn(dim, |_| rng.gen_range(-scale..scale))
}

/// Random spec of horizon `n` whose multipliers change sign across states.
pub fn random_spec(rng: &mut TestRng, dim: usize, n: usize) -> RecursiveSpec {
    let g0 = random_gamble(rng, dim, 2.0);
    let steps = (1..n)
        .map(|_| Step { h: random_gamble(rng, dim, 1.5), g: random_gamble(rng, dim, 1.0) })
        .collect();
    RecursiveSpec::new(g0, steps).unwrap()
}

/// A point of the row by rejection from the uniform simplex (intervals and
/// constraints) or a random convex combination (vertices).
pub fn sample_in_row(rng: &mut TestRng, row: &CredalRow, dim: usize) -> Option<Vec<f64>> {
    match row {
        CredalRow::Vertices(vs) => {
            let w = random_probs(rng, vs.len());
            Some((0..dim).map(|y| vs.iter().zip(&w).map(|(v, wi)| wi * v[y]).sum()).collect())
        }
        _ => (0..20_000).find_map(|_| {
            let p = random_probs(rng, dim);
            row.contains(&Pmf::new_unchecked(p.clone()), 0.0).then_some(p)
        }),
    }
}

/// Every path `x₁:ₙ` with `x₁ = start`, in lexicographic order.
pub fn paths_from(start: usize, dim: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![start]];
    for _ in 1..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..dim).map(move |y| {
                    let mut q = p.clone();
                    q.push(y);
                    q
                })
            })
            .collect();
    }
    out
}

/// `E[F(X₁:ₙ) | X₁ = start]` for a precise homogeneous chain, summing over paths.
pub fn precise_path_expectation(matrix: &[Vec<f64>], start: usize, n: usize, f: impl Fn(&[usize]) -> f64) -> f64 {
    paths_from(start, matrix.len(), n)
        .iter()
        .map(|p| p.windows(2).map(|w| matrix[w[0]][w[1]]).product::<f64>() * f(p))
        .sum()
}

/// `Tᵏ f` by repeated matrix-vector products.
pub fn matrix_power_apply(matrix: &[Vec<f64>], f: &[f64], k: usize) -> Vec<f64> {
    let mut v = f.to_vec();
    for _ in 0..k {
        v = matrix.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
    }
    v
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Like [`random_spec`], but every multiplier takes both signs.
pub fn random_signed_spec(rng: &mut TestRng, dim: usize, n: usize) -> RecursiveSpec {
    let g0 = random_gamble(rng, dim, 2.0);
    let steps = (1..n)
        .map(|_| {
            let mut h: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..1.5)).collect();
            let negative = rng.gen_range(0..dim);
            h[negative] = -h[negative];
            if dim > 2 && rng.gen::<bool>() {
                h[(negative + 1) % dim] *= -1.0;
            }
            Step { h: Gamble::new(h).unwrap(), g: random_gamble(rng, dim, 1.0) }
        })
        .collect();
    RecursiveSpec::new(g0, steps).unwrap()
}
