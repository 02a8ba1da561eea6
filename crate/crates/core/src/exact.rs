//! Exact small-N analysis of the chains: dense kernels, stationarity,
//! bottleneck ratio, spectral gap, and the closed-form mixing bounds.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigUint;
use serde::Serialize;

use crate::chains::{ChainKind, ChainSpec};
use crate::enumerate::{count_space, generate_all, generate_all_capped, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::lattice::{build_hasse, degree, max_total_degree};
use crate::shape::TreeShape;

/// Largest `N` for exhaustive bottleneck search (`2^G(5)` subsets).
pub const BOTTLENECK_CAP: usize = 5;

/// A kernel over all shapes with `N` tips, with its stationary law.
#[derive(Debug, Clone)]
pub struct ExactChain {
    pub spec: ChainSpec,
    pub shapes: Vec<TreeShape>,
    pub kernel: DMatrix<f64>,
    pub pi: DVector<f64>,
}

/// Dense transition matrix over `generate_all(N)` (in that order).
pub fn exact_kernel(spec: &ChainSpec) -> Result<ExactChain> {
    let g = build_hasse(spec.n)?;
    let shapes = g.vertices().to_vec();
    let size = shapes.len();
    let deg: Vec<f64> = shapes.iter().map(|s| degree(s) as f64).collect();
    let mut p = DMatrix::<f64>::zeros(size, size);
    for x in 0..size {
        for y in g.neighbors(x) {
            p[(x, y)] = match spec.kind {
                ChainKind::Symmetric => 1.0 / spec.m_n().expect("symmetric") as f64,
                ChainKind::RandomWalk => 1.0 / deg[x],
                ChainKind::MetropolisUniform => (1.0 / deg[x]).min(1.0 / deg[y]),
            };
        }
        let off: f64 = p.row(x).sum();
        p[(x, x)] = 1.0 - off;
    }
    if spec.lazy {
        p = (DMatrix::identity(size, size) + p) * 0.5;
    }
    let weights: Vec<f64> = shapes.iter().map(|s| spec.stationary_weight(s)).collect();
    let total: f64 = weights.iter().sum();
    let pi = DVector::from_iterator(size, weights.into_iter().map(|w| w / total));
    Ok(ExactChain {
        spec: spec.clone(),
        shapes,
        kernel: p,
        pi,
    })
}

impl ExactChain {
    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    /// `max |pi P - pi|`.
    pub fn stationarity_residual(&self) -> f64 {
        let pp = self.kernel.transpose() * &self.pi;
        (pp - &self.pi).amax()
    }

    /// `max |row sum - 1|`.
    pub fn row_sum_residual(&self) -> f64 {
        (0..self.len())
            .map(|i| (self.kernel.row(i).sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max |pi(x) P(x,y) - pi(y) P(y,x)|`.
    pub fn detailed_balance_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in 0..self.len() {
            for y in 0..self.len() {
                let flow = self.pi[x] * self.kernel[(x, y)] - self.pi[y] * self.kernel[(y, x)];
                worst = worst.max(flow.abs());
            }
        }
        worst
    }

    /// Whether every state reaches every other.
    pub fn is_irreducible(&self) -> bool {
        let n = self.len();
        let mut reach =
            DMatrix::<f64>::from_fn(n, n, |i, j| if i == j || self.kernel[(i, j)] > 0.0 { 1.0 } else { 0.0 });
        for _ in 0..n.next_power_of_two().trailing_zeros() + 1 {
            reach = (&reach * &reach).map(|v| if v > 0.0 { 1.0 } else { 0.0 });
        }
        reach.iter().all(|&v| v > 0.0)
    }
}

/// Minimal bottleneck ratio and a minimising set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bottleneck {
    pub phi_star: f64,
    /// Smallest (then first in subset order) minimiser.
    pub argmin: Vec<TreeShape>,
}

/// `Phi* = min Q(S, S^c)/pi(S)` over nonempty `S` with `pi(S) <= 1/2`, by
/// enumerating every subset. Needs `N <= 5`.
pub fn exact_bottleneck(chain: &ExactChain) -> Result<Bottleneck> {
    let n = chain.spec.n;
    if n > BOTTLENECK_CAP {
        return Err(Error::CapExceeded { n, cap: BOTTLENECK_CAP });
    }
    let size = chain.len();
    let mut best: Option<(f64, u32, u64)> = None;
    for mask in 1u64..(1u64 << size) {
        let inside = |x: usize| mask >> x & 1 == 1;
        let mass: f64 = (0..size).filter(|&x| inside(x)).map(|x| chain.pi[x]).sum();
        if mass > 0.5 + 1e-12 {
            continue;
        }
        let mut flow = 0.0;
        for x in (0..size).filter(|&x| inside(x)) {
            for y in (0..size).filter(|&y| !inside(y)) {
                flow += chain.pi[x] * chain.kernel[(x, y)];
            }
        }
        let phi = flow / mass;
        let card = mask.count_ones();
        let better = match best {
            None => true,
            Some((b, c, _)) => phi < b - 1e-12 || ((phi - b).abs() <= 1e-12 && card < c),
        };
        if better {
            best = Some((phi, card, mask));
        }
    }
    let (phi_star, _, mask) = best.ok_or_else(|| Error::domain("no subset with pi(S) <= 1/2"))?;
    let argmin = (0..size)
        .filter(|&x| mask >> x & 1 == 1)
        .map(|x| chain.shapes[x].clone())
        .collect();
    Ok(Bottleneck { phi_star, argmin })
}

/// Spectrum summary of a reversible kernel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gap {
    /// Eigenvalues in decreasing order.
    pub eigenvalues: Vec<f64>,
    /// `1 - lambda_2`.
    pub gamma: f64,
    /// `1 - max |lambda|` over eigenvalues other than the leading one.
    pub gamma_star: f64,
    /// `1 / gamma_star`.
    pub t_rel: f64,
}

/// Eigen-decomposes `D^{1/2} P D^{-1/2}` with `D = diag(pi)`, which is
/// symmetric for a reversible kernel.
pub fn exact_gap(chain: &ExactChain) -> Gap {
    let size = chain.len();
    let sq: Vec<f64> = chain.pi.iter().map(|v| v.sqrt()).collect();
    let a = DMatrix::from_fn(size, size, |i, j| sq[i] * chain.kernel[(i, j)] / sq[j]);
    let sym = (&a + a.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    let second = eigenvalues.get(1).copied().unwrap_or(0.0);
    let star = eigenvalues.iter().skip(1).map(|v| v.abs()).fold(0.0, f64::max);
    let gamma_star = 1.0 - star;
    Gap {
        gamma: 1.0 - second,
        gamma_star,
        t_rel: 1.0 / gamma_star,
        eigenvalues,
    }
}

/// Natural log of a big integer.
pub fn ln_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_string().parse::<f64>().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_string().parse::<f64>().expect("finite");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Closed-form mixing-time bounds plus, for small `N`, exact quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub m_n: u128,
    /// `G(N)` in decimal.
    pub g_n: String,
    /// `M_N / 4`.
    pub symmetric_lower: f64,
    /// `8 M_N^2 ln(4 G(N))`, for the lazy symmetric chain.
    pub symmetric_upper: f64,
    /// `2(N-3)/2`.
    pub random_walk_lower: f64,
    /// `8 ln(4 M_N G(N))`, for the lazy random walk.
    pub random_walk_upper: f64,
    pub exact: Option<ExactReport>,
}

/// Exact diagnostics of the lazy kernels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactReport {
    pub diameter: usize,
    pub symmetric_gap: f64,
    pub symmetric_t_rel: f64,
    pub random_walk_gap: f64,
    pub random_walk_t_rel: f64,
    pub symmetric_phi_star: Option<f64>,
    pub random_walk_phi_star: Option<f64>,
}

/// Evaluates the four bound formulas (`N >= 4`).
pub fn mixing_bounds(n: usize) -> Result<BoundReport> {
    let m_n = max_total_degree(n)?;
    let g = count_space(n).value;
    let ln4g = ln_big(&(&g * 4u32));
    let m = m_n as f64;
    Ok(BoundReport {
        n,
        m_n,
        g_n: g.to_string(),
        symmetric_lower: m / 4.0,
        symmetric_upper: 8.0 * m * m * ln4g,
        random_walk_lower: (2.0 * (n as f64 - 3.0)) / 2.0,
        random_walk_upper: 8.0 * (ln4g + m.ln()),
        exact: None,
    })
}

/// [`mixing_bounds`] plus exact diameter, gaps and (for `N <= 5`)
/// bottleneck ratios of the lazy chains. Needs `N <= 9`.
pub fn mixing_bounds_exact(n: usize) -> Result<BoundReport> {
    generate_all_capped(n, None, DEFAULT_CAP)?;
    let mut report = mixing_bounds(n)?;
    let sym = exact_kernel(&ChainSpec::new(ChainKind::Symmetric, true, n)?)?;
    let rw = exact_kernel(&ChainSpec::new(ChainKind::RandomWalk, true, n)?)?;
    let (gs, gr) = (exact_gap(&sym), exact_gap(&rw));
    let small = n <= BOTTLENECK_CAP;
    report.exact = Some(ExactReport {
        diameter: build_hasse(n)?.diameter(),
        symmetric_gap: gs.gamma,
        symmetric_t_rel: 1.0 / gs.gamma,
        random_walk_gap: gr.gamma,
        random_walk_t_rel: 1.0 / gr.gamma,
        symmetric_phi_star: if small {
            Some(exact_bottleneck(&sym)?.phi_star)
        } else {
            None
        },
        random_walk_phi_star: if small {
            Some(exact_bottleneck(&rw)?.phi_star)
        } else {
            None
        },
    });
    Ok(report)
}

/// Sum of degrees over every shape with `N` tips (`N <= 9`).
pub fn total_degree(n: usize) -> Result<u128> {
    Ok(generate_all(n, None)?.iter().map(degree).sum())
}
