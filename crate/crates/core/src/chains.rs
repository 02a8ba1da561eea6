//! Markov chains on the covering graph.
//!
//! Per-chain randomness comes from ChaCha8 seeded with the run seed and
//! switched to stream `chain index`, so results do not depend on thread
//! scheduling.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::lattice::{degree, max_total_degree, neighbor_at};
use crate::shape::TreeShape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    /// `P(x, y) = 1/M_N` between neighbors; uniform stationary law.
    Symmetric,
    /// `P(x, y) = 1/deg(x)`; stationary law proportional to degree.
    RandomWalk,
    /// Random-walk proposal accepted with `min(1, deg(x)/deg(y))`; uniform
    /// stationary law.
    MetropolisUniform,
}

/// A kernel: its kind, the lazy flag (hold with probability 1/2 first) and
/// the tip count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpec {
    pub kind: ChainKind,
    pub lazy: bool,
    pub n: usize,
    m_n: Option<u128>,
}

impl ChainSpec {
    /// The symmetric kind needs `N >= 4` so that `M_N` is defined.
    pub fn new(kind: ChainKind, lazy: bool, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("chains need N >= 2, got {n}")));
        }
        let m_n = match kind {
            ChainKind::Symmetric => Some(max_total_degree(n)?),
            _ => None,
        };
        Ok(ChainSpec { kind, lazy, n, m_n })
    }

    /// The same kernel with the lazy flag set to `lazy`.
    pub fn with_lazy(&self, lazy: bool) -> Self {
        ChainSpec { lazy, ..self.clone() }
    }

    /// `M_N` for the symmetric kind.
    pub fn m_n(&self) -> Option<u128> {
        self.m_n
    }

    /// The law the kernel leaves invariant, as unnormalised weights.
    pub fn stationary_weight(&self, s: &TreeShape) -> f64 {
        match self.kind {
            ChainKind::RandomWalk => degree(s) as f64,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainState {
    pub current: TreeShape,
    pub step: u64,
    pub chain: u64,
    /// Metropolis proposals made and accepted.
    pub proposed: u64,
    pub accepted: u64,
}

impl ChainState {
    pub fn new(current: TreeShape, chain: u64) -> Self {
        ChainState {
            current,
            step: 0,
            chain,
            proposed: 0,
            accepted: 0,
        }
    }

    pub fn acceptance_rate(&self) -> Option<f64> {
        (self.proposed > 0).then(|| self.accepted as f64 / self.proposed as f64)
    }
}

/// The generator for chain `chain` of a run seeded with `seed`.
pub fn chain_rng(seed: u64, chain: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain);
    rng
}

/// Draws `u` uniformly from `0..M_N` and moves to the `u`-th neighbor when
/// `u < deg`, otherwise stays.
pub fn step_symmetric<R: Rng + ?Sized>(s: &TreeShape, m_n: u128, rng: &mut R) -> TreeShape {
    let u = rng.gen_range(0..m_n);
    if u < degree(s) {
        neighbor_at(s, u)
    } else {
        s.clone()
    }
}

/// Uniform neighbor. A shape with no neighbors (only `N = 2`) stays put.
pub fn step_random_walk<R: Rng + ?Sized>(s: &TreeShape, rng: &mut R) -> TreeShape {
    let d = degree(s);
    if d == 0 {
        return s.clone();
    }
    neighbor_at(s, rng.gen_range(0..d))
}

/// One Metropolis step targeting the uniform law. Returns the next state and
/// whether the proposal was accepted.
pub fn step_mh_uniform<R: Rng + ?Sized>(s: &TreeShape, rng: &mut R) -> (TreeShape, bool) {
    let d = degree(s);
    if d == 0 {
        return (s.clone(), false);
    }
    let proposal = neighbor_at(s, rng.gen_range(0..d));
    let dp = degree(&proposal);
    if dp <= d || rng.gen::<f64>() < d as f64 / dp as f64 {
        (proposal, true)
    } else {
        (s.clone(), false)
    }
}

/// Advances `state` by one step of `spec`.
pub fn step<R: Rng + ?Sized>(spec: &ChainSpec, state: &mut ChainState, rng: &mut R) {
    state.step += 1;
    if spec.lazy && rng.gen::<bool>() {
        return;
    }
    state.current = match spec.kind {
        ChainKind::Symmetric => step_symmetric(&state.current, spec.m_n.expect("set for symmetric"), rng),
        ChainKind::RandomWalk => step_random_walk(&state.current, rng),
        ChainKind::MetropolisUniform => {
            let (next, accepted) = step_mh_uniform(&state.current, rng);
            state.proposed += 1;
            state.accepted += u64::from(accepted);
            next
        }
    };
}

/// Random valid shape with `k` internal nodes: draw `k - 1` distinct
/// diagonal values from `2..N-1`, append `N`, and fill every column downward
/// by decrements of one, floored at zero.
pub fn semi_random_init<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<TreeShape> {
    if n < 2 || k < 1 || k >= n {
        return Err(Error::domain(format!(
            "semi-random init needs 1 <= K <= N-1, got N={n}, K={k}"
        )));
    }
    let mut diag: Vec<usize> = sample(rng, n - 2, k - 1).into_iter().map(|v| v + 2).collect();
    diag.sort_unstable();
    diag.push(n);
    let rows: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..=i).map(|j| diag[j].saturating_sub(i - j)).collect())
        .collect();
    FMatrix::from_lower(&rows)?.to_shape()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Init {
    /// Chain `c` starts from a semi-random shape with `(c mod (N-1)) + 1`
    /// internal nodes.
    SemiRandom,
    Given(TreeShape),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub n_chains: usize,
    pub n_steps: u64,
    /// Record the state after steps `thin, 2 thin, ...`.
    pub thin: u64,
    pub init: Init,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainOutput {
    pub chain: u64,
    pub start: TreeShape,
    /// `(step, shape)` pairs.
    pub samples: Vec<(u64, TreeShape)>,
    pub proposed: u64,
    pub accepted: u64,
}

impl ChainOutput {
    pub fn acceptance_rate(&self) -> Option<f64> {
        (self.proposed > 0).then(|| self.accepted as f64 / self.proposed as f64)
    }
}

/// Runs one chain.
pub fn run_chain(spec: &ChainSpec, config: &RunConfig, chain: u64) -> Result<ChainOutput> {
    let mut rng = chain_rng(config.seed, chain);
    let start = match &config.init {
        Init::SemiRandom => {
            let k = (chain as usize % (spec.n - 1)) + 1;
            semi_random_init(spec.n, k, &mut rng)?
        }
        Init::Given(s) => s.clone(),
    };
    let thin = config.thin.max(1);
    let mut state = ChainState::new(start.clone(), chain);
    let mut samples = Vec::with_capacity((config.n_steps / thin) as usize);
    for _ in 0..config.n_steps {
        step(spec, &mut state, &mut rng);
        if state.step.is_multiple_of(thin) {
            samples.push((state.step, state.current.clone()));
        }
    }
    Ok(ChainOutput {
        chain,
        start,
        samples,
        proposed: state.proposed,
        accepted: state.accepted,
    })
}

/// Runs `n_chains` independent chains in parallel; output is in chain
/// order.
pub fn run_chains(spec: &ChainSpec, config: &RunConfig) -> Result<Vec<ChainOutput>> {
    if let Init::Given(s) = &config.init {
        if s.n_tips() != spec.n {
            return Err(Error::TipCountMismatch(s.n_tips(), spec.n));
        }
    }
    (0..config.n_chains as u64)
        .into_par_iter()
        .map(|c| run_chain(spec, config, c))
        .collect()
}

/// Pools samples of all chains in chain order.
pub fn pooled(outputs: &[ChainOutput]) -> impl Iterator<Item = &TreeShape> {
    outputs.iter().flat_map(|o| o.samples.iter().map(|(_, s)| s))
}

/// Accepted over proposed across chains.
pub fn overall_acceptance(outputs: &[ChainOutput]) -> Option<f64> {
    let p: u64 = outputs.iter().map(|o| o.proposed).sum();
    let a: u64 = outputs.iter().map(|o| o.accepted).sum();
    (p > 0).then(|| a as f64 / p as f64)
}
