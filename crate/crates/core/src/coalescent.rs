//! Beta-measure Lambda-coalescent topologies (no branch lengths).

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::shape::TreeShape;

/// The measure `Lambda = Beta(a, b)` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaBeta {
    a: f64,
    b: f64,
}

impl LambdaBeta {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::domain(format!(
                "Beta parameters must be positive and finite, got ({a}, {b})"
            )));
        }
        Ok(LambdaBeta { a, b })
    }

    /// Bolthausen-Sznitman: the uniform measure `Beta(1, 1)`.
    pub fn uniform() -> Self {
        LambdaBeta { a: 1.0, b: 1.0 }
    }

    /// `Beta(2 - alpha, alpha)`. `alpha = 2` would give `a = 0` and is
    /// refused; `alpha = 1` is `Beta(1, 1)`.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(1.0..2.0).contains(&alpha) {
            return Err(Error::domain(format!("alpha must lie in [1, 2), got {alpha}")));
        }
        LambdaBeta::new(2.0 - alpha, alpha)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

fn ln_rate(b: usize, k: usize, m: &LambdaBeta) -> f64 {
    ln_beta(k as f64 - 2.0 + m.a, (b - k) as f64 + m.b) - ln_beta(m.a, m.b)
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `lambda_{b,k} = int x^{k-2} (1-x)^{b-k} Lambda(dx)`
/// `= B(k-2+a, b-k+b') / B(a, b')`.
pub fn merger_rate(b: usize, k: usize, m: &LambdaBeta) -> Result<f64> {
    if k < 2 || k > b {
        return Err(Error::domain(format!("merger size k={k} outside 2..={b}")));
    }
    Ok(ln_rate(b, k, m).exp())
}

/// Probability that the next merger among `b` lineages has size `k`, for
/// `k = 2..=b` (index 0 is `k = 2`).
pub fn merger_distribution(b: usize, m: &LambdaBeta) -> Result<Vec<f64>> {
    if b < 2 {
        return Err(Error::domain(format!("need at least two lineages, got {b}")));
    }
    let logs: Vec<f64> = (2..=b).map(|k| ln_choose(b, k) + ln_rate(b, k, m)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|v| (v - top).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|v| v / total).collect())
}

/// Reusable sampler with the merger-size laws for every lineage count
/// precomputed.
#[derive(Debug, Clone)]
pub struct CoalescentSampler {
    n: usize,
    measure: LambdaBeta,
    // laws[b] for b = 2..=n
    laws: Vec<Option<WeightedIndex<f64>>>,
}

impl CoalescentSampler {
    pub fn new(n: usize, measure: LambdaBeta) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("need N >= 2 tips, got {n}")));
        }
        let mut laws = vec![None, None];
        for b in 2..=n {
            let p = merger_distribution(b, &measure)?;
            laws.push(Some(WeightedIndex::new(p).map_err(|e| Error::domain(e.to_string()))?));
        }
        Ok(CoalescentSampler { n, measure, laws })
    }

    pub fn measure(&self) -> LambdaBeta {
        self.measure
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TreeShape {
        self.sample_history(rng).0
    }

    /// Runs mergers backward in time until one lineage is left. The last
    /// merger is the root (rank 1), the first has rank `K`. Also returns the
    /// merger sizes in event order.
    pub fn sample_history<R: Rng + ?Sized>(&self, rng: &mut R) -> (TreeShape, Vec<usize>) {
        // None = tip, Some(e) = the node created by event e
        let mut lineages: Vec<Option<usize>> = vec![None; self.n];
        let mut parent_event: Vec<usize> = Vec::new();
        let mut leaves: Vec<usize> = Vec::new();
        let mut sizes = Vec::new();
        while lineages.len() > 1 {
            let b = lineages.len();
            let k = self.laws[b].as_ref().expect("b >= 2").sample(rng) + 2;
            let mut picked: Vec<usize> = sample(rng, b, k).into_vec();
            picked.sort_unstable_by(|x, y| y.cmp(x));
            sizes.push(k);
            let event = leaves.len();
            let mut tips = 0;
            for i in picked {
                match lineages.swap_remove(i) {
                    None => tips += 1,
                    Some(child) => parent_event[child] = event,
                }
            }
            leaves.push(tips);
            parent_event.push(usize::MAX);
            lineages.push(Some(event));
        }
        let k = leaves.len();
        let rank = |e: usize| k - e;
        let mut t = vec![0; k];
        let mut l = vec![0; k];
        for e in 0..k {
            let r = rank(e);
            l[r - 1] = leaves[e];
            t[r - 1] = if e + 1 == k { 0 } else { rank(parent_event[e]) };
        }
        (TreeShape::new(t, l).expect("coalescent output is a valid shape"), sizes)
    }
}

/// One topology with `n` tips under `measure`.
pub fn sample_topology<R: Rng + ?Sized>(n: usize, measure: &LambdaBeta, rng: &mut R) -> Result<TreeShape> {
    Ok(CoalescentSampler::new(n, *measure)?.sample(rng))
}
