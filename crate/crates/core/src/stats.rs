//! Per-shape statistics and sample summaries.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::shape::TreeShape;

/// Cherry sizes reported by default.
pub const DEFAULT_CHERRY_SIZES: RangeInclusive<usize> = 2..=6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeStats {
    pub n: usize,
    /// Internal nodes.
    pub k: usize,
    /// Largest block size (children of one node).
    pub max_block: usize,
    /// Mean block size, always `(N + K - 1) / K`.
    pub avg_block: f64,
    /// `m -> number of nodes whose children are exactly m leaves`.
    pub cherries: BTreeMap<usize, usize>,
}

impl ShapeStats {
    pub fn cherry(&self, m: usize) -> usize {
        self.cherries.get(&m).copied().unwrap_or(0)
    }
}

pub fn shape_stats(s: &TreeShape) -> ShapeStats {
    let blocks = s.block_sizes();
    let mut cherries = BTreeMap::new();
    for (&k, &l) in s.internal_children().iter().zip(s.l()) {
        if k == 0 {
            *cherries.entry(l).or_insert(0) += 1;
        }
    }
    ShapeStats {
        n: s.n_tips(),
        k: s.n_internal(),
        max_block: blocks.iter().copied().max().expect("K >= 1"),
        avg_block: blocks.iter().sum::<usize>() as f64 / blocks.len() as f64,
        cherries,
    }
}

/// Means and lower medians of a sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean_k: f64,
    pub median_k: usize,
    pub mean_max_block: f64,
    pub median_max_block: usize,
    pub mean_avg_block: f64,
    pub median_avg_block: f64,
    /// Mean number of m-tip cherries.
    pub cherry_mean: BTreeMap<usize, f64>,
    /// Mean of (m-tip cherries / N).
    pub cherry_scaled_mean: BTreeMap<usize, f64>,
}

fn lower_median<T: Copy>(mut v: Vec<T>, cmp: impl Fn(&T, &T) -> std::cmp::Ordering) -> T {
    v.sort_by(cmp);
    v[(v.len() - 1) / 2]
}

/// Summarises a nonempty sample, reporting cherries for `sizes`.
pub fn aggregate<'a, I>(samples: I, sizes: RangeInclusive<usize>) -> Result<Summary>
where
    I: IntoIterator<Item = &'a ShapeStats>,
{
    let samples: Vec<&ShapeStats> = samples.into_iter().collect();
    if samples.is_empty() {
        return Err(Error::domain("cannot summarise an empty sample"));
    }
    let count = samples.len();
    let c = count as f64;
    let mean = |f: &dyn Fn(&ShapeStats) -> f64| samples.iter().map(|s| f(s)).sum::<f64>() / c;
    let mut cherry_mean = BTreeMap::new();
    let mut cherry_scaled_mean = BTreeMap::new();
    for m in sizes {
        cherry_mean.insert(m, mean(&|s| s.cherry(m) as f64));
        cherry_scaled_mean.insert(m, mean(&|s| s.cherry(m) as f64 / s.n as f64));
    }
    Ok(Summary {
        count,
        mean_k: mean(&|s| s.k as f64),
        median_k: lower_median(samples.iter().map(|s| s.k).collect(), Ord::cmp),
        mean_max_block: mean(&|s| s.max_block as f64),
        median_max_block: lower_median(samples.iter().map(|s| s.max_block).collect(), Ord::cmp),
        mean_avg_block: mean(&|s| s.avg_block),
        median_avg_block: lower_median(samples.iter().map(|s| s.avg_block).collect(), f64::total_cmp),
        cherry_mean,
        cherry_scaled_mean,
    })
}
