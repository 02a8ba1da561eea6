//! Exact counting and exhaustive generation of ranked tree shapes.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::shape::{child_counts, TreeShape};

/// Default size cap for exhaustive generation (`G(9) = 6092` shapes).
pub const DEFAULT_CAP: usize = 9;

/// Number of internal nodes that appear zero times and exactly once in
/// `t_2..t_K`.
pub fn k0_k1(t: &[usize]) -> (usize, usize) {
    let counts = child_counts(t);
    let k0 = counts.iter().filter(|&&c| c == 0).count();
    let k1 = counts.iter().filter(|&&c| c == 1).count();
    (k0, k1)
}

/// All `(k0, k1)` pairs realised by some parent vector with `K` internal
/// nodes, in increasing order.
pub fn valid_pairs(k: usize) -> Result<Vec<(usize, usize)>> {
    if k < 2 {
        return Err(Error::domain(format!("valid_pairs needs K >= 2, got {k}")));
    }
    if k == 2 {
        return Ok(vec![(1, 1)]);
    }
    let mut pairs = vec![(1, k - 1), (k - 1, 0)];
    for k0 in 2..=k - 2 {
        let lo = (k as i64 - 2 * k0 as i64 + 1).max(0) as usize;
        for k1 in lo..=k - 1 - k0 {
            pairs.push((k0, k1));
        }
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// `A_K(k0, k1)`: the number of parent vectors `t` of length `K` with the
/// given zero/one-occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTable {
    k: usize,
    entries: BTreeMap<(usize, usize), BigUint>,
}

impl PairTable {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Zero outside the valid pair set.
    pub fn get(&self, k0: usize, k1: usize) -> BigUint {
        self.entries.get(&(k0, k1)).cloned().unwrap_or_default()
    }

    /// Entries in increasing `(k0, k1)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &BigUint)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `B_K(k0) = sum over k1 of A_K(k0, k1)` for `k0 = 1..K-1`.
    pub fn row_sums(&self) -> Vec<BigUint> {
        let mut sums = vec![BigUint::zero(); self.k - 1];
        for (&(k0, _), v) in &self.entries {
            sums[k0 - 1] += v;
        }
        sums
    }

    /// Applies the three-term recursion to get `A_{K+1}`.
    fn next(&self) -> PairTable {
        let k = self.k + 1;
        let mut entries = BTreeMap::new();
        for (k0, k1) in valid_pairs(k).expect("k >= 3") {
            let mut v = BigUint::zero();
            if k0 >= 1 {
                // new node hangs off a node that already had >= 2 children
                v += self.get(k0 - 1, k1) * BigUint::from(k - k0 - k1);
                // new node hangs off a node with exactly one child
                v += self.get(k0 - 1, k1 + 1) * BigUint::from(k1 + 1);
            }
            if k1 >= 1 {
                // new node hangs off a childless node
                v += self.get(k0, k1 - 1) * BigUint::from(k0);
            }
            entries.insert((k0, k1), v);
        }
        PairTable { k, entries }
    }
}

/// `A_K` for one `K >= 2`.
pub fn pair_table(k: usize) -> Result<PairTable> {
    if k < 2 {
        return Err(Error::domain(format!("pair_table needs K >= 2, got {k}")));
    }
    Ok(pair_tables(k).pop().expect("nonempty"))
}

/// `A_2, ..., A_kmax` (empty when `kmax < 2`).
pub fn pair_tables(kmax: usize) -> Vec<PairTable> {
    let mut out = Vec::new();
    if kmax < 2 {
        return out;
    }
    let mut table = PairTable {
        k: 2,
        entries: BTreeMap::from([((1, 1), BigUint::one())]),
    };
    while table.k < kmax {
        let next = table.next();
        out.push(std::mem::replace(&mut table, next));
    }
    out.push(table);
    out
}

/// Binomial coefficient with `C(n, k) = 0` whenever `n < 0`, `k < 0` or
/// `k > n`.
pub fn binomial(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Eulerian number: permutations of `n` with exactly `m` ascents.
pub fn eulerian(n: usize, m: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for len in 1..=n {
        let mut next = vec![BigUint::zero(); len];
        for j in 0..len {
            if j < row.len() {
                next[j] += &row[j] * BigUint::from(j + 1);
            }
            if j >= 1 && j - 1 < row.len() {
                next[j] += &row[j - 1] * BigUint::from(len - j);
            }
        }
        row = next;
    }
    row.get(m).cloned().unwrap_or_default()
}

/// A shape count. `k` is `None` for whole-space totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub n: usize,
    pub k: Option<usize>,
    pub value: BigUint,
    /// False when `(N, K)` lies outside `N >= 2, 1 <= K <= N - 1`; the
    /// value is then 0.
    pub in_range: bool,
}

fn g_from_table(n: usize, table: &PairTable) -> BigUint {
    let k = table.k() as i64;
    let n = n as i64;
    table
        .iter()
        .map(|(&(k0, k1), a)| a * binomial(n - 2 * k0 as i64 - k1 as i64 + k - 1, k - 1))
        .sum()
}

/// `G(N, K)`: shapes with `N` tips and `K` internal nodes.
pub fn count_shapes(n: usize, k: usize) -> CountResult {
    let mut res = CountResult {
        n,
        k: Some(k),
        value: BigUint::zero(),
        in_range: n >= 2 && k >= 1 && k < n,
    };
    if !res.in_range {
        return res;
    }
    res.value = if k == 1 {
        BigUint::one()
    } else {
        g_from_table(n, &pair_table(k).expect("k >= 2"))
    };
    res
}

/// `G(N, 1), ..., G(N, N-1)`.
pub fn count_row(n: usize) -> Vec<BigUint> {
    if n < 2 {
        return Vec::new();
    }
    let mut row = vec![BigUint::one()];
    row.extend(pair_tables(n - 1).iter().map(|t| g_from_table(n, t)));
    row
}

/// `G(N)`: all shapes with `N` tips.
pub fn count_space(n: usize) -> CountResult {
    CountResult {
        n,
        k: None,
        value: count_row(n).into_iter().sum(),
        in_range: n >= 2,
    }
}

fn stirling2_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for m in 1..=n {
        let mut next = vec![BigUint::zero(); m + 1];
        for k in 1..=m {
            if k < row.len() {
                next[k] += &row[k] * BigUint::from(k);
            }
            next[k] += &row[k - 1];
        }
        row = next;
    }
    row
}

/// Ranked, labeled multifurcating trees: `f(N) = sum_{k<N} S(N,k) f(k)`,
/// `f(1) = 1`.
pub fn count_labeled_ranked(n: usize) -> BigUint {
    if n <= 1 {
        return BigUint::one();
    }
    let mut f = vec![BigUint::zero(), BigUint::one()];
    for m in 2..=n {
        let s = stirling2_row(m);
        let v = (1..m).map(|k| &s[k] * &f[k]).sum();
        f.push(v);
    }
    f.pop().expect("nonempty")
}

/// Ranked, labeled binary trees: `N!(N-1)!/2^(N-1)`.
pub fn count_labeled_binary(n: usize) -> BigUint {
    if n <= 1 {
        return BigUint::one();
    }
    let fact = |m: usize| (1..=m).fold(BigUint::one(), |acc, i| acc * BigUint::from(i));
    (fact(n) * fact(n - 1)) >> (n - 1)
}

/// Every shape with `n` tips (and `k` internal nodes if given), sorted by
/// `(t, l)`. Refuses `n > DEFAULT_CAP`.
pub fn generate_all(n: usize, k: Option<usize>) -> Result<Vec<TreeShape>> {
    generate_all_capped(n, k, DEFAULT_CAP)
}

pub fn generate_all_capped(n: usize, k: Option<usize>, cap: usize) -> Result<Vec<TreeShape>> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if n < 2 {
        return Ok(Vec::new());
    }
    let ks: Vec<usize> = match k {
        Some(k) if k >= 1 && k < n => vec![k],
        Some(_) => Vec::new(),
        None => (1..n).collect(),
    };
    let mut out = Vec::new();
    for k in ks {
        for_each_parent_vector(k, &mut |t| {
            let counts = child_counts(t);
            let mins: Vec<usize> = counts
                .iter()
                .map(|&c| match c {
                    0 => 2,
                    1 => 1,
                    _ => 0,
                })
                .collect();
            for_each_composition(n, &mins, &mut |l| {
                out.push(TreeShape::new_unchecked(t.to_vec(), l.to_vec()));
            });
        });
    }
    out.sort_unstable();
    Ok(out)
}

/// Calls `f` on every `t` with `t_1 = 0`, `1 <= t_i <= i - 1`, in
/// lexicographic order.
pub fn for_each_parent_vector(k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(t: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        let i = t.len();
        if i == k {
            f(t);
            return;
        }
        for p in 1..=i {
            t.push(p);
            rec(t, k, f);
            t.pop();
        }
    }
    if k == 0 {
        return;
    }
    let mut t = Vec::with_capacity(k);
    t.push(0);
    rec(&mut t, k, f);
}

/// Calls `f` on every `l` with `l_j >= mins[j]` summing to `n`, in
/// lexicographic order.
fn for_each_composition(n: usize, mins: &[usize], f: &mut dyn FnMut(&[usize])) {
    fn rec(l: &mut Vec<usize>, rest: usize, mins: &[usize], tail_min: &[usize], f: &mut dyn FnMut(&[usize])) {
        let j = l.len();
        if j + 1 == mins.len() {
            if rest >= mins[j] {
                l.push(rest);
                f(l);
                l.pop();
            }
            return;
        }
        let need_after = tail_min[j + 1];
        if rest < mins[j] + need_after {
            return;
        }
        for v in mins[j]..=rest - need_after {
            l.push(v);
            rec(l, rest - v, mins, tail_min, f);
            l.pop();
        }
    }
    let mut tail_min = vec![0; mins.len() + 1];
    for j in (0..mins.len()).rev() {
        tail_min[j] = tail_min[j + 1] + mins[j];
    }
    let mut l = Vec::with_capacity(mins.len());
    rec(&mut l, n, mins, &tail_min, f);
}
