//! The refinement order on ranked tree shapes.
//!
//! `a` covers `b` when `a` is obtained from `b` by collapsing one edge
//! `(e, e+1)`. The star tree is the maximum; binary trees are minimal (the
//! artificial bottom element is never built).
//!
//! Degrees are `u128`: the number of one-step refinements grows like
//! `2^k` in the number `k` of internal children of a node.

use std::collections::{HashMap, VecDeque};

use crate::enumerate::{generate_all_capped, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::fmatrix::FMatrix;
use crate::shape::{collapse_edge_s, TreeShape};

/// Edges `(e, e+1)` present in the tree, i.e. `t_{e+1} = e`.
pub fn present_edges(s: &TreeShape) -> Vec<usize> {
    let t = s.t();
    (1..s.n_internal()).filter(|&e| t[e] == e).collect()
}

/// Shapes reachable by one collapse, in edge order.
pub fn covers(s: &TreeShape) -> Vec<TreeShape> {
    present_edges(s)
        .into_iter()
        .map(|e| collapse_edge_s(s, e).expect("edge is present"))
        .collect()
}

/// `U(k, l) = (l+1) 2^k - k - 3 + [l = 0]`: the number of ways to split a
/// node with `k` internal and `l` leaf children into two consecutive nodes.
pub fn refinement_count(k: usize, l: usize) -> u128 {
    assert!(k < 120, "node with {k} internal children is too wide for u128 degrees");
    let base = (l as u128 + 1) << k;
    base + u128::from(l == 0) - k as u128 - 3
}

pub fn deg_plus(s: &TreeShape) -> u128 {
    present_edges(s).len() as u128
}

pub fn deg_minus(s: &TreeShape) -> u128 {
    s.internal_children()
        .iter()
        .zip(s.l())
        .map(|(&k, &l)| refinement_count(k, l))
        .sum()
}

/// Total degree in the covering graph.
pub fn degree(s: &TreeShape) -> u128 {
    deg_plus(s) + deg_minus(s)
}

/// Per-node split counts alongside both degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub k: Vec<usize>,
    pub l: Vec<usize>,
    pub u: Vec<u128>,
    pub deg_plus: u128,
    pub deg_minus: u128,
}

impl DegreeProfile {
    pub fn of(s: &TreeShape) -> Self {
        let k = s.internal_children();
        let l = s.l().to_vec();
        let u: Vec<u128> = k.iter().zip(&l).map(|(&k, &l)| refinement_count(k, l)).collect();
        DegreeProfile {
            deg_plus: deg_plus(s),
            deg_minus: u.iter().sum(),
            k,
            l,
            u,
        }
    }

    pub fn total(&self) -> u128 {
        self.deg_plus + self.deg_minus
    }
}

/// Splits node `i` (1-based): a new node of rank `i + 1` becomes a child of
/// `i` and takes over the internal children with ranks in `moved` plus
/// `leaves` leaves. Later ranks shift up by one.
///
/// Panics if the split would leave either node with fewer than two children
/// or `moved` names a non-child.
pub fn split_node(s: &TreeShape, i: usize, moved: &[usize], leaves: usize) -> TreeShape {
    let (t, l) = (s.t(), s.l());
    let k = t.len();
    let shift = |r: usize| if r > i { r + 1 } else { r };
    let mut nt = Vec::with_capacity(k + 1);
    let mut nl = Vec::with_capacity(k + 1);
    for c in 1..=k {
        if c == i + 1 {
            nt.push(i);
            nl.push(leaves);
        }
        let parent = if moved.contains(&c) {
            debug_assert_eq!(t[c - 1], i);
            i + 1
        } else {
            shift(t[c - 1])
        };
        nt.push(parent);
        nl.push(if c == i { l[c - 1] - leaves } else { l[c - 1] });
    }
    if i == k {
        nt.push(i);
        nl.push(leaves);
    }
    TreeShape::new(nt, nl).expect("admissible split")
}

fn children_of(s: &TreeShape, i: usize) -> Vec<usize> {
    (2..=s.n_internal()).filter(|&c| s.t()[c - 1] == i).collect()
}

/// Shapes that `s` covers: every admissible split of every node.
pub fn refinements_below(s: &TreeShape) -> Vec<TreeShape> {
    let mut out = Vec::new();
    let kvec = s.internal_children();
    for i in 1..=s.n_internal() {
        let kids = children_of(s, i);
        let (k, l) = (kvec[i - 1], s.l()[i - 1]);
        for j in 0..=l {
            for mask in 0u128..(1u128 << k) {
                let a = mask.count_ones() as usize;
                if a + j < 2 || a + j > k + l - 1 {
                    continue;
                }
                let moved: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| kids[b]).collect();
                out.push(split_node(s, i, &moved, j));
            }
        }
    }
    out
}

/// Covers followed by refinements.
pub fn neighbors(s: &TreeShape) -> Vec<TreeShape> {
    let mut out = covers(s);
    out.extend(refinements_below(s));
    out
}

fn pascal(k: usize) -> Vec<Vec<u128>> {
    let mut c = vec![vec![0u128; k + 1]; k + 1];
    for n in 0..=k {
        c[n][0] = 1;
        for r in 1..=n {
            c[n][r] = c[n - 1][r - 1] + if r < n { c[n - 1][r] } else { 0 };
        }
    }
    c
}

/// The `idx`-th neighbor of `s` for `idx < degree(s)`, without building the
/// neighbor list. Covers come first in edge order; then, node by node,
/// splits ordered by leaf count, moved-subset size, and lexicographic
/// subset.
pub fn neighbor_at(s: &TreeShape, mut idx: u128) -> TreeShape {
    let edges = present_edges(s);
    if idx < edges.len() as u128 {
        return collapse_edge_s(s, edges[idx as usize]).expect("edge is present");
    }
    idx -= edges.len() as u128;
    let kvec = s.internal_children();
    for i in 1..=s.n_internal() {
        let (k, l) = (kvec[i - 1], s.l()[i - 1]);
        let u = refinement_count(k, l);
        if idx >= u {
            idx -= u;
            continue;
        }
        let c = pascal(k);
        for j in 0..=l {
            let lo = 2usize.saturating_sub(j);
            let hi = (k + l - 1 - j).min(k);
            for a in lo..=hi {
                if idx >= c[k][a] {
                    idx -= c[k][a];
                    continue;
                }
                // unrank the idx-th a-subset of 0..k in lexicographic order
                let mut picked = Vec::with_capacity(a);
                let mut next = 0;
                for left in (1..=a).rev() {
                    let mut b = next;
                    loop {
                        let with_b = c[k - b - 1][left - 1];
                        if idx < with_b {
                            break;
                        }
                        idx -= with_b;
                        b += 1;
                    }
                    picked.push(b);
                    next = b + 1;
                }
                let kids = children_of(s, i);
                let moved: Vec<usize> = picked.into_iter().map(|b| kids[b]).collect();
                return split_node(s, i, &moved, j);
            }
        }
        unreachable!("split index within U(k, l)");
    }
    panic!("neighbor index out of range");
}

/// Intermediate matrices of the least-upper-bound computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LubTrace {
    /// `F(a)` and `F(b)` restricted to their shared diagonal values.
    pub aligned: (FMatrix, FMatrix),
    /// The shared submatrix after dropping differing columns, then the
    /// matrix after each round of violating-column deletion. The last entry
    /// is the F-matrix of the least upper bound.
    pub steps: Vec<FMatrix>,
}

fn violating_columns(s: &FMatrix) -> Vec<usize> {
    let dim = s.dim();
    (0..dim)
        .filter(|&j| {
            if j + 1 < dim && s.get(j + 1, j) + 1 != s.get(j, j) {
                return true;
            }
            (j..dim.saturating_sub(1)).any(|r| s.get(r, j).abs_diff(s.get(r + 1, j)) >= 2)
        })
        .map(|j| j + 1)
        .collect()
}

/// Runs the least-upper-bound algorithm and records every matrix.
pub fn lub_trace(a: &TreeShape, b: &TreeShape) -> Result<LubTrace> {
    if a.n_tips() != b.n_tips() {
        return Err(Error::TipCountMismatch(a.n_tips(), b.n_tips()));
    }
    let (fa, fb) = (FMatrix::from_shape(a), FMatrix::from_shape(b));
    let (da, db) = (fa.diagonal(), fb.diagonal());
    let keep_a: Vec<usize> = (1..=fa.dim()).filter(|&i| db.contains(&da[i - 1])).collect();
    let keep_b: Vec<usize> = (1..=fb.dim()).filter(|&i| da.contains(&db[i - 1])).collect();
    let (xa, xb) = (fa.submatrix(&keep_a), fb.submatrix(&keep_b));

    let dim = xa.dim();
    let same: Vec<usize> = (0..dim)
        .filter(|&j| (j..dim).all(|r| xa.get(r, j) == xb.get(r, j)))
        .map(|j| j + 1)
        .collect();
    let mut current = xa.submatrix(&same);
    let mut steps = vec![current.clone()];
    loop {
        let bad = violating_columns(&current);
        if bad.is_empty() {
            break;
        }
        current = current.delete(&bad);
        steps.push(current.clone());
    }
    Ok(LubTrace {
        aligned: (xa, xb),
        steps,
    })
}

/// Least upper bound (smallest common coarsening) of two shapes.
pub fn lub(a: &TreeShape, b: &TreeShape) -> Result<TreeShape> {
    let trace = lub_trace(a, b)?;
    trace.steps.last().expect("nonempty").to_shape()
}

/// `d_L(a, b) = (K_a - K_lub) + (K_b - K_lub)`.
pub fn lattice_distance(a: &TreeShape, b: &TreeShape) -> Result<usize> {
    let k = lub(a, b)?.n_internal();
    Ok(a.n_internal() + b.n_internal() - 2 * k)
}

/// The cherry-fan tree: a root with `floor((N-2)/2)` cherry children and
/// `2 + N mod 2` leaves. Returns it with `M_N`, its total degree.
pub fn max_degree_tree(n: usize) -> Result<(TreeShape, u128)> {
    if n < 4 {
        return Err(Error::domain(format!("max-degree tree needs N >= 4, got {n}")));
    }
    let c = (n - 2) / 2;
    let mut t = vec![0];
    t.extend(std::iter::repeat_n(1, c));
    let mut l = vec![2 + n % 2];
    l.extend(std::iter::repeat_n(2, c));
    let s = TreeShape::new(t, l)?;
    let m = degree(&s);
    Ok((s, m))
}

/// `M_N`: the maximum total degree over shapes with `N` tips.
pub fn max_total_degree(n: usize) -> Result<u128> {
    max_degree_tree(n).map(|(_, m)| m)
}

/// Explicit covering graph for small `N`.
#[derive(Debug, Clone)]
pub struct LatticeGraph {
    n: usize,
    vertices: Vec<TreeShape>,
    index: HashMap<TreeShape, usize>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

/// Builds the covering graph of all shapes with `n` tips (`n <= 9`).
pub fn build_hasse(n: usize) -> Result<LatticeGraph> {
    build_hasse_capped(n, DEFAULT_CAP)
}

pub fn build_hasse_capped(n: usize, cap: usize) -> Result<LatticeGraph> {
    let vertices = generate_all_capped(n, None, cap)?;
    let index: HashMap<TreeShape, usize> = vertices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut up = vec![Vec::new(); vertices.len()];
    let mut down = vec![Vec::new(); vertices.len()];
    for (i, v) in vertices.iter().enumerate() {
        for c in covers(v) {
            let j = index[&c];
            up[i].push(j);
            down[j].push(i);
        }
    }
    Ok(LatticeGraph {
        n,
        vertices,
        index,
        up,
        down,
    })
}

impl LatticeGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[TreeShape] {
        &self.vertices
    }

    pub fn index_of(&self, s: &TreeShape) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Vertices one collapse above `v`.
    pub fn up(&self, v: usize) -> &[usize] {
        &self.up[v]
    }

    /// Vertices one split below `v`.
    pub fn down(&self, v: usize) -> &[usize] {
        &self.down[v]
    }

    /// `(deg+, deg-)` read off the graph.
    pub fn degrees(&self, v: usize) -> (usize, usize) {
        (self.up[v].len(), self.down[v].len())
    }

    /// Undirected neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.up[v].iter().chain(&self.down[v]).copied()
    }

    /// Covering pairs as `(coarser, finer)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (finer, ups) in self.up.iter().enumerate() {
            for &coarser in ups {
                out.push((coarser, finer));
            }
        }
        out.sort_unstable();
        out
    }

    /// Marks every vertex `>= v` in the order (including `v`).
    pub fn upper_set(&self, v: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(x) = stack.pop() {
            for &y in &self.up[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Graph distances from `src` in the undirected covering graph.
    pub fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].expect("visited");
            for y in self.neighbors(x) {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.distances_from(0).iter().all(Option::is_some)
    }

    /// Largest graph distance between two vertices.
    pub fn diameter(&self) -> usize {
        (0..self.len())
            .map(|v| {
                self.distances_from(v)
                    .into_iter()
                    .map(|d| d.expect("connected"))
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn shape(t: &[usize], l: &[usize]) -> TreeShape {
        TreeShape::new(t.to_vec(), l.to_vec()).unwrap()
    }

    #[test]
    fn fig4_edges_and_covers() {
        let s = shape(&[0, 1, 1, 3, 2], &[1, 1, 1, 2, 2]);
        assert_eq!(present_edges(&s), vec![1, 3]);
        let c = covers(&s);
        assert_eq!(c.len(), 2);
        assert_ne!(c[0], c[1]);
        assert!(c.iter().all(|x| x.n_internal() == 4 && x.n_tips() == 7));
    }

    #[test]
    fn star_has_no_covers() {
        let s = TreeShape::star(6).unwrap();
        assert!(present_edges(&s).is_empty());
        assert!(covers(&s).is_empty());
        assert_eq!(deg_plus(&s), 0);
        assert_eq!(deg_minus(&s), 4);
        assert_eq!(refinements_below(&s).len(), 4);
    }

    #[test]
    fn zero_split_counts() {
        assert_eq!(refinement_count(1, 1), 0);
        assert_eq!(refinement_count(2, 0), 0);
        assert_eq!(refinement_count(0, 2), 0);
        assert_eq!(refinement_count(0, 5), 3);
    }

    #[test]
    fn binary_trees_have_no_refinements() {
        let s = shape(&[0, 1, 2], &[1, 1, 2]);
        assert_eq!(deg_minus(&s), 0);
        assert!(refinements_below(&s).is_empty());
    }

    #[test]
    fn max_degree_sequence() {
        let want = [2u128, 4, 7, 11, 18, 26];
        for (i, &w) in want.iter().enumerate() {
            let (t, m) = max_degree_tree(i + 4).unwrap();
            assert_eq!(deg_minus(&t), w);
            assert_eq!(deg_plus(&t), 1);
            assert_eq!(m, w + 1);
        }
        assert!(max_degree_tree(3).is_err());
    }

    #[test]
    fn neighbor_unranking_matches_listing() {
        for s in generate_all_capped(7, None, 9).unwrap() {
            let listed: Vec<TreeShape> = neighbors(&s);
            assert_eq!(listed.len() as u128, degree(&s));
            let set: HashSet<&TreeShape> = listed.iter().collect();
            assert_eq!(set.len(), listed.len());
            let unranked: HashSet<TreeShape> = (0..degree(&s)).map(|i| neighbor_at(&s, i)).collect();
            assert_eq!(unranked.len(), listed.len());
            assert!(listed.iter().all(|nb| unranked.contains(nb)));
        }
    }

    #[test]
    fn refinements_cover_back() {
        for s in generate_all_capped(6, None, 9).unwrap() {
            for r in refinements_below(&s) {
                assert!(covers(&r).contains(&s));
            }
        }
    }

    #[test]
    fn appendix_lub_trace() {
        let fx = FMatrix::from_lower(&[
            vec![2],
            vec![1, 3],
            vec![0, 2, 4],
            vec![0, 2, 3, 5],
            vec![0, 1, 2, 4, 6],
            vec![0, 1, 2, 4, 5, 7],
            vec![0, 1, 2, 3, 4, 6, 8],
        ])
        .unwrap();
        let fy = FMatrix::from_lower(&[
            vec![2],
            vec![1, 3],
            vec![0, 2, 4],
            vec![0, 2, 3, 5],
            vec![0, 1, 2, 4, 6],
            vec![0, 1, 2, 4, 5, 7],
            vec![0, 1, 2, 4, 5, 6, 8],
        ])
        .unwrap();
        let (x, y) = (fx.to_shape().unwrap(), fy.to_shape().unwrap());
        let trace = lub_trace(&x, &y).unwrap();
        let steps: Vec<Vec<Vec<usize>>> = trace.steps.iter().map(FMatrix::lower_rows).collect();
        assert_eq!(
            steps,
            vec![
                vec![
                    vec![2],
                    vec![1, 3],
                    vec![0, 2, 4],
                    vec![0, 1, 2, 7],
                    vec![0, 1, 2, 6, 8]
                ],
                vec![vec![2], vec![1, 3], vec![0, 1, 7], vec![0, 1, 6, 8]],
                vec![vec![2], vec![0, 7], vec![0, 6, 8]],
                vec![vec![7], vec![6, 8]],
            ]
        );
        assert_eq!(lub(&x, &y).unwrap(), lub(&y, &x).unwrap());
    }

    #[test]
    fn lub_trivial_cases() {
        let star = TreeShape::star(6).unwrap();
        for s in generate_all_capped(6, None, 9).unwrap() {
            assert_eq!(lub(&s, &s).unwrap(), s);
            assert_eq!(lub(&s, &star).unwrap(), star);
            assert_eq!(lattice_distance(&s, &s).unwrap(), 0);
        }
        assert!(matches!(
            lub(&star, &TreeShape::star(5).unwrap()),
            Err(Error::TipCountMismatch(6, 5))
        ));
    }

    #[test]
    fn hasse_small() {
        let g = build_hasse(4).unwrap();
        assert_eq!(g.len(), 5);
        assert!(g.is_connected());
        let total_up: usize = (0..g.len()).map(|v| g.degrees(v).0).sum();
        let total_down: usize = (0..g.len()).map(|v| g.degrees(v).1).sum();
        assert_eq!(total_up, total_down);
        assert_eq!(total_up, g.edges().len());
        assert_eq!(build_hasse(5).unwrap().len(), 15);
        assert!(matches!(build_hasse(10), Err(Error::CapExceeded { .. })));
    }
}
