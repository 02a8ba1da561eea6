//! F-matrix and D-matrix encodings of ranked tree shapes.
//!
//! Rows and columns are indexed by event rank. `D[i][j]` counts the direct
//! descendants of node `j` that have not furcated by event `i`, and `F` is
//! the row-wise prefix sum of `D`. Collapsing edge `(e, e+1)` in the tree is
//! the same as deleting row and column `e` of `F`.
//!
//! Indices in the public API that name a rank or an edge are 1-based, like
//! the node ranks themselves. Plain entry accessors are 0-based.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Constraint, Error, Result};
use crate::shape::TreeShape;

/// Square lower-triangular matrix of nonnegative integers.
///
/// The container does not guarantee `F1..F3`; intermediate matrices of the
/// least-upper-bound algorithm are stored in it too. Use [`FMatrix::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FMatrix {
    dim: usize,
    data: Vec<usize>,
}

impl FMatrix {
    /// Builds a matrix from full square rows, rejecting non-square or
    /// non-lower-triangular input.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    row: i + 1,
                    len: row.len(),
                    dim,
                });
            }
            if let Some(j) = (i + 1..dim).find(|&j| row[j] != 0) {
                return Err(Error::NotLowerTriangular { row: i + 1, col: j + 1 });
            }
            data.extend_from_slice(row);
        }
        Ok(FMatrix { dim, data })
    }

    /// Builds a matrix from its lower triangle: row `i` holds `i + 1` entries.
    pub fn from_lower(rows: &[Vec<usize>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Empty);
        }
        let mut data = vec![0; dim * dim];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::NotSquare {
                    row: i + 1,
                    len: row.len(),
                    dim: i + 1,
                });
            }
            data[i * dim..i * dim + i + 1].copy_from_slice(row);
        }
        Ok(FMatrix { dim, data })
    }

    /// The F-matrix of a tree shape.
    pub fn from_shape(s: &TreeShape) -> Self {
        DMatrix::from_shape(s).to_fmatrix()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> usize {
        self.data[row * self.dim + col]
    }

    /// 1-based accessor matching the rank indices used in constraints.
    fn at(&self, i: usize, j: usize) -> i64 {
        self.data[(i - 1) * self.dim + (j - 1)] as i64
    }

    pub fn diagonal(&self) -> Vec<usize> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Full square rows.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Lower-triangle rows (row `i` has `i + 1` entries).
    pub fn lower_rows(&self) -> Vec<Vec<usize>> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim..i * self.dim + i + 1].to_vec())
            .collect()
    }

    /// Checks `F1..F3c`, reporting the first violated constraint.
    ///
    /// `F1` also requires `F_{1,1} >= 2`: the root has at least two
    /// children.
    pub fn validate(&self) -> Result<()> {
        let k = self.dim;
        let f = |i, j| self.at(i, j);
        let fail = |c| Err(Error::Violation(c));

        if f(1, 1) < 2 {
            return fail(Constraint::F1);
        }
        for i in 1..k {
            if f(i, i) >= f(i + 1, i + 1) || f(i + 1, i) != f(i, i) - 1 {
                return fail(Constraint::F1);
            }
        }
        for i in 3..=k {
            let above = f(i - 1, 1);
            if f(i, 1) < (above - 1).max(0) || f(i, 1) > above {
                return fail(Constraint::F2);
            }
        }
        for i in 4..=k {
            for j in 2..=i - 2 {
                if f(i, j) < f(i, j - 1).max(0) {
                    return fail(Constraint::F3a);
                }
            }
        }
        for i in 4..=k {
            for j in 2..=i - 2 {
                if f(i, j) < f(i - 1, j) - 1 || f(i, j) > f(i - 1, j) {
                    return fail(Constraint::F3b);
                }
            }
        }
        for i in 4..=k {
            for j in 2..=i - 2 {
                let grid = (f(i - 1, j) - f(i, j)) - (f(i - 1, j - 1) - f(i, j - 1));
                if !(0..=1).contains(&grid) {
                    return fail(Constraint::F3c);
                }
            }
        }
        Ok(())
    }

    /// Decodes the tree shape, validating first.
    pub fn to_shape(&self) -> Result<TreeShape> {
        self.validate()?;
        DMatrix::from_fmatrix(self).to_shape()
    }

    /// Whether edge `(e, e+1)` exists: `e = 1`, or rows `e` and `e + 1`
    /// agree on columns `1..e-1`.
    pub fn has_edge(&self, e: usize) -> bool {
        if e < 1 || e >= self.dim {
            return false;
        }
        (1..e).all(|j| self.at(e, j) == self.at(e + 1, j))
    }

    /// Removes the given 1-based rows and columns (unchecked).
    pub fn delete(&self, indices: &[usize]) -> FMatrix {
        let keep: Vec<usize> = (1..=self.dim).filter(|i| !indices.contains(i)).collect();
        self.submatrix(&keep)
    }

    /// Keeps only the given 1-based rows and columns, in order.
    pub fn submatrix(&self, keep: &[usize]) -> FMatrix {
        let dim = keep.len();
        let mut data = Vec::with_capacity(dim * dim);
        for &i in keep {
            for &j in keep {
                data.push(self.get(i - 1, j - 1));
            }
        }
        FMatrix { dim, data }
    }
}

/// Validates a raw square matrix: structural checks first, then `F1..F3c`.
pub fn validate_fmatrix(rows: &[Vec<usize>]) -> Result<()> {
    FMatrix::from_rows(rows)?.validate()
}

/// F-matrix of a shape via its D-matrix.
pub fn string_to_fmatrix(s: &TreeShape) -> FMatrix {
    FMatrix::from_shape(s)
}

/// Inverse of [`string_to_fmatrix`].
pub fn fmatrix_to_string(f: &FMatrix) -> Result<TreeShape> {
    f.to_shape()
}

/// Collapses edge `(e, e+1)` by deleting row and column `e`.
pub fn collapse_edge_f(f: &FMatrix, e: usize) -> Result<FMatrix> {
    let k = f.dim();
    if e < 1 || e >= k {
        return Err(Error::EdgeOutOfRange { e, k });
    }
    if !f.has_edge(e) {
        return Err(Error::EdgeNotPresent { e });
    }
    Ok(f.delete(&[e]))
}

impl fmt::Display for FMatrix {
    /// Lower triangle, rows separated by `;`, e.g. `2;1,3;1,2,4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            if i > 0 {
                f.write_str(";")?;
            }
            for j in 0..=i {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for FMatrix {
    type Err = Error;

    /// Parses the `;`-separated lower-triangle form written by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut offset = 0;
        for row in s.split(';') {
            let mut entries = Vec::new();
            let mut inner = offset;
            for field in row.split(',') {
                let value = field.parse::<usize>().map_err(|_| Error::Parse {
                    offset: inner,
                    msg: format!("expected a nonnegative integer, found {field:?}"),
                })?;
                entries.push(value);
                inner += field.len() + 1;
            }
            rows.push(entries);
            offset += row.len() + 1;
        }
        FMatrix::from_lower(&rows)
    }
}

impl Serialize for FMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<usize>>::deserialize(deserializer)?;
        FMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Per-event counts of each node's not-yet-furcated direct descendants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DMatrix {
    dim: usize,
    data: Vec<usize>,
}

impl DMatrix {
    /// `D_{i,j} = l_j + |{c > i : t_c = j}|` for `j <= i`.
    pub fn from_shape(s: &TreeShape) -> Self {
        let k = s.n_internal();
        let (t, l) = (s.t(), s.l());
        let mut data = vec![0; k * k];
        // remaining[j] = internal children of j with rank > i
        let mut remaining = s.internal_children();
        for i in 0..k {
            if i > 0 {
                remaining[t[i] - 1] -= 1;
            }
            for j in 0..=i {
                data[i * k + j] = l[j] + remaining[j];
            }
        }
        DMatrix { dim: k, data }
    }

    /// Row-wise first differences of `F`.
    pub fn from_fmatrix(f: &FMatrix) -> Self {
        let k = f.dim();
        let mut data = vec![0; k * k];
        for i in 0..k {
            for j in 0..=i {
                let left = if j == 0 { 0 } else { f.get(i, j - 1) };
                data[i * k + j] = f.get(i, j).saturating_sub(left);
            }
        }
        DMatrix { dim: k, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.data[row * self.dim + col]
    }

    pub fn to_fmatrix(&self) -> FMatrix {
        let k = self.dim;
        let mut data = vec![0; k * k];
        for i in 0..k {
            let mut acc = 0;
            for j in 0..=i {
                acc += self.get(i, j);
                data[i * k + j] = acc;
            }
        }
        FMatrix { dim: k, data }
    }

    /// Checks `D1..D4` against a tip count.
    pub fn is_valid(&self, n: usize) -> bool {
        let k = self.dim;
        let d = |i: usize, j: usize| self.get(i, j) as i64;
        if (0..k).map(|j| self.get(k - 1, j)).sum::<usize>() != n {
            return false;
        }
        if (0..k).any(|i| self.get(i, i) < 2) {
            return false;
        }
        for i in 1..k {
            let mut decreasing = 0;
            for j in 0..i {
                let step = d(i - 1, j) - d(i, j);
                if !(0..=1).contains(&step) {
                    return false;
                }
                decreasing += step;
            }
            if decreasing != 1 {
                return false;
            }
        }
        true
    }

    /// Rebuilds the tree: node `i` hangs off the unique column that loses a
    /// descendant between rows `i - 1` and `i`.
    pub fn to_shape(&self) -> Result<TreeShape> {
        let k = self.dim;
        let mut t = vec![0; k];
        for (i, slot) in t.iter_mut().enumerate().skip(1) {
            let mut parent = None;
            for j in 0..i {
                match self.get(i - 1, j) as i64 - self.get(i, j) as i64 {
                    0 => {}
                    1 if parent.is_none() => parent = Some(j + 1),
                    _ => {
                        return Err(Error::domain(format!(
                            "invalid F-matrix: no unique furcating column at row {}",
                            i + 1
                        )))
                    }
                }
            }
            *slot = parent
                .ok_or_else(|| Error::domain(format!("invalid F-matrix: no furcating column at row {}", i + 1)))?;
        }
        let l = (0..k).map(|j| self.get(k - 1, j)).collect();
        TreeShape::new(t, l)
    }
}
