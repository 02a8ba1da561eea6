//! Canonical tree-shape values and the string encoding `{t, l}`.
//!
//! Internal nodes carry 1-based ranks from the root (rank 1) down to the
//! most recent furcation (rank `K`). `t[i]` is the parent rank of node
//! `i + 1` (with the placeholder `0` for the root) and `l[i]` is the number
//! of leaves hanging directly off node `i + 1`.
//!
//! The compact text form is `t_1,...,t_K|l_1,...,l_K` with no whitespace,
//! and the JSON form is `{"t":[...],"l":[...]}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Constraint, Error, Result};

/// Raw string representation. May be invalid; see [`validate_string`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StringRepr {
    pub t: Vec<usize>,
    pub l: Vec<usize>,
}

impl StringRepr {
    pub fn new(t: Vec<usize>, l: Vec<usize>) -> Self {
        StringRepr { t, l }
    }
}

/// Checks `S1..S4` on a pair of vectors. The tip count is `sum(l)`, so `S2`
/// only fails through [`validate_string_tips`].
pub fn validate_string(t: &[usize], l: &[usize]) -> Result<()> {
    if t.len() != l.len() {
        return Err(Error::LengthMismatch { t: t.len(), l: l.len() });
    }
    if t.is_empty() {
        return Err(Error::Empty);
    }
    let k = t.len();
    if t[0] != 0 {
        return Err(Error::Violation(Constraint::S1));
    }
    for (i, &parent) in t.iter().enumerate().skip(1) {
        // node i + 1 needs a parent in 1..=i
        if parent < 1 || parent > i {
            return Err(Error::Violation(Constraint::S1));
        }
    }
    let occurrences = child_counts(t);
    for j in 0..k {
        if occurrences[j] == 0 && l[j] < 2 {
            return Err(Error::Violation(Constraint::S3));
        }
    }
    for j in 0..k {
        if occurrences[j] == 1 && l[j] < 1 {
            return Err(Error::Violation(Constraint::S4));
        }
    }
    Ok(())
}

/// [`validate_string`] plus the tip-count constraint `sum(l) = n`.
pub fn validate_string_tips(t: &[usize], l: &[usize], n: usize) -> Result<()> {
    if t.len() != l.len() {
        return Err(Error::LengthMismatch { t: t.len(), l: l.len() });
    }
    if t.is_empty() {
        return Err(Error::Empty);
    }
    if t[0] != 0 || t.iter().enumerate().skip(1).any(|(i, &p)| p < 1 || p > i) {
        return Err(Error::Violation(Constraint::S1));
    }
    if l.iter().sum::<usize>() != n {
        return Err(Error::Violation(Constraint::S2));
    }
    validate_string(t, l)
}

/// Number of internal children of each node, indexed by rank - 1.
/// Assumes `S1`.
pub(crate) fn child_counts(t: &[usize]) -> Vec<usize> {
    let mut counts = vec![0; t.len()];
    for &parent in &t[1..] {
        counts[parent - 1] += 1;
    }
    counts
}

/// An element of the space of ranked, unlabeled multifurcating tree shapes
/// with `N` tips.
///
/// Equality, ordering and hashing go through the canonical string
/// representation. Values are immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeShape {
    repr: StringRepr,
    n: usize,
}

impl TreeShape {
    /// Validates and wraps a string representation.
    pub fn new(t: Vec<usize>, l: Vec<usize>) -> Result<Self> {
        validate_string(&t, &l)?;
        let n = l.iter().sum();
        Ok(TreeShape {
            repr: StringRepr { t, l },
            n,
        })
    }

    pub(crate) fn new_unchecked(t: Vec<usize>, l: Vec<usize>) -> Self {
        debug_assert!(validate_string(&t, &l).is_ok(), "invalid shape {t:?} {l:?}");
        let n = l.iter().sum();
        TreeShape {
            repr: StringRepr { t, l },
            n,
        }
    }

    /// The star tree: a single internal node with `n` leaves.
    pub fn star(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("star tree needs n >= 2, got {n}")));
        }
        Ok(TreeShape::new_unchecked(vec![0], vec![n]))
    }

    /// Number of tips `N`.
    pub fn n_tips(&self) -> usize {
        self.n
    }

    /// Number of internal nodes `K`.
    pub fn n_internal(&self) -> usize {
        self.repr.t.len()
    }

    pub fn t(&self) -> &[usize] {
        &self.repr.t
    }

    pub fn l(&self) -> &[usize] {
        &self.repr.l
    }

    pub fn repr(&self) -> &StringRepr {
        &self.repr
    }

    /// Internal children per node (`k_i`), indexed by rank - 1.
    pub fn internal_children(&self) -> Vec<usize> {
        child_counts(&self.repr.t)
    }

    /// Block size (total number of children) of every internal node.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.internal_children()
            .iter()
            .zip(&self.repr.l)
            .map(|(k, l)| k + l)
            .collect()
    }

    pub fn is_binary(&self) -> bool {
        self.n_internal() + 1 == self.n
    }

    pub fn is_star(&self) -> bool {
        self.n_internal() == 1
    }

    /// Whether nodes `e` and `e + 1` are joined by an edge (`t_{e+1} = e`).
    pub fn has_edge(&self, e: usize) -> bool {
        e >= 1 && e < self.n_internal() && self.repr.t[e] == e
    }

    /// Collapses the edge between ranks `e` and `e + 1`, merging both nodes.
    pub fn collapse_edge(&self, e: usize) -> Result<TreeShape> {
        collapse_edge_s(self, e)
    }

    /// Compact text form `t|l`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses the compact text form.
    pub fn from_text(s: &str) -> Result<Self> {
        s.parse()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.repr).expect("plain integer vectors serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: StringRepr = serde_json::from_str(s)?;
        TreeShape::try_from(repr)
    }
}

impl TryFrom<StringRepr> for TreeShape {
    type Error = Error;

    fn try_from(repr: StringRepr) -> Result<Self> {
        TreeShape::new(repr.t, repr.l)
    }
}

impl From<TreeShape> for StringRepr {
    fn from(s: TreeShape) -> Self {
        s.repr
    }
}

impl Serialize for TreeShape {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TreeShape {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = StringRepr::deserialize(deserializer)?;
        TreeShape::try_from(repr).map_err(serde::de::Error::custom)
    }
}

/// Collapses edge `(e, e+1)` directly on the string representation.
///
/// Ranks below `e` shift up by one, children of `e + 1` are reattached to
/// `e`, and the leaf counts of the two merged nodes are added.
pub fn collapse_edge_s(s: &TreeShape, e: usize) -> Result<TreeShape> {
    let k = s.n_internal();
    if e < 1 || e >= k {
        return Err(Error::EdgeOutOfRange { e, k });
    }
    let (t, l) = (s.t(), s.l());
    if t[e] != e {
        return Err(Error::EdgeNotPresent { e });
    }
    let mut new_t = Vec::with_capacity(k - 1);
    new_t.extend_from_slice(&t[..e]);
    for &parent in &t[e + 1..] {
        new_t.push(if parent > e { parent - 1 } else { parent });
    }
    let mut new_l = Vec::with_capacity(k - 1);
    new_l.extend_from_slice(&l[..e - 1]);
    new_l.push(l[e - 1] + l[e]);
    new_l.extend_from_slice(&l[e + 1..]);
    Ok(TreeShape::new_unchecked(new_t, new_l))
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.repr.t)?;
        f.write_str("|")?;
        write_list(f, &self.repr.l)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[usize]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl FromStr for TreeShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bar = s.find('|').ok_or_else(|| Error::Parse {
            offset: s.len(),
            msg: "expected '|' separating t and l".into(),
        })?;
        let t = parse_list(&s[..bar], 0)?;
        let l = parse_list(&s[bar + 1..], bar + 1)?;
        TreeShape::new(t, l)
    }
}

fn parse_list(s: &str, base: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for field in s.split(',') {
        let offset = base + start;
        if field.is_empty() {
            return Err(Error::Parse {
                offset,
                msg: "expected an integer".into(),
            });
        }
        if let Some(pos) = field.bytes().position(|b| !b.is_ascii_digit()) {
            return Err(Error::Parse {
                offset: offset + pos,
                msg: format!("unexpected character {:?}", field[pos..].chars().next().unwrap()),
            });
        }
        let value = field.parse::<usize>().map_err(|e| Error::Parse {
            offset,
            msg: e.to_string(),
        })?;
        out.push(value);
        start += field.len() + 1;
    }
    Ok(out)
}
