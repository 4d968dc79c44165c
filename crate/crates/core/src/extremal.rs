//! Extremal colorings on `p - 1` vertices with no color-`j`-avoiding path of
//! order `l_j` for any `j`.
//!
//! Vertices are split into consecutive blocks `A_1, ..., A_t` (in sorted slot
//! order). Edges inside `A_j` get the color of slot `j`, and an edge between
//! `A_i` and `A_j` with `i < j` also gets the color of slot `j`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::EdgeColoring;
use crate::formula::{p_value_sorted, s_value, FormulaError, TargetLengths};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtremalError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("explicit partition needs t >= 3, l_t < p(prefix) and s >= l_t; {0}")]
    NotExplicit(String),
    #[error("partition constraint violated: {0}")]
    Constraint(String),
    #[error("vertex {vertex} outside the {total} partitioned vertices")]
    VertexOutOfRange { vertex: usize, total: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionBranch {
    /// Block sizes from the closed-form recurrences.
    Explicit,
    /// `l_t >= p(prefix)`: the prefix construction with an unused last color.
    RecurseFewerColors,
    /// `s < l_t`: the prefix construction cut down to its first `s - 1` vertices.
    GenEqualityRestrict,
    TwoColorBase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    /// Block sizes `a_1, ..., a_t` in sorted slot order.
    pub sizes: Vec<usize>,
    /// `s` of the full tuple.
    pub s: usize,
    /// `a_3 + ... + a_t`.
    pub tail_sum: usize,
    pub branch: PartitionBranch,
}

/// Sidecar document written next to a constructed coloring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSidecar {
    pub sizes: Vec<usize>,
    pub s: usize,
    pub branch: PartitionBranch,
}

impl PartitionSpec {
    fn new(sizes: Vec<usize>, s: usize, branch: PartitionBranch) -> Self {
        let tail_sum = sizes.iter().skip(2).sum();
        PartitionSpec {
            sizes,
            s,
            tail_sum,
            branch,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn sidecar(&self) -> PartitionSidecar {
        PartitionSidecar {
            sizes: self.sizes.clone(),
            s: self.s,
            branch: self.branch,
        }
    }

    /// Vertex range of the 1-based block `j`.
    pub fn block_range(&self, j: usize) -> std::ops::Range<usize> {
        let start: usize = self.sizes[..j - 1].iter().sum();
        start..start + self.sizes[j - 1]
    }
}

/// The 1-based block containing `vertex`; blocks occupy consecutive labels.
pub fn block_of(spec: &PartitionSpec, vertex: usize) -> Result<usize, ExtremalError> {
    let mut end = 0;
    for (idx, &a) in spec.sizes.iter().enumerate() {
        end += a;
        if vertex < end {
            return Ok(idx + 1);
        }
    }
    Err(ExtremalError::VertexOutOfRange { vertex, total: end })
}

fn floor_div3(x: i64) -> i64 {
    x.div_euclid(3)
}

fn ceil_div3(x: i64) -> i64 {
    -(-x).div_euclid(3)
}

/// Block sizes for the explicit branch (`t >= 3`, `l_t < p(prefix)`, `s >= l_t`).
pub fn partition_sizes(lengths: &TargetLengths) -> Result<PartitionSpec, ExtremalError> {
    let l = lengths.sorted();
    let t = l.len();
    if t < 3 {
        return Err(ExtremalError::NotExplicit(format!("t = {t}")));
    }
    let (p_prefix, _) = p_value_sorted(&l[..t - 1])?;
    if l[t - 1] >= p_prefix {
        return Err(ExtremalError::NotExplicit(format!(
            "l_t = {} >= p(prefix) = {p_prefix}",
            l[t - 1]
        )));
    }
    let s = s_value(l)?;
    if s < l[t - 1] {
        return Err(ExtremalError::NotExplicit(format!(
            "s = {s} < l_t = {}",
            l[t - 1]
        )));
    }
    let li = |k: usize| l[k - 1] as i64;
    let mut a = vec![0i64; t + 1];
    a[t] = s as i64 - li(t);
    for k in (3..t).rev() {
        a[k] = 2 * a[k + 1] + li(k + 1) - li(k);
    }
    let tail: i64 = a[3..=t].iter().sum();
    let s_i = s as i64;
    a[1] = ceil_div3(2 * s_i - 2 * tail + li(2) - li(1) - 1);
    a[2] = floor_div3(s_i - tail + li(1) - li(2) - 2);
    if a[1] < 1 || a[2..].iter().any(|&x| x < 0) {
        return Err(ExtremalError::Constraint(format!(
            "negative block size in {:?}",
            &a[1..]
        )));
    }
    let sizes: Vec<usize> = a[1..].iter().map(|&x| x as usize).collect();
    let spec = PartitionSpec::new(sizes, s, PartitionBranch::Explicit);
    check_constraints(l, &spec.sizes, s).map_err(ExtremalError::Constraint)?;
    Ok(spec)
}

/// Checks every row of the explicit-branch constraint system for sorted `l`.
pub fn check_constraints(l: &[usize], sizes: &[usize], s: usize) -> Result<(), String> {
    let t = l.len();
    if sizes.len() != t {
        return Err(format!("{} sizes for {t} colors", sizes.len()));
    }
    let a = |k: usize| sizes[k - 1];
    if a(1) < 1 {
        return Err("a_1 must be positive".into());
    }
    let tail: usize = (3..=t).map(a).sum();
    if 2 * a(2) + 2 * tail + 1 > l[0] - 1 {
        return Err(format!(
            "row 1: 2a_2 + 2S + 1 = {} > l_1 - 1",
            2 * a(2) + 2 * tail + 1
        ));
    }
    if a(1) + 2 * tail > l[1] - 1 {
        return Err(format!("row 2: a_1 + 2S = {} > l_2 - 1", a(1) + 2 * tail));
    }
    for m in 3..t {
        let lhs: usize = (1..m).map(a).sum::<usize>() + 2 * (m + 1..=t).map(a).sum::<usize>();
        if lhs != l[m - 1] - 1 {
            return Err(format!("row {m}: {lhs} != l_{m} - 1 = {}", l[m - 1] - 1));
        }
    }
    let head: usize = (1..t).map(a).sum();
    if head != l[t - 1] - 1 {
        return Err(format!("row {t}: a_1 + ... + a_(t-1) = {head} != l_t - 1"));
    }
    let total: usize = sizes.iter().sum();
    if total + 1 != s {
        return Err(format!("sizes sum to {total}, expected s - 1 = {}", s - 1));
    }
    Ok(())
}

fn slot_partition(l: &[usize]) -> Result<PartitionSpec, ExtremalError> {
    let t = l.len();
    let s = s_value(l)?;
    if t == 2 {
        return Ok(PartitionSpec::new(
            vec![l[1] - 1, l[0] / 2 - 1],
            s,
            PartitionBranch::TwoColorBase,
        ));
    }
    let (p_prefix, _) = p_value_sorted(&l[..t - 1])?;
    if l[t - 1] >= p_prefix {
        let mut sizes = slot_partition(&l[..t - 1])?.sizes;
        sizes.push(0);
        return Ok(PartitionSpec::new(
            sizes,
            s,
            PartitionBranch::RecurseFewerColors,
        ));
    }
    if s < l[t - 1] {
        let inner = slot_partition(&l[..t - 1])?;
        let mut budget = s - 1;
        let mut sizes: Vec<usize> = inner
            .sizes
            .iter()
            .map(|&a| {
                let take = a.min(budget);
                budget -= take;
                take
            })
            .collect();
        sizes.push(0);
        return Ok(PartitionSpec::new(
            sizes,
            s,
            PartitionBranch::GenEqualityRestrict,
        ));
    }
    partition_sizes(&TargetLengths::from_sorted(l)?)
}

/// Colors `K_(p-1)` so that no color-`j`-avoiding path has order `l_j`.
pub fn construct_extremal(
    lengths: &TargetLengths,
) -> Result<(EdgeColoring, PartitionSpec), ExtremalError> {
    let spec = slot_partition(lengths.sorted())?;
    let (p, _) = p_value_sorted(lengths.sorted())?;
    if spec.vertex_count() + 1 != p {
        return Err(ExtremalError::Constraint(format!(
            "partition has {} vertices, expected p - 1 = {}",
            spec.vertex_count(),
            p - 1
        )));
    }
    let block: Vec<usize> = spec
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(idx, &a)| std::iter::repeat_n(idx, a))
        .collect();
    let colors = lengths.colors();
    let coloring = EdgeColoring::from_fn(block.len(), lengths.len(), |u, v| {
        colors[block[u].max(block[v])]
    })
    .expect("slot colors lie in 1..=t");
    Ok((coloring, spec))
}
