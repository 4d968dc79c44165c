//! Closed forms for the asymmetric path number `p(l1, ..., lt)`, the weighted
//! floor `s(l1, ..., lk)` and the symmetric value `R(l, t)`.
//!
//! All arithmetic is exact and checked: inputs whose weighted sums do not fit
//! in a `u64` are rejected instead of wrapping.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("need at least 2 target lengths, got {0}")]
    TooFewColors(usize),
    #[error("target length {length} for color {color} is below 2")]
    LengthTooSmall { color: usize, length: usize },
    #[error("target lengths are not sorted nondecreasingly: {0:?}")]
    Unsorted(Vec<usize>),
    #[error("weighted sum overflows 64-bit arithmetic for {0} colors")]
    Overflow(usize),
}

/// Target path orders, one per color, kept sorted.
///
/// `colors()[k]` is the (1-based) color whose target sits in sorted slot `k`.
/// Ties are broken by color label, so the slot order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetLengths {
    sorted: Vec<usize>,
    colors: Vec<usize>,
}

impl TargetLengths {
    /// Builds from per-color targets: `per_color[c - 1]` is the target of color `c`.
    pub fn new(per_color: &[usize]) -> Result<Self, FormulaError> {
        if per_color.len() < 2 {
            return Err(FormulaError::TooFewColors(per_color.len()));
        }
        if let Some((idx, &length)) = per_color.iter().enumerate().find(|(_, &l)| l < 2) {
            return Err(FormulaError::LengthTooSmall {
                color: idx + 1,
                length,
            });
        }
        let mut colors: Vec<usize> = (1..=per_color.len()).collect();
        colors.sort_by_key(|&c| (per_color[c - 1], c));
        let sorted = colors.iter().map(|&c| per_color[c - 1]).collect();
        Ok(TargetLengths { sorted, colors })
    }

    /// Builds from a tuple that must already be sorted; color `k + 1` owns slot `k`.
    pub fn from_sorted(sorted: &[usize]) -> Result<Self, FormulaError> {
        if sorted.windows(2).any(|w| w[0] > w[1]) {
            return Err(FormulaError::Unsorted(sorted.to_vec()));
        }
        Self::new(sorted)
    }

    pub fn sorted(&self) -> &[usize] {
        &self.sorted
    }

    /// Slot to color permutation (colors are 1-based).
    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Target of a 1-based color.
    pub fn target_of(&self, color: usize) -> usize {
        let slot = self
            .colors
            .iter()
            .position(|&c| c == color)
            .expect("color in range");
        self.sorted[slot]
    }

    /// Targets indexed by color: entry `c - 1` belongs to color `c`.
    pub fn per_color(&self) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (slot, &c) in self.colors.iter().enumerate() {
            out[c - 1] = self.sorted[slot];
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    TwoColorBase,
    GenEquality,
    MainFormula,
}

/// Which case of the recursion produced a value, plus the intermediate numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchTrace {
    pub branch: Branch,
    /// `p` of the tuple without its largest entry (absent for two colors).
    pub prefix_p: Option<usize>,
    /// `s` of the full tuple, when the main formula fired.
    pub s_value: Option<usize>,
    /// `p` of every prefix of length `2..=t`, in order.
    pub prefix_values: Vec<usize>,
    /// The branch taken at each prefix length `2..=t`.
    pub prefix_branches: Vec<Branch>,
}

fn check_sorted(lengths: &[usize]) -> Result<(), FormulaError> {
    if lengths.len() < 2 {
        return Err(FormulaError::TooFewColors(lengths.len()));
    }
    if let Some((idx, &length)) = lengths.iter().enumerate().find(|(_, &l)| l < 2) {
        return Err(FormulaError::LengthTooSmall {
            color: idx + 1,
            length,
        });
    }
    if lengths.windows(2).any(|w| w[0] > w[1]) {
        return Err(FormulaError::Unsorted(lengths.to_vec()));
    }
    Ok(())
}

/// `floor((l1 + 2 l2 + ... + 2^(k-1) lk - 2) / (2^k - 2))` for a sorted tuple.
pub fn s_value(lengths: &[usize]) -> Result<usize, FormulaError> {
    check_sorted(lengths)?;
    let k = lengths.len();
    let overflow = || FormulaError::Overflow(k);
    if k >= 64 {
        return Err(overflow());
    }
    let mut numerator: u64 = 0;
    for (idx, &l) in lengths.iter().enumerate() {
        let weighted = (l as u64).checked_mul(1u64 << idx).ok_or_else(overflow)?;
        numerator = numerator.checked_add(weighted).ok_or_else(overflow)?;
    }
    // l1 >= 2, so the numerator never goes negative.
    let numerator = numerator - 2;
    let denominator = (1u64 << k) - 2;
    usize::try_from(numerator / denominator).map_err(|_| overflow())
}

/// `p(l1, l2) = l2 + floor(l1 / 2) - 1` for `l1 <= l2`.
fn two_color(l1: usize, l2: usize) -> usize {
    l2 + l1 / 2 - 1
}

/// `p` of a sorted tuple together with the branch that produced it.
pub fn p_value_sorted(lengths: &[usize]) -> Result<(usize, BranchTrace), FormulaError> {
    check_sorted(lengths)?;
    let t = lengths.len();
    let mut p = two_color(lengths[0], lengths[1]);
    let mut prefix_values = vec![p];
    let mut prefix_branches = vec![Branch::TwoColorBase];
    let mut prefix_p = None;
    let mut s_top = None;
    for k in 3..=t {
        let lk = lengths[k - 1];
        prefix_p = Some(p);
        if lk >= p {
            prefix_branches.push(Branch::GenEquality);
            s_top = None;
        } else {
            let s = s_value(&lengths[..k])?;
            prefix_branches.push(Branch::MainFormula);
            p = s;
            s_top = Some(s);
        }
        prefix_values.push(p);
    }
    let branch = *prefix_branches.last().expect("at least one prefix");
    Ok((
        p,
        BranchTrace {
            branch,
            prefix_p,
            s_value: s_top,
            prefix_values,
            prefix_branches,
        },
    ))
}

pub fn p_value(lengths: &TargetLengths) -> Result<(usize, BranchTrace), FormulaError> {
    p_value_sorted(lengths.sorted())
}

/// `p` of targets given per color in any order.
pub fn p_of(per_color: &[usize]) -> Result<usize, FormulaError> {
    let lengths = TargetLengths::new(per_color)?;
    p_value(&lengths).map(|(p, _)| p)
}

/// The symmetric value `l + floor((l - 2) / (2^t - 2))`.
pub fn r_value(l: usize, t: usize) -> Result<usize, FormulaError> {
    if t < 2 {
        return Err(FormulaError::TooFewColors(t));
    }
    if l < 2 {
        return Err(FormulaError::LengthTooSmall {
            color: 1,
            length: l,
        });
    }
    if t >= 64 {
        return Err(FormulaError::Overflow(t));
    }
    let denominator = (1u64 << t) - 2;
    Ok(l + ((l as u64 - 2) / denominator) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_value_examples() {
        assert_eq!(s_value(&[8, 8, 8]).unwrap(), 9);
        assert_eq!(s_value(&[2, 2]).unwrap(), 2);
        assert_eq!(s_value(&[16, 16, 16, 16]).unwrap(), 17);
    }

    #[test]
    fn s_value_rejects_bad_input() {
        assert_eq!(s_value(&[5]), Err(FormulaError::TooFewColors(1)));
        assert!(matches!(
            s_value(&[1, 4]),
            Err(FormulaError::LengthTooSmall {
                color: 1,
                length: 1
            })
        ));
        assert!(matches!(s_value(&[5, 4]), Err(FormulaError::Unsorted(_))));
    }

    #[test]
    fn s_value_overflow_is_an_error() {
        assert_eq!(s_value(&[2; 64]), Err(FormulaError::Overflow(64)));
        let mut big = vec![2; 62];
        big.push(usize::MAX / 2);
        assert_eq!(s_value(&big), Err(FormulaError::Overflow(63)));
    }

    #[test]
    fn p_value_examples() {
        let (p, tr) = p_value_sorted(&[4, 6]).unwrap();
        assert_eq!((p, tr.branch), (7, Branch::TwoColorBase));

        let (p, tr) = p_value_sorted(&[3, 4, 5]).unwrap();
        assert_eq!(
            (p, tr.branch, tr.prefix_p),
            (4, Branch::GenEquality, Some(4))
        );

        let (p, tr) = p_value_sorted(&[8, 8, 8]).unwrap();
        assert_eq!((p, tr.branch), (9, Branch::MainFormula));
        assert_eq!(tr.prefix_p, Some(11));
        assert_eq!(tr.s_value, Some(9));

        let (p, tr) = p_value_sorted(&[10, 10, 10, 10]).unwrap();
        assert_eq!(p, 10);
        assert_eq!(tr.prefix_values, vec![14, 11, 10]);
        assert_eq!(tr.branch, Branch::MainFormula);
    }

    #[test]
    fn p_value_rejects_unsorted() {
        assert!(matches!(
            p_value_sorted(&[5, 4, 3]),
            Err(FormulaError::Unsorted(_))
        ));
        // The TargetLengths route sorts first.
        assert_eq!(p_of(&[5, 4, 3]).unwrap(), 4);
    }

    #[test]
    fn r_value_examples() {
        assert_eq!(r_value(5, 2).unwrap(), 6);
        assert_eq!(r_value(2, 3).unwrap(), 2);
        assert_eq!(r_value(16, 4).unwrap(), 17);
        assert!(r_value(1, 3).is_err());
        assert!(r_value(4, 1).is_err());
    }

    #[test]
    fn target_lengths_keeps_permutation() {
        let tl = TargetLengths::new(&[7, 3, 7, 5]).unwrap();
        assert_eq!(tl.sorted(), &[3, 5, 7, 7]);
        assert_eq!(tl.colors(), &[2, 4, 1, 3]);
        assert_eq!(tl.per_color(), vec![7, 3, 7, 5]);
        assert_eq!(tl.target_of(4), 5);
    }
}
