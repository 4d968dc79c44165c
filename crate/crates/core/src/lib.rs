//! Exact (t-1)-chromatic Ramsey numbers for paths.
//!
//! * [`formula`]: closed forms for `p(l_1, ..., l_t)`, `s(...)` and `R(l, t)`.
//! * [`coloring`]: edge colorings of `K_n`, witness paths, merges and subgraphs.
//! * [`extremal`]: lower-bound colorings on `p - 1` vertices.
//! * [`oracle`]: exact longest color-avoiding paths.
//! * [`search`]: exhaustive enumeration of all colorings of small `K_n`.
//! * [`extract`]: constructive witness extraction for `n >= p`.
//! * [`certify`]: end-to-end certification over a grid of target tuples.

pub mod certify;
pub mod coloring;
pub mod extract;
pub mod extremal;
pub mod formula;
pub mod oracle;
pub mod search;

pub use coloring::{validate_witness, ColorMergeMap, EdgeColoring, WitnessPath};
pub use extract::{extract, Extractor};
pub use extremal::{construct_extremal, PartitionSpec};
pub use formula::{p_value, r_value, s_value, TargetLengths};
