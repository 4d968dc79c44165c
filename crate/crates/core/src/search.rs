//! Exhaustive check of the definition of `p`: does every t-coloring of `K_n`
//! contain, for some color `j`, a color-`j`-avoiding path of order `l_j`?
//!
//! Colorings are enumerated in lexicographic order of the canonical edge list
//! (first edge most significant). The index space is cut into contiguous
//! chunks whose boundaries depend only on the input, and the chunks are
//! processed on a rayon pool. Any counterexample wins.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{edge_count, EdgeColoring};
use crate::formula::TargetLengths;
use crate::oracle::{is_valid_lower_witness, longest_path_dp, OracleError, DP_MAX_N};

/// Default cap on the number of colorings `exhaustive_verify_upper` enumerates.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

const CHUNKS_PER_JOB: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("enumeration needs {required} colorings, budget is {budget}")]
    OverBudget { required: String, budget: u64 },
    #[error("exhaustive search needs n <= {max}, got {n}")]
    TooManyVertices { n: usize, max: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("counterexample failed re-verification: {0}")]
    Reverification(String),
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    AllColoringsContainWitness,
    CounterexampleFound,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Fix edge `{0, 1}` to color 1; only honored for constant target tuples.
    pub prune_color_symmetry: bool,
    pub jobs: usize,
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            prune_color_symmetry: false,
            jobs: 1,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchReport {
    pub n: usize,
    pub t: usize,
    /// Targets indexed by color.
    pub targets: Vec<usize>,
    pub verdict: Verdict,
    pub counterexample: Option<EdgeColoring>,
    /// Colorings actually enumerated (all of them unless a counterexample stopped the run).
    pub colorings_examined: u64,
    /// Colorings covered by the verdict; `t` times the enumerated count when pruned.
    pub colorings_verified: u64,
    pub symmetry_pruned: bool,
    pub elapsed_secs: f64,
}

/// `true` iff some color `j` has an avoiding path of order `targets[j - 1]`.
fn has_witness(edges: &[u8], n: usize, targets: &[usize], adj: &mut [u64]) -> bool {
    for (j, &target) in targets.iter().enumerate() {
        if target > n {
            continue;
        }
        let avoided = (j + 1) as u8;
        adj.iter_mut().for_each(|m| *m = 0);
        let mut idx = 0;
        for v in 1..n {
            for u in 0..v {
                if edges[idx] != avoided {
                    adj[u] |= 1 << v;
                    adj[v] |= 1 << u;
                }
                idx += 1;
            }
        }
        if longest_path_dp(adj, Some(target)).len() >= target {
            return true;
        }
    }
    false
}

fn decode(mut index: u64, t: u64, digits: &mut [u8]) {
    for d in digits.iter_mut().rev() {
        *d = (index % t) as u8 + 1;
        index /= t;
    }
}

fn increment(digits: &mut [u8], t: u8) {
    for d in digits.iter_mut().rev() {
        if *d < t {
            *d += 1;
            return;
        }
        *d = 1;
    }
}

/// Enumerates every t-coloring of `K_n` (or the pruned subset) and reports
/// whether each one contains a witness.
pub fn exhaustive_verify_upper(
    n: usize,
    lengths: &TargetLengths,
    options: SearchOptions,
) -> Result<SearchReport, SearchError> {
    let start = Instant::now();
    if n > DP_MAX_N {
        return Err(SearchError::TooManyVertices { n, max: DP_MAX_N });
    }
    let t = lengths.len();
    let targets = lengths.per_color();
    let m = edge_count(n);
    let constant = targets.iter().all(|&l| l == targets[0]);
    let pruned = options.prune_color_symmetry && constant && m >= 1;
    let free = if pruned { m - 1 } else { m };
    let total = (t as u64)
        .checked_pow(free as u32)
        .filter(|&k| k <= options.budget)
        .ok_or_else(|| SearchError::OverBudget {
            required: format!("{t}^{free}"),
            budget: options.budget,
        })?;

    let jobs = options.jobs.max(1);
    let chunk_count = (jobs as u64 * CHUNKS_PER_JOB).min(total).max(1);
    let chunk_len = total.div_ceil(chunk_count);
    let found = AtomicBool::new(false);
    let examined = AtomicU64::new(0);

    let run_chunk = |chunk: u64| -> Option<(u64, Vec<u8>)> {
        let lo = chunk * chunk_len;
        let hi = (lo + chunk_len).min(total);
        let mut edges = vec![1u8; m];
        let offset = usize::from(pruned);
        decode(lo, t as u64, &mut edges[offset..]);
        let mut adj = vec![0u64; n];
        let mut local = 0;
        let mut hit = None;
        for index in lo..hi {
            if found.load(Ordering::Relaxed) {
                break;
            }
            local += 1;
            if !has_witness(&edges, n, &targets, &mut adj) {
                found.store(true, Ordering::Relaxed);
                hit = Some((index, edges.clone()));
                break;
            }
            increment(&mut edges[offset..], t as u8);
        }
        examined.fetch_add(local, Ordering::Relaxed);
        hit
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| SearchError::Pool(e.to_string()))?;
    let hit = pool.install(|| {
        (0..chunk_count)
            .into_par_iter()
            .filter_map(run_chunk)
            .min_by_key(|(index, _)| *index)
    });

    let examined = examined.into_inner();
    let (verdict, counterexample) = match hit {
        None => (Verdict::AllColoringsContainWitness, None),
        Some((_, edges)) => {
            let edges: Vec<usize> = edges.iter().map(|&c| c as usize).collect();
            let c = EdgeColoring::new(n, t, &edges)
                .map_err(|e| SearchError::Reverification(e.to_string()))?;
            if !is_valid_lower_witness(&c, lengths)? {
                return Err(SearchError::Reverification(format!(
                    "oracle finds a witness in {}",
                    serde_json::to_string(&c).unwrap_or_default()
                )));
            }
            (Verdict::CounterexampleFound, Some(c))
        }
    };
    let colorings_verified = if pruned {
        examined * t as u64
    } else {
        examined
    };
    Ok(SearchReport {
        n,
        t,
        targets,
        verdict,
        counterexample,
        colorings_examined: examined,
        colorings_verified,
        symmetry_pruned: pruned,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}
