//! Exact longest color-avoiding paths.
//!
//! Up to [`DP_MAX_N`] vertices the search is a dynamic program over
//! `(vertex subset, endpoint)` states; between that and [`ORACLE_MAX_N`] a
//! depth-first branch and bound takes over. Anything larger is refused with
//! [`OracleError::Capability`] rather than answered approximately.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coloring::EdgeColoring;
use crate::formula::TargetLengths;

/// Largest vertex count handled by the subset dynamic program.
pub const DP_MAX_N: usize = 22;
/// Largest vertex count the oracle answers at all.
pub const ORACLE_MAX_N: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("exact path search supports at most {max} vertices, got {n}")]
    Capability { n: usize, max: usize },
    #[error("avoided color {color} outside 1..={t}")]
    BadColor { color: usize, t: usize },
    #[error("coloring uses {coloring} colors but {targets} targets were given")]
    ColorCountMismatch { coloring: usize, targets: usize },
}

/// A longest path found by the oracle (or the first path reaching `stop_at`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvoidingPath {
    pub order: usize,
    pub vertices: Vec<usize>,
}

/// Longest path in the graph of edges not colored `avoided`.
///
/// With `stop_at = Some(k)` the search may stop as soon as a path of order
/// `>= k` is found; the returned order is then `>= k` but not necessarily
/// maximal. The returned vertex sequence always realizes the returned order.
pub fn longest_avoiding_path(
    c: &EdgeColoring,
    avoided: usize,
    stop_at: Option<usize>,
) -> Result<AvoidingPath, OracleError> {
    if avoided == 0 || avoided > c.t() {
        return Err(OracleError::BadColor {
            color: avoided,
            t: c.t(),
        });
    }
    if c.n() > ORACLE_MAX_N {
        return Err(OracleError::Capability {
            n: c.n(),
            max: ORACLE_MAX_N,
        });
    }
    let adj = c.avoiding_masks(avoided);
    let path = if c.n() <= DP_MAX_N {
        longest_path_dp(&adj, stop_at)
    } else {
        longest_path_dfs(&adj, stop_at)
    };
    Ok(AvoidingPath {
        order: path.len(),
        vertices: path,
    })
}

/// Subset dynamic program. `adj[v]` is the neighbor mask of `v`; `adj.len() <= DP_MAX_N`.
pub fn longest_path_dp(adj: &[u64], stop_at: Option<usize>) -> Vec<usize> {
    let n = adj.len();
    assert!(n <= DP_MAX_N, "subset DP limited to {DP_MAX_N} vertices");
    if n == 0 {
        return Vec::new();
    }
    let stop = stop_at.unwrap_or(n).clamp(1, n);
    // reach[mask] has bit v set iff some path visits exactly `mask` and ends at v.
    let mut reach = vec![0u32; 1 << n];
    let mut best: (usize, usize) = (1, 0);
    let mut best_order = 1;
    for mask in 1usize..(1 << n) {
        let order = mask.count_ones() as usize;
        if order == 1 {
            reach[mask] = mask as u32;
            continue;
        }
        let mut ends = 0u32;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if reach[mask ^ (1 << v)] as u64 & adj[v] != 0 {
                ends |= 1 << v;
            }
        }
        reach[mask] = ends;
        if ends != 0 && order > best_order {
            best_order = order;
            best = (mask, ends.trailing_zeros() as usize);
            if order >= stop {
                break;
            }
        }
    }
    if best_order == 1 {
        return vec![0];
    }
    let (mut mask, mut v) = best;
    let mut path = vec![v];
    while mask.count_ones() > 1 {
        let prev = mask ^ (1 << v);
        let u = (reach[prev] as u64 & adj[v]).trailing_zeros() as usize;
        path.push(u);
        mask = prev;
        v = u;
    }
    path
}

/// Depth-first branch and bound; exact, intended for `DP_MAX_N < n <= 64`.
pub fn longest_path_dfs(adj: &[u64], stop_at: Option<usize>) -> Vec<usize> {
    let n = adj.len();
    assert!(n <= 64);
    if n == 0 {
        return Vec::new();
    }
    let stop = stop_at.unwrap_or(n).clamp(1, n);
    let mut search = Dfs {
        adj,
        best: vec![0],
        stop,
        path: Vec::with_capacity(n),
    };
    for start in 0..n {
        search.path.clear();
        search.path.push(start);
        search.grow(1u64 << start);
        if search.best.len() >= search.stop {
            break;
        }
    }
    search.best
}

struct Dfs<'a> {
    adj: &'a [u64],
    best: Vec<usize>,
    stop: usize,
    path: Vec<usize>,
}

impl Dfs<'_> {
    /// Vertices still reachable from `v` without touching `used`.
    fn reachable(&self, v: usize, used: u64) -> u64 {
        let mut seen = 0u64;
        let mut frontier = self.adj[v] & !used;
        while frontier != 0 {
            seen |= frontier;
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adj[u];
            }
            frontier = next & !used & !seen;
        }
        seen
    }

    fn grow(&mut self, used: u64) {
        if self.path.len() > self.best.len() {
            self.best = self.path.clone();
        }
        if self.best.len() >= self.stop {
            return;
        }
        let v = *self.path.last().unwrap();
        let bound = self.path.len() + self.reachable(v, used).count_ones() as usize;
        if bound <= self.best.len() {
            return;
        }
        let mut next = self.adj[v] & !used;
        while next != 0 {
            let u = next.trailing_zeros() as usize;
            next &= next - 1;
            self.path.push(u);
            self.grow(used | (1 << u));
            self.path.pop();
            if self.best.len() >= self.stop {
                return;
            }
        }
    }
}

/// Longest avoiding order for each color `1..=t`.
pub fn longest_orders(c: &EdgeColoring) -> Result<Vec<usize>, OracleError> {
    (1..=c.t())
        .map(|j| longest_avoiding_path(c, j, None).map(|p| p.order))
        .collect()
}

/// True iff for every color `j` there is no color-`j`-avoiding path of order `l_j`.
pub fn is_valid_lower_witness(
    c: &EdgeColoring,
    lengths: &TargetLengths,
) -> Result<bool, OracleError> {
    if c.t() != lengths.len() {
        return Err(OracleError::ColorCountMismatch {
            coloring: c.t(),
            targets: lengths.len(),
        });
    }
    for j in 1..=c.t() {
        let target = lengths.target_of(j);
        if longest_avoiding_path(c, j, Some(target))?.order >= target {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Uniformly random t-coloring of `K_n`, a pure function of `(n, t, seed)`.
pub fn random_coloring(n: usize, t: usize, seed: u64) -> EdgeColoring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EdgeColoring::from_fn(n, t, |_, _| rng.gen_range(1..=t)).expect("colors drawn in range")
}
