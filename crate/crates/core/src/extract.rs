//! Constructive witness extraction.
//!
//! Given a t-coloring of `K_n` with `n >= p(l_1, ..., l_t)`, [`extract`]
//! returns a path of order `l_j` avoiding some color `j`. The recursion
//! follows the inductive upper-bound argument step by step:
//!
//! * two colors are handled directly by [`base_two_color`];
//! * if `l_t >= p(prefix)`, the two largest-target colors are merged;
//! * if `l_1 <= 3`, everything except the smallest-target color is merged
//!   into one class and the two-color case applies;
//! * otherwise a maximum color-degree pivot `(x, i)` is removed, targets are
//!   reduced, and the path returned from `G - x` is repaired by
//!   [`Extractor::lemmaxdegree_resolve`] and [`Extractor::lemcycle_resolve`].
//!
//! Every numeric fact the argument relies on (sub-instance sizes, `l_t <= s`,
//! spare vertex counts) is checked at run time. A failed check or a reached
//! contradiction branch is reported as [`ExtractError::Invariant`].

use serde::Serialize;
use thiserror::Error;

use crate::coloring::{validate_witness, ColorMergeMap, ColoringError, EdgeColoring, WitnessPath};
use crate::formula::{p_of, p_value, Branch, FormulaError, TargetLengths};
use crate::oracle::{longest_avoiding_path, ORACLE_MAX_N};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
    #[error("two-color base case on {n} vertices exceeds exact search capability")]
    Capability { n: usize },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(ExtractError::Invariant(format!($($arg)+)));
        }
    };
}

/// Vertex and color maximizing the color degree; ties go to the lowest
/// vertex, then the lowest color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pivot {
    pub vertex: usize,
    pub color: usize,
    pub degree: usize,
}

pub fn max_degree_pivot(c: &EdgeColoring) -> Pivot {
    let mut best = Pivot {
        vertex: 0,
        color: 1,
        degree: 0,
    };
    let mut first = true;
    for x in 0..c.n() {
        let mut degrees = vec![0usize; c.t()];
        for u in (0..c.n()).filter(|&u| u != x) {
            degrees[c.color(x, u) - 1] += 1;
        }
        for (idx, &d) in degrees.iter().enumerate() {
            if first || d > best.degree {
                best = Pivot {
                    vertex: x,
                    color: idx + 1,
                    degree: d,
                };
                first = false;
            }
        }
    }
    best
}

/// Counters for every branch the extractor can take.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExtractStats {
    pub calls: u64,
    pub max_depth: usize,
    pub two_color: u64,
    pub two_color_greedy: u64,
    pub two_color_oracle: u64,
    pub gen_equality: u64,
    pub small_l1: u64,
    pub main: u64,
    pub main_reduced: u64,
    pub main_dropped_color: u64,
    pub main_direct: u64,
    pub maxdeg_calls: u64,
    pub maxdeg_cycle: u64,
    pub maxdeg_case1_outside: u64,
    pub maxdeg_case1_rotation_cycle: u64,
    pub maxdeg_case1_extend: u64,
    pub maxdeg_case2_rotation: u64,
    pub maxdeg_case2_extend: u64,
    /// Contradiction branches reached. Nonzero means a bug.
    pub contradictions: u64,
    pub cycle_calls: u64,
    pub cycle_cross_edge: u64,
    pub cycle_hamilton: u64,
    pub cycle_case1_direct: u64,
    pub cycle_case1_recurse: u64,
    pub cycle_case2_direct: u64,
    pub cycle_case2_recurse: u64,
}

impl ExtractStats {
    pub fn absorb(&mut self, other: &ExtractStats) {
        macro_rules! add {
            ($($f:ident),*) => { $( self.$f += other.$f; )* };
        }
        add!(
            calls,
            two_color,
            two_color_greedy,
            two_color_oracle,
            gen_equality,
            small_l1,
            main,
            main_reduced,
            main_dropped_color,
            main_direct,
            maxdeg_calls,
            maxdeg_cycle,
            maxdeg_case1_outside,
            maxdeg_case1_rotation_cycle,
            maxdeg_case1_extend,
            maxdeg_case2_rotation,
            maxdeg_case2_extend,
            contradictions,
            cycle_calls,
            cycle_cross_edge,
            cycle_hamilton,
            cycle_case1_direct,
            cycle_case1_recurse,
            cycle_case2_direct,
            cycle_case2_recurse
        );
        self.max_depth = self.max_depth.max(other.max_depth);
    }
}

/// One audited step of an extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub depth: usize,
    pub branch: &'static str,
    /// Vertex count of the working graph.
    pub n: usize,
    /// Targets indexed by color, at this level.
    pub targets: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pivot: Option<Pivot>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_length: Option<usize>,
}

/// Runs extractions and accumulates their trace and counters.
#[derive(Debug)]
pub struct Extractor {
    trace: Vec<TraceStep>,
    stats: ExtractStats,
    depth_limit: usize,
}

/// Extracts a witness with a fresh [`Extractor`].
pub fn extract(c: &EdgeColoring, targets: &[usize]) -> Result<WitnessPath, ExtractError> {
    Extractor::new().run(c, targets)
}

fn others(n: usize, skip: &[usize]) -> Vec<usize> {
    (0..n).filter(|v| !skip.contains(v)).collect()
}

fn lift(w: WitnessPath, back: &[usize]) -> WitnessPath {
    WitnessPath {
        avoided_color: w.avoided_color,
        vertices: w.vertices.into_iter().map(|v| back[v]).collect(),
    }
}

/// Color other than `skip` with the largest target, lowest label on ties.
fn merge_partner(targets: &[usize], skip: usize) -> usize {
    (1..=targets.len())
        .filter(|&c| c != skip)
        .max_by_key(|&c| (targets[c - 1], std::cmp::Reverse(c)))
        .expect("at least two colors")
}

/// Alternates `far, near, far, near, ...` after the end of `path`, adding
/// `2 * min(|near|, |far|)` vertices. Every edge between the path end or a
/// near vertex and a far vertex must have color `cross_color`, which must
/// differ from the avoided color.
pub fn alternate_extend(
    c: &EdgeColoring,
    path: &WitnessPath,
    spare_near: &[usize],
    spare_far: &[usize],
    cross_color: usize,
) -> Result<WitnessPath, ExtractError> {
    let pairs = spare_near.len().min(spare_far.len());
    if pairs == 0 {
        return Ok(path.clone());
    }
    let fail = |msg: String| Err(ExtractError::Precondition(msg));
    if cross_color == path.avoided_color {
        return fail(format!("cross color {cross_color} is the avoided color"));
    }
    let Some(&end) = path.vertices.last() else {
        return fail("cannot extend an empty path".into());
    };
    let mut used = vec![false; c.n()];
    for &v in path.vertices.iter().chain(spare_near).chain(spare_far) {
        if v >= c.n() || std::mem::replace(&mut used[v], true) {
            return fail(format!("vertex {v} repeated or out of range"));
        }
    }
    let near_side = std::iter::once(end).chain(spare_near[..pairs].iter().copied());
    for a in near_side {
        for &b in &spare_far[..pairs] {
            if c.color(a, b) != cross_color {
                return fail(format!(
                    "edge {{{a},{b}}} does not have color {cross_color}"
                ));
            }
        }
    }
    let mut out = path.clone();
    for k in 0..pairs {
        out.vertices.push(spare_far[k]);
        out.vertices.push(spare_near[k]);
    }
    Ok(out)
}

/// Alternating path `first[0], second[0], first[1], ...` using every vertex of
/// the shorter side and one extra vertex of `first` when it is longer.
fn zigzag(first: &[usize], second: &[usize]) -> Vec<usize> {
    let pairs = first.len().min(second.len());
    let mut out = Vec::with_capacity(2 * pairs + 1);
    for k in 0..pairs {
        out.push(first[k]);
        out.push(second[k]);
    }
    if first.len() > pairs {
        out.push(first[pairs]);
    }
    out
}

/// Grows a path in the graph `adj` by extension and endpoint rotation.
fn rotation_extension(adj: &[u64], start: usize, need: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut path = vec![start];
    let mut used = 1u64 << start;
    let max_rotations = 4 * n * n;
    let mut rotations = 0;
    let mut reversed_at = usize::MAX;
    while path.len() < need {
        let end = *path.last().unwrap();
        let free = adj[end] & !used;
        if free != 0 {
            let u = free.trailing_zeros() as usize;
            path.push(u);
            used |= 1 << u;
            continue;
        }
        if adj[path[0]] & !used != 0 && reversed_at != path.len() {
            reversed_at = path.len();
            path.reverse();
            continue;
        }
        rotations += 1;
        if rotations > max_rotations {
            return None;
        }
        let len = path.len();
        let pivots: Vec<usize> = (0..len.saturating_sub(2))
            .filter(|&k| adj[end] >> path[k] & 1 == 1)
            .collect();
        if pivots.is_empty() {
            return None;
        }
        let k = pivots
            .iter()
            .copied()
            .find(|&k| adj[path[k + 1]] & !used != 0)
            .unwrap_or(pivots[rotations % pivots.len()]);
        path[k + 1..].reverse();
    }
    Some(path)
}

/// Two-color base: a path of order `l1` avoiding color 1 or of order `l2`
/// avoiding color 2, given `n >= p(l1, l2)`.
pub fn base_two_color(c: &EdgeColoring, l1: usize, l2: usize) -> Result<WitnessPath, ExtractError> {
    Extractor::new().base_two_color(c, l1, l2)
}

impl Default for Extractor {
    fn default() -> Self {
        Extractor {
            trace: Vec::new(),
            stats: ExtractStats::default(),
            depth_limit: usize::MAX,
        }
    }
}

impl Extractor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn trace(&self) -> &[TraceStep] {
        &self.trace
    }

    pub fn stats(&self) -> &ExtractStats {
        &self.stats
    }

    /// Extracts a witness for `c`, where `targets[j - 1]` is the target order
    /// of color `j`. The witness is re-validated against `c` before returning.
    pub fn run(
        &mut self,
        c: &EdgeColoring,
        targets: &[usize],
    ) -> Result<WitnessPath, ExtractError> {
        if targets.len() != c.t() {
            return Err(ExtractError::Precondition(format!(
                "{} targets for a {}-coloring",
                targets.len(),
                c.t()
            )));
        }
        let p = p_of(targets)?;
        if c.n() < p {
            return Err(ExtractError::Precondition(format!(
                "coloring has {} vertices, p = {p} are needed",
                c.n()
            )));
        }
        self.depth_limit = targets.iter().sum();
        let w = self.solve(c, targets, 0)?;
        let required = targets[w.avoided_color - 1];
        ensure!(
            w.order() == required && validate_witness(c, &w, required),
            "extracted witness {w:?} fails validation"
        );
        Ok(w)
    }

    fn record(
        &mut self,
        depth: usize,
        branch: &'static str,
        n: usize,
        targets: &[usize],
        pivot: Option<Pivot>,
        cycle_length: Option<usize>,
    ) {
        let step = self.trace.len();
        self.trace.push(TraceStep {
            step,
            depth,
            branch,
            n,
            targets: targets.to_vec(),
            pivot,
            cycle_length,
        });
    }

    /// Solves `g` with per-color `targets`; the witness has exactly the target
    /// order of its avoided color and uses `g`'s labels.
    fn solve(
        &mut self,
        g: &EdgeColoring,
        targets: &[usize],
        depth: usize,
    ) -> Result<WitnessPath, ExtractError> {
        self.stats.calls += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        ensure!(
            depth <= self.depth_limit,
            "recursion depth {depth} exceeds {}",
            self.depth_limit
        );
        ensure!(
            g.t() == targets.len(),
            "{} targets for {} colors",
            targets.len(),
            g.t()
        );
        let lengths = TargetLengths::new(targets)?;
        let (s, trace) = p_value(&lengths)?;
        ensure!(
            g.n() >= s,
            "sub-instance has {} vertices but p = {s}",
            g.n()
        );

        let restricted;
        let g = if g.n() > s {
            restricted = g.induced_subgraph(&(0..s).collect::<Vec<_>>())?.0;
            &restricted
        } else {
            g
        };
        let t = targets.len();
        let sorted = lengths.sorted();
        let slot_color = lengths.colors();

        if t == 2 {
            self.record(depth, "two_color", s, targets, None, None);
            return self.base_two_color(g, targets[0], targets[1]);
        }

        if trace.branch == Branch::GenEquality {
            self.stats.gen_equality += 1;
            self.record(depth, "gen_equality", s, targets, None, None);
            let keep = slot_color[t - 2];
            let map = ColorMergeMap::merging(t, &[keep, slot_color[t - 1]])?;
            return self.solve_merged(g, &map, keep, |c| targets[c - 1], depth);
        }

        if sorted[0] <= 3 {
            self.stats.small_l1 += 1;
            self.record(depth, "small_l1", s, targets, None, None);
            let merged: Vec<usize> = slot_color[1..].to_vec();
            let map = ColorMergeMap::merging(t, &merged)?;
            return self.solve_merged(g, &map, slot_color[1], |c| targets[c - 1], depth);
        }

        self.stats.main += 1;
        ensure!(
            sorted[t - 1] <= s,
            "l_t = {} exceeds s = {s} in main branch",
            sorted[t - 1]
        );
        let pivot = max_degree_pivot(g);
        self.record(depth, "main", s, targets, Some(pivot), None);
        let (x, i) = (pivot.vertex, pivot.color);
        let rest = others(s, &[x]);
        let (gx, back) = g.induced_subgraph(&rest)?;

        let reduced: Vec<usize> = (1..=t)
            .map(|c| {
                if c == i {
                    targets[c - 1]
                } else {
                    targets[c - 1] - 2
                }
            })
            .collect();
        let p_reduced = p_of(&reduced)?;
        let w = if p_reduced < s {
            self.stats.main_reduced += 1;
            let w = lift(self.solve(&gx, &reduced, depth + 1)?, &back);
            if w.avoided_color == i {
                self.stats.main_direct += 1;
                return Ok(w);
            }
            w
        } else {
            ensure!(
                targets[i - 1] == sorted[t - 1] && sorted[t - 1] == s,
                "p(reduced) = {p_reduced} >= s = {s} but l_i = {} is not l_t = s",
                targets[i - 1]
            );
            self.stats.main_dropped_color += 1;
            let partner = merge_partner(targets, i);
            let map = ColorMergeMap::merging(t, &[i, partner])?;
            let sub_targets = |c: usize| targets[c - 1] - 2;
            let p_sub = p_of(
                &(1..=t)
                    .filter(|&c| c != i)
                    .map(sub_targets)
                    .collect::<Vec<_>>(),
            )?;
            ensure!(
                p_sub < s,
                "dropped-color instance needs {p_sub} > s - 1 = {} vertices",
                s - 1
            );
            lift(
                self.solve_merged(&gx, &map, partner, sub_targets, depth)?,
                &back,
            )
        };
        ensure!(
            w.avoided_color != i,
            "path from G - x avoids the pivot color"
        );
        self.lemmaxdegree_resolve(g, targets, w, x, i, depth)
    }

    /// Recurses on `g` recolored by `map`. The merged class carries the target
    /// `target_of(representative)` and reports `representative` as its color;
    /// other classes keep their color's target.
    fn solve_merged(
        &mut self,
        g: &EdgeColoring,
        map: &ColorMergeMap,
        representative: usize,
        target_of: impl Fn(usize) -> usize,
        depth: usize,
    ) -> Result<WitnessPath, ExtractError> {
        let merged = g.merge_colors(map)?;
        let rep_of: Vec<usize> = (1..=map.classes())
            .map(|class| {
                let pre = map.preimage(class);
                if pre.len() > 1 {
                    representative
                } else {
                    pre[0]
                }
            })
            .collect();
        let class_targets: Vec<usize> = rep_of.iter().map(|&c| target_of(c)).collect();
        let w = self.solve(&merged, &class_targets, depth + 1)?;
        Ok(WitnessPath {
            avoided_color: rep_of[w.avoided_color - 1],
            vertices: w.vertices,
        })
    }

    /// Base case for two colors.
    pub fn base_two_color(
        &mut self,
        g: &EdgeColoring,
        l1: usize,
        l2: usize,
    ) -> Result<WitnessPath, ExtractError> {
        self.stats.two_color += 1;
        if g.t() != 2 {
            return Err(ExtractError::Precondition(format!(
                "{}-coloring in two-color base",
                g.t()
            )));
        }
        let p = p_of(&[l1, l2])?;
        if g.n() < p {
            return Err(ExtractError::Precondition(format!(
                "two-color base needs {p} vertices, got {}",
                g.n()
            )));
        }
        let wants = [(1usize, l1), (2usize, l2)];
        if g.n() <= 64 {
            for &(avoided, need) in &wants {
                let adj = g.avoiding_masks(avoided);
                for start in 0..g.n() {
                    if let Some(mut path) = rotation_extension(&adj, start, need) {
                        path.truncate(need);
                        self.stats.two_color_greedy += 1;
                        return Ok(WitnessPath {
                            avoided_color: avoided,
                            vertices: path,
                        });
                    }
                }
            }
        }
        if g.n() > ORACLE_MAX_N {
            return Err(ExtractError::Capability { n: g.n() });
        }
        self.stats.two_color_oracle += 1;
        for &(avoided, need) in &wants {
            let found = longest_avoiding_path(g, avoided, Some(need))
                .map_err(|e| ExtractError::Invariant(e.to_string()))?;
            if found.order >= need {
                let mut vertices = found.vertices;
                vertices.truncate(need);
                return Ok(WitnessPath {
                    avoided_color: avoided,
                    vertices,
                });
            }
        }
        Err(ExtractError::Invariant(format!(
            "no two-color witness for ({l1}, {l2}) on {} vertices",
            g.n()
        )))
    }

    fn contradiction(&mut self, what: &str) -> ExtractError {
        self.stats.contradictions += 1;
        ExtractError::Invariant(format!("maximality of the pivot contradicted ({what})"))
    }

    /// Turns a color-`j`-avoiding path of order `l_j - 2` in `G - x` into a
    /// witness, using that `(x, i)` has maximum color degree in `g`.
    pub fn lemmaxdegree_resolve(
        &mut self,
        g: &EdgeColoring,
        targets: &[usize],
        path: WitnessPath,
        x: usize,
        i: usize,
        depth: usize,
    ) -> Result<WitnessPath, ExtractError> {
        self.stats.maxdeg_calls += 1;
        let j = path.avoided_color;
        let lj = targets[j - 1];
        ensure!(j != i, "path avoids the pivot color");
        ensure!(
            path.order() + 2 == lj,
            "path order {} is not l_j - 2 = {}",
            path.order(),
            lj - 2
        );
        ensure!(!path.vertices.contains(&x), "path passes through the pivot");
        ensure!(
            validate_witness(g, &path, lj - 2),
            "input path is not color-{j}-avoiding"
        );
        ensure!(lj - 1 < g.n(), "no vertex outside P + x");

        let mut p = path.vertices;
        let (y, z) = (p[0], *p.last().unwrap());
        let xy_j = g.color(x, y) == j;
        let xz_j = g.color(x, z) == j;
        if !xy_j && !xz_j {
            self.stats.maxdeg_cycle += 1;
            p.push(x);
            return self.lemcycle_resolve(g, targets, p, j, depth);
        }
        if xy_j && xz_j {
            return self.maxdeg_case2(g, targets, p, x, i, j, depth);
        }
        if xy_j {
            p.reverse();
        }
        self.maxdeg_case1(g, targets, p, x, i, j, depth)
    }

    /// `p[0] = y` with `xy` not of color `j`; `p[m] = z` with `xz` of color `j`.
    #[allow(clippy::too_many_arguments)]
    fn maxdeg_case1(
        &mut self,
        g: &EdgeColoring,
        targets: &[usize],
        p: Vec<usize>,
        x: usize,
        i: usize,
        j: usize,
        depth: usize,
    ) -> Result<WitnessPath, ExtractError> {
        let m = p.len() - 1;
        let z = p[m];
        let mut on = vec![false; g.n()];
        on[x] = true;
        p.iter().for_each(|&v| on[v] = true);

        if let Some(a) = (0..g.n()).find(|&a| !on[a] && g.color(x, a) == i) {
            self.stats.maxdeg_case1_outside += 1;
            let mut vertices: Vec<usize> = p.iter().rev().copied().collect();
            vertices.push(x);
            vertices.push(a);
            return Ok(WitnessPath {
                avoided_color: j,
                vertices,
            });
        }
        for k in 1..m {
            if g.color(x, p[k]) == i && g.color(z, p[k - 1]) != j {
                // x y P w+ z P w x
                self.stats.maxdeg_case1_rotation_cycle += 1;
                let mut cycle = vec![x];
                cycle.extend_from_slice(&p[..k]);
                cycle.extend(p[k..].iter().rev());
                return self.lemcycle_resolve(g, targets, cycle, j, depth);
            }
        }
        let a = (0..g.n())
            .find(|&a| !on[a])
            .expect("checked: a vertex lies outside P + x");
        if g.color(z, a) != j {
            self.stats.maxdeg_case1_extend += 1;
            let mut vertices = vec![x];
            vertices.extend_from_slice(&p);
            vertices.push(a);
            return Ok(WitnessPath {
                avoided_color: j,
                vertices,
            });
        }
        Err(self.contradiction("case 1"))
    }

    /// Both `xy` and `xz` have color `j`.
    #[allow(clippy::too_many_arguments)]
    fn maxdeg_case2(
        &mut self,
        g: &EdgeColoring,
        targets: &[usize],
        p: Vec<usize>,
        x: usize,
        i: usize,
        j: usize,
        depth: usize,
    ) -> Result<WitnessPath, ExtractError> {
        let m = p.len() - 1;
        let z = p[m];
        for k in 1..m {
            if g.color(x, p[k]) == i && g.color(z, p[k - 1]) != j {
                // Rotate to y P w+ z P w, then orient it as w ... y for case 1.
                self.stats.maxdeg_case2_rotation += 1;
                let mut rotated: Vec<usize> = p[..k].to_vec();
                rotated.extend(p[k..].iter().rev());
                rotated.reverse();
                return self.maxdeg_case1(g, targets, rotated, x, i, j, depth);
            }
        }
        let mut on = vec![false; g.n()];
        on[x] = true;
        p.iter().for_each(|&v| on[v] = true);
        if let Some(a) = (0..g.n()).find(|&a| !on[a] && g.color(x, a) == i && g.color(z, a) != j) {
            self.stats.maxdeg_case2_extend += 1;
            let mut vertices = p.clone();
            vertices.push(a);
            vertices.push(x);
            return Ok(WitnessPath {
                avoided_color: j,
                vertices,
            });
        }
        Err(self.contradiction("case 2"))
    }

    /// Turns a color-`j`-avoiding cycle of length `l_j - 1` (listed in cyclic
    /// order) into a witness.
    pub fn lemcycle_resolve(
        &mut self,
        g: &EdgeColoring,
        targets: &[usize],
        cycle: Vec<usize>,
        j: usize,
        depth: usize,
    ) -> Result<WitnessPath, ExtractError> {
        self.stats.cycle_calls += 1;
        let s = g.n();
        let t = targets.len();
        let lj = targets[j - 1];
        let len = cycle.len();
        self.record(depth, "cycle", s, targets, None, Some(len));
        ensure!(
            len + 1 == lj,
            "cycle length {len} is not l_j - 1 = {}",
            lj - 1
        );
        ensure!(
            len >= 3 && (0..len).all(|k| g.color(cycle[k], cycle[(k + 1) % len]) != j),
            "cycle {cycle:?} is not color-{j}-avoiding"
        );
        let q_side = others(s, &cycle);
        let q = q_side.len();
        ensure!(q >= 1, "no vertex outside the cycle");

        // A non-j edge from the cycle to the outside opens it into a path.
        for (k, &cv) in cycle.iter().enumerate() {
            if let Some(&u) = q_side.iter().find(|&&u| g.color(cv, u) != j) {
                self.stats.cycle_cross_edge += 1;
                let mut vertices: Vec<usize> = (1..=len).map(|d| cycle[(k + d) % len]).collect();
                vertices.push(u);
                return Ok(WitnessPath {
                    avoided_color: j,
                    vertices,
                });
            }
        }

        // Every edge between the cycle C and Q has color j.
        let best_other = |limit: usize| {
            (1..=t)
                .filter(|&c| c != j && targets[c - 1] <= limit)
                .min_by_key(|&c| (targets[c - 1], c))
        };
        let truncated = |mut path: Vec<usize>, color: usize| {
            path.truncate(targets[color - 1]);
            WitnessPath {
                avoided_color: color,
                vertices: path,
            }
        };

        if len == q {
            self.stats.cycle_hamilton += 1;
            let path = zigzag(&cycle, &q_side);
            let color = best_other(path.len());
            let color = match color {
                Some(c) => c,
                None => {
                    return Err(ExtractError::Invariant(format!(
                        "Hamilton path of order {} serves no color",
                        path.len()
                    )))
                }
            };
            return Ok(truncated(path, color));
        }

        if len < q {
            let path = zigzag(&q_side, &cycle);
            ensure!(path.len() == 2 * lj - 1, "zigzag has order {}", path.len());
            if let Some(color) = best_other(path.len()) {
                self.stats.cycle_case1_direct += 1;
                return Ok(truncated(path, color));
            }
            self.stats.cycle_case1_recurse += 1;
            let shift = lj - 1;
            ensure!(
                (1..=t).all(|c| c == j || targets[c - 1] >= 2 * lj),
                "a target below 2 l_j survived case 1"
            );
            let sub_targets: Vec<usize> = (1..=t)
                .map(|c| {
                    if c == j {
                        lj
                    } else {
                        targets[c - 1] - 2 * shift
                    }
                })
                .collect();
            let p_sub = p_of(&sub_targets)?;
            ensure!(
                p_sub <= q,
                "inside-Q instance needs {p_sub} > q = {q} vertices"
            );
            let (gq, back) = g.induced_subgraph(&q_side)?;
            let w = lift(self.solve(&gq, &sub_targets, depth + 1)?, &back);
            if w.avoided_color == j {
                return Ok(w);
            }
            let near: Vec<usize> = q_side
                .iter()
                .copied()
                .filter(|v| !w.vertices.contains(v))
                .collect();
            ensure!(
                near.len() >= shift,
                "only {} spare vertices in Q, need {shift}",
                near.len()
            );
            return alternate_extend(g, &w, &near[..shift], &cycle, j)
                .map_err(|e| ExtractError::Invariant(e.to_string()));
        }

        // len > q
        let path = zigzag(&cycle, &q_side);
        ensure!(path.len() == 2 * q + 1, "zigzag has order {}", path.len());
        if let Some(color) = best_other(path.len()) {
            self.stats.cycle_case2_direct += 1;
            return Ok(truncated(path, color));
        }
        self.stats.cycle_case2_recurse += 1;
        ensure!(s == q + lj - 1, "s = {s} is not q + l_j - 1");
        let partner = merge_partner(targets, j);
        let map = ColorMergeMap::merging(t, &[j, partner])?;
        let sub_target = |c: usize| targets[c - 1] - 2 * q;
        let p_sub = p_of(
            &(1..=t)
                .filter(|&c| c != j)
                .map(sub_target)
                .collect::<Vec<_>>(),
        )?;
        ensure!(
            p_sub < lj,
            "inside-C instance needs {p_sub} > l_j - 1 = {} vertices",
            lj - 1
        );
        let (gc, back) = g.induced_subgraph(&cycle)?;
        let w = lift(
            self.solve_merged(&gc, &map, partner, sub_target, depth)?,
            &back,
        );
        ensure!(
            w.avoided_color != j,
            "inside-C witness avoids the cycle color"
        );
        let near: Vec<usize> = cycle
            .iter()
            .copied()
            .filter(|v| !w.vertices.contains(v))
            .collect();
        ensure!(
            near.len() >= q,
            "only {} spare vertices in C, need {q}",
            near.len()
        );
        alternate_extend(g, &w, &near[..q], &q_side, j)
            .map_err(|e| ExtractError::Invariant(e.to_string()))
    }
}
