//! Edge colorings of complete graphs and color-avoiding witness paths.
//!
//! Edges are stored in the canonical triangular order: for `v = 1..n`, for
//! `u = 0..v`, the color of `{u, v}`. Induced prefixes of the vertex set are
//! therefore prefixes of the edge list. Colors are 1-based.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("expected {expected} edge colors for n = {n}, got {got}")]
    LengthMismatch {
        n: usize,
        expected: usize,
        got: usize,
    },
    #[error("edge {index} has color {color}, outside 1..={t}")]
    ColorOutOfRange {
        index: usize,
        color: usize,
        t: usize,
    },
    #[error("color count {0} is not supported (must be 1..=255)")]
    BadColorCount(usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {0} repeated in subset")]
    DuplicateVertex(usize),
    #[error("vertex subset is empty")]
    EmptySubset,
    #[error("invalid color merge map: {0}")]
    InvalidMerge(String),
}

/// Position of `{u, v}` in the canonical edge list.
#[inline]
pub fn edge_index(u: usize, v: usize) -> usize {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    debug_assert!(a != b);
    b * (b - 1) / 2 + a
}

#[inline]
pub fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A t-coloring of the edges of `K_n` on vertices `0..n`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeColoring {
    n: usize,
    t: usize,
    colors: Vec<u8>,
}

/// Wire form: `{"n": .., "t": .., "edges": [..]}`.
#[derive(Serialize, Deserialize)]
struct ColoringDoc {
    n: usize,
    t: usize,
    edges: Vec<usize>,
}

impl Serialize for EdgeColoring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ColoringDoc {
            n: self.n,
            t: self.t,
            edges: self.colors.iter().map(|&c| c as usize).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EdgeColoring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = ColoringDoc::deserialize(d)?;
        EdgeColoring::new(doc.n, doc.t, &doc.edges).map_err(serde::de::Error::custom)
    }
}

impl EdgeColoring {
    /// Builds a coloring from the canonical triangular edge list.
    pub fn new(n: usize, t: usize, edge_colors: &[usize]) -> Result<Self, ColoringError> {
        if t == 0 || t > u8::MAX as usize {
            return Err(ColoringError::BadColorCount(t));
        }
        let expected = edge_count(n);
        if edge_colors.len() != expected {
            return Err(ColoringError::LengthMismatch {
                n,
                expected,
                got: edge_colors.len(),
            });
        }
        let mut colors = Vec::with_capacity(expected);
        for (index, &color) in edge_colors.iter().enumerate() {
            if color == 0 || color > t {
                return Err(ColoringError::ColorOutOfRange { index, color, t });
            }
            colors.push(color as u8);
        }
        Ok(EdgeColoring { n, t, colors })
    }

    /// Builds a coloring by evaluating `f(u, v)` (with `u < v`) for every edge.
    pub fn from_fn(
        n: usize,
        t: usize,
        mut f: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self, ColoringError> {
        let mut edges = Vec::with_capacity(edge_count(n));
        for v in 1..n {
            for u in 0..v {
                edges.push(f(u, v));
            }
        }
        Self::new(n, t, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Color of `{u, v}`; symmetric in its arguments.
    #[inline]
    pub fn color(&self, u: usize, v: usize) -> usize {
        self.colors[edge_index(u, v)] as usize
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.colors.iter().map(|&c| c as usize)
    }

    /// Number of color-`color` edges at `v`.
    pub fn color_degree(&self, v: usize, color: usize) -> usize {
        (0..self.n)
            .filter(|&u| u != v && self.color(u, v) == color)
            .count()
    }

    /// Neighbor bitmasks of the graph formed by edges whose color is not `avoided`.
    /// Only meaningful for `n <= 64`.
    pub fn avoiding_masks(&self, avoided: usize) -> Vec<u64> {
        assert!(self.n <= 64, "bitmask adjacency needs n <= 64");
        let mut adj = vec![0u64; self.n];
        for v in 1..self.n {
            for u in 0..v {
                if self.color(u, v) != avoided {
                    adj[u] |= 1 << v;
                    adj[v] |= 1 << u;
                }
            }
        }
        adj
    }

    /// Recolors through `map`. Paths avoiding a merged class here avoid every
    /// color of its preimage in `self`.
    pub fn merge_colors(&self, map: &ColorMergeMap) -> Result<EdgeColoring, ColoringError> {
        if map.source_colors() != self.t {
            return Err(ColoringError::InvalidMerge(format!(
                "map covers {} colors, coloring has {}",
                map.source_colors(),
                self.t
            )));
        }
        let colors = self
            .colors
            .iter()
            .map(|&c| map.class_of(c as usize) as u8)
            .collect();
        Ok(EdgeColoring {
            n: self.n,
            t: map.classes(),
            colors,
        })
    }

    /// The coloring induced on `subset`, relabeled to `0..subset.len()` in the
    /// given order. The returned vector maps new labels back to old ones.
    pub fn induced_subgraph(
        &self,
        subset: &[usize],
    ) -> Result<(EdgeColoring, Vec<usize>), ColoringError> {
        if subset.is_empty() {
            return Err(ColoringError::EmptySubset);
        }
        let mut seen = vec![false; self.n];
        for &v in subset {
            if v >= self.n {
                return Err(ColoringError::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(ColoringError::DuplicateVertex(v));
            }
        }
        let m = subset.len();
        let mut colors = Vec::with_capacity(edge_count(m));
        for b in 1..m {
            for a in 0..b {
                colors.push(self.colors[edge_index(subset[a], subset[b])]);
            }
        }
        Ok((
            EdgeColoring {
                n: m,
                t: self.t,
                colors,
            },
            subset.to_vec(),
        ))
    }

    /// Reinterprets the coloring with a larger palette (no edge changes).
    pub fn with_palette(&self, t: usize) -> Result<EdgeColoring, ColoringError> {
        if t < self.t || t > u8::MAX as usize {
            return Err(ColoringError::BadColorCount(t));
        }
        Ok(EdgeColoring {
            n: self.n,
            t,
            colors: self.colors.clone(),
        })
    }

    /// Renames colors: edge color `c` becomes `rename[c - 1]`.
    pub fn recolor(&self, rename: &[usize]) -> Result<EdgeColoring, ColoringError> {
        if rename.len() != self.t {
            return Err(ColoringError::InvalidMerge(format!(
                "rename table has {} entries for {} colors",
                rename.len(),
                self.t
            )));
        }
        let edges: Vec<usize> = self
            .colors
            .iter()
            .map(|&c| rename[c as usize - 1])
            .collect();
        EdgeColoring::new(self.n, self.t, &edges)
    }
}

/// A surjection from colors `1..=t` onto classes `1..=t'`.
///
/// At most one class has more than one preimage. Class labels follow the
/// order of their smallest preimage color, so unmerged colors keep their
/// relative order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorMergeMap {
    class_of: Vec<usize>,
    classes: usize,
}

impl ColorMergeMap {
    /// Validates an explicit assignment: `assignment[c - 1]` is the class of color `c`.
    pub fn new(assignment: Vec<usize>) -> Result<Self, ColoringError> {
        let t = assignment.len();
        if t == 0 {
            return Err(ColoringError::InvalidMerge("empty map".into()));
        }
        let classes = *assignment.iter().max().unwrap();
        if assignment.contains(&0) {
            return Err(ColoringError::InvalidMerge("classes are 1-based".into()));
        }
        let mut sizes = vec![0usize; classes];
        let mut first = vec![usize::MAX; classes];
        for (idx, &class) in assignment.iter().enumerate() {
            sizes[class - 1] += 1;
            first[class - 1] = first[class - 1].min(idx);
        }
        if sizes.contains(&0) {
            return Err(ColoringError::InvalidMerge(
                "some class has no preimage".into(),
            ));
        }
        if sizes.iter().filter(|&&s| s > 1).count() > 1 {
            return Err(ColoringError::InvalidMerge(
                "more than one merged class".into(),
            ));
        }
        if first.windows(2).any(|w| w[0] > w[1]) {
            return Err(ColoringError::InvalidMerge(
                "class labels do not preserve color order".into(),
            ));
        }
        Ok(ColorMergeMap {
            class_of: assignment,
            classes,
        })
    }

    /// Merges the listed colors of a `t`-coloring into one class.
    pub fn merging(t: usize, merged: &[usize]) -> Result<Self, ColoringError> {
        if merged.is_empty() || merged.iter().any(|&c| c == 0 || c > t) {
            return Err(ColoringError::InvalidMerge(format!(
                "bad merge set {merged:?} for t = {t}"
            )));
        }
        let anchor = *merged.iter().min().unwrap();
        let mut assignment = vec![0; t];
        let mut next = 0;
        for c in 1..=t {
            if merged.contains(&c) && c != anchor {
                continue;
            }
            next += 1;
            assignment[c - 1] = next;
        }
        let anchor_class = assignment[anchor - 1];
        for &c in merged {
            assignment[c - 1] = anchor_class;
        }
        Self::new(assignment)
    }

    pub fn identity(t: usize) -> Self {
        ColorMergeMap {
            class_of: (1..=t).collect(),
            classes: t,
        }
    }

    pub fn class_of(&self, color: usize) -> usize {
        self.class_of[color - 1]
    }

    pub fn source_colors(&self) -> usize {
        self.class_of.len()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Original colors mapped to `class`, ascending.
    pub fn preimage(&self, class: usize) -> Vec<usize> {
        (1..=self.class_of.len())
            .filter(|&c| self.class_of[c - 1] == class)
            .collect()
    }
}

/// A path whose edges all avoid one color. Its order is the vertex count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPath {
    pub avoided_color: usize,
    pub vertices: Vec<usize>,
}

impl WitnessPath {
    pub fn order(&self) -> usize {
        self.vertices.len()
    }
}

/// True iff `w` is a path of distinct in-range vertices, of order at least
/// `required_order`, none of whose edges has color `w.avoided_color`.
pub fn validate_witness(c: &EdgeColoring, w: &WitnessPath, required_order: usize) -> bool {
    if w.vertices.len() < required_order {
        return false;
    }
    let mut seen = vec![false; c.n()];
    for &v in &w.vertices {
        if v >= c.n() || std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    w.vertices
        .windows(2)
        .all(|e| c.color(e[0], e[1]) != w.avoided_color)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_examples() {
        let k2 = EdgeColoring::new(2, 3, &[2]).unwrap();
        assert_eq!(k2.color(0, 1), 2);

        let mono = EdgeColoring::new(3, 1, &[1, 1, 1]).unwrap();
        assert!((0..3).all(|v| mono.color_degree(v, 1) == 2));

        let c = EdgeColoring::new(3, 2, &[1, 1, 2]).unwrap();
        assert_eq!(c.color(0, 1), 1);
        assert_eq!(c.color(0, 2), 1);
        assert_eq!(c.color(1, 2), 2);
        assert_eq!(c.color(2, 1), 2);
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            EdgeColoring::new(3, 2, &[1, 1]),
            Err(ColoringError::LengthMismatch {
                n: 3,
                expected: 3,
                got: 2
            })
        );
        assert_eq!(
            EdgeColoring::new(3, 2, &[1, 3, 1]),
            Err(ColoringError::ColorOutOfRange {
                index: 1,
                color: 3,
                t: 2
            })
        );
        assert!(EdgeColoring::new(2, 2, &[0]).is_err());
        assert!(EdgeColoring::new(1, 0, &[]).is_err());
    }

    #[test]
    fn merge_examples() {
        let c = EdgeColoring::new(3, 3, &[1, 2, 3]).unwrap();
        let map = ColorMergeMap::new(vec![1, 2, 2]).unwrap();
        let m = c.merge_colors(&map).unwrap();
        assert_eq!(m.t(), 2);
        assert_eq!(m.edges().collect::<Vec<_>>(), vec![1, 2, 2]);
        assert_eq!(c.merge_colors(&ColorMergeMap::identity(3)).unwrap(), c);
        assert!(c.merge_colors(&ColorMergeMap::identity(4)).is_err());
    }

    #[test]
    fn merge_map_validation() {
        assert!(ColorMergeMap::new(vec![1, 3, 3]).is_err());
        assert!(ColorMergeMap::new(vec![1, 1, 2, 2]).is_err());
        assert!(ColorMergeMap::new(vec![2, 1, 1]).is_err());
        assert!(ColorMergeMap::new(vec![0, 1]).is_err());
        let m = ColorMergeMap::merging(4, &[1, 3]).unwrap();
        assert_eq!(
            (1..=4).map(|c| m.class_of(c)).collect::<Vec<_>>(),
            vec![1, 2, 1, 3]
        );
        assert_eq!(m.preimage(1), vec![1, 3]);
        let m = ColorMergeMap::merging(4, &[2, 3, 4]).unwrap();
        assert_eq!(
            (1..=4).map(|c| m.class_of(c)).collect::<Vec<_>>(),
            vec![1, 2, 2, 2]
        );
    }

    #[test]
    fn induced_examples() {
        let c = EdgeColoring::new(4, 3, &[1, 2, 3, 1, 2, 3]).unwrap();
        let (full, back) = c.induced_subgraph(&[0, 1, 2, 3]).unwrap();
        assert_eq!(full, c);
        assert_eq!(back, vec![0, 1, 2, 3]);

        let (k1, back) = c.induced_subgraph(&[2]).unwrap();
        assert_eq!((k1.n(), k1.edges().count(), back), (1, 0, vec![2]));

        let (k3, back) = c.induced_subgraph(&[0, 2, 3]).unwrap();
        for a in 0..3 {
            for b in 0..a {
                assert_eq!(k3.color(a, b), c.color(back[a], back[b]));
            }
        }
        assert_eq!(c.induced_subgraph(&[]), Err(ColoringError::EmptySubset));
        assert!(c.induced_subgraph(&[4]).is_err());
        assert!(c.induced_subgraph(&[1, 1]).is_err());
    }

    #[test]
    fn witness_checks() {
        let tri = EdgeColoring::new(3, 2, &[1, 1, 1]).unwrap();
        let ok = WitnessPath {
            avoided_color: 2,
            vertices: vec![0, 1, 2],
        };
        assert!(validate_witness(&tri, &ok, 3));
        assert!(!validate_witness(&tri, &ok, 4));
        let bad = WitnessPath {
            avoided_color: 1,
            vertices: vec![0, 1],
        };
        assert!(!validate_witness(&tri, &bad, 2));
        let repeated = WitnessPath {
            avoided_color: 2,
            vertices: vec![0, 1, 0],
        };
        assert!(!validate_witness(&tri, &repeated, 3));
        let out_of_range = WitnessPath {
            avoided_color: 2,
            vertices: vec![0, 3],
        };
        assert!(!validate_witness(&tri, &out_of_range, 2));
    }

    #[test]
    fn json_shape() {
        let c = EdgeColoring::new(3, 2, &[1, 1, 2]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"n":3,"t":2,"edges":[1,1,2]}"#);
        let w = WitnessPath {
            avoided_color: 2,
            vertices: vec![0, 1],
        };
        assert_eq!(
            serde_json::to_string(&w).unwrap(),
            r#"{"avoided_color":2,"vertices":[0,1]}"#
        );
        assert!(serde_json::from_str::<EdgeColoring>(r#"{"n":3,"t":2,"edges":[1,1]}"#).is_err());
    }
}
