use proptest::prelude::*;

use pathramsey::coloring::{validate_witness, ColorMergeMap, EdgeColoring, WitnessPath};
use pathramsey::formula::{p_of, p_value_sorted, r_value, s_value, Branch};
use pathramsey::oracle::{longest_avoiding_path, random_coloring};

fn sorted_tuple(max_t: usize, lmax: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2..=lmax, 2..=max_t).prop_map(|mut v| {
        v.sort_unstable();
        v
    })
}

fn coloring(max_n: usize, max_t: usize) -> impl Strategy<Value = EdgeColoring> {
    (1..=max_n, 2..=max_t, any::<u64>()).prop_map(|(n, t, seed)| random_coloring(n, t, seed))
}

/// Longest avoiding path by exhaustive vertex sequences.
fn brute_longest(c: &EdgeColoring, avoided: usize) -> usize {
    fn go(c: &EdgeColoring, avoided: usize, path: &mut Vec<usize>, best: &mut usize) {
        *best = (*best).max(path.len());
        for v in 0..c.n() {
            let ok = !path.contains(&v) && path.last().is_none_or(|&u| c.color(u, v) != avoided);
            if ok {
                path.push(v);
                go(c, avoided, path, best);
                path.pop();
            }
        }
    }
    let mut best = 0;
    go(c, avoided, &mut Vec::new(), &mut best);
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn symmetric_value_matches_closed_form(l in 2usize..=200, t in 2usize..=12) {
        let p = p_of(&vec![l; t]).unwrap();
        prop_assert_eq!(p, r_value(l, t).unwrap());
        prop_assert_eq!(p, l + (l - 2) / ((1 << t) - 2));
    }

    #[test]
    fn value_ignores_color_order(mut v in sorted_tuple(6, 40), rot in 0usize..6) {
        let p = p_of(&v).unwrap();
        let k = rot % v.len();
        v.rotate_left(k);
        v.reverse();
        prop_assert_eq!(p_of(&v).unwrap(), p);
    }

    #[test]
    fn value_is_monotone(v in sorted_tuple(6, 40), idx in 0usize..6) {
        let p = p_of(&v).unwrap();
        let mut w = v.clone();
        w[idx % v.len()] += 1;
        prop_assert!(p_of(&w).unwrap() >= p);
    }

    #[test]
    fn value_between_smallest_target_and_two_color_value(v in sorted_tuple(6, 60)) {
        let p = p_of(&v).unwrap();
        // A monochromatic K_{l_1 - 1} in color t shows p >= l_1.
        prop_assert!(p >= v[0]);
        prop_assert!(p < v[1] + v[0] / 2);
    }

    #[test]
    fn appending_a_huge_target_changes_nothing(v in sorted_tuple(5, 40)) {
        let (p, _) = p_value_sorted(&v).unwrap();
        let mut w = v.clone();
        w.push(p.max(*v.last().unwrap()));
        let (q, trace) = p_value_sorted(&w).unwrap();
        prop_assert_eq!(q, p);
        prop_assert_eq!(trace.branch, Branch::GenEquality);
    }

    #[test]
    fn main_branch_reduction_stays_below_s(
        v in (4usize..=30, prop::collection::vec(0usize..4, 2..=4)).prop_map(|(base, steps)| {
            let mut v = vec![base];
            for d in steps {
                v.push(v.last().unwrap() + d);
            }
            v
        })
    ) {
        let (p, trace) = p_value_sorted(&v).unwrap();
        let t = v.len();
        prop_assume!(trace.branch == Branch::MainFormula && v[0] >= 4 && v[t - 1] <= p);
        prop_assert_eq!(Some(p), trace.s_value);
        prop_assert_eq!(p, s_value(&v).unwrap());
        for keep in 0..t {
            let reduced: Vec<usize> =
                v.iter().enumerate().map(|(k, &l)| if k == keep { l } else { l - 2 }).collect();
            prop_assert!(p_of(&reduced).unwrap() < p, "{:?} keep {}", v, keep);
        }
    }

    #[test]
    fn coloring_json_round_trip(c in coloring(12, 5)) {
        let text = serde_json::to_string(&c).unwrap();
        let back: EdgeColoring = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn witness_json_round_trip(color in 1usize..5, vertices in prop::collection::vec(0usize..50, 0..10)) {
        let w = WitnessPath { avoided_color: color, vertices };
        let back: WitnessPath = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn oracle_matches_brute_force(c in coloring(7, 3)) {
        for j in 1..=c.t() {
            let p = longest_avoiding_path(&c, j, None).unwrap();
            prop_assert_eq!(p.order, brute_longest(&c, j));
            let w = WitnessPath { avoided_color: j, vertices: p.vertices };
            prop_assert!(validate_witness(&c, &w, w.order()));
        }
    }

    #[test]
    fn oracle_invariant_under_relabeling(c in coloring(12, 3), shift in 0usize..12) {
        let n = c.n();
        let order: Vec<usize> = (0..n).map(|k| (k * 5 + shift) % n).collect();
        prop_assume!({ let mut o = order.clone(); o.sort(); o.dedup(); o.len() == n });
        let (relabeled, _) = c.induced_subgraph(&order).unwrap();
        for j in 1..=c.t() {
            prop_assert_eq!(
                longest_avoiding_path(&c, j, None).unwrap().order,
                longest_avoiding_path(&relabeled, j, None).unwrap().order
            );
        }
    }

    #[test]
    fn merging_colors_never_lengthens_avoiding_paths(c in coloring(10, 4), a in 1usize..=4, b in 1usize..=4) {
        let t = c.t();
        let (a, b) = (a.min(t), b.min(t));
        prop_assume!(a != b);
        let map = ColorMergeMap::merging(t, &[a, b]).unwrap();
        let merged = c.merge_colors(&map).unwrap();
        let class = map.class_of(a);
        let merged_order = longest_avoiding_path(&merged, class, None).unwrap().order;
        for src in [a, b] {
            prop_assert!(merged_order <= longest_avoiding_path(&c, src, None).unwrap().order);
        }
        // Any other color keeps exactly the same avoiding graph.
        for other in (1..=t).filter(|&x| x != a && x != b) {
            let before = longest_avoiding_path(&c, other, None).unwrap().order;
            let after = longest_avoiding_path(&merged, map.class_of(other), None).unwrap().order;
            prop_assert_eq!(after, before);
        }
    }

    #[test]
    fn stop_at_is_consistent(c in coloring(12, 3), k in 1usize..14) {
        for j in 1..=c.t() {
            let exact = longest_avoiding_path(&c, j, None).unwrap().order;
            let early = longest_avoiding_path(&c, j, Some(k)).unwrap();
            prop_assert!(early.order <= exact);
            prop_assert!(early.order >= k.min(exact));
            let w = WitnessPath { avoided_color: j, vertices: early.vertices };
            prop_assert!(validate_witness(&c, &w, early.order));
        }
    }

    #[test]
    fn induced_subgraph_preserves_colors(c in coloring(12, 4), mask in any::<u16>()) {
        let subset: Vec<usize> = (0..c.n()).filter(|v| mask >> v & 1 == 1).collect();
        prop_assume!(!subset.is_empty());
        let (sub, back) = c.induced_subgraph(&subset).unwrap();
        for v in 1..sub.n() {
            for u in 0..v {
                prop_assert_eq!(sub.color(u, v), c.color(back[u], back[v]));
            }
        }
    }
}
