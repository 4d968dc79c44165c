//! Acceptance suite. Every criterion prints one PASS/FAIL line; the test fails
//! if any criterion fails.

// Rows are written exactly as the constraint system states them.
#![allow(clippy::int_plus_one, clippy::type_complexity)]

use std::time::{Duration, Instant};

use pathramsey::coloring::validate_witness;
use pathramsey::extract::Extractor;
use pathramsey::extremal::{construct_extremal, PartitionBranch, PartitionSpec};
use pathramsey::formula::{p_value, r_value, TargetLengths};
use pathramsey::oracle::{is_valid_lower_witness, longest_avoiding_path, random_coloring};
use pathramsey::search::{exhaustive_verify_upper, SearchOptions, Verdict};

type Outcome = Result<String, String>;

/// Sorted tuples of length `t` with entries in `2..=lmax`.
fn sorted_tuples(t: usize, lmax: usize) -> Vec<Vec<usize>> {
    fn rec(t: usize, lo: usize, lmax: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for l in lo..=lmax {
            cur.push(l);
            rec(t, l, lmax, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(t, 2, lmax, &mut Vec::new(), &mut out);
    out
}

/// The lower-bound grid: t = 2 up to 14, t = 3 up to 12, t = 4 constant up to 16.
fn lower_grid() -> Vec<Vec<usize>> {
    let mut g = sorted_tuples(2, 14);
    g.extend(sorted_tuples(3, 12));
    g.extend((2..=16).map(|l| vec![l; 4]));
    g
}

fn tl(v: &[usize]) -> TargetLengths {
    TargetLengths::new(v).unwrap()
}

fn formula_agreement() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for t in 2..=12u32 {
        for l in 2..=200usize {
            // Closed form evaluated directly in wide integers.
            let expected = l as u128 + (l as u128 - 2) / ((1u128 << t) - 2);
            let (p, _) = p_value(&tl(&vec![l; t as usize])).map_err(|e| e.to_string())?;
            let r = r_value(l, t as usize).map_err(|e| e.to_string())?;
            if p as u128 != expected || r as u128 != expected {
                return Err(format!("l={l} t={t}: p={p} r={r} expected {expected}"));
            }
            if t == 2 && p != 3 * l / 2 - 1 {
                return Err(format!("l={l} t=2: p={p} != floor(3l/2)-1"));
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{checked} (l, t) pairs in {elapsed:?}"))
}

fn lower_bound_grid() -> Outcome {
    let start = Instant::now();
    let grid = lower_grid();
    for tuple in &grid {
        let lengths = tl(tuple);
        let (p, _) = p_value(&lengths).unwrap();
        let (c, _) = construct_extremal(&lengths).map_err(|e| format!("{tuple:?}: {e}"))?;
        if c.n() != p - 1 {
            return Err(format!("{tuple:?}: {} vertices, p = {p}", c.n()));
        }
        if !is_valid_lower_witness(&c, &lengths).map_err(|e| e.to_string())? {
            return Err(format!("{tuple:?}: construction contains a witness"));
        }
    }
    Ok(format!("{} tuples in {:?}", grid.len(), start.elapsed()))
}

fn exhaustive_values() -> Outcome {
    let start = Instant::now();
    let cases: [(&[usize], usize, u64); 4] = [
        (&[4, 4], 5, 1 << 10),
        (&[3, 5], 5, 1 << 10),
        (&[4, 4, 4], 4, 729),
        (&[5, 5, 5], 5, 59049),
    ];
    for (targets, p, space) in cases {
        let lengths = tl(targets);
        let (formula, _) = p_value(&lengths).unwrap();
        if formula != p {
            return Err(format!(
                "{targets:?}: formula gives {formula}, expected {p}"
            ));
        }
        let opts = SearchOptions {
            jobs: 4,
            ..Default::default()
        };
        let up = exhaustive_verify_upper(p, &lengths, opts).map_err(|e| e.to_string())?;
        if up.verdict != Verdict::AllColoringsContainWitness || up.colorings_verified != space {
            return Err(format!(
                "{targets:?} on K_{p}: {:?} after {}",
                up.verdict, up.colorings_verified
            ));
        }
        let down = exhaustive_verify_upper(p - 1, &lengths, opts).map_err(|e| e.to_string())?;
        let cert = down
            .counterexample
            .as_ref()
            .filter(|_| down.verdict == Verdict::CounterexampleFound);
        let Some(cert) = cert else {
            return Err(format!("{targets:?}: no counterexample on K_{}", p - 1));
        };
        // Independent recheck of the certificate by brute force.
        for j in 1..=targets.len() {
            if brute_longest(cert, j) >= targets[j - 1] {
                return Err(format!(
                    "{targets:?}: certificate has a color-{j}-avoiding path"
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("4 values in {elapsed:?}"))
}

/// Longest avoiding path by trying every vertex sequence; tiny n only.
fn brute_longest(c: &pathramsey::EdgeColoring, avoided: usize) -> usize {
    fn go(c: &pathramsey::EdgeColoring, avoided: usize, path: &mut Vec<usize>, best: &mut usize) {
        *best = (*best).max(path.len());
        for v in 0..c.n() {
            if path.contains(&v) {
                continue;
            }
            if let Some(&last) = path.last() {
                if c.color(last, v) == avoided {
                    continue;
                }
            }
            path.push(v);
            go(c, avoided, path, best);
            path.pop();
        }
    }
    let mut best = 0;
    go(c, avoided, &mut Vec::new(), &mut best);
    best
}

fn extractor_fuzz() -> Outcome {
    let start = Instant::now();
    let cases: [(&[usize], usize); 4] = [
        (&[8, 10], 13),
        (&[6, 6, 6], 6),
        (&[8, 8, 8], 9),
        (&[16, 16, 16, 16], 17),
    ];
    let mut runs = 0;
    let mut contradictions = 0;
    for (targets, n) in cases {
        for seed in 0..1000u64 {
            let c = random_coloring(n, targets.len(), seed);
            let mut ex = Extractor::new();
            let w = ex
                .run(&c, targets)
                .map_err(|e| format!("{targets:?} seed {seed}: {e}"))?;
            if !validate_witness(&c, &w, targets[w.avoided_color - 1]) {
                return Err(format!("{targets:?} seed {seed}: invalid witness {w:?}"));
            }
            contradictions += ex.stats().contradictions;
            runs += 1;
        }
    }
    if contradictions != 0 {
        return Err(format!("{contradictions} contradiction branches reached"));
    }
    Ok(format!(
        "{runs} runs, 0 contradictions, {:?}",
        start.elapsed()
    ))
}

fn explicit_specs() -> Vec<(Vec<usize>, PartitionSpec)> {
    lower_grid()
        .into_iter()
        .filter_map(|tuple| {
            let (_, spec) = construct_extremal(&tl(&tuple)).ok()?;
            (spec.branch == PartitionBranch::Explicit).then_some((tuple, spec))
        })
        .collect()
}

fn constraint_system() -> Outcome {
    let specs = explicit_specs();
    if specs.is_empty() {
        return Err("no explicit-branch tuples in the grid".into());
    }
    for (l, spec) in &specs {
        let a = &spec.sizes;
        let t = l.len();
        let s = spec.s;
        let tail: usize = a[2..].iter().sum();
        let mut rows = vec![
            ("2a2+2S+1 <= l1-1", 2 * a[1] + 2 * tail + 1 <= l[0] - 1),
            ("a1+2S <= l2-1", a[0] + 2 * tail <= l[1] - 1),
            (
                "a1+...+a(t-1) = lt-1",
                a[..t - 1].iter().sum::<usize>() == l[t - 1] - 1,
            ),
            ("sum = s-1", a.iter().sum::<usize>() == s - 1),
            ("a1 >= 1", a[0] >= 1),
        ];
        for m in 3..t {
            let lhs: usize = a[..m - 1].iter().sum::<usize>() + 2 * a[m..].iter().sum::<usize>();
            rows.push(("middle equality", lhs == l[m - 1] - 1));
        }
        if let Some((row, _)) = rows.iter().find(|(_, ok)| !ok) {
            return Err(format!("{l:?} sizes {a:?} s={s}: {row} fails"));
        }
    }
    Ok(format!("{} explicit tuples", specs.len()))
}

fn structural_bound() -> Outcome {
    let specs = explicit_specs();
    let mut checks = 0;
    for (l, spec) in &specs {
        let lengths = tl(l);
        let (c, _) = construct_extremal(&lengths).unwrap();
        for j in 1..=l.len() {
            let a: usize = spec.sizes[..j - 1].iter().sum();
            let cc: usize = spec.sizes[j..].iter().sum();
            let bound = a.max(1) + 2 * cc;
            let color = lengths.colors()[j - 1];
            let longest = longest_avoiding_path(&c, color, None)
                .map_err(|e| e.to_string())?
                .order;
            if longest > bound || bound > l[j - 1] - 1 {
                return Err(format!("{l:?} slot {j}: longest {longest}, bound {bound}"));
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} (tuple, color) pairs"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("1 formula agreement", formula_agreement),
        ("2 lower-bound grid", lower_bound_grid),
        ("3 exhaustive exact values", exhaustive_values),
        ("4 extractor soundness fuzz", extractor_fuzz),
        ("5 partition constraint system", constraint_system),
        ("6 structural path bound", structural_bound),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                println!("FAIL criterion {name}: {detail}");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
