//! End-to-end certification over a grid of target tuples: closed form,
//! extremal construction checked by the oracle, and extraction (plus
//! exhaustive enumeration where it fits the budget) on `K_p`.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::extract::{ExtractStats, Extractor};
use crate::extremal::{construct_extremal, PartitionBranch};
use crate::formula::{p_value, Branch, TargetLengths};
use crate::oracle::{is_valid_lower_witness, random_coloring, ORACLE_MAX_N};
use crate::search::{exhaustive_verify_upper, SearchOptions, Verdict};

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub tmax: usize,
    pub lmax: usize,
    /// Certify only the constant tuples `(l, ..., l)` for `t = 2..=tmax`.
    pub symmetric: Option<usize>,
    pub fuzz_seeds: u64,
    pub seed: u64,
    pub jobs: usize,
    /// Largest number of colorings enumerated per tuple for exhaustive evidence.
    pub exhaustive_budget: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            tmax: 3,
            lmax: 10,
            symmetric: None,
            fuzz_seeds: 20,
            seed: 0,
            jobs: 1,
            exhaustive_budget: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperEvidence {
    /// Colorings of `K_p` enumerated, when the whole space fit the budget.
    pub exhaustive_colorings: Option<u64>,
    pub fuzz_runs: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TupleResult {
    pub targets: Vec<usize>,
    pub p: usize,
    pub branch: Branch,
    pub construction: Option<PartitionBranch>,
    pub lower_bound_certified: bool,
    pub upper_bound_certified: bool,
    pub upper: UpperEvidence,
    pub failures: Vec<String>,
    pub elapsed_secs: f64,
}

impl TupleResult {
    pub fn certified(&self) -> bool {
        self.lower_bound_certified && self.upper_bound_certified
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub grid: String,
    pub tuples: Vec<TupleResult>,
    pub all_certified: bool,
    pub extract_stats: ExtractStats,
    pub elapsed_secs: f64,
}

/// Sorted tuples of the grid, in lexicographic order within each `t`.
pub fn grid(opts: &CertifyOptions) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for t in 2..=opts.tmax {
        if let Some(l) = opts.symmetric {
            out.push(vec![l; t]);
            continue;
        }
        let mut tuple = vec![2; t];
        loop {
            out.push(tuple.clone());
            // Next nondecreasing tuple with entries in 2..=lmax.
            let Some(k) = (0..t).rev().find(|&k| tuple[k] < opts.lmax) else {
                break;
            };
            let v = tuple[k] + 1;
            tuple[k..].iter_mut().for_each(|x| *x = v);
        }
    }
    out
}

fn grid_name(opts: &CertifyOptions) -> String {
    match opts.symmetric {
        Some(l) => format!("t in 2..={}, symmetric l = {l}", opts.tmax),
        None => format!(
            "t in 2..={}, sorted tuples with 2 <= l_i <= {}",
            opts.tmax, opts.lmax
        ),
    }
}

/// Certifies a single tuple; returns the result and the extraction counters.
pub fn certify_tuple(targets: &[usize], opts: &CertifyOptions) -> (TupleResult, ExtractStats) {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut stats = ExtractStats::default();
    let lengths = match TargetLengths::new(targets) {
        Ok(l) => l,
        Err(e) => {
            let result = TupleResult {
                targets: targets.to_vec(),
                p: 0,
                branch: Branch::TwoColorBase,
                construction: None,
                lower_bound_certified: false,
                upper_bound_certified: false,
                upper: UpperEvidence {
                    exhaustive_colorings: None,
                    fuzz_runs: 0,
                },
                failures: vec![e.to_string()],
                elapsed_secs: 0.0,
            };
            return (result, stats);
        }
    };
    let (p, trace) = p_value(&lengths).expect("valid lengths");
    let t = targets.len();

    let mut construction = None;
    let lower = match construct_extremal(&lengths) {
        Ok((c, spec)) => {
            construction = Some(spec.branch);
            if c.n() + 1 != p {
                failures.push(format!(
                    "construction has {} vertices, expected {}",
                    c.n(),
                    p - 1
                ));
                false
            } else if c.n() > ORACLE_MAX_N {
                failures.push(format!("K_{} is beyond oracle capability", c.n()));
                false
            } else {
                match is_valid_lower_witness(&c, &lengths) {
                    Ok(true) => true,
                    Ok(false) => {
                        failures.push("extremal coloring contains a witness".into());
                        false
                    }
                    Err(e) => {
                        failures.push(e.to_string());
                        false
                    }
                }
            }
        }
        Err(e) => {
            failures.push(format!("construction failed: {e}"));
            false
        }
    };

    let mut upper_ok = true;
    let mut exhaustive_colorings = None;
    let options = SearchOptions {
        jobs: 1,
        budget: opts.exhaustive_budget,
        ..Default::default()
    };
    if let Ok(report) = exhaustive_verify_upper(p, &lengths, options) {
        if report.verdict == Verdict::AllColoringsContainWitness {
            exhaustive_colorings = Some(report.colorings_verified);
        } else {
            upper_ok = false;
            failures.push(format!("exhaustive search found a counterexample on K_{p}"));
        }
    }

    let mut fuzz_runs = 0;
    for k in 0..opts.fuzz_seeds {
        let seed = opts.seed.wrapping_mul(1_000_003).wrapping_add(k);
        let c = random_coloring(p, t, seed);
        let mut ex = Extractor::new();
        let outcome = ex.run(&c, targets);
        stats.absorb(ex.stats());
        fuzz_runs += 1;
        if let Err(e) = outcome {
            upper_ok = false;
            failures.push(format!("extraction failed for seed {seed}: {e}"));
        }
    }

    let result = TupleResult {
        targets: targets.to_vec(),
        p,
        branch: trace.branch,
        construction,
        lower_bound_certified: lower,
        upper_bound_certified: upper_ok,
        upper: UpperEvidence {
            exhaustive_colorings,
            fuzz_runs,
        },
        failures,
        elapsed_secs: start.elapsed().as_secs_f64(),
    };
    (result, stats)
}

pub fn certify(opts: &CertifyOptions) -> CertifyReport {
    let start = Instant::now();
    let tuples = grid(opts);
    let run = || -> Vec<(TupleResult, ExtractStats)> {
        tuples
            .par_iter()
            .map(|tuple| certify_tuple(tuple, opts))
            .collect()
    };
    let results = match rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(_) => tuples
            .iter()
            .map(|tuple| certify_tuple(tuple, opts))
            .collect(),
    };
    let mut extract_stats = ExtractStats::default();
    let mut out = Vec::with_capacity(results.len());
    for (result, stats) in results {
        extract_stats.absorb(&stats);
        out.push(result);
    }
    CertifyReport {
        grid: grid_name(opts),
        all_certified: out.iter().all(TupleResult::certified),
        tuples: out,
        extract_stats,
        elapsed_secs: start.elapsed().as_secs_f64(),
    }
}
