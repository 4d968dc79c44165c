use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use pathramsey::certify::{certify, CertifyOptions};
use pathramsey::extract::{ExtractError, Extractor};
use pathramsey::formula::{p_value, r_value, TargetLengths};
use pathramsey::oracle::{is_valid_lower_witness, longest_avoiding_path, ORACLE_MAX_N};
use pathramsey::search::{exhaustive_verify_upper, SearchOptions, Verdict, DEFAULT_BUDGET};
use pathramsey::{construct_extremal, validate_witness, EdgeColoring};

#[derive(Parser)]
#[command(
    name = "pathramsey",
    version,
    about = "Multicolor path-avoidance Ramsey numbers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Lengths {
    /// Target path orders, one per color.
    #[arg(required = true, num_args = 1..)]
    lengths: Vec<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print p for the given targets, or R(l, t) with --symmetric.
    Value {
        #[arg(long, num_args = 2, value_names = ["L", "T"], conflicts_with = "lengths")]
        symmetric: Option<Vec<usize>>,
        lengths: Vec<usize>,
    },
    /// Build the extremal coloring of K_{p-1}.
    Construct {
        #[command(flatten)]
        lengths: Lengths,
        /// Coloring file; the partition goes to `<out>.partition.json`. Stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a coloring avoids every target (exit 1 if not).
    Verify {
        /// Coloring JSON file, `-` for stdin.
        coloring: String,
        #[command(flatten)]
        lengths: Lengths,
    },
    /// Find a witness path in a coloring of K_n with n >= p.
    Extract {
        coloring: String,
        #[command(flatten)]
        lengths: Lengths,
        /// Include the recursion trace in the output.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate every coloring of K_n.
    Search {
        n: usize,
        #[command(flatten)]
        lengths: Lengths,
        #[arg(long)]
        prune_color_symmetry: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Certify p on a grid of tuples from both sides.
    Certify {
        #[arg(long, default_value_t = 3)]
        tmax: usize,
        #[arg(long, default_value_t = 10)]
        lmax: usize,
        #[arg(long)]
        symmetric: Option<usize>,
        #[arg(long, default_value_t = 20)]
        fuzz_seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Failure carrying its exit code: 1 for mathematical failures, 2 for usage.
struct Failure(u8, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(2, msg.to_string())
}

type Outcome = Result<u8, Failure>;

fn emit(value: &serde_json::Value) {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    // A closed pipe downstream is not an error for us.
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(usage)?;
    fs::write(path, text + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_coloring(arg: &str) -> Result<EdgeColoring, Failure> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(usage)?;
        s
    } else {
        fs::read_to_string(arg).map_err(|e| usage(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("{arg}: {e}")))
}

fn targets(lengths: &[usize]) -> Result<TargetLengths, Failure> {
    TargetLengths::new(lengths).map_err(usage)
}

fn cmd_value(symmetric: Option<Vec<usize>>, lengths: Vec<usize>) -> Outcome {
    if let Some(lt) = symmetric {
        let (l, t) = (lt[0], lt[1]);
        let r = r_value(l, t).map_err(usage)?;
        let (_, trace) = p_value(&targets(&vec![l; t])?).map_err(usage)?;
        emit(&json!({ "value": r, "trace": trace }));
        eprintln!("R({l}, {t}) = {r}");
        return Ok(0);
    }
    if lengths.is_empty() {
        return Err(usage("give target lengths or --symmetric L T"));
    }
    let (p, trace) = p_value(&targets(&lengths)?).map_err(usage)?;
    emit(&json!({ "value": p, "trace": trace }));
    eprintln!("p = {p} ({:?})", trace.branch);
    Ok(0)
}

fn cmd_construct(lengths: &[usize], out: Option<PathBuf>) -> Outcome {
    let lengths = targets(lengths)?;
    let (c, spec) = construct_extremal(&lengths).map_err(usage)?;
    let sidecar = spec.sidecar();
    match &out {
        Some(path) => {
            write_json(path, &c)?;
            let mut side = path.as_os_str().to_owned();
            side.push(".partition.json");
            write_json(Path::new(&side), &sidecar)?;
            eprintln!("wrote K_{} to {}", c.n(), path.display());
        }
        None => emit(&json!({ "coloring": c, "partition": sidecar })),
    }
    eprintln!("sizes {:?}, branch {:?}", sidecar.sizes, sidecar.branch);
    if c.n() <= ORACLE_MAX_N {
        let ok = is_valid_lower_witness(&c, &lengths).map_err(usage)?;
        if !ok {
            return Err(Failure(
                1,
                "self-check failed: construction contains a witness".into(),
            ));
        }
        eprintln!("self-check passed");
    } else {
        eprintln!("self-check skipped: K_{} beyond oracle capability", c.n());
    }
    Ok(0)
}

fn cmd_verify(file: &str, lengths: &[usize]) -> Outcome {
    let c = read_coloring(file)?;
    let lengths = targets(lengths)?;
    if c.t() != lengths.len() {
        return Err(usage(format!(
            "coloring has {} colors, {} targets given",
            c.t(),
            lengths.len()
        )));
    }
    let mut per_color = Vec::new();
    let mut valid = true;
    for j in 1..=c.t() {
        let path = longest_avoiding_path(&c, j, None).map_err(usage)?;
        let target = lengths.target_of(j);
        valid &= path.order < target;
        per_color.push(json!({
            "color": j,
            "target": target,
            "longest_avoiding_order": path.order,
            "path": path.vertices,
        }));
    }
    emit(&json!({ "n": c.n(), "valid_lower_witness": valid, "colors": per_color }));
    eprintln!(
        "{}",
        if valid {
            "avoids every target"
        } else {
            "contains a witness"
        }
    );
    Ok(if valid { 0 } else { 1 })
}

fn cmd_extract(file: &str, lengths: &[usize], trace: bool, out: Option<PathBuf>) -> Outcome {
    let c = read_coloring(file)?;
    let per_color = targets(lengths)?.per_color();
    let mut ex = Extractor::new();
    let w = ex.run(&c, &per_color).map_err(|e| match e {
        ExtractError::Invariant(_) => Failure(1, e.to_string()),
        _ => usage(e),
    })?;
    let required = per_color[w.avoided_color - 1];
    if !validate_witness(&c, &w, required) {
        return Err(Failure(1, format!("emitted path failed validation: {w:?}")));
    }
    if let Some(path) = &out {
        write_json(path, &w)?;
    }
    let mut doc = json!({ "witness": w, "stats": ex.stats() });
    if trace {
        doc["trace"] = json!(ex.trace());
    }
    emit(&doc);
    eprintln!(
        "path of order {} avoiding color {}",
        w.order(),
        w.avoided_color
    );
    Ok(0)
}

fn cmd_search(n: usize, lengths: &[usize], options: SearchOptions) -> Outcome {
    let lengths = targets(lengths)?;
    let report = exhaustive_verify_upper(n, &lengths, options).map_err(usage)?;
    emit(&json!(report));
    eprintln!(
        "{:?} after {} colorings in {:.2}s",
        report.verdict, report.colorings_examined, report.elapsed_secs
    );
    Ok(match report.verdict {
        Verdict::AllColoringsContainWitness => 0,
        Verdict::CounterexampleFound => 1,
    })
}

fn cmd_certify(opts: CertifyOptions) -> Outcome {
    if opts.tmax < 2 || (opts.symmetric.is_none() && opts.lmax < 2) {
        return Err(usage("need --tmax >= 2 and --lmax >= 2"));
    }
    if opts.symmetric.is_some_and(|l| l < 2) {
        return Err(usage("--symmetric needs l >= 2"));
    }
    let report = certify(&opts);
    emit(&json!(report));
    let failing: Vec<_> = report.tuples.iter().filter(|r| !r.certified()).collect();
    eprintln!(
        "{} tuples, {} failing, {:.2}s",
        report.tuples.len(),
        failing.len(),
        report.elapsed_secs
    );
    for r in &failing {
        eprintln!("  {:?}: {}", r.targets, r.failures.join("; "));
    }
    Ok(if failing.is_empty() { 0 } else { 1 })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Value { symmetric, lengths } => cmd_value(symmetric, lengths),
        Command::Construct { lengths, out } => cmd_construct(&lengths.lengths, out),
        Command::Verify { coloring, lengths } => cmd_verify(&coloring, &lengths.lengths),
        Command::Extract {
            coloring,
            lengths,
            trace,
            out,
        } => cmd_extract(&coloring, &lengths.lengths, trace, out),
        Command::Search {
            n,
            lengths,
            prune_color_symmetry,
            jobs,
            budget,
        } => {
            let options = SearchOptions {
                prune_color_symmetry,
                jobs,
                budget,
            };
            cmd_search(n, &lengths.lengths, options)
        }
        Command::Certify {
            tmax,
            lmax,
            symmetric,
            fuzz_seeds,
            seed,
            jobs,
        } => {
            let opts = CertifyOptions {
                tmax,
                lmax,
                symmetric,
                fuzz_seeds,
                seed,
                jobs,
                ..Default::default()
            };
            cmd_certify(opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
